#pragma once

#include <span>
#include <string>
#include <vector>

namespace plplab::advantage {

// The k rewards sampled for one prompt. Leave-one-out baselines need at
// least one peer, so k >= 2 everywhere in this module.
struct RewardGroup {
    std::string group_id;
    std::vector<double> rewards;
};

enum class Estimator { Rloo, Grpo };

Estimator parse_estimator(const std::string& name);  // "rloo" | "grpo"
const char* estimator_name(Estimator estimator);

// Leave-one-out advantages: a_i = r_i - mean of the other k-1 rewards.
// Output is index-aligned with the input and sums to zero identically.
// Throws std::invalid_argument for k < 2.
std::vector<double> rloo_advantages(std::span<const double> rewards);

// Group-standardized advantages: a_i = (r_i - mean) / stdev_pop; all zeros
// when the group is degenerate (stdev = 0). Affine-invariant, which is the
// failure mode under study: a 0.01 reward gap and a 1.0 reward gap produce
// identical advantages.
std::vector<double> grpo_advantages(std::span<const double> rewards);

// Per-sample scalar weight of the policy-gradient update under the selected
// estimator.
std::vector<double> gradient_weights(std::span<const double> rewards,
                                     Estimator estimator);

// Correct-vs-incorrect advantage separation for a group built from
// `correct_rewards` followed by `incorrect_count` zero rewards.
struct SeparationReport {
    std::vector<double> advantages;  // correct entries first, then the zeros
    double min_correct_advantage = 0.0;
    double max_incorrect_advantage = 0.0;
    double gap = 0.0;  // min over correct minus max over incorrect
};

// Throws std::invalid_argument when correct_rewards is empty or
// incorrect_count < 1.
SeparationReport regime_separation(std::span<const double> correct_rewards,
                                   int incorrect_count);

}  // namespace plplab::advantage
