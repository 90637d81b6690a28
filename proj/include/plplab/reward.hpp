#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace plplab::reward {

// One sampled answer for a prompt: the token count of the full response,
// optionally the raw text (so the verifier can grade it), and the
// correctness verdict once it is resolved.
struct CompletionRecord {
    std::int64_t length = 1;          // token count, >= 1
    std::optional<std::string> text;  // raw model output
    std::optional<bool> correct;      // verdict; absent means "grade me"

    // Throws std::invalid_argument when length < 1 or when neither a verdict
    // nor text is available.
    void validate() const;
};

// Penalty scheme applied to the reward of a *correct* answer.
enum class Scheme {
    PlpBig,      // 1 + alpha / len^gamma
    PlpSmall,    // max(0, 1 - alpha * (1 - 1/len^gamma))
    SigmoidStd,  // 1 - alpha * sigmoid(z-score of len within its group)
    None,        // flat 1
};

// Wire names: "plp-big", "plp-small", "sigmoid-standardized", "none".
Scheme parse_scheme(const std::string& name);
const char* scheme_name(Scheme scheme);

struct RewardConfig {
    Scheme scheme = Scheme::PlpBig;
    double alpha = 4.0;
    double gamma = 0.5;

    void validate() const;  // alpha >= 0, gamma > 0
};

// Binary accuracy: 1 for a correct answer, 0 otherwise. Truncated outputs
// never produce a final answer and grade as incorrect upstream.
double accuracy_indicator(bool correct);

// Length-decaying bonus factor 1 + alpha / length^gamma.
// Strictly decreasing in length for alpha > 0, in (1, 1 + alpha]; exactly 1
// when alpha = 0. Throws std::invalid_argument for length <= 0 (the penalty
// is singular at zero length) and for invalid alpha/gamma.
double plp_factor(double length, double alpha, double gamma);

// Small-reward counterpart: a penalty that grows with length, subtracted
// from 1 and clamped at 0. At length 1 the reward is exactly 1; it decays
// toward max(0, 1 - alpha) for long answers.
double plp_small_factor(double length, double alpha, double gamma);

// Group-standardized penalty: z-scores `length` against its group (population
// stdev; z = 0 when the group is degenerate) and returns 1 - alpha * sigmoid(z).
// Result lies in [1 - alpha, 1]. Invariant under positive affine transforms of
// the whole group, which is exactly why it cannot see absolute length.
double sigmoid_standardized_reward(std::int64_t length,
                                   std::span<const std::int64_t> group_lengths,
                                   double alpha);

// Gated reward: 0 for an incorrect answer regardless of length; otherwise the
// configured scheme factor. `group_lengths` is required only for the
// sigmoid-standardized scheme (the record's peers, including itself).
// Throws std::invalid_argument on unresolved correctness or missing group.
double reward_value(const CompletionRecord& record, const RewardConfig& config,
                    std::span<const std::int64_t> group_lengths = {});

}  // namespace plplab::reward
