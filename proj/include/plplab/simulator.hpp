#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plplab/advantage.hpp"
#include "plplab/reward.hpp"
#include "plplab/rng.hpp"

namespace plplab::sim {

// A synthetic question: answers shorter than the difficulty threshold are
// unlikely to be correct, longer ones approach max_accuracy. The sigmoid
// competence curve is the minimal monotone family with a tunable threshold.
struct QuestionSpec {
    std::string question_id;
    double difficulty_threshold = 100.0;  // tokens of reasoning needed
    double max_accuracy = 1.0;            // in (0, 1]
    double steepness = 0.1;               // slope of the length->accuracy curve

    void validate() const;
};

// Softmax policy over a shared, strictly increasing ladder of answer-length
// bins; one logit row per question. The action space collapses to length
// because reward, advantage and accuracy depend on a completion only through
// (length, correctness).
struct TabularPolicy {
    std::vector<std::int64_t> bins;
    std::vector<std::string> question_ids;
    std::vector<std::vector<double>> logits;  // one row per question, one entry per bin

    static TabularPolicy uniform(std::vector<std::int64_t> bins,
                                 const std::vector<QuestionSpec>& questions);

    std::size_t row_index(const std::string& question_id) const;  // throws on miss
    std::vector<double> probabilities(std::size_t row) const;
};

struct SimConfig {
    int k = 8;                       // samples per question per step
    double learning_rate = 0.05;
    int iterations = 200;
    int batch_size = 32;             // question draws per iteration, with replacement
    reward::RewardConfig reward_config;
    advantage::Estimator estimator = advantage::Estimator::Rloo;
    std::uint64_t seed = 1;
    std::int64_t max_length_cap = 2000;  // bins above the cap auto-fail (forced truncation)

    void validate() const;  // k >= 2, positive lr/iterations/batch/cap
};

// Canonical octave bin ladder, 32..4096.
std::vector<std::int64_t> default_bins();

// Small easy/medium/hard demo set used by the CLI.
std::vector<QuestionSpec> default_questions();

double sigmoid(double x);

// max_accuracy * sigmoid(steepness * (length - threshold)); monotone
// non-decreasing in length.
double correctness_probability(double length, const QuestionSpec& spec);

struct SampledCompletion {
    int bin_index = 0;
    std::int64_t length = 1;
    bool correct = false;
};

struct SampledGroup {
    std::string question_id;
    std::vector<SampledCompletion> samples;
    std::vector<double> rewards;  // filled by the training loop
};

// Draws k bins from the policy row and correctness from the competence
// curve; bins above the cap are forced incorrect. Deterministic for a fixed
// engine state.
SampledGroup sample_group(const TabularPolicy& policy, const QuestionSpec& spec,
                          const SimConfig& config, rng::Engine& gen);

// d log softmax_j / d logits = e_j - p.
std::vector<double> score_function_gradient(std::span<const double> probs,
                                            int bin_index);

// One batch REINFORCE step: per sampled record with advantage A and bin j,
// logits += lr * A * (e_j - p), with p the softmax of the row at the start of
// the step and advantages taken from gradient_weights over each group's
// rewards. Groups must carry rewards already.
void policy_gradient_step(TabularPolicy& policy,
                          std::span<const SampledGroup> groups,
                          const SimConfig& config);

// One row per question per iteration, exact expectations under the current
// policy (not batch statistics, so rows exist even for questions not drawn
// that iteration). For the sigmoid-standardized scheme the per-bin factor is
// evaluated with z taken against the policy's own length distribution.
struct TraceRow {
    int iteration = 0;
    std::string question_id;
    double mean_length = 0.0;
    double accuracy = 0.0;
    double mean_reward = 0.0;
};

struct TrainResult {
    TabularPolicy policy;
    std::vector<TraceRow> trace;
};

// sample -> grade -> reward -> advantage -> step, over uniformly sampled
// questions; deterministic for a fixed seed.
TrainResult train(const std::vector<QuestionSpec>& questions,
                  std::vector<std::int64_t> bins, const SimConfig& config);

struct EvalRow {
    std::string question_id;
    double accuracy = 0.0;
    double mean_length = 0.0;
};

// Monte-Carlo evaluation without learning; deterministic per seed.
std::vector<EvalRow> evaluate_policy(const TabularPolicy& policy,
                                     const std::vector<QuestionSpec>& questions,
                                     int samples_per_question,
                                     std::uint64_t seed,
                                     std::int64_t max_length_cap);

}  // namespace plplab::sim
