#include "plplab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace plplab::sim {

void QuestionSpec::validate() const {
    if (question_id.empty()) {
        throw std::invalid_argument("question_id must be non-empty");
    }
    if (!(difficulty_threshold > 0.0)) {
        throw std::invalid_argument("difficulty_threshold must be positive");
    }
    if (!(max_accuracy > 0.0) || max_accuracy > 1.0) {
        throw std::invalid_argument("max_accuracy must lie in (0, 1]");
    }
    if (!(steepness > 0.0)) {
        throw std::invalid_argument("steepness must be positive");
    }
}

void SimConfig::validate() const {
    if (k < 2) throw std::invalid_argument("k must be >= 2");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (max_length_cap < 1) throw std::invalid_argument("max_length_cap must be >= 1");
    reward_config.validate();
}

std::vector<std::int64_t> default_bins() {
    return {32, 64, 128, 256, 512, 1024, 2048, 4096};
}

std::vector<QuestionSpec> default_questions() {
    return {
        {"easy", 16.0, 0.95, 0.5},
        {"medium", 200.0, 0.92, 0.02},
        {"hard", 700.0, 0.90, 0.01},
    };
}

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

double correctness_probability(double length, const QuestionSpec& spec) {
    return spec.max_accuracy * sigmoid(spec.steepness * (length - spec.difficulty_threshold));
}

namespace {

void validate_bins(const std::vector<std::int64_t>& bins) {
    if (bins.empty()) throw std::invalid_argument("bins must be non-empty");
    if (bins.front() < 1) throw std::invalid_argument("bins must be >= 1");
    for (std::size_t i = 1; i < bins.size(); ++i) {
        if (bins[i] <= bins[i - 1]) {
            throw std::invalid_argument("bins must be strictly increasing");
        }
    }
}

std::vector<double> softmax(std::span<const double> logits) {
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    std::vector<double> probs(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - max_logit);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

int sample_categorical(std::span<const double> probs, rng::Engine& gen) {
    const double u = rng::uniform01(gen);
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;  // guard against rounding at u ~ 1
}

// Per-bin expected reward factor for a correct answer. For the
// group-standardized scheme the z-score is taken against the policy's own
// length distribution (mean/stdev under the bin probabilities), the closest
// group-free analogue; plp/none factors are exact.
double expected_factor(const reward::RewardConfig& config, double length,
                       double policy_mean, double policy_stdev) {
    switch (config.scheme) {
        case reward::Scheme::PlpBig:
            return reward::plp_factor(length, config.alpha, config.gamma);
        case reward::Scheme::PlpSmall:
            return reward::plp_small_factor(length, config.alpha, config.gamma);
        case reward::Scheme::SigmoidStd: {
            const double z =
                policy_stdev > 0.0 ? (length - policy_mean) / policy_stdev : 0.0;
            return 1.0 - config.alpha * sigmoid(z);
        }
        case reward::Scheme::None:
            return 1.0;
    }
    return 1.0;
}

}  // namespace

TabularPolicy TabularPolicy::uniform(std::vector<std::int64_t> bins,
                                     const std::vector<QuestionSpec>& questions) {
    validate_bins(bins);
    if (questions.empty()) throw std::invalid_argument("need at least one question");
    TabularPolicy policy;
    policy.bins = std::move(bins);
    for (const auto& q : questions) {
        q.validate();
        policy.question_ids.push_back(q.question_id);
        policy.logits.emplace_back(policy.bins.size(), 0.0);
    }
    return policy;
}

std::size_t TabularPolicy::row_index(const std::string& question_id) const {
    for (std::size_t i = 0; i < question_ids.size(); ++i) {
        if (question_ids[i] == question_id) return i;
    }
    throw std::invalid_argument("unknown question_id: " + question_id);
}

std::vector<double> TabularPolicy::probabilities(std::size_t row) const {
    return softmax(logits.at(row));
}

SampledGroup sample_group(const TabularPolicy& policy, const QuestionSpec& spec,
                          const SimConfig& config, rng::Engine& gen) {
    const std::size_t row = policy.row_index(spec.question_id);
    const std::vector<double> probs = policy.probabilities(row);
    SampledGroup group;
    group.question_id = spec.question_id;
    group.samples.reserve(static_cast<std::size_t>(config.k));
    for (int i = 0; i < config.k; ++i) {
        SampledCompletion sample;
        sample.bin_index = sample_categorical(probs, gen);
        sample.length = policy.bins[static_cast<std::size_t>(sample.bin_index)];
        if (sample.length > config.max_length_cap) {
            // Forced truncation: the final answer never appears, so the
            // sample grades incorrect no matter what.
            sample.correct = false;
        } else {
            const double p =
                correctness_probability(static_cast<double>(sample.length), spec);
            sample.correct = rng::bernoulli(gen, p);
        }
        group.samples.push_back(sample);
    }
    return group;
}

std::vector<double> score_function_gradient(std::span<const double> probs,
                                            int bin_index) {
    std::vector<double> grad(probs.begin(), probs.end());
    for (double& g : grad) g = -g;
    grad.at(static_cast<std::size_t>(bin_index)) += 1.0;
    return grad;
}

void policy_gradient_step(TabularPolicy& policy,
                          std::span<const SampledGroup> groups,
                          const SimConfig& config) {
    // Gradients are accumulated against the probabilities at the start of
    // the step, then applied once: a plain batch REINFORCE update.
    std::unordered_map<std::size_t, std::vector<double>> deltas;
    std::unordered_map<std::size_t, std::vector<double>> probs_cache;
    for (const auto& group : groups) {
        const std::size_t row = policy.row_index(group.question_id);
        if (group.rewards.size() != group.samples.size()) {
            throw std::invalid_argument("group rewards not aligned with samples");
        }
        auto [it, inserted] = probs_cache.try_emplace(row);
        if (inserted) it->second = policy.probabilities(row);
        const std::vector<double>& probs = it->second;

        const std::vector<double> advantages =
            advantage::gradient_weights(group.rewards, config.estimator);
        auto& delta = deltas.try_emplace(row, policy.bins.size(), 0.0).first->second;
        for (std::size_t s = 0; s < group.samples.size(); ++s) {
            const double weight = config.learning_rate * advantages[s];
            if (weight == 0.0) continue;
            const std::size_t j = static_cast<std::size_t>(group.samples[s].bin_index);
            for (std::size_t m = 0; m < delta.size(); ++m) {
                delta[m] -= weight * probs[m];
            }
            delta[j] += weight;
        }
    }
    for (auto& [row, delta] : deltas) {
        auto& logits = policy.logits[row];
        for (std::size_t m = 0; m < logits.size(); ++m) {
            logits[m] += delta[m];
        }
    }
}

namespace {

TraceRow trace_row(int iteration, const TabularPolicy& policy,
                   const QuestionSpec& spec, const SimConfig& config) {
    const std::size_t row = policy.row_index(spec.question_id);
    const std::vector<double> probs = policy.probabilities(row);
    double mean_len = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        mean_len += probs[j] * static_cast<double>(policy.bins[j]);
    }
    double var_len = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        const double d = static_cast<double>(policy.bins[j]) - mean_len;
        var_len += probs[j] * d * d;
    }
    const double stdev_len = std::sqrt(var_len);

    TraceRow out;
    out.iteration = iteration;
    out.question_id = spec.question_id;
    out.mean_length = mean_len;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        const double len = static_cast<double>(policy.bins[j]);
        const bool capped = policy.bins[j] > config.max_length_cap;
        const double p_correct =
            capped ? 0.0 : correctness_probability(len, spec);
        out.accuracy += probs[j] * p_correct;
        out.mean_reward += probs[j] * p_correct *
                           expected_factor(config.reward_config, len, mean_len,
                                           stdev_len);
    }
    return out;
}

}  // namespace

TrainResult train(const std::vector<QuestionSpec>& questions,
                  std::vector<std::int64_t> bins, const SimConfig& config) {
    if (questions.empty()) throw std::invalid_argument("need at least one question");
    config.validate();
    for (const auto& q : questions) q.validate();

    TrainResult result{TabularPolicy::uniform(std::move(bins), questions), {}};
    rng::Engine gen(config.seed);
    std::vector<std::int64_t> group_lengths(static_cast<std::size_t>(config.k));

    for (int iter = 0; iter < config.iterations; ++iter) {
        std::vector<SampledGroup> groups;
        groups.reserve(static_cast<std::size_t>(config.batch_size));
        for (int b = 0; b < config.batch_size; ++b) {
            const auto& spec = questions[rng::pick_index(gen, questions.size())];
            SampledGroup group = sample_group(result.policy, spec, config, gen);
            for (std::size_t s = 0; s < group.samples.size(); ++s) {
                group_lengths[s] = group.samples[s].length;
            }
            group.rewards.reserve(group.samples.size());
            for (const auto& sample : group.samples) {
                reward::CompletionRecord record;
                record.length = sample.length;
                record.correct = sample.correct;
                group.rewards.push_back(
                    reward::reward_value(record, config.reward_config, group_lengths));
            }
            groups.push_back(std::move(group));
        }
        policy_gradient_step(result.policy, groups, config);
        for (const auto& spec : questions) {
            result.trace.push_back(trace_row(iter + 1, result.policy, spec, config));
        }
    }
    return result;
}

std::vector<EvalRow> evaluate_policy(const TabularPolicy& policy,
                                     const std::vector<QuestionSpec>& questions,
                                     int samples_per_question,
                                     std::uint64_t seed,
                                     std::int64_t max_length_cap) {
    if (samples_per_question < 1) {
        throw std::invalid_argument("samples_per_question must be >= 1");
    }
    rng::Engine gen(seed);
    std::vector<EvalRow> rows;
    rows.reserve(questions.size());
    for (const auto& spec : questions) {
        const std::size_t row = policy.row_index(spec.question_id);
        const std::vector<double> probs = policy.probabilities(row);
        std::int64_t correct = 0;
        double total_len = 0.0;
        for (int s = 0; s < samples_per_question; ++s) {
            const int j = sample_categorical(probs, gen);
            const std::int64_t len = policy.bins[static_cast<std::size_t>(j)];
            total_len += static_cast<double>(len);
            if (len <= max_length_cap &&
                rng::bernoulli(gen, correctness_probability(
                                        static_cast<double>(len), spec))) {
                ++correct;
            }
        }
        rows.push_back({spec.question_id,
                        static_cast<double>(correct) / samples_per_question,
                        total_len / samples_per_question});
    }
    return rows;
}

}  // namespace plplab::sim
