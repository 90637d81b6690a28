#include "plplab/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plplab::advantage {

Estimator parse_estimator(const std::string& name) {
    if (name == "rloo") return Estimator::Rloo;
    if (name == "grpo") return Estimator::Grpo;
    throw std::invalid_argument("unknown estimator: " + name);
}

const char* estimator_name(Estimator estimator) {
    return estimator == Estimator::Rloo ? "rloo" : "grpo";
}

namespace {

void require_group(std::span<const double> rewards) {
    if (rewards.size() < 2) {
        throw std::invalid_argument("a reward group needs at least 2 samples");
    }
}

}  // namespace

std::vector<double> rloo_advantages(std::span<const double> rewards) {
    require_group(rewards);
    const double k = static_cast<double>(rewards.size());
    double sum = 0.0;
    for (double r : rewards) sum += r;
    std::vector<double> advantages(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        advantages[i] = rewards[i] - (sum - rewards[i]) / (k - 1.0);
    }
    return advantages;
}

std::vector<double> grpo_advantages(std::span<const double> rewards) {
    require_group(rewards);
    const double k = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= k;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= k;  // population stdev
    const double stdev = std::sqrt(var);
    std::vector<double> advantages(rewards.size(), 0.0);
    if (stdev > 0.0) {
        for (std::size_t i = 0; i < rewards.size(); ++i) {
            advantages[i] = (rewards[i] - mean) / stdev;
        }
    }
    return advantages;
}

std::vector<double> gradient_weights(std::span<const double> rewards,
                                     Estimator estimator) {
    switch (estimator) {
        case Estimator::Rloo: return rloo_advantages(rewards);
        case Estimator::Grpo: return grpo_advantages(rewards);
    }
    throw std::logic_error("unhandled estimator");
}

SeparationReport regime_separation(std::span<const double> correct_rewards,
                                   int incorrect_count) {
    if (correct_rewards.empty()) {
        throw std::invalid_argument("separation needs at least one correct reward");
    }
    if (incorrect_count < 1) {
        throw std::invalid_argument("incorrect_count must be >= 1");
    }
    std::vector<double> group(correct_rewards.begin(), correct_rewards.end());
    group.insert(group.end(), static_cast<std::size_t>(incorrect_count), 0.0);

    SeparationReport report;
    report.advantages = rloo_advantages(group);
    const std::size_t n_correct = correct_rewards.size();
    report.min_correct_advantage = report.advantages[0];
    for (std::size_t i = 0; i < n_correct; ++i) {
        report.min_correct_advantage =
            std::min(report.min_correct_advantage, report.advantages[i]);
    }
    report.max_incorrect_advantage = report.advantages[n_correct];
    for (std::size_t i = n_correct; i < report.advantages.size(); ++i) {
        report.max_incorrect_advantage =
            std::max(report.max_incorrect_advantage, report.advantages[i]);
    }
    report.gap = report.min_correct_advantage - report.max_incorrect_advantage;
    return report;
}

}  // namespace plplab::advantage
