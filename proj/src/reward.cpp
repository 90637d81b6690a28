#include "plplab/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plplab::reward {

void CompletionRecord::validate() const {
    if (length < 1) {
        throw std::invalid_argument("completion length must be >= 1");
    }
    if (!correct.has_value() && !text.has_value()) {
        throw std::invalid_argument(
            "completion needs either a correctness verdict or text to grade");
    }
}

Scheme parse_scheme(const std::string& name) {
    if (name == "plp-big") return Scheme::PlpBig;
    if (name == "plp-small") return Scheme::PlpSmall;
    if (name == "sigmoid-standardized") return Scheme::SigmoidStd;
    if (name == "none") return Scheme::None;
    throw std::invalid_argument("unknown reward scheme: " + name);
}

const char* scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::PlpBig: return "plp-big";
        case Scheme::PlpSmall: return "plp-small";
        case Scheme::SigmoidStd: return "sigmoid-standardized";
        case Scheme::None: return "none";
    }
    return "?";
}

void RewardConfig::validate() const {
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("alpha must be >= 0");
    }
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("gamma must be > 0");
    }
}

double accuracy_indicator(bool correct) {
    return correct ? 1.0 : 0.0;
}

namespace {

void check_penalty_args(double length, double alpha, double gamma) {
    if (!(length > 0.0)) {
        throw std::invalid_argument("length must be positive");
    }
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("alpha must be >= 0");
    }
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("gamma must be > 0");
    }
}

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

double plp_factor(double length, double alpha, double gamma) {
    check_penalty_args(length, alpha, gamma);
    return 1.0 + alpha / std::pow(length, gamma);
}

double plp_small_factor(double length, double alpha, double gamma) {
    check_penalty_args(length, alpha, gamma);
    return std::max(0.0, 1.0 - alpha * (1.0 - 1.0 / std::pow(length, gamma)));
}

double sigmoid_standardized_reward(std::int64_t length,
                                   std::span<const std::int64_t> group_lengths,
                                   double alpha) {
    if (group_lengths.empty()) {
        throw std::invalid_argument(
            "sigmoid-standardized reward needs the group's lengths");
    }
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("alpha must be >= 0");
    }
    double mean = 0.0;
    for (std::int64_t len : group_lengths) mean += static_cast<double>(len);
    mean /= static_cast<double>(group_lengths.size());
    double var = 0.0;
    for (std::int64_t len : group_lengths) {
        const double d = static_cast<double>(len) - mean;
        var += d * d;
    }
    var /= static_cast<double>(group_lengths.size());
    const double stdev = std::sqrt(var);
    // Degenerate groups must not crash batch scoring: all-equal lengths sit
    // at z = 0.
    const double z = stdev > 0.0 ? (static_cast<double>(length) - mean) / stdev : 0.0;
    return 1.0 - alpha * sigmoid(z);
}

double reward_value(const CompletionRecord& record, const RewardConfig& config,
                    std::span<const std::int64_t> group_lengths) {
    config.validate();
    if (record.length < 1) {
        throw std::invalid_argument("completion length must be >= 1");
    }
    if (!record.correct.has_value()) {
        throw std::invalid_argument("correctness verdict is unresolved");
    }
    if (!*record.correct) {
        return 0.0;  // gated: wrong answers earn nothing at any length
    }
    const double len = static_cast<double>(record.length);
    switch (config.scheme) {
        case Scheme::PlpBig:
            return plp_factor(len, config.alpha, config.gamma);
        case Scheme::PlpSmall:
            return plp_small_factor(len, config.alpha, config.gamma);
        case Scheme::SigmoidStd:
            return sigmoid_standardized_reward(record.length, group_lengths,
                                               config.alpha);
        case Scheme::None:
            return 1.0;
    }
    throw std::logic_error("unhandled scheme");
}

}  // namespace plplab::reward
