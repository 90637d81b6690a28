#include "plplab/variance.hpp"

#include <cmath>
#include <stdexcept>

#include "plplab/reward.hpp"
#include "plplab/rng.hpp"

namespace plplab::variance {

void UniformLengthRange::validate() const {
    if (!(lo > 0.0) || !(hi > 0.0)) {
        throw std::invalid_argument("range bounds must be positive");
    }
    if (!(lo < hi)) {
        // The closed form is singular at lo = hi.
        throw std::invalid_argument("range must satisfy lo < hi strictly");
    }
}

double closed_form_variance(const UniformLengthRange& range) {
    range.validate();
    const double a = range.lo;
    const double b = range.hi;
    const double first = (std::log(b) - std::log(a)) / (b - a);         // E[1/L]
    const double root_sum = std::sqrt(a) + std::sqrt(b);
    const double second = 4.0 / (root_sum * root_sum);                  // E[1/sqrt(L)]^2
    return first - second;
}

double closed_form_mean(const UniformLengthRange& range) {
    range.validate();
    return 1.0 + 2.0 / (std::sqrt(range.lo) + std::sqrt(range.hi));
}

Moments monte_carlo_moments(const UniformLengthRange& range,
                            std::int64_t samples, std::uint64_t seed) {
    range.validate();
    if (samples < 1) {
        throw std::invalid_argument("samples must be >= 1");
    }
    rng::Engine gen(seed);
    // Welford accumulation; two-pass over 10^6 doubles would also do, but
    // this keeps memory flat for arbitrary sample counts.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const double len = rng::uniform(gen, range.lo, range.hi);
        const double z = 1.0 + 1.0 / std::sqrt(len);
        const double delta = z - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (z - mean);
    }
    return Moments{mean, m2 / static_cast<double>(samples)};
}

MonotonicityReport variance_monotonicity_scan(
    std::span<const UniformLengthRange> ranges) {
    MonotonicityReport report;
    for (std::size_t i = 0; i + 1 < ranges.size(); ++i) {
        const auto& cur = ranges[i];
        const auto& next = ranges[i + 1];
        if (!(next.lo >= cur.lo && next.hi >= cur.hi)) {
            continue;  // not comparable under "weakly above"
        }
        ++report.pairs_checked;
        const double v_cur = closed_form_variance(cur);
        const double v_next = closed_form_variance(next);
        const double tol = 1e-12 * std::max(1.0, std::abs(v_cur));
        if (v_next > v_cur + tol) {
            report.non_increasing = false;
            if (!report.violation.has_value()) {
                report.violation = std::make_pair(cur, next);
            }
            report.violating_indices.push_back(static_cast<int>(i + 1));
        }
    }
    return report;
}

double reward_spread(const UniformLengthRange& range, double alpha, double gamma) {
    range.validate();
    return reward::plp_factor(range.lo, alpha, gamma) -
           reward::plp_factor(range.hi, alpha, gamma);
}

}  // namespace plplab::variance
