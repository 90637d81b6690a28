#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace plplab::variance {

// Interval (a, b) of answer lengths, 0 < a < b strictly. The closed forms
// below describe Z = 1 + 1/sqrt(L) for L uniform on (a, b).
struct UniformLengthRange {
    double lo = 0.0;
    double hi = 0.0;

    void validate() const;  // throws std::invalid_argument unless 0 < lo < hi
};

// Var(Z) = (ln b - ln a)/(b - a) - 4/(sqrt(a) + sqrt(b))^2.
//
// This comes from E[1/L] = (ln b - ln a)/(b - a) and
// E[1/sqrt(L)] = 2/(sqrt(a) + sqrt(b)). For a general bonus coefficient the
// variance is alpha^2 times this (the closed form fixes alpha = 1,
// gamma = 0.5).
double closed_form_variance(const UniformLengthRange& range);

// E[Z] = 1 + 2/(sqrt(a) + sqrt(b)); used to validate the Monte-Carlo oracle.
double closed_form_mean(const UniformLengthRange& range);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // population variance
};

// Independent oracle for the closed forms: draws `samples` lengths uniformly
// from (lo, hi) with the documented mt19937_64/u53 generator and accumulates
// Welford moments of Z = 1 + 1/sqrt(L). Deterministic for a fixed seed.
Moments monte_carlo_moments(const UniformLengthRange& range,
                            std::int64_t samples, std::uint64_t seed);

// Pairwise variance-ordering scan. For each consecutive pair where the second
// range is weakly above the first (lo and hi both >= their predecessors), the
// closed-form variance is expected to be non-increasing; every pair where it
// increases instead is reported. Pairs that are not comparable in that order
// are skipped.
struct MonotonicityReport {
    int pairs_checked = 0;
    bool non_increasing = true;
    // First offending pair, present when non_increasing is false.
    std::optional<std::pair<UniformLengthRange, UniformLengthRange>> violation;
    std::vector<int> violating_indices;  // index of the second range of each bad pair
};

MonotonicityReport variance_monotonicity_scan(
    std::span<const UniformLengthRange> ranges);

// Maximum reward gap between correct answers inside the range:
// plp_factor(lo) - plp_factor(hi) = alpha * (lo^-gamma - hi^-gamma).
double reward_spread(const UniformLengthRange& range, double alpha, double gamma);

}  // namespace plplab::variance
