#pragma once

#include <cstdint>
#include <random>

namespace plplab::rng {

// All randomized code in this project draws through these helpers so that a
// fixed seed reproduces bit-for-bit on any conforming standard library.
// std::mt19937_64 is fully specified by the standard; std::uniform_* and
// std::bernoulli_distribution are not, so they are avoided on purpose.
// Algorithm identifier recorded in run manifests:
inline constexpr const char* kAlgorithmId = "mt19937_64/u53";

using Engine = std::mt19937_64;

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Engine& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

inline bool bernoulli(Engine& gen, double p) {
    return uniform01(gen) < p;
}

// Index in [0, n). Modulo bias is < 2^-53 * n; irrelevant at desk scale.
inline std::size_t pick_index(Engine& gen, std::size_t n) {
    return static_cast<std::size_t>(uniform01(gen) * static_cast<double>(n));
}

}  // namespace plplab::rng
