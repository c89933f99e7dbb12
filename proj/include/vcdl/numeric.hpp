#pragma once
// Shared numeric helpers: infinity handling, count rounding, seeded streams.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace vcdl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance used for every "exact" functional comparison.
inline constexpr double kExactTol = 1e-12;

/// The random stream used throughout. Learners and samplers take it by reference.
using Rng = std::mt19937_64;

/// Uniform double in [0,1) built from the top 53 bits, so results do not
/// depend on the standard library's distribution implementation.
template <class URBG>
inline double uniform01(URBG& gen) {
    static_assert(URBG::max() - URBG::min() == std::numeric_limits<std::uint64_t>::max(),
                  "uniform01 expects a full 64-bit generator");
    return static_cast<double>((gen() - URBG::min()) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
template <class URBG>
inline std::uint64_t uniform_index(URBG& gen, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = gen() - URBG::min();
    } while (r >= limit);
    return r % n;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for replication `rep` of a run with `base` seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t rep) {
    return splitmix64(splitmix64(base) ^ splitmix64(rep + 0x632be59bd9b4e019ULL));
}

/// Seed for replication `rep` at sweep position `axis_index`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t axis_index, std::uint64_t rep) {
    return derive_seed(derive_seed(base, axis_index + 0x1000000ULL), rep);
}

/// ceil() for sample-size formulas. Values within 1e-9 (relative) of an
/// integer are treated as that integer so log/exp rounding cannot add a sample.
inline std::uint64_t ceil_count(double x) {
    if (!std::isfinite(x) || x < 0) throw std::domain_error("ceil_count: value out of range");
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, r)) return static_cast<std::uint64_t>(r);
    return static_cast<std::uint64_t>(std::ceil(x));
}

}  // namespace vcdl
