#pragma once

#include <cstdint>
#include <cmath>

#include "netmod/matrix.hpp"

namespace netmod {

// Stateless counter-based generator: every (seed, trial, index) triple maps
// to the same value regardless of evaluation order, so simulations stay
// bit-identical under any chunking or thread count.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_mix(std::uint64_t seed, std::uint64_t trial, std::uint64_t idx) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ trial * 0x9e3779b97f4a7c15ULL);
    return splitmix64(h ^ idx * 0xc2b2ae3d27d4eb4fULL);
}

// Uniform on (0, 1]; never returns zero so logs are safe.
inline double rng_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t idx) {
    return ((counter_mix(seed, trial, idx) >> 11) + 1) * 0x1.0p-53;
}

// Circularly-symmetric complex Gaussian with unit total variance.
inline cplx rng_cnormal(std::uint64_t seed, std::uint64_t trial, std::uint64_t idx) {
    const double u1 = rng_uniform(seed, trial, 2 * idx);
    const double u2 = rng_uniform(seed, trial, 2 * idx + 1);
    const double r = std::sqrt(-std::log(u1));
    return cplx(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
}

}  // namespace netmod
