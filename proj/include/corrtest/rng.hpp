#pragma once

#include <boost/random/normal_distribution.hpp>

#include <cstdint>
#include <random>

namespace corrtest {

using Engine = std::mt19937_64;

/// Ziggurat standard normal; several times faster than std::normal_distribution.
using StdNormal = boost::random::normal_distribution<double>;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the independent stream `index` under master seed `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Engine for stream `index`; two-level derivation for nested loops (run, replicate).
inline Engine stream(std::uint64_t seed, std::uint64_t index) {
    return Engine(derive_seed(seed, index));
}

inline Engine stream(std::uint64_t seed, std::uint64_t outer, std::uint64_t inner) {
    return Engine(derive_seed(derive_seed(seed, outer), inner));
}

}  // namespace corrtest
