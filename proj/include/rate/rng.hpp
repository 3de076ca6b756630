#pragma once

#include <cstdint>
#include <random>

namespace rate {

/// splitmix64; used to derive independent sub-seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Named random streams. Deriving each stream from (seed, purpose) keeps the
/// entity/phase/shuffle/sampler streams aligned across model variants even
/// when one variant draws extra numbers (e.g. RatE weight-noise init).
enum class RngStream : std::uint64_t {
    entity_init = 1,
    phase_init = 2,
    weight_init = 3,
    shuffle = 4,
    sampler = 5,
    eval = 6,
    synth = 7,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream) {
    return std::mt19937_64(splitmix64(seed ^ (0x51ed2701ULL + static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ULL)));
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace rate
