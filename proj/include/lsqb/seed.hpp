#pragma once

#include <cstdint>

// Counter-based seed derivation. Every random object in the library is a
// pure function of (master seed, purpose, coordinates...), so any subset of
// trials can be computed independently and in any order, on any number of
// threads, with identical results.

namespace lsqb {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Purpose tags keep unrelated consumers of the same master seed decorrelated.
enum class SeedPurpose : std::uint64_t {
    trial_design = 1,
    trial_noise = 2,
    validation = 3,
    gram_diag = 4,
    coord_diag = 5,
    noise_check = 6,
};

constexpr std::uint64_t derive_seed(std::uint64_t root) { return splitmix64(root); }

template <class... Words>
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t word, Words... rest) {
    return derive_seed(splitmix64(root ^ splitmix64(word)), rest...);
}

template <class... Words>
constexpr std::uint64_t derive_seed(std::uint64_t root, SeedPurpose purpose, Words... rest) {
    return derive_seed(root, static_cast<std::uint64_t>(purpose), rest...);
}

}  // namespace lsqb
