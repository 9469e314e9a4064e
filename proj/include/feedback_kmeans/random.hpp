#ifndef FEEDBACK_KMEANS_RANDOM_HPP
#define FEEDBACK_KMEANS_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace fbk {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the substream identified by `keys` under `seed`. Order matters.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(seed);
    for (auto key : keys) h = splitmix64(h ^ splitmix64(key + 0x632be59bd9b4e019ULL));
    return h;
}

/// Uniform integer in [0, bound). Bit-identical across standard libraries.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// `count` distinct indices of [0, population), in draw order (partial
/// Fisher-Yates). Returns all of them, shuffled, when count >= population.
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count, Rng& rng);

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_RANDOM_HPP
