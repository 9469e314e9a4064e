#include "feedback_kmeans/random.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace fbk {

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    // 2^64 mod bound; draws below it would bias the modulo.
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t draw = 0;
    do {
        draw = rng();
    } while (draw < threshold);
    return draw % bound;
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count, Rng& rng) {
    std::vector<std::size_t> pool(population);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    const auto take = std::min(count, population);
    for (std::size_t i = 0; i < take; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, population - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(take);
    return pool;
}

}  // namespace fbk
