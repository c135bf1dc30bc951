#pragma once

#include <cstdint>
#include <random>

namespace edamcc {

using Engine = std::mt19937_64;

/// Purpose tags for the named substreams of a run. The numeric values are part
/// of the reproducibility contract; never renumber them.
enum class StreamPurpose : std::uint64_t {
    init = 1,
    subsample = 2,
    partition = 3,
    sampling = 4,
    instance = 5,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) noexcept {
    return mix64(seed ^ mix64(value + 0x632be59bd9b4e019ULL));
}

/// Engine for the substream identified by (root seed, generation, purpose).
/// Streams for distinct triples are statistically independent, so drawing from
/// one never shifts another.
inline Engine make_stream(std::uint64_t root_seed, std::uint64_t generation, StreamPurpose purpose) {
    std::uint64_t s = combine_seed(root_seed, generation);
    s = combine_seed(s, static_cast<std::uint64_t>(purpose));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return Engine(seq);
}

/// The per-generation view of a run's streams.
struct StreamSet {
    std::uint64_t root_seed = 0;
    std::uint64_t generation = 0;

    Engine operator()(StreamPurpose purpose) const { return make_stream(root_seed, generation, purpose); }
};

} // namespace edamcc
