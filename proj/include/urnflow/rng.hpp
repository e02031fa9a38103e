#pragma once

#include <cstdint>
#include <random>

namespace urnflow {

/// SplitMix64 finalizer; used only to spread seeds, never as the draw engine.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of run `index` in an ensemble keyed by `master`. Depends only on the
/// pair, so runs can be executed in any order or on any thread.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound), bound > 0. Lemire's multiply-and-reject,
    /// exact for every bound.
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 product = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// True with probability numerator / denominator.
    bool bernoulli(std::uint64_t numerator, std::uint64_t denominator) {
        return below(denominator) < numerator;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace urnflow
