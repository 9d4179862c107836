#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace multiqueue {

inline constexpr std::uint64_t default_seed = 0x9a3df1fd79c0f2ceULL;

// splitmix64 finalizer. Derives well-separated engine seeds from a base seed
// and a stream id (thread or handle index), so per-thread generators are
// independent even for adjacent ids.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed ^ (stream + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic generator used for queue selection and workload keys.
// bounded() is unbiased (multiply-shift with rejection), and the consumed
// stream is reproducible, so tests can replay it to predict choices.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform draw from [0, bound). Exactly one next() per accepted draw;
    // rejections consume one more each.
    std::uint64_t bounded(std::uint64_t bound) {
        assert(bound > 0);
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform key in {0, ..., key_max}.
    std::uint64_t uniform_key(std::uint64_t key_max) { return bounded(key_max + 1); }

   private:
    std::mt19937_64 engine_;
};

}  // namespace multiqueue
