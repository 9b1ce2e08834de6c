#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace econcast {

/// Deterministic RNG with self-contained sampling recipes, so results are
/// reproducible bit-for-bit independent of the standard library's
/// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    bool bernoulli(double p) { return uniform01() < p; }

    std::uint64_t raw() { return engine_(); }

    /// Independent stream derived from (seed, stream index) via splitmix64.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace econcast
