#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic per-trajectory stream: stream(seed, i) and stream(seed, j)
/// are independent for i != j, and reproducible across runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : gen_(splitmix64(seed + 0x632be59bd9b4e019ULL * (stream + 1))) {}

    std::uint64_t bits() { return gen_(); }

    double uniform01() {
        // 53-bit mantissa in (0,1); never returns exactly 0.
        return (static_cast<double>(bits() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    double normal() {
        double u1 = uniform01(), u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return bits() % n; }

private:
    std::mt19937_64 gen_;
};

}  // namespace qlab
