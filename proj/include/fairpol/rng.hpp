#pragma once
// Deterministic random number utilities.
//
// The standard library's distribution objects are implementation-defined, so
// two builds of the same source can disagree on the exact stream of variates.
// Reproducibility here is a contract (identical config + seed => byte-identical
// artifacts), so we pin the engine (mt19937_64) and hand-roll the few
// transforms we need. Every transform consumes a fixed number of engine draws,
// which keeps streams aligned regardless of call history.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace fairpol {

/// splitmix64 finalizer; used to derive independent child seeds from a master
/// seed (seed + replication index and similar schemes).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Child seed for task `index` under master seed `seed`. Distinct indices give
/// well-separated streams even for adjacent master seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

/// Thin deterministic wrapper around mt19937_64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0,1) with 53 random bits. Consumes one engine draw.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller. Consumes exactly two engine draws; no
    /// cached spare, so the stream position is a pure function of call count.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        // Guard the log: u1 == 0 happens with probability 2^-53.
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Bernoulli(p) as {0,1}.
    int bernoulli(double p) { return uniform() < p ? 1 : 0; }

    /// Uniform integer in [0, n). Rejection sampling; unbiased.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % n;
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace fairpol
