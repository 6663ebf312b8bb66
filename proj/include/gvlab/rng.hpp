#pragma once

#include <cmath>
#include <cstdint>

namespace gvlab {

/// splitmix64; used both as a generator and to derive independent
/// per-replica streams from (seed, index) pairs.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t s = 0) : state(s) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro-free minimal counter-based stream: deterministic, cheap,
/// stable across platforms (no library distributions involved).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Derive an independent stream for a replica/worker index.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 mix(seed ^ (0x5851f42d4c957f2dULL * (index + 1)));
        mix.next();
        return Rng(mix.next());
    }

    std::uint64_t next_u64() { return gen_.next(); }

    /// Uniform in [0, 1).
    double uniform() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [0, a).
    double uniform(double a) { return a * uniform(); }

    /// Exponential with given rate.
    double exponential(double rate) {
        double u;
        do { u = uniform(); } while (u == 0.0);
        return -std::log(u) / rate;
    }

    /// Poisson by inversion (means here stay modest, O(10^2)).
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        double p = std::exp(-mean), cdf = p, u = uniform();
        int k = 0;
        while (u > cdf && k < 100000000) {
            ++k;
            p *= mean / k;
            cdf += p;
        }
        return k;
    }

  private:
    SplitMix64 gen_;
};

} // namespace gvlab
