#pragma once

// Event-driven simulation of the periodic TASEP, used as an independent
// statistical check of the stationary two-time correlation.
//
// Each sample owns a counter-based random stream keyed by (seed, sample
// index), so results do not depend on how samples are spread over threads.

#include <bit>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "tasep/combinat.hpp"

namespace tasep {

/// SplitMix64 finalizer as a counter-based generator.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform in (0, 1].
    double uniform_open0() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform integer in [0, n), n > 0, by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Sites j whose particle can hop to j+1 (periodic).
inline Bitmask mobile_particles(Bitmask occupied, int M) {
    const Bitmask all = full_mask(M);
    // bit j-1 of `ahead` is the occupation of site j+1
    const Bitmask ahead = ((occupied >> 1) | (occupied << (M - 1))) & all;
    return occupied & ~ahead & all;
}

/// Runs the exact continuous-time dynamics from `config` for a time span t.
inline Bitmask simulate(Bitmask config, int M, double t, CounterRng &rng) {
    if (M == 1) {
        return config;
    }
    double clock = 0.0;
    while (true) {
        const Bitmask mobile = mobile_particles(config, M);
        const int rate = std::popcount(mobile);
        if (rate == 0) {
            return config;
        }
        clock += -std::log(rng.uniform_open0()) / rate;
        if (clock > t) {
            return config;
        }
        auto pick = rng.below(static_cast<std::uint64_t>(rate));
        Bitmask rest = mobile;
        while (pick-- > 0) {
            rest &= rest - 1;
        }
        const int bit = std::countr_zero(rest);
        const int target = (bit + 1) % M;
        config = (config & ~(Bitmask{1} << bit)) | (Bitmask{1} << target);
    }
}

struct McConfig {
    RingShape shape;
    std::uint64_t samples = 1;
    double t = 0.0;
    int m = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    void validate() const {
        shape.validate();
        if (samples < 1) {
            throw DomainError("McConfig: samples must be >= 1");
        }
        if (!(t >= 0.0)) {
            throw DomainError("McConfig: t must be non-negative");
        }
        if (m < 1 || m > shape.M) {
            throw DomainError("McConfig: m must be in [1, M]");
        }
    }
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample standard deviation / sqrt(samples)
    std::uint64_t samples = 0;
};

/// Estimates P(site m empty at 0, site 1 empty at t) in the stationary state.
inline McEstimate estimate_correlation(const McConfig &cfg) {
    cfg.validate();
    const RingShape &shape = cfg.shape;
    const std::uint64_t dim = sector_dimension(shape);
    const unsigned threads = std::max(1U, cfg.threads);
    std::vector<std::uint64_t> hits(threads, 0);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                std::uint64_t count = 0;
                for (std::uint64_t s = w; s < cfg.samples; s += threads) {
                    CounterRng rng(cfg.seed, s);
                    const Bitmask start = unrank(rng.below(dim), shape);
                    if (site_occupied(start, cfg.m)) {
                        continue;
                    }
                    const Bitmask end = simulate(start, shape.M, cfg.t, rng);
                    if (!site_occupied(end, 1)) {
                        ++count;
                    }
                }
                hits[w] = count;
            });
        }
    }
    std::uint64_t total = 0;
    for (const auto h : hits) {
        total += h;
    }
    McEstimate est;
    est.samples = cfg.samples;
    const double n = static_cast<double>(cfg.samples);
    est.mean = static_cast<double>(total) / n;
    if (cfg.samples > 1) {
        // Indicators are 0/1, so the sample variance is p(1-p) n/(n-1).
        const double var = est.mean * (1.0 - est.mean) * n / (n - 1.0);
        est.std_error = std::sqrt(std::max(var, 0.0) / n);
    }
    return est;
}

/// Empirical distribution of the configuration at time t, started from `start`.
/// Indexed by colex rank.
inline std::vector<double> transition_frequencies(const RingShape &shape, Bitmask start, double t,
                                                  std::uint64_t samples, std::uint64_t seed) {
    std::vector<double> freq(static_cast<std::size_t>(sector_dimension(shape)), 0.0);
    for (std::uint64_t s = 0; s < samples; ++s) {
        CounterRng rng(seed, s);
        freq[static_cast<std::size_t>(rank(simulate(start, shape.M, t, rng), shape))] += 1.0;
    }
    for (auto &f : freq) {
        f /= static_cast<double>(samples);
    }
    return freq;
}

} // namespace tasep
