#pragma once

// Configuration space of N hard-core particles on a periodic ring of M sites.
//
// Sites are labelled 1..M and stored as bit positions 0..M-1 of a 64-bit mask
// (bit i set <=> site i+1 occupied). Configurations of a fixed particle
// number are ranked colexicographically: for occupied bit positions
// p_1 < p_2 < ... < p_N the rank is sum_i C(p_i, i).

#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tasep/common.hpp"

namespace tasep {

using Bitmask = std::uint64_t;

inline constexpr int max_sites = 64;

struct RingShape {
    int M = 1;
    int N = 0;

    void validate() const {
        if (M < 1 || M > max_sites) {
            throw DomainError("ring size M must be in [1, 64], got " + std::to_string(M));
        }
        if (N < 0 || N > M) {
            throw DomainError("particle number N must be in [0, M], got N=" + std::to_string(N) +
                              " with M=" + std::to_string(M));
        }
    }

    friend bool operator==(const RingShape &, const RingShape &) = default;
};

/// Exact binomial coefficient C(n, k); zero outside 0 <= k <= n.
/// Throws std::overflow_error if the result does not fit in 64 bits.
inline std::uint64_t binomial(int n, int k) {
    if (n < 0) {
        throw DomainError("binomial: n must be non-negative");
    }
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned __int128 result = 1;
    for (int i = 1; i <= k; ++i) {
        // result * (n - k + i) / i is exact at every step: it equals C(n-k+i, i).
        result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (result > std::numeric_limits<std::uint64_t>::max()) {
            throw std::overflow_error("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                                      ") exceeds 64-bit range");
        }
    }
    return static_cast<std::uint64_t>(result);
}

/// Number of configurations C(M, N).
inline std::uint64_t sector_dimension(const RingShape &shape) {
    shape.validate();
    return binomial(shape.M, shape.N);
}

inline bool site_occupied(Bitmask mask, int site) {
    return ((mask >> (site - 1)) & 1U) != 0;
}

inline Bitmask full_mask(int M) {
    return M >= 64 ? ~Bitmask{0} : ((Bitmask{1} << M) - 1);
}

/// Colexicographic rank of a configuration.
inline std::uint64_t rank(Bitmask config, const RingShape &shape) {
    shape.validate();
    if ((config & ~full_mask(shape.M)) != 0) {
        throw DomainError("rank: configuration has bits beyond site M");
    }
    if (std::popcount(config) != shape.N) {
        throw DomainError("rank: configuration has " + std::to_string(std::popcount(config)) +
                          " particles, expected " + std::to_string(shape.N));
    }
    std::uint64_t r = 0;
    int i = 1;
    for (Bitmask rest = config; rest != 0; rest &= rest - 1, ++i) {
        r += binomial(std::countr_zero(rest), i);
    }
    return r;
}

inline Bitmask unrank(std::uint64_t r, const RingShape &shape) {
    if (r >= sector_dimension(shape)) {
        throw DomainError("unrank: rank out of range");
    }
    Bitmask config = 0;
    int upper = shape.M - 1;
    for (int i = shape.N; i >= 1; --i) {
        int p = upper;
        while (binomial(p, i) > r) {
            --p;
        }
        config |= Bitmask{1} << p;
        r -= binomial(p, i);
        upper = p - 1;
    }
    return config;
}

/// Explicit enumeration of a sector, index = colex rank.
class SectorBasis {
  public:
    explicit SectorBasis(const RingShape &shape) : shape_(shape) {
        const auto dim = sector_dimension(shape);
        configs_.reserve(dim);
        if (shape.N == 0) {
            configs_.push_back(0);
            return;
        }
        // Gosper's hack walks N-subsets in increasing numeric order, which is colex order.
        Bitmask c = (Bitmask{1} << shape.N) - 1;
        const Bitmask limit = full_mask(shape.M);
        for (std::uint64_t i = 0; i < dim; ++i) {
            configs_.push_back(c);
            if (i + 1 == dim) {
                break;
            }
            const Bitmask lowest = c & (~c + 1);
            const Bitmask ripple = c + lowest;
            c = (((ripple ^ c) >> 2) / lowest) | ripple;
            if ((c & ~limit) != 0) {
                throw Error("SectorBasis: enumeration overran the ring");
            }
        }
    }

    const RingShape &shape() const { return shape_; }
    std::size_t size() const { return configs_.size(); }
    Bitmask config(std::size_t index) const { return configs_.at(index); }
    const std::vector<Bitmask> &configs() const { return configs_; }
    std::size_t index_of(Bitmask config) const { return static_cast<std::size_t>(rank(config, shape_)); }

  private:
    RingShape shape_;
    std::vector<Bitmask> configs_;
};

/// Unnormalized uniform steady state: every configuration has weight one.
inline RealVector steady_state_vector(const RingShape &shape) {
    return RealVector::Ones(static_cast<Eigen::Index>(sector_dimension(shape)));
}

/// 0/1 mask of the empty-site projector s_site in the sector basis.
inline RealVector projector_mask(const SectorBasis &basis, int site) {
    const int M = basis.shape().M;
    if (site < 1 || site > M) {
        throw DomainError("projector site must be in [1, " + std::to_string(M) + "], got " +
                          std::to_string(site));
    }
    RealVector mask(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        mask[static_cast<Eigen::Index>(i)] = site_occupied(basis.config(i), site) ? 0.0 : 1.0;
    }
    return mask;
}

/// Applies s_site: zeroes every component whose configuration has `site` occupied.
inline RealVector apply_projector(const RealVector &vec, int site, const SectorBasis &basis) {
    if (vec.size() != static_cast<Eigen::Index>(basis.size())) {
        throw DomainError("apply_projector: vector length does not match sector dimension");
    }
    return vec.cwiseProduct(projector_mask(basis, site));
}

inline RealVector apply_projector(const RealVector &vec, int site, const RingShape &shape) {
    return apply_projector(vec, site, SectorBasis(shape));
}

} // namespace tasep
