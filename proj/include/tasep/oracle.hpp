#pragma once

// Brute-force ground truth for the periodic TASEP sector dynamics.
//
// H acts on probability vectors (column convention): a particle at site j
// hops to j+1 (site M+1 == site 1) at rate one if the target is empty.
// -H is the Markov generator, so every column of H sums to zero.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "tasep/combinat.hpp"

namespace tasep {

inline constexpr std::size_t default_dimension_cap = 20000;

struct MarkovGenerator {
    RingShape shape;
    RealMatrix matrix;                       // H, dense
    Eigen::SparseMatrix<double> sparse;      // H, same entries
    double lambda_max = 0.0;                 // largest diagonal entry

    Eigen::Index dimension() const { return matrix.rows(); }
};

inline MarkovGenerator build_generator(const RingShape &shape,
                                       std::size_t dimension_cap = default_dimension_cap) {
    shape.validate();
    const auto dim = sector_dimension(shape);
    if (dim > dimension_cap) {
        throw DomainError("sector dimension " + std::to_string(dim) + " exceeds cap " +
                          std::to_string(dimension_cap));
    }
    const SectorBasis basis(shape);
    const int M = shape.M;
    const auto n = static_cast<Eigen::Index>(dim);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(basis.size() * static_cast<std::size_t>(M + 1));
    double lambda = 0.0;
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const Bitmask c = basis.config(col);
        int hops = 0;
        for (int j = 1; j <= M; ++j) {
            const int next = (j % M) + 1;
            if (next == j || !site_occupied(c, j) || site_occupied(c, next)) {
                continue;
            }
            const Bitmask moved = (c & ~(Bitmask{1} << (j - 1))) | (Bitmask{1} << (next - 1));
            triplets.emplace_back(static_cast<Eigen::Index>(basis.index_of(moved)),
                                  static_cast<Eigen::Index>(col), -1.0);
            ++hops;
        }
        if (hops > 0) {
            triplets.emplace_back(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col),
                                  static_cast<double>(hops));
        }
        lambda = std::max(lambda, static_cast<double>(hops));
    }

    MarkovGenerator gen;
    gen.shape = shape;
    gen.sparse.resize(n, n);
    gen.sparse.setFromTriplets(triplets.begin(), triplets.end());
    gen.sparse.makeCompressed();
    gen.matrix = RealMatrix(gen.sparse);
    gen.lambda_max = lambda;
    return gen;
}

struct SpectrumReport {
    std::vector<cplx> eigenvalues; // sorted by (real, imag)
    std::size_t zero_index = 0;
    double gap = 0.0;              // smallest positive real part; 0 for a 1-dim sector
};

inline SpectrumReport spectrum(const MarkovGenerator &gen, double zero_tol = tol::spectral) {
    SpectrumReport report;
    if (gen.dimension() == 0) {
        throw DomainError("spectrum: empty generator");
    }
    Eigen::EigenSolver<RealMatrix> solver(gen.matrix, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        std::ostringstream dump;
        dump << "eigensolver failed to converge for M=" << gen.shape.M << " N=" << gen.shape.N
             << "; matrix:\n"
             << gen.matrix;
        throw ConvergenceError(dump.str());
    }
    const auto &ev = solver.eigenvalues();
    report.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(report.eigenvalues.begin(), report.eigenvalues.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    std::size_t zeros = 0;
    double best = std::numeric_limits<double>::infinity();
    report.gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
        const double mag = std::abs(report.eigenvalues[i]);
        if (mag < zero_tol) {
            ++zeros;
        }
        if (mag < best) {
            best = mag;
            report.zero_index = i;
        }
    }
    if (zeros != 1) {
        throw ValidationError("spectrum: expected exactly one zero eigenvalue, found " +
                              std::to_string(zeros));
    }
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
        if (i != report.zero_index) {
            report.gap = std::min(report.gap, report.eigenvalues[i].real());
        }
    }
    if (!std::isfinite(report.gap)) {
        report.gap = 0.0;
    }
    return report;
}

/// e^{-tH} vec by uniformization: with P = I - H/Lambda,
/// e^{-tH} = sum_k Poisson(k; Lambda t) P^k, truncated once the Poisson tail
/// is below tol::poisson_tail. Weights are formed in log space so that large
/// Lambda t does not underflow e^{-Lambda t}.
inline RealVector evolve(const MarkovGenerator &gen, const RealVector &vec, double t) {
    if (!(t >= 0.0)) {
        throw DomainError("evolve: time must be non-negative (pass |t|)");
    }
    if (vec.size() != gen.dimension()) {
        throw DomainError("evolve: vector length does not match sector dimension");
    }
    const double lambda = gen.lambda_max;
    if (t == 0.0 || lambda == 0.0) {
        return vec;
    }
    const double mean = lambda * t;
    const double log_mean = std::log(mean);

    RealVector power = vec; // P^k vec
    RealVector result = RealVector::Zero(vec.size());
    double log_weight = -mean; // log Poisson(0)
    for (long k = 0;; ++k) {
        if (k > 0) {
            log_weight += log_mean - std::log(static_cast<double>(k));
            power -= (gen.sparse * power) / lambda;
        }
        const double weight = std::exp(log_weight);
        result += weight * power;
        // Geometric bound on the remaining tail once the weights decrease.
        const double ratio = mean / static_cast<double>(k + 2);
        if (static_cast<double>(k) > mean && ratio < 1.0) {
            const double tail = std::exp(log_weight + log_mean - std::log(static_cast<double>(k + 1))) /
                                (1.0 - ratio);
            if (tail < tol::poisson_tail) {
                break;
            }
        }
    }
    return result;
}

/// (1/Z) <s_left , e^{-tH} s_right 1>: probability that site `right_site` is
/// empty at time 0 and site `left_site` is empty at time t, in the stationary state.
inline double two_time_correlation(const MarkovGenerator &gen, const SectorBasis &basis, int left_site,
                                   int right_site, double t) {
    const RealVector start = projector_mask(basis, right_site);
    const RealVector evolved = evolve(gen, start, t);
    return projector_mask(basis, left_site).dot(evolved) / static_cast<double>(basis.size());
}

/// Z^{-1} <S| s_1 e^{-tH} s_m |S>.
inline double direct_correlation(const MarkovGenerator &gen, const SectorBasis &basis, int m, double t) {
    return two_time_correlation(gen, basis, 1, m, t);
}

inline double direct_correlation(const RingShape &shape, int m, double t) {
    const SectorBasis basis(shape);
    return direct_correlation(build_generator(shape), basis, m, t);
}

} // namespace tasep
