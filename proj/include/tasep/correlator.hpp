#pragma once

// Spectral representation of the stationary two-time correlation
//
//   C(m, t) = Z_N^{-1} <S_N| s_1 e^{-tH} s_m |S_N>
//           = ((M-N)/M)^2
//             + Z_N^{-1} sum_{u != stationary} e^{-tE} U^{-2N}
//                 prod_j (u_j^2 - 1) u_j^2 / (1 - u_j^{-2})^{m-1}
//                 det Ṽ^{(M-1)} det V^{(M-1)} / det Q̃
//
// evaluated directly from the Bethe catalog in w = u^{-2} variables. The
// Vandermonde-type prefactors of the individual form factors and the norm
// cancel and never appear here.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tasep/bethe.hpp"
#include "tasep/detforms.hpp"

namespace tasep {

struct CorrelationTerm {
    std::size_t solution_id = 0;
    cplx contribution{0.0, 0.0};
};

struct CorrelationResult {
    int m = 1;
    double t = 0.0;
    double value = 0.0;
    double stationary_term = 0.0;
    std::vector<CorrelationTerm> terms;
    double imag_leak = 0.0;
    std::vector<std::string> warnings;
};

struct CorrelatorOptions {
    double imag_leak_limit = tol::imag_leak;
    // Mutation-testing hook: flips the sign of det Ṽ so validation suites can
    // confirm that a transcription sign error is caught.
    bool inject_sign_fault = false;
};

/// prod_j (1 - w_j)^{1-m} = Theta_N(1, {u})^{m-1}.
inline cplx translation_factor(std::span<const cplx> w, int m) {
    if (m < 1) {
        throw DomainError("translation_factor: m must be >= 1");
    }
    cplx theta{1.0, 0.0};
    for (const cplx x : w) {
        if (x == cplx{1.0, 0.0}) {
            throw DomainError("translation_factor: pole at w = 1");
        }
        theta /= (1.0 - x);
    }
    return ipow(theta, m - 1);
}

inline cplx translation_factor(const BetheSolution &sol, int m) { return translation_factor(sol.w, m); }

/// Precomputes the time- and site-independent amplitude of every nontrivial
/// solution, then evaluates C(m, t) for any (m, t).
class Correlator {
  public:
    explicit Correlator(SolutionCatalog catalog, CorrelatorOptions opts = {})
        : catalog_(std::move(catalog)), opts_(opts) {
        validate_catalog(catalog_);
        const RingShape &shape = catalog_.shape;
        const double z = static_cast<double>(sector_dimension(shape));
        const double density_empty = static_cast<double>(shape.M - shape.N) / static_cast<double>(shape.M);
        stationary_term_ = density_empty * density_empty;
        amplitudes_.reserve(catalog_.solutions.size());
        for (const auto &sol : catalog_.solutions) {
            const RapiditySet r = RapiditySet::from_w(sol.w);
            LogValue amp;
            LogValue u2_product;
            for (std::size_t j = 0; j < r.size(); ++j) {
                amp *= (r.u2(j) - 1.0) * r.u2(j);
                u2_product *= r.u2(j);
            }
            for (int i = 0; i < shape.N; ++i) {
                amp /= u2_product;
            }
            Determinant left = lu_determinant(vtilde_matrix(r, shape.M - 1));
            const Determinant right = lu_determinant(v_matrix(r, shape.M - 1));
            const Determinant norm = lu_determinant(qtilde_matrix(r, shape.M));
            if (opts_.inject_sign_fault) {
                left.det.phase = -left.det.phase;
            }
            amp *= left.det;
            amp *= right.det;
            amp /= norm.det;
            amp /= cplx{z, 0.0};
            amplitudes_.push_back(amp);
        }
    }

    const SolutionCatalog &catalog() const { return catalog_; }
    double stationary_term() const { return stationary_term_; }

    CorrelationResult operator()(int m, double t) const {
        const RingShape &shape = catalog_.shape;
        if (!(t >= 0.0)) {
            throw DomainError("correlation: t must be non-negative (pass |t|)");
        }
        CorrelationResult result;
        if (m < 1 || m > shape.M) {
            const int reduced = ((m - 1) % shape.M + shape.M) % shape.M + 1;
            result.warnings.push_back("site m=" + std::to_string(m) + " reduced to " + std::to_string(reduced));
            m = reduced;
        }
        result.m = m;
        result.t = t;
        result.stationary_term = stationary_term_;
        result.terms.reserve(amplitudes_.size());
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            const auto &sol = catalog_.solutions[i];
            LogValue term = amplitudes_[i];
            term *= std::exp(-t * sol.energy);
            term *= translation_factor(sol, m);
            result.terms.push_back({i, term.value()});
        }

        // Neumaier summation in descending magnitude.
        std::vector<cplx> ordered;
        ordered.reserve(result.terms.size());
        for (const auto &term : result.terms) {
            ordered.push_back(term.contribution);
        }
        std::sort(ordered.begin(), ordered.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
        cplx sum{stationary_term_, 0.0};
        cplx compensation{0.0, 0.0};
        for (const cplx x : ordered) {
            const cplx next = sum + x;
            auto comp = [](double s, double a, double n) {
                return std::abs(s) >= std::abs(a) ? (s - n) + a : (a - n) + s;
            };
            compensation += cplx{comp(sum.real(), x.real(), next.real()), comp(sum.imag(), x.imag(), next.imag())};
            sum = next;
        }
        sum += compensation;

        result.value = sum.real();
        result.imag_leak = std::abs(sum.imag());
        if (result.imag_leak > opts_.imag_leak_limit) {
            throw ValidationError("correlation: imaginary leak " + std::to_string(result.imag_leak) +
                                  " (missing conjugate solution or sign error)");
        }
        return result;
    }

  private:
    SolutionCatalog catalog_;
    CorrelatorOptions opts_;
    double stationary_term_ = 0.0;
    std::vector<LogValue> amplitudes_;
};

inline CorrelationResult correlation(const RingShape &shape, int m, double t, const SolutionCatalog &catalog) {
    if (!(catalog.shape == shape)) {
        throw DomainError("correlation: catalog shape does not match");
    }
    return Correlator(catalog)(m, t);
}

struct SumRule {
    double lhs = 0.0; // Bethe sum at t = 0
    double rhs = 0.0; // combinatorial count
};

/// Static two-point probability: C(M-2,N)/C(M,N) for m != 1, (M-N)/M for m = 1.
inline double static_two_point(const RingShape &shape, int m) {
    const double z = static_cast<double>(sector_dimension(shape));
    if (m == 1) {
        return static_cast<double>(shape.M - shape.N) / static_cast<double>(shape.M);
    }
    return static_cast<double>(binomial(shape.M - 2, shape.N)) / z;
}

inline SumRule sum_rule_t0(const RingShape &shape, int m, const SolutionCatalog &catalog) {
    return {correlation(shape, m, 0.0, catalog).value, static_two_point(shape, m)};
}

} // namespace tasep
