#pragma once

// Cross-validation checks shared by the `selftest` command and the acceptance
// suite. Each check compares two independent routes to the same quantity and
// reports the worst discrepancy against a fixed threshold.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tasep/bethe.hpp"
#include "tasep/correlator.hpp"
#include "tasep/detforms.hpp"
#include "tasep/montecarlo.hpp"
#include "tasep/oracle.hpp"
#include "tasep/qism.hpp"

namespace tasep::validation {

struct CheckResult {
    std::string name;
    bool passed = false;
    double metric = 0.0;    // worst observed discrepancy
    double threshold = 0.0; // pass iff metric < threshold (or the check's own rule)
    std::string detail;
};

inline std::string shape_label(const RingShape &s) {
    return "M=" + std::to_string(s.M) + " N=" + std::to_string(s.N);
}

inline CheckResult finish(std::string name, double metric, double threshold, std::string detail = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.metric = metric;
    r.threshold = threshold;
    r.passed = std::isfinite(metric) && metric < threshold;
    r.detail = std::move(detail);
    return r;
}

inline CheckResult failure(std::string name, double threshold, const std::exception &e) {
    CheckResult r;
    r.name = std::move(name);
    r.threshold = threshold;
    r.metric = std::numeric_limits<double>::infinity();
    r.detail = e.what();
    return r;
}

/// Random nonzero rapidity with modulus in [lo, hi].
inline cplx draw_rapidity(std::mt19937_64 &rng, double lo = 0.6, double hi = 1.8) {
    std::uniform_real_distribution<double> radius(lo, hi);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    return std::polar(radius(rng), angle(rng));
}

inline std::vector<cplx> draw_rapidities(std::mt19937_64 &rng, int n) {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.push_back(draw_rapidity(rng));
    }
    return out;
}

inline double relative_error(cplx got, cplx want) {
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

// ---------------------------------------------------------------------------
// End-to-end correlation

/// max |Bethe sum - brute force| over every m in [1, M] and every t.
inline CheckResult correlator_vs_oracle(const RingShape &shape, const SolutionCatalog &catalog,
                                        const std::vector<double> &times, double threshold = 1e-8,
                                        CorrelatorOptions opts = {}) {
    const std::string name = "correlation Bethe vs generator " + shape_label(shape);
    try {
        const Correlator corr(catalog, opts);
        const auto gen = build_generator(shape);
        const SectorBasis basis(shape);
        double worst = 0.0;
        for (int m = 1; m <= shape.M; ++m) {
            for (const double t : times) {
                worst = std::max(worst, std::abs(corr(m, t).value - direct_correlation(gen, basis, m, t)));
            }
        }
        return finish(name, worst, threshold);
    } catch (const std::exception &e) {
        return failure(name, threshold, e);
    }
}

// ---------------------------------------------------------------------------
// Bethe catalog

/// Greedy nearest-neighbour matching of two complex multisets; returns the
/// worst matched distance, or infinity on a size mismatch.
inline double multiset_match(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const cplx x : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = b.size();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && std::abs(x - b[j]) < best) {
                best = std::abs(x - b[j]);
                best_j = j;
            }
        }
        if (best_j == b.size()) {
            return std::numeric_limits<double>::infinity();
        }
        used[best_j] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

/// Count = C(M,N) - 1, residuals < residual_tol, energies ∪ {0} = generator spectrum.
inline CheckResult bethe_completeness(const SolutionCatalog &catalog, double residual_tol = 1e-10,
                                      double spectral_tol = 1e-8) {
    const RingShape &shape = catalog.shape;
    const std::string name = "Bethe completeness " + shape_label(shape);
    try {
        std::ostringstream detail;
        detail << catalog.solutions.size() << "/" << catalog.expected_nontrivial() << " solutions, max residual "
               << catalog.max_residual();
        if (catalog.solutions.size() != catalog.expected_nontrivial() || !(catalog.max_residual() < residual_tol)) {
            auto r = finish(name, std::numeric_limits<double>::infinity(), spectral_tol, detail.str());
            return r;
        }
        std::vector<cplx> energies{cplx{0.0, 0.0}};
        for (const auto &s : catalog.solutions) {
            energies.push_back(s.energy);
        }
        const auto report = spectrum(build_generator(shape));
        const double dist = multiset_match(energies, report.eigenvalues);
        return finish(name, dist, spectral_tol, detail.str());
    } catch (const std::exception &e) {
        return failure(name, spectral_tol, e);
    }
}

/// For every solution, the conjugate root multiset is also in the catalog.
inline CheckResult conjugation_closure(const SolutionCatalog &catalog, double tol = 1e-8) {
    double worst = 0.0;
    for (const auto &s : catalog.solutions) {
        std::vector<cplx> conj;
        for (const cplx x : s.w) {
            conj.push_back(std::conj(x));
        }
        double best = std::numeric_limits<double>::infinity();
        for (const auto &other : catalog.solutions) {
            best = std::min(best, multiset_match(conj, other.w));
        }
        worst = std::max(worst, best);
    }
    return finish("conjugation closure " + shape_label(catalog.shape), worst, tol);
}

/// Sum of energies equals trace(H) = M C(M-2, N-1).
inline CheckResult energy_sum_rule(const SolutionCatalog &catalog, double rel_tol = 1e-6) {
    const RingShape &shape = catalog.shape;
    cplx sum{0.0, 0.0};
    for (const auto &s : catalog.solutions) {
        sum += s.energy;
    }
    const double trace = shape.M >= 2 ? static_cast<double>(shape.M) *
                                            static_cast<double>(binomial(shape.M - 2, shape.N - 1))
                                      : 0.0;
    return finish("energy sum rule " + shape_label(shape), std::abs(sum - trace) / std::max(1.0, trace), rel_tol);
}

/// Theta_N(1)^M = 1 for every solution.
inline CheckResult shift_eigenvalue_roots_of_unity(const SolutionCatalog &catalog, double tol = 1e-8) {
    double worst = 0.0;
    for (const auto &s : catalog.solutions) {
        worst = std::max(worst, std::abs(ipow(s.theta1, catalog.shape.M) - 1.0));
    }
    return finish("shift eigenvalue M-th root of unity " + shape_label(catalog.shape), worst, tol);
}

// ---------------------------------------------------------------------------
// Determinant formulas against the 2^M construction

inline CheckResult scalar_product_vs_qism(int M, int N, int draws, std::uint64_t seed, double threshold = 1e-10) {
    const std::string name = "scalar product det Q vs qism M=" + std::to_string(M) + " N=" + std::to_string(N);
    try {
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        for (int d = 0; d < draws; ++d) {
            const auto v = draw_rapidities(rng, N);
            const auto u = draw_rapidities(rng, N);
            const cplx direct = qism::pair(qism::build_state(v, qism::Side::left, M),
                                           qism::build_state(u, qism::Side::right, M));
            worst = std::max(worst, relative_error(scalar_product(v, u, M), direct));
        }
        return finish(name, worst, threshold);
    } catch (const std::exception &e) {
        return failure(name, threshold, e);
    }
}

/// Generic <Psi(v)|s_1|Psi(u)> reduction plus the right/left form factors and
/// steady-state overlaps at random off-shell points.
inline CheckResult form_factors_vs_qism(int M, int N, int draws, std::uint64_t seed, double threshold = 1e-10) {
    const std::string name = "form factors vs qism M=" + std::to_string(M) + " N=" + std::to_string(N);
    try {
        std::mt19937_64 rng(seed);
        const ComplexVector steady = qism::steady_state(M, N);
        const ComplexVector steady_s1 = qism::apply_empty_projector(steady, 1);
        double worst = 0.0;
        for (int d = 0; d < draws; ++d) {
            const auto v = draw_rapidities(rng, N);
            const auto u = draw_rapidities(rng, N);
            const ComplexVector left_v = qism::build_state(v, qism::Side::left, M);
            const ComplexVector right_u = qism::build_state(u, qism::Side::right, M);
            const ComplexVector left_u = qism::build_state(u, qism::Side::left, M);
            const RapiditySet ru = RapiditySet::from_u(u);

            const cplx generic_direct = qism::pair(left_v, qism::apply_empty_projector(right_u, 1));
            worst = std::max(worst, relative_error(form_factor_s1_generic(v, u, M), generic_direct));

            worst = std::max(worst, relative_error(form_factor_s1_right(ru, M), qism::pair(steady_s1, right_u)));
            worst = std::max(worst, relative_error(form_factor_s1_left(ru, M), qism::pair(left_u, steady_s1)));
            worst = std::max(worst, relative_error(steady_overlap_right(ru, M), qism::pair(steady, right_u)));
            worst = std::max(worst, relative_error(steady_overlap_left(ru, M), qism::pair(left_u, steady)));
        }
        return finish(name, worst, threshold);
    } catch (const std::exception &e) {
        return failure(name, threshold, e);
    }
}

/// det Q̃ norm vs <Psi(u)|Psi(u)> for every catalog solution; stationary norm = Z_N.
inline CheckResult norms_vs_qism(const SolutionCatalog &catalog, double threshold = 1e-8) {
    const RingShape &shape = catalog.shape;
    const std::string name = "norm det Q~ vs qism " + shape_label(shape);
    try {
        double worst = 0.0;
        for (const auto &sol : catalog.solutions) {
            const RapiditySet r = RapiditySet::from_w(sol.w);
            const auto u = r.principal_u();
            const cplx direct = qism::pair(qism::build_state(u, qism::Side::left, shape.M),
                                           qism::build_state(u, qism::Side::right, shape.M));
            worst = std::max(worst, relative_error(norm_squared(r, shape), direct));
        }
        const double z = stationary_norm_squared(shape);
        const double steady_direct = qism::pair(qism::steady_state(shape.M, shape.N),
                                                qism::steady_state(shape.M, shape.N))
                                         .real();
        if (z != steady_direct) {
            worst = std::numeric_limits<double>::infinity();
        }
        return finish(name, worst, threshold);
    } catch (const std::exception &e) {
        return failure(name, threshold, e);
    }
}

// ---------------------------------------------------------------------------
// Algebraic identities

inline CheckResult rtt_identity(int M, int draws, std::uint64_t seed, double threshold = 1e-12) {
    const std::string name = "RTT relation M=" + std::to_string(M);
    try {
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        for (int d = 0; d < draws; ++d) {
            const cplx u = draw_rapidity(rng);
            cplx v = draw_rapidity(rng);
            while (std::abs(u * u - v * v) < 0.1) {
                v = draw_rapidity(rng);
            }
            worst = std::max(worst, qism::rtt_residual(u, v, M));
            worst = std::max(worst, qism::exchange_residuals(u, v, M).max());
            const auto tu = qism::transfer_matrix(u, M);
            const auto tv = qism::transfer_matrix(v, M);
            worst = std::max(worst, qism::relative_gap(tu * tv, tv * tu));
        }
        return finish(name, worst, threshold);
    } catch (const std::exception &e) {
        return failure(name, threshold, e);
    }
}

/// tau^M = I and tau(1) = Pi_12 ... Pi_{M-1,M}, both exactly.
inline CheckResult shift_operator_identities(int M) {
    const std::string name = "shift operator tau^M = I, tau(1) = Pi product M=" + std::to_string(M);
    try {
        const auto tau = qism::shift_operator(M);
        auto power = qism::TensorOperator::identity(M);
        for (int i = 0; i < M; ++i) {
            power = power * tau;
        }
        const double identity_gap = (power - qism::TensorOperator::identity(M)).max_abs();
        const double transfer_gap = (qism::transfer_matrix(1.0, M) - tau).max_abs();
        CheckResult r = finish(name, std::max(identity_gap, transfer_gap), 0.0);
        r.passed = identity_gap == 0.0 && transfer_gap == 0.0;
        return r;
    } catch (const std::exception &e) {
        return failure(name, 0.0, e);
    }
}

/// Transfer-matrix Hamiltonian vs Pauli form (full space) and vs the sector generators.
inline CheckResult transfer_hamiltonian(int M, double threshold = 1e-8) {
    const std::string name = "H from transfer matrix M=" + std::to_string(M);
    try {
        const auto from_transfer = qism::hamiltonian_from_transfer(M);
        double worst = (from_transfer.H - qism::hamiltonian_pauli(M)).max_abs();
        for (int N = 0; N <= M; ++N) {
            const RingShape shape{M, N};
            const ComplexMatrix sector = qism::restrict_to_sector(from_transfer.H, shape);
            const RealMatrix oracle = build_generator(shape).matrix;
            worst = std::max(worst, (sector - oracle.cast<cplx>()).cwiseAbs().maxCoeff());
        }
        return finish(name, worst, threshold);
    } catch (const std::exception &e) {
        return failure(name, threshold, e);
    }
}

// ---------------------------------------------------------------------------
// Sum rules and limits

inline CheckResult static_sum_rules(const SolutionCatalog &catalog, double threshold = 1e-8) {
    const RingShape &shape = catalog.shape;
    const std::string name = "t=0 sum rules " + shape_label(shape);
    try {
        const Correlator corr(catalog);
        double worst = 0.0;
        for (int m = 1; m <= shape.M; ++m) {
            worst = std::max(worst, std::abs(corr(m, 0.0).value - static_two_point(shape, m)));
        }
        return finish(name, worst, threshold);
    } catch (const std::exception &e) {
        return failure(name, threshold, e);
    }
}

/// At t = 50/gap both routes sit at ((M-N)/M)^2.
inline CheckResult long_time_limit(const SolutionCatalog &catalog, double threshold = 1e-6) {
    const RingShape &shape = catalog.shape;
    const std::string name = "t->inf limit " + shape_label(shape);
    try {
        const auto gen = build_generator(shape);
        const auto report = spectrum(gen);
        const double limit = std::pow(static_cast<double>(shape.M - shape.N) / shape.M, 2);
        if (report.gap <= 0.0) {
            // One configuration: the correlation is constant.
            const double v = direct_correlation(gen, SectorBasis(shape), 1, 0.0);
            return finish(name, std::abs(v - limit), threshold, "single configuration");
        }
        const double t = 50.0 / report.gap;
        const Correlator corr(catalog);
        const SectorBasis basis(shape);
        double worst = 0.0;
        for (int m = 1; m <= shape.M; ++m) {
            worst = std::max(worst, std::abs(corr(m, t).value - limit));
            worst = std::max(worst, std::abs(direct_correlation(gen, basis, m, t) - limit));
        }
        return finish(name, worst, threshold, "t=" + std::to_string(t));
    } catch (const std::exception &e) {
        return failure(name, threshold, e);
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct ZScoreSummary {
    double single_z = 0.0;
    double mean_z = 0.0;
    double max_abs_z = 0.0;
};

inline ZScoreSummary monte_carlo_zscores(const RingShape &shape, int m, double t, std::uint64_t samples,
                                         int seeds, std::uint64_t base_seed, double exact, unsigned threads = 1) {
    ZScoreSummary out;
    for (int s = 0; s < seeds; ++s) {
        McConfig cfg{shape, samples, t, m, base_seed + static_cast<std::uint64_t>(s), threads};
        const auto est = estimate_correlation(cfg);
        const double z = (est.mean - exact) / est.std_error;
        if (s == 0) {
            out.single_z = z;
        }
        out.mean_z += z / seeds;
        out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full invariant matrix

struct SelftestOptions {
    int max_M = 6;
    unsigned threads = 1;
    std::uint64_t seed = 20240601;
    bool inject_sign_fault = false;
};

/// Every check for every shape with M <= max_M. The 2^M constructions are
/// capped at M = 8 (RTT at M = 6); Monte Carlo runs only when (4,2) is in range.
inline std::vector<CheckResult> run_selftest(const SelftestOptions &opts) {
    if (opts.max_M < 1 || opts.max_M > 10) {
        throw DomainError("selftest: max_M must be in [1, 10]");
    }
    std::vector<CheckResult> out;
    const std::vector<double> times{0.0, 0.1, 0.5, 1.0, 2.0, 5.0};
    CorrelatorOptions copts;
    copts.inject_sign_fault = opts.inject_sign_fault;
    SolverOptions sopts;
    sopts.threads = opts.threads;

    for (int M = 1; M <= opts.max_M; ++M) {
        for (int N = 1; N < M; ++N) {
            const RingShape shape{M, N};
            const auto catalog = solve_all(shape, sopts);
            out.push_back(bethe_completeness(catalog));
            out.push_back(conjugation_closure(catalog));
            out.push_back(energy_sum_rule(catalog));
            out.push_back(shift_eigenvalue_roots_of_unity(catalog));
            out.push_back(correlator_vs_oracle(shape, catalog, times, 1e-8, copts));
            out.push_back(static_sum_rules(catalog));
            out.push_back(long_time_limit(catalog));
            if (M <= 8) {
                out.push_back(norms_vs_qism(catalog));
            }
        }
        if (M <= 8) {
            for (int N = 1; N <= std::min(3, M); ++N) {
                out.push_back(scalar_product_vs_qism(M, N, 20, opts.seed + 100 * M + N));
                if (N < M) {
                    out.push_back(form_factors_vs_qism(M, N, 20, opts.seed + 1000 * M + N));
                }
            }
            if (M >= 2) {
                // On one site the periodic bond is a self-loop and the
                // logarithmic derivative no longer produces a generator.
                out.push_back(transfer_hamiltonian(M));
            }
            out.push_back(shift_operator_identities(M));
        }
        if (M <= 6) {
            out.push_back(rtt_identity(M, 10, opts.seed + M));
        }
    }
    if (opts.max_M >= 4) {
        const RingShape shape{4, 2};
        const double exact = direct_correlation(shape, 3, 1.0);
        const auto z = monte_carlo_zscores(shape, 3, 1.0, 100000, 1, opts.seed, exact, opts.threads);
        out.push_back(finish("Monte Carlo (4,2,3,1) within 3 sigma", std::abs(z.single_z), 3.0));
    }
    return out;
}

} // namespace tasep::validation
