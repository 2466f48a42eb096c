#pragma once

// Enumeration of all solutions of the periodic TASEP Bethe equations.
//
// In the variables w_j = u_j^{-2} the equations decouple into
//
//     w_n^N = B (1 - w_n)^M,      B = (-1)^{N-1} prod_j w_j,
//
// i.e. every root is one of the M roots of p_B(w) = w^N - B (1 - w)^M and B
// must be self-consistent. Write B = exp(M b). With the principal-branch
// map g(w) = (N/M) Ln w - Ln(1 - w), the M roots of p_B are sent one-to-one
// onto the points b + 2 pi i k / M whose imaginary part lies in (-pi, pi].
// That gives every root a global integer label k in [0, M) that does not
// depend on tracking history. A solution is then fixed by an N-subset of
// labels and the scalar fixed point
//
//     b = ( i pi (N-1) + sum_{k in subset} Ln w_k(b) ) / M.
//
// One subset drives B -> 0 (the stationary state, handled analytically); the
// remaining C(M,N) - 1 subsets each give one nontrivial solution.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tasep/combinat.hpp"

namespace tasep {

struct BetheSolution {
    std::vector<cplx> w;     // w_j = u_j^{-2}
    cplx B{0.0, 0.0};        // self-consistency constant (-1)^{N-1} prod w_j
    cplx energy{0.0, 0.0};   // E = sum_j w_j / (w_j - 1)
    cplx U2{1.0, 0.0};       // prod_j u_j^2
    cplx theta1{1.0, 0.0};   // shift eigenvalue prod_j 1 / (1 - w_j)
    double residual = 0.0;
    std::vector<int> subset; // root labels that produced this solution
};

struct SolverOptions {
    double tol = tol::bethe_residual;
    int max_iterations = 500;
    unsigned threads = 1;
};

struct SolverDiagnostics {
    std::size_t subsets = 0;
    std::size_t stationary_subsets = 0;
    std::size_t retried_subsets = 0;
    std::size_t failed_subsets = 0;
    std::size_t label_collisions = 0;
    std::size_t duplicates_merged = 0;
    std::vector<std::string> messages;
};

struct SolutionCatalog {
    RingShape shape;
    std::vector<BetheSolution> solutions; // nontrivial solutions only
    bool includes_stationary = true;
    SolverDiagnostics diagnostics;

    std::size_t expected_nontrivial() const { return sector_dimension(shape) - 1; }
    std::size_t total_count() const { return solutions.size() + (includes_stationary ? 1 : 0); }
    double max_residual() const {
        double r = 0.0;
        for (const auto &s : solutions) {
            r = std::max(r, s.residual);
        }
        return r;
    }
};

// ---------------------------------------------------------------------------
// Polynomial roots

/// Roots of sum_k coeffs[k] z^k via companion-matrix eigenvalues, each
/// polished by Newton iteration on the original polynomial.
inline std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs) {
    std::size_t degree = coeffs.size();
    while (degree > 0 && coeffs[degree - 1] == cplx{0.0, 0.0}) {
        --degree;
    }
    if (degree <= 1) {
        return {};
    }
    const auto n = static_cast<Eigen::Index>(degree - 1);
    const cplx lead = coeffs[degree - 1];
    ComplexMatrix companion = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        companion(i, i - 1) = 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        companion(i, n - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("polynomial_roots: companion eigensolver failed");
    }
    std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    for (auto &z : roots) {
        for (int it = 0; it < 3; ++it) {
            cplx p = coeffs[degree - 1];
            cplx dp{0.0, 0.0};
            for (std::size_t k = degree - 1; k-- > 0;) {
                dp = dp * z + p;
                p = p * z + coeffs[k];
            }
            if (dp == cplx{0.0, 0.0}) {
                break;
            }
            const cplx step = p / dp;
            if (!std::isfinite(std::abs(step))) {
                break;
            }
            z -= step;
            if (std::abs(step) <= 1e-16 * std::abs(z)) {
                break;
            }
        }
    }
    return roots;
}

/// The M roots of w^N - B (1 - w)^M, for 0 <= N < M.
inline std::vector<cplx> bethe_polynomial_roots(cplx B, const RingShape &shape) {
    const int M = shape.M;
    const int N = shape.N;
    std::vector<cplx> coeffs(static_cast<std::size_t>(M) + 1, cplx{0.0, 0.0});
    for (int k = 0; k <= M; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        coeffs[static_cast<std::size_t>(k)] = -B * (sign * static_cast<double>(binomial(M, k)));
    }
    coeffs[static_cast<std::size_t>(N)] += 1.0;
    return polynomial_roots(coeffs);
}

/// Principal-branch label map g(w) = (N/M) Ln w - Ln(1 - w).
inline cplx label_map(cplx w, const RingShape &shape) {
    const double rho = static_cast<double>(shape.N) / static_cast<double>(shape.M);
    return rho * std::log(w) - std::log(1.0 - w);
}

/// Roots of p_B for B = exp(M b), indexed by label k in [0, M).
/// Returns nullopt when two roots claim the same label (b on a branch point).
inline std::optional<std::vector<cplx>> labeled_roots(cplx b, const RingShape &shape) {
    const int M = shape.M;
    const cplx B = std::exp(static_cast<double>(M) * b);
    const auto roots = bethe_polynomial_roots(B, shape);
    if (static_cast<int>(roots.size()) != M) {
        return std::nullopt;
    }
    std::vector<cplx> labeled(static_cast<std::size_t>(M));
    std::vector<bool> taken(static_cast<std::size_t>(M), false);
    for (const cplx w : roots) {
        const cplx v = label_map(w, shape);
        const double x = (v.imag() - b.imag()) * M / (2.0 * std::numbers::pi);
        const double nearest = std::round(x);
        if (std::abs(x - nearest) > 0.25) {
            return std::nullopt;
        }
        const int k = ((static_cast<int>(nearest) % M) + M) % M;
        if (taken[static_cast<std::size_t>(k)]) {
            return std::nullopt;
        }
        taken[static_cast<std::size_t>(k)] = true;
        labeled[static_cast<std::size_t>(k)] = w;
    }
    return labeled;
}

// ---------------------------------------------------------------------------
// Per-solution quantities

inline cplx self_consistency_constant(std::span<const cplx> w) {
    cplx prod{1.0, 0.0};
    for (const cplx x : w) {
        prod *= x;
    }
    return (w.size() % 2 == 1) ? prod : -prod;
}

/// max_n |w_n^N (1 - w_n)^{-M} - (-1)^{N-1} prod_j w_j|, each comparison
/// divided by the larger of the two magnitudes. Infinite if some w_j is 0 or 1.
inline double residual(std::span<const cplx> w, const RingShape &shape) {
    for (const cplx x : w) {
        if (x == cplx{0.0, 0.0} || x == cplx{1.0, 0.0}) {
            return std::numeric_limits<double>::infinity();
        }
    }
    const cplx rhs = self_consistency_constant(w);
    double worst = 0.0;
    for (const cplx x : w) {
        const cplx lhs = ipow(x, shape.N) / ipow(1.0 - x, shape.M);
        const double scale = std::max(std::abs(lhs), std::abs(rhs));
        if (scale > 0.0) {
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
    }
    return worst;
}

inline double residual(const BetheSolution &sol, const RingShape &shape) { return residual(sol.w, shape); }

inline cplx bethe_energy(std::span<const cplx> w) {
    cplx e{0.0, 0.0};
    for (const cplx x : w) {
        e += x / (x - 1.0);
    }
    return e;
}

inline BetheSolution make_solution(std::vector<cplx> w, const RingShape &shape) {
    BetheSolution sol;
    sol.w = std::move(w);
    sol.B = self_consistency_constant(sol.w);
    sol.energy = bethe_energy(sol.w);
    for (const cplx x : sol.w) {
        sol.U2 /= x;
        sol.theta1 /= (1.0 - x);
    }
    sol.residual = residual(sol.w, shape);
    return sol;
}

/// Theta_N(v, {u}) = prod u_j^2/(u_j^2 - v^2) + (1 - v^{-2})^M prod v^2/(v^2 - u_j^2),
/// written in w = u^{-2}. All-zero w is the stationary solution (value 1).
inline cplx transfer_eigenvalue(std::span<const cplx> w, cplx v, const RingShape &shape) {
    const cplx v2 = v * v;
    if (v2 == cplx{0.0, 0.0}) {
        throw DomainError("transfer_eigenvalue: v must be nonzero");
    }
    cplx first{1.0, 0.0};
    cplx second = ipow(1.0 - 1.0 / v2, shape.M);
    for (const cplx x : w) {
        const cplx denom = 1.0 - v2 * x;
        if (std::abs(denom) <= 1e-14) {
            throw DomainError("transfer_eigenvalue: pole at v^2 = u_j^2");
        }
        first /= denom;
        second *= -v2 * x / denom;
    }
    return first + second;
}

inline cplx transfer_eigenvalue(const BetheSolution &sol, cplx v, const RingShape &shape) {
    return transfer_eigenvalue(sol.w, v, shape);
}

// ---------------------------------------------------------------------------
// Solver

namespace detail {

/// Damped Newton on f_n(w) = w_n^N - P(w) (1 - w_n)^M, P = (-1)^{N-1} prod w.
inline std::vector<cplx> polish(std::vector<cplx> w, const RingShape &shape) {
    const int N = shape.N;
    const int M = shape.M;
    const auto n = static_cast<Eigen::Index>(w.size());
    auto eval = [&](const std::vector<cplx> &x) {
        ComplexVector f(n);
        const cplx P = self_consistency_constant(x);
        for (Eigen::Index i = 0; i < n; ++i) {
            const cplx xi = x[static_cast<std::size_t>(i)];
            f[i] = ipow(xi, N) - P * ipow(1.0 - xi, M);
        }
        return f;
    };
    ComplexVector f = eval(w);
    for (int it = 0; it < 8; ++it) {
        const cplx P = self_consistency_constant(w);
        ComplexMatrix J(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const cplx xi = w[static_cast<std::size_t>(i)];
            const cplx tail = ipow(1.0 - xi, M);
            for (Eigen::Index k = 0; k < n; ++k) {
                J(i, k) = -tail * P / w[static_cast<std::size_t>(k)];
            }
            J(i, i) += static_cast<double>(N) * ipow(xi, N - 1) +
                       P * static_cast<double>(M) * ipow(1.0 - xi, M - 1);
        }
        const ComplexVector step = J.partialPivLu().solve(f);
        if (!step.allFinite()) {
            break;
        }
        double damping = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 10; ++halving, damping *= 0.5) {
            std::vector<cplx> trial = w;
            for (Eigen::Index i = 0; i < n; ++i) {
                trial[static_cast<std::size_t>(i)] -= damping * step[i];
            }
            const ComplexVector ft = eval(trial);
            if (ft.norm() < f.norm()) {
                w = std::move(trial);
                f = ft;
                improved = true;
                break;
            }
        }
        if (!improved) {
            break;
        }
    }
    return w;
}

enum class SubsetOutcome { solved, stationary, failed };

struct SubsetResult {
    SubsetOutcome outcome = SubsetOutcome::failed;
    BetheSolution solution;
    std::size_t label_collisions = 0;
    bool retried = false;
    std::string message;
};

inline SubsetOutcome iterate_subset(const std::vector<int> &subset, const RingShape &shape,
                                    const SolverOptions &opts, cplx b, double eta, std::vector<cplx> &w_out,
                                    std::size_t &collisions) {
    const int M = shape.M;
    const int N = shape.N;
    // |B| below this is the stationary direction.
    const double stationary_log = std::log(1e-12) / M;
    // Near B = 0 the map only creeps (B_k ~ 1/(M k) for one particle), so a
    // long monotone descent into small |B| also counts as the stationary flow.
    const double creeping_log = std::log(1e-2) / M;
    int descending = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        auto labeled = labeled_roots(b, shape);
        for (int nudge = 1; !labeled && nudge <= 8; ++nudge) {
            ++collisions;
            b += cplx{1e-7 * nudge, 1e-7 * nudge};
            labeled = labeled_roots(b, shape);
        }
        if (!labeled) {
            return SubsetOutcome::failed;
        }
        cplx log_sum{0.0, std::numbers::pi * (N - 1)};
        w_out.clear();
        for (const int k : subset) {
            const cplx x = (*labeled)[static_cast<std::size_t>(k)];
            w_out.push_back(x);
            log_sum += std::log(x);
        }
        const cplx b_next = log_sum / static_cast<double>(M);
        const double change = std::abs(b_next - b);
        descending = b_next.real() < b.real() ? descending + 1 : 0;
        b = (1.0 - eta) * b + eta * b_next;
        if (b.real() < stationary_log) {
            return SubsetOutcome::stationary;
        }
        if (change <= 1e-14 * std::max(1.0, std::abs(b))) {
            auto final_roots = labeled_roots(b, shape);
            if (final_roots) {
                w_out.clear();
                for (const int k : subset) {
                    w_out.push_back((*final_roots)[static_cast<std::size_t>(k)]);
                }
            }
            return SubsetOutcome::solved;
        }
    }
    if (b.real() < creeping_log && descending >= 100) {
        return SubsetOutcome::stationary;
    }
    return SubsetOutcome::failed;
}

inline SubsetResult solve_subset(const std::vector<int> &subset, const RingShape &shape, const SolverOptions &opts) {
    SubsetResult result;
    // First pass undamped from B = 1; retries damp the update and move the start.
    const std::array<std::pair<cplx, double>, 3> attempts{{{cplx{0.0, 0.0}, 1.0},
                                                           {cplx{0.05, 0.013}, 0.5},
                                                           {cplx{0.5, -0.021}, 0.5}}};
    std::vector<cplx> w;
    for (std::size_t a = 0; a < attempts.size(); ++a) {
        result.retried = a > 0;
        const auto outcome = iterate_subset(subset, shape, opts, attempts[a].first, attempts[a].second, w,
                                            result.label_collisions);
        if (outcome == SubsetOutcome::stationary) {
            result.outcome = outcome;
            return result;
        }
        if (outcome == SubsetOutcome::solved) {
            BetheSolution sol = make_solution(polish(w, shape), shape);
            if (sol.residual < opts.tol && std::abs(sol.B) > 1e-8) {
                sol.subset = subset;
                result.solution = std::move(sol);
                result.outcome = SubsetOutcome::solved;
                return result;
            }
            if (std::abs(sol.B) <= 1e-8) {
                result.outcome = SubsetOutcome::stationary;
                return result;
            }
            result.message = "residual " + std::to_string(sol.residual) + " above tolerance";
        }
    }
    result.outcome = SubsetOutcome::failed;
    return result;
}

inline std::vector<std::vector<int>> label_subsets(int M, int N) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        cur[static_cast<std::size_t>(i)] = i;
    }
    while (true) {
        out.push_back(cur);
        int i = N - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == M - N + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++cur[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < N; ++j) {
            cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return out;
}

inline std::vector<cplx> sorted_roots(std::vector<cplx> w) {
    std::sort(w.begin(), w.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return w;
}

/// Max-norm distance between two root multisets, minimized greedily.
inline double multiset_distance(const std::vector<cplx> &a, const std::vector<cplx> &b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const cplx x : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && std::abs(x - b[j]) < best) {
                best = std::abs(x - b[j]);
                best_j = j;
            }
        }
        used[best_j] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace detail

/// Throws ValidationError unless the catalog holds C(M,N) - 1 nontrivial
/// solutions, all below the residual tolerance.
inline void validate_catalog(const SolutionCatalog &catalog, double tol = tol::bethe_residual) {
    if (catalog.solutions.size() != catalog.expected_nontrivial()) {
        throw ValidationError("Bethe catalog for M=" + std::to_string(catalog.shape.M) +
                              " N=" + std::to_string(catalog.shape.N) + " has " +
                              std::to_string(catalog.solutions.size()) + " nontrivial solutions, expected " +
                              std::to_string(catalog.expected_nontrivial()));
    }
    if (catalog.max_residual() >= tol) {
        throw ValidationError("Bethe catalog residual " + std::to_string(catalog.max_residual()) +
                              " exceeds tolerance");
    }
}

/// All nontrivial solutions for the shape. Output order is deterministic:
/// sorted by (Re E, Im E, sorted w lexicographically). Completeness is not
/// enforced here; use validate_catalog.
inline SolutionCatalog solve_all(const RingShape &shape, const SolverOptions &opts = {}) {
    shape.validate();
    SolutionCatalog catalog;
    catalog.shape = shape;
    if (shape.N == 0 || shape.N == shape.M) {
        return catalog;
    }

    const auto subsets = detail::label_subsets(shape.M, shape.N);
    std::vector<detail::SubsetResult> results(subsets.size());
    const unsigned threads = std::max(1U, std::min<unsigned>(opts.threads, static_cast<unsigned>(subsets.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < subsets.size(); i += threads) {
                    results[i] = detail::solve_subset(subsets[i], shape, opts);
                }
            });
        }
    }

    auto &diag = catalog.diagnostics;
    diag.subsets = subsets.size();
    for (std::size_t i = 0; i < results.size(); ++i) {
        auto &r = results[i];
        diag.label_collisions += r.label_collisions;
        diag.retried_subsets += r.retried ? 1 : 0;
        switch (r.outcome) {
        case detail::SubsetOutcome::stationary:
            ++diag.stationary_subsets;
            break;
        case detail::SubsetOutcome::failed: {
            ++diag.failed_subsets;
            std::string labels;
            for (const int k : subsets[i]) {
                labels += std::to_string(k) + " ";
            }
            diag.messages.push_back("subset { " + labels + "} did not converge" +
                                    (r.message.empty() ? "" : ": " + r.message));
            break;
        }
        case detail::SubsetOutcome::solved: {
            const auto key = detail::sorted_roots(r.solution.w);
            bool duplicate = false;
            for (const auto &existing : catalog.solutions) {
                if (detail::multiset_distance(detail::sorted_roots(existing.w), key) <= 10.0 * opts.tol) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) {
                ++diag.duplicates_merged;
            } else {
                catalog.solutions.push_back(std::move(r.solution));
            }
            break;
        }
        }
    }
    if (diag.stationary_subsets != 1) {
        diag.messages.push_back(std::to_string(diag.stationary_subsets) + " subsets flowed to the stationary state");
    }

    std::sort(catalog.solutions.begin(), catalog.solutions.end(), [](const BetheSolution &a, const BetheSolution &b) {
        if (a.energy.real() != b.energy.real()) {
            return a.energy.real() < b.energy.real();
        }
        if (a.energy.imag() != b.energy.imag()) {
            return a.energy.imag() < b.energy.imag();
        }
        const auto wa = detail::sorted_roots(a.w);
        const auto wb = detail::sorted_roots(b.w);
        return std::lexicographical_compare(wa.begin(), wa.end(), wb.begin(), wb.end(), [](cplx x, cplx y) {
            return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
        });
    });
    return catalog;
}

} // namespace tasep
