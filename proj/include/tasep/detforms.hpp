#pragma once

// Determinant representations of scalar products, steady-state overlaps,
// s_1 form factors and Bethe-state norms.
//
// Everything except the generic scalar product is a function of u^2 only and
// is evaluated from w = u^{-2}. The generic scalar product has odd powers of
// u and v, so it takes the rapidities themselves; the caller is responsible
// for using the same square-root branch everywhere (RapiditySet::principal_u
// is the convention used throughout this library).
//
// Prefactors are accumulated as LogValue and combined with log det before
// exponentiation.

#include <span>
#include <string>
#include <vector>

#include "tasep/bethe.hpp"
#include "tasep/logdet.hpp"

namespace tasep {

/// N Bethe parameters held as w_j = u_j^{-2}.
class RapiditySet {
  public:
    RapiditySet() = default;

    static RapiditySet from_w(std::vector<cplx> w) {
        RapiditySet r;
        r.w_ = std::move(w);
        return r;
    }
    static RapiditySet from_u(std::span<const cplx> u) {
        RapiditySet r;
        for (const cplx x : u) {
            if (x == cplx{0.0, 0.0}) {
                throw DomainError("RapiditySet: u must be nonzero");
            }
            r.w_.push_back(1.0 / (x * x));
        }
        return r;
    }

    std::size_t size() const { return w_.size(); }
    cplx w(std::size_t j) const { return w_[j]; }
    cplx u2(std::size_t j) const { return 1.0 / w_[j]; }
    const std::vector<cplx> &w() const { return w_; }

    /// u_j = 1 / sqrt(w_j), principal branch.
    std::vector<cplx> principal_u() const {
        std::vector<cplx> u;
        u.reserve(w_.size());
        for (const cplx x : w_) {
            u.push_back(1.0 / std::sqrt(x));
        }
        return u;
    }

  private:
    std::vector<cplx> w_;
};

enum class DetKind { Q, Qtilde, V, Vtilde };

inline const char *to_string(DetKind k) {
    switch (k) {
    case DetKind::Q:
        return "Q";
    case DetKind::Qtilde:
        return "Qtilde";
    case DetKind::V:
        return "V";
    case DetKind::Vtilde:
        return "Vtilde";
    }
    return "?";
}

/// One determinant family instance: value = prefactor * det(matrix).
struct DetForm {
    DetKind kind = DetKind::Q;
    int order = 0;
    int lattice_M = 0;
    ComplexMatrix matrix;
    LogValue prefactor;
    Determinant det;

    cplx value() const { return (prefactor * det.det).value(); }
    LogValue log_value() const { return prefactor * det.det; }
    bool ill_conditioned(double threshold = 1e-8) const {
        return det.relative_error_estimate(matrix.rows()) > threshold;
    }
};

namespace detail {

inline void require_nonzero_w(const RapiditySet &r) {
    for (const cplx x : r.w()) {
        if (x == cplx{0.0, 0.0}) {
            throw DomainError("rapidity at infinity (w = 0) is not allowed here");
        }
    }
}

inline bool squares_coincide(cplx a, cplx b) {
    return std::abs(a - b) <= 1e-14 * std::max(std::abs(a), std::abs(b));
}

inline void require_distinct(const RapiditySet &r) {
    for (std::size_t l = 0; l < r.size(); ++l) {
        for (std::size_t n = 0; n < l; ++n) {
            if (squares_coincide(r.w(l), r.w(n))) {
                throw DomainError("coinciding rapidities u_l^2 = u_n^2; use norm_squared for equal sets");
            }
        }
    }
}

/// prod_{l>n} 1/(u_l^2 - u_n^2) (ascending) or prod_{n>l} 1/(u_l^2 - u_n^2) (descending).
inline LogValue inverse_vandermonde(const RapiditySet &r, bool ascending) {
    LogValue p;
    for (std::size_t l = 0; l < r.size(); ++l) {
        for (std::size_t n = 0; n < l; ++n) {
            p /= ascending ? (r.u2(l) - r.u2(n)) : (r.u2(n) - r.u2(l));
        }
    }
    return p;
}

// Horner evaluation of sum_{n=lo}^{hi} (-1)^n C(M,n) x^{n - lo}.
inline cplx alternating_binomial_series(int M, int lo, int hi, cplx x) {
    cplx acc{0.0, 0.0};
    for (int n = hi; n >= lo; --n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        acc = acc * x + sign * static_cast<double>(binomial(M, n));
    }
    return acc;
}

// Row "tail": -sum_{n=N}^{M} (-1)^n C(M,n) w^{n-N+1}.
inline cplx tail_entry(int M, int N, cplx w) {
    return -w * alternating_binomial_series(M, N, M, w);
}

} // namespace detail

/// V^{(lattice_M)}: rows 1..N-1 are sum_{n=0}^{j-1} (-1)^n C(M,n) u^{2(j-1-n)};
/// row N is -sum_{n=N}^{M} (-1)^n C(M,n) u^{-2(n-N+1)}.
///
/// The last-row sum starts at n = N. Starting at n = N-1 adds a constant
/// multiple of row 1, which leaves det unchanged for N >= 2 but is wrong for
/// N = 1 (there is no row 1 to absorb it).
inline ComplexMatrix v_matrix(const RapiditySet &r, int lattice_M) {
    const int N = static_cast<int>(r.size());
    ComplexMatrix V(N, N);
    for (int k = 0; k < N; ++k) {
        const cplx w = r.w(static_cast<std::size_t>(k));
        const cplx u2 = 1.0 / w;
        for (int j = 1; j < N; ++j) {
            // sum_{n=0}^{j-1} (-1)^n C(M,n) u2^{j-1-n} = u2^{j-1} * series in w
            V(j - 1, k) = ipow(u2, j - 1) * detail::alternating_binomial_series(lattice_M, 0, j - 1, w);
        }
        V(N - 1, k) = detail::tail_entry(lattice_M, N, w);
    }
    return V;
}

/// Ṽ^{(lattice_M)}: row 1 is -sum_{n=N}^{M} (-1)^n C(M,n) u^{-2(n-N+1)};
/// rows j = 2..N are sum_{n=0}^{N-j} (-1)^n C(M,n) u^{2(N-j-n)}.
inline ComplexMatrix vtilde_matrix(const RapiditySet &r, int lattice_M) {
    const int N = static_cast<int>(r.size());
    ComplexMatrix V(N, N);
    for (int k = 0; k < N; ++k) {
        const cplx w = r.w(static_cast<std::size_t>(k));
        const cplx u2 = 1.0 / w;
        V(0, k) = detail::tail_entry(lattice_M, N, w);
        for (int j = 2; j <= N; ++j) {
            V(j - 1, k) = ipow(u2, N - j) * detail::alternating_binomial_series(lattice_M, 0, N - j, w);
        }
    }
    return V;
}

/// Q̃_jk = [(N-1 + (M-N+1) w_j) / (1 - w_j)] delta_jk - (1 - delta_jk).
inline ComplexMatrix qtilde_matrix(const RapiditySet &r, int M) {
    const int N = static_cast<int>(r.size());
    ComplexMatrix Q = ComplexMatrix::Constant(N, N, cplx{-1.0, 0.0});
    for (int j = 0; j < N; ++j) {
        const cplx w = r.w(static_cast<std::size_t>(j));
        if (w == cplx{1.0, 0.0}) {
            throw DomainError("qtilde_matrix: pole at w = 1 (u^2 = 1)");
        }
        Q(j, j) = (static_cast<double>(N - 1) + static_cast<double>(M - N + 1) * w) / (1.0 - w);
    }
    return Q;
}

/// <Psi(v_1..v_N) | Psi(u_1..u_N)> on an M-site ring:
/// { prod_j (v_j u_j)^{-(M-1)} prod_{j>k} v_j v_k/(v_k^2 - v_j^2) prod_{l>n} u_l u_n/(u_l^2 - u_n^2) } det Q,
/// Q_jk = { v^M (u - 1/u)^M x^{N-1} - u^M (v - 1/v)^M x^{-(N-1)} } / (x - 1/x), x = u_k / v_j.
inline DetForm scalar_product_form(std::span<const cplx> v, std::span<const cplx> u, int M) {
    if (v.size() != u.size()) {
        throw DomainError("scalar_product: parameter sets differ in size");
    }
    if (M < 1) {
        throw DomainError("scalar_product: M must be positive");
    }
    const int N = static_cast<int>(u.size());
    for (const cplx x : u) {
        if (x == cplx{0.0, 0.0}) {
            throw DomainError("scalar_product: parameters must be nonzero");
        }
    }
    for (const cplx x : v) {
        if (x == cplx{0.0, 0.0}) {
            throw DomainError("scalar_product: parameters must be nonzero");
        }
    }
    for (int a = 0; a < N; ++a) {
        for (int b = 0; b < a; ++b) {
            if (detail::squares_coincide(u[a] * u[a], u[b] * u[b]) ||
                detail::squares_coincide(v[a] * v[a], v[b] * v[b])) {
                throw DomainError("scalar_product: coinciding parameters within a set; use norm_squared");
            }
        }
        for (int b = 0; b < N; ++b) {
            if (detail::squares_coincide(u[b] * u[b], v[a] * v[a])) {
                throw DomainError("scalar_product: v_j^2 = u_k^2 collision");
            }
        }
    }

    DetForm form;
    form.kind = DetKind::Q;
    form.order = N;
    form.lattice_M = M;
    for (int j = 0; j < N; ++j) {
        form.prefactor /= ipow(v[j] * u[j], M - 1);
    }
    for (int j = 0; j < N; ++j) {
        for (int k = 0; k < j; ++k) {
            form.prefactor *= v[j] * v[k] / (v[k] * v[k] - v[j] * v[j]);
            form.prefactor *= u[j] * u[k] / (u[j] * u[j] - u[k] * u[k]);
        }
    }
    form.matrix.resize(N, N);
    for (int j = 0; j < N; ++j) {
        const cplx vj = v[j];
        const cplx v_term = ipow(vj - 1.0 / vj, M);
        for (int k = 0; k < N; ++k) {
            const cplx uk = u[k];
            const cplx x = uk / vj;
            form.matrix(j, k) = (ipow(vj, M) * ipow(uk - 1.0 / uk, M) * ipow(x, N - 1) -
                                 ipow(uk, M) * v_term * ipow(x, -(N - 1))) /
                                (x - 1.0 / x);
        }
    }
    form.det = lu_determinant(form.matrix);
    return form;
}

inline cplx scalar_product(std::span<const cplx> v, std::span<const cplx> u, int M) {
    return scalar_product_form(v, u, M).value();
}

/// <S_N | Psi(u)> = prod u_k^2 prod_{l>n} 1/(u_l^2 - u_n^2) det V^{(M)}.
inline DetForm steady_overlap_right_form(const RapiditySet &r, int M) {
    detail::require_nonzero_w(r);
    detail::require_distinct(r);
    DetForm form;
    form.kind = DetKind::V;
    form.order = static_cast<int>(r.size());
    form.lattice_M = M;
    for (std::size_t k = 0; k < r.size(); ++k) {
        form.prefactor *= r.u2(k);
    }
    form.prefactor *= detail::inverse_vandermonde(r, /*ascending=*/true);
    form.matrix = v_matrix(r, M);
    form.det = lu_determinant(form.matrix);
    return form;
}

/// <Psi(u) | S_N> = prod u_k^2 prod_{n>l} 1/(u_l^2 - u_n^2) det Ṽ^{(M)}.
inline DetForm steady_overlap_left_form(const RapiditySet &r, int M) {
    detail::require_nonzero_w(r);
    detail::require_distinct(r);
    DetForm form;
    form.kind = DetKind::Vtilde;
    form.order = static_cast<int>(r.size());
    form.lattice_M = M;
    for (std::size_t k = 0; k < r.size(); ++k) {
        form.prefactor *= r.u2(k);
    }
    form.prefactor *= detail::inverse_vandermonde(r, /*ascending=*/false);
    form.matrix = vtilde_matrix(r, M);
    form.det = lu_determinant(form.matrix);
    return form;
}

inline cplx steady_overlap_right(const RapiditySet &r, int M) { return steady_overlap_right_form(r, M).value(); }
inline cplx steady_overlap_left(const RapiditySet &r, int M) { return steady_overlap_left_form(r, M).value(); }

/// <S_N | s_1 | Psi(u)> = prod (u_k^2 - 1) prod_{l>n} 1/(u_l^2 - u_n^2) det V^{(M-1)}.
inline DetForm form_factor_s1_right_form(const RapiditySet &r, int M) {
    detail::require_nonzero_w(r);
    detail::require_distinct(r);
    DetForm form;
    form.kind = DetKind::V;
    form.order = static_cast<int>(r.size());
    form.lattice_M = M - 1;
    for (std::size_t k = 0; k < r.size(); ++k) {
        form.prefactor *= r.u2(k) - 1.0;
    }
    form.prefactor *= detail::inverse_vandermonde(r, /*ascending=*/true);
    form.matrix = v_matrix(r, M - 1);
    form.det = lu_determinant(form.matrix);
    return form;
}

/// <Psi(u) | s_1 | S_N> = prod u_k^2 prod_{n>l} 1/(u_l^2 - u_n^2) det Ṽ^{(M-1)}.
inline DetForm form_factor_s1_left_form(const RapiditySet &r, int M) {
    DetForm form = steady_overlap_left_form(r, M - 1);
    form.lattice_M = M - 1;
    return form;
}

inline cplx form_factor_s1_right(const RapiditySet &r, int M) { return form_factor_s1_right_form(r, M).value(); }
inline cplx form_factor_s1_left(const RapiditySet &r, int M) { return form_factor_s1_left_form(r, M).value(); }

/// <Psi(v) | s_1 | Psi(u)> = prod (1 - u_k^{-2}) * <Psi(v)|Psi(u)> on M-1 sites.
inline cplx form_factor_s1_generic(std::span<const cplx> v, std::span<const cplx> u, int M) {
    if (M < 2) {
        throw DomainError("form_factor_s1_generic: needs M >= 2");
    }
    LogValue factor;
    for (const cplx x : u) {
        factor *= 1.0 - 1.0 / (x * x);
    }
    return (factor * scalar_product_form(v, u, M - 1).log_value()).value();
}

/// <Psi(u)|Psi(u)> = U^{2N} prod_{l != n} 1/(u_l^2 - u_n^2) det Q̃, valid on-shell only.
inline DetForm norm_squared_form(const RapiditySet &r, const RingShape &shape, double tol = tol::bethe_residual) {
    shape.validate();
    if (static_cast<int>(r.size()) != shape.N) {
        throw DomainError("norm_squared: expected N rapidities");
    }
    detail::require_nonzero_w(r);
    const double res = residual(r.w(), shape);
    if (!(res < tol)) {
        throw DomainError("norm_squared: rapidities are off-shell (residual " + std::to_string(res) + ")");
    }
    detail::require_distinct(r);
    DetForm form;
    form.kind = DetKind::Qtilde;
    form.order = shape.N;
    form.lattice_M = shape.M;
    LogValue U2;
    for (std::size_t k = 0; k < r.size(); ++k) {
        U2 *= r.u2(k);
    }
    for (int i = 0; i < shape.N; ++i) {
        form.prefactor *= U2;
    }
    form.prefactor *= detail::inverse_vandermonde(r, true);
    form.prefactor *= detail::inverse_vandermonde(r, false);
    form.matrix = qtilde_matrix(r, shape.M);
    form.det = lu_determinant(form.matrix);
    return form;
}

inline cplx norm_squared(const RapiditySet &r, const RingShape &shape, double tol = tol::bethe_residual) {
    return norm_squared_form(r, shape, tol).value();
}

inline cplx norm_squared(const BetheSolution &sol, const RingShape &shape, double tol = tol::bethe_residual) {
    return norm_squared(RapiditySet::from_w(sol.w), shape, tol);
}

/// Norm of the stationary state (all u at infinity): Z_N.
inline double stationary_norm_squared(const RingShape &shape) {
    return static_cast<double>(sector_dimension(shape));
}

} // namespace tasep
