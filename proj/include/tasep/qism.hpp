#pragma once

// Literal quantum-inverse-scattering construction on the full (C^2)^{⊗M}
// space, for small M. This module exists to validate the determinant
// formulas and the Bethe catalog against direct linear algebra.
//
// Basis: index bit (n-1) set <=> site n occupied (spin down). |Omega> is the
// empty ring, index 0. sigma^- fills a site, sigma^+ empties it, s = 1 on an
// empty site.
//
// Orientation (fixed by requiring the transfer-matrix Hamiltonian to equal
// the Pauli-operator Hamiltonian): the monodromy matrix is
// T(u) = L(M|u) ... L(1|u) with L(1) acting first on kets, the shift
// operator tau(1) = Pi_12 Pi_23 ... Pi_{M-1,M} satisfies
// tau s_n tau^{-1} = s_{n+1}, and particles hop from site j to j+1.
//
// Left states are returned as plain coefficient vectors; pairings between
// left and right states are bilinear (no complex conjugation).

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "tasep/combinat.hpp"

namespace tasep::qism {

inline constexpr int default_site_cap = 10;

using SparseOp = Eigen::SparseMatrix<cplx>;

class TensorOperator {
  public:
    TensorOperator() = default;
    TensorOperator(int sites, SparseOp matrix) : sites_(sites), matrix_(std::move(matrix)) {
        if (matrix_.rows() != (Eigen::Index{1} << sites) || matrix_.cols() != matrix_.rows()) {
            throw DomainError("TensorOperator: dimension must be 2^M");
        }
    }

    static TensorOperator identity(int sites) {
        SparseOp id(Eigen::Index{1} << sites, Eigen::Index{1} << sites);
        id.setIdentity();
        return {sites, std::move(id)};
    }
    static TensorOperator zero(int sites) {
        return {sites, SparseOp(Eigen::Index{1} << sites, Eigen::Index{1} << sites)};
    }

    int sites() const { return sites_; }
    Eigen::Index dimension() const { return matrix_.rows(); }
    const SparseOp &matrix() const { return matrix_; }
    ComplexMatrix dense() const { return ComplexMatrix(matrix_); }

    friend TensorOperator operator*(const TensorOperator &a, const TensorOperator &b) {
        return {a.sites_, SparseOp((a.matrix_ * b.matrix_).pruned())};
    }
    friend TensorOperator operator+(const TensorOperator &a, const TensorOperator &b) {
        return {a.sites_, SparseOp(a.matrix_ + b.matrix_)};
    }
    friend TensorOperator operator-(const TensorOperator &a, const TensorOperator &b) {
        return {a.sites_, SparseOp(a.matrix_ - b.matrix_)};
    }
    friend TensorOperator operator*(cplx z, const TensorOperator &a) {
        return {a.sites_, SparseOp(z * a.matrix_)};
    }
    friend ComplexVector operator*(const TensorOperator &a, const ComplexVector &v) {
        return a.matrix_ * v;
    }

    TensorOperator adjoint() const { return {sites_, SparseOp(matrix_.adjoint())}; }

    /// Largest absolute entry.
    double max_abs() const {
        double m = 0.0;
        for (int k = 0; k < matrix_.outerSize(); ++k) {
            for (SparseOp::InnerIterator it(matrix_, k); it; ++it) {
                m = std::max(m, std::abs(it.value()));
            }
        }
        return m;
    }

  private:
    int sites_ = 0;
    SparseOp matrix_;
};

inline void check_sites(int M, int cap) {
    if (M < 1 || M > cap) {
        throw DomainError("qism: number of sites must be in [1, " + std::to_string(cap) + "], got " +
                          std::to_string(M));
    }
}

inline void check_site(int n, int M) {
    if (n < 1 || n > M) {
        throw DomainError("qism: site index out of range");
    }
}

enum class LocalKind { empty_projector, identity, lower, raise };

// s_n, I, sigma_n^-, sigma_n^+ embedded at site n.
inline TensorOperator local_operator(LocalKind kind, int n, int M, int cap = default_site_cap) {
    check_sites(M, cap);
    check_site(n, M);
    const Eigen::Index dim = Eigen::Index{1} << M;
    const Eigen::Index bit = Eigen::Index{1} << (n - 1);
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(dim));
    for (Eigen::Index s = 0; s < dim; ++s) {
        const bool occupied = (s & bit) != 0;
        switch (kind) {
        case LocalKind::empty_projector:
            if (!occupied) {
                t.emplace_back(s, s, 1.0);
            }
            break;
        case LocalKind::identity:
            t.emplace_back(s, s, 1.0);
            break;
        case LocalKind::lower:
            if (!occupied) {
                t.emplace_back(s | bit, s, 1.0);
            }
            break;
        case LocalKind::raise:
            if (occupied) {
                t.emplace_back(s & ~bit, s, 1.0);
            }
            break;
        }
    }
    SparseOp op(dim, dim);
    op.setFromTriplets(t.begin(), t.end());
    return {M, std::move(op)};
}

/// 2x2 matrix in auxiliary space with operator entries; (a, b) in {0,1}^2.
using OperatorBlock = std::array<std::array<TensorOperator, 2>, 2>;

/// L(n|u) = [[u s_n, sigma_n^-], [sigma_n^+, u I - u^{-1} s_n]].
inline OperatorBlock build_L(int n, cplx u, int M, int cap = default_site_cap) {
    if (u == cplx{0.0, 0.0}) {
        throw DomainError("build_L: spectral parameter u must be nonzero");
    }
    const auto s = local_operator(LocalKind::empty_projector, n, M, cap);
    const auto id = TensorOperator::identity(M);
    OperatorBlock L;
    L[0][0] = u * s;
    L[0][1] = local_operator(LocalKind::lower, n, M, cap);
    L[1][0] = local_operator(LocalKind::raise, n, M, cap);
    L[1][1] = u * id - (1.0 / u) * s;
    return L;
}

struct Monodromy {
    TensorOperator A, B, C, D;

    const TensorOperator &operator()(int a, int b) const {
        return a == 0 ? (b == 0 ? A : B) : (b == 0 ? C : D);
    }
};

/// T(u) = L(M|u) L(M-1|u) ... L(1|u).
inline Monodromy build_monodromy(cplx u, int M, int cap = default_site_cap) {
    check_sites(M, cap);
    OperatorBlock T = build_L(1, u, M, cap);
    for (int n = 2; n <= M; ++n) {
        const OperatorBlock L = build_L(n, u, M, cap);
        OperatorBlock next;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                next[a][b] = L[a][0] * T[0][b] + L[a][1] * T[1][b];
            }
        }
        T = std::move(next);
    }
    return {T[0][0], T[0][1], T[1][0], T[1][1]};
}

// Crystal-base R-matrix weights.
inline cplx weight_f(cplx v, cplx u) { return u * u / (u * u - v * v); }
inline cplx weight_g(cplx v, cplx u) { return u * v / (u * u - v * v); }

inline void check_pole(cplx u, cplx v) {
    if (u == cplx{0.0, 0.0} || v == cplx{0.0, 0.0}) {
        throw DomainError("R-matrix: spectral parameters must be nonzero");
    }
    if (std::abs(u * u - v * v) <= 1e-14 * std::max(std::abs(u * u), std::abs(v * v))) {
        throw DomainError("R-matrix: pole at u^2 = v^2");
    }
}

/// R(u, v) in the auxiliary basis (00, 01, 10, 11).
inline Eigen::Matrix4cd r_matrix(cplx u, cplx v) {
    check_pole(u, v);
    const cplx f = weight_f(v, u);
    const cplx g = weight_g(v, u);
    Eigen::Matrix4cd r = Eigen::Matrix4cd::Zero();
    r(0, 0) = f;
    r(1, 1) = g;
    r(1, 2) = 1.0;
    r(2, 2) = g;
    r(3, 3) = f;
    return r;
}

/// max|lhs - rhs| in units of max(1, max|lhs|, max|rhs|). Monodromy entries
/// grow like (|u| + 1/|u|)^M, so an unscaled residual measures rounding of
/// large numbers rather than the identity.
inline double relative_gap(const TensorOperator &lhs, const TensorOperator &rhs) {
    const double scale = std::max({1.0, lhs.max_abs(), rhs.max_abs()});
    return (lhs - rhs).max_abs() / scale;
}

/// Scaled max-norm of R(u,v) (T(u) ⊗ T(v)) - (T(v) ⊗ T(u)) R(u,v) over all operator blocks.
inline double rtt_residual(cplx u, cplx v, int M, int cap = default_site_cap) {
    const Eigen::Matrix4cd r = r_matrix(u, v);
    const Monodromy tu = build_monodromy(u, M, cap);
    const Monodromy tv = build_monodromy(v, M, cap);
    // (X ⊗ Y)_{(a1 a2),(b1 b2)} = X_{a1 b1} Y_{a2 b2}
    auto kron = [](const Monodromy &x, const Monodromy &y, int i, int j) {
        return x(i / 2, j / 2) * y(i % 2, j % 2);
    };
    std::array<std::array<TensorOperator, 4>, 4> left_factor, right_factor;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            left_factor[i][j] = kron(tu, tv, i, j);
            right_factor[i][j] = kron(tv, tu, i, j);
        }
    }
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            TensorOperator lhs = TensorOperator::zero(M);
            TensorOperator rhs = TensorOperator::zero(M);
            for (int k = 0; k < 4; ++k) {
                if (r(i, k) != cplx{0.0, 0.0}) {
                    lhs = lhs + r(i, k) * left_factor[k][j];
                }
                if (r(k, j) != cplx{0.0, 0.0}) {
                    rhs = rhs + r(k, j) * right_factor[i][k];
                }
            }
            worst = std::max(worst, relative_gap(lhs, rhs));
        }
    }
    return worst;
}

/// Residuals of the explicit exchange relations derived from RTT, scaled as in rtt_residual.
struct ExchangeResiduals {
    double c_b = 0.0; // C(u)B(v) - g(u,v){A(u)D(v) - A(v)D(u)}
    double a_b = 0.0; // A(u)B(v) - f(u,v)B(v)A(u) - g(v,u)B(u)A(v)
    double d_b = 0.0; // D(u)B(v) - f(v,u)B(v)D(u) - g(u,v)B(u)D(v)
    double b_b = 0.0; // [B(u), B(v)]
    double c_c = 0.0; // [C(u), C(v)]

    double max() const { return std::max({c_b, a_b, d_b, b_b, c_c}); }
};

inline ExchangeResiduals exchange_residuals(cplx u, cplx v, int M, int cap = default_site_cap) {
    check_pole(u, v);
    const Monodromy tu = build_monodromy(u, M, cap);
    const Monodromy tv = build_monodromy(v, M, cap);
    ExchangeResiduals r;
    r.c_b = relative_gap(tu.C * tv.B, weight_g(u, v) * (tu.A * tv.D - tv.A * tu.D));
    r.a_b = relative_gap(tu.A * tv.B, weight_f(u, v) * (tv.B * tu.A) + weight_g(v, u) * (tu.B * tv.A));
    r.d_b = relative_gap(tu.D * tv.B, weight_f(v, u) * (tv.B * tu.D) + weight_g(u, v) * (tu.B * tv.D));
    r.b_b = relative_gap(tu.B * tv.B, tv.B * tu.B);
    r.c_c = relative_gap(tu.C * tv.C, tv.C * tu.C);
    return r;
}

enum class Side { left, right };

/// Right: prod_i u_i^{-(M-1)} B(u_i) |Omega>. Left: <Omega| prod_i u_i^{-(M-1)} C(u_i),
/// returned as the coefficient vector of the bra.
inline ComplexVector build_state(std::span<const cplx> us, Side side, int M, int cap = default_site_cap) {
    check_sites(M, cap);
    if (static_cast<int>(us.size()) > M) {
        throw DomainError("build_state: more rapidities than sites");
    }
    ComplexVector state = ComplexVector::Zero(Eigen::Index{1} << M);
    state[0] = 1.0;
    for (const cplx u : us) {
        if (u == cplx{0.0, 0.0}) {
            throw DomainError("build_state: rapidity must be nonzero");
        }
        const Monodromy t = build_monodromy(u, M, cap);
        const cplx scale = ipow(u, -(M - 1));
        if (side == Side::right) {
            state = scale * (t.B.matrix() * state);
        } else {
            state = scale * (t.C.matrix().transpose() * state);
        }
    }
    return state;
}

/// Bilinear pairing of a left coefficient vector with a right state.
inline cplx pair(const ComplexVector &left, const ComplexVector &right) {
    return left.transpose() * right;
}

/// Diagonal projector s_n applied to a vector in the 2^M space.
inline ComplexVector apply_empty_projector(const ComplexVector &state, int n) {
    ComplexVector out = state;
    const Eigen::Index bit = Eigen::Index{1} << (n - 1);
    for (Eigen::Index s = 0; s < out.size(); ++s) {
        if ((s & bit) != 0) {
            out[s] = 0.0;
        }
    }
    return out;
}

/// Uniform steady state of the N-particle sector embedded in the 2^M space.
inline ComplexVector steady_state(int M, int N) {
    ComplexVector s = ComplexVector::Zero(Eigen::Index{1} << M);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (std::popcount(static_cast<std::uint64_t>(i)) == N) {
            s[i] = 1.0;
        }
    }
    return s;
}

/// Pi_mn = s_m s_n + (1-s_m)(1-s_n) + sigma_m^- sigma_n^+ + sigma_m^+ sigma_n^-.
inline TensorOperator permutation(int m, int n, int M, int cap = default_site_cap) {
    const auto id = TensorOperator::identity(M);
    const auto sm = local_operator(LocalKind::empty_projector, m, M, cap);
    const auto sn = local_operator(LocalKind::empty_projector, n, M, cap);
    return sm * sn + (id - sm) * (id - sn) +
           local_operator(LocalKind::lower, m, M, cap) * local_operator(LocalKind::raise, n, M, cap) +
           local_operator(LocalKind::raise, m, M, cap) * local_operator(LocalKind::lower, n, M, cap);
}

/// tau = Pi_12 Pi_23 ... Pi_{M-1,M}.
inline TensorOperator shift_operator(int M, int cap = default_site_cap) {
    check_sites(M, cap);
    TensorOperator tau = TensorOperator::identity(M);
    for (int k = 1; k < M; ++k) {
        tau = tau * permutation(k, k + 1, M, cap);
    }
    return tau;
}

/// tau(u) = u^{-M} (A(u) + D(u)).
inline TensorOperator transfer_matrix(cplx u, int M, int cap = default_site_cap) {
    const Monodromy t = build_monodromy(u, M, cap);
    return ipow(u, -M) * (t.A + t.D);
}

/// H = -sum_j { sigma_{j+1}^- sigma_j^+ + (sigma_{j+1}^z sigma_j^z - 1)/4 }, periodic.
inline TensorOperator hamiltonian_pauli(int M, int cap = default_site_cap) {
    check_sites(M, cap);
    const auto id = TensorOperator::identity(M);
    TensorOperator h = TensorOperator::zero(M);
    for (int j = 1; j <= M; ++j) {
        const int next = j % M + 1;
        const auto sz_j = 2.0 * local_operator(LocalKind::empty_projector, j, M, cap) - id;
        const auto sz_next = 2.0 * local_operator(LocalKind::empty_projector, next, M, cap) - id;
        h = h - local_operator(LocalKind::lower, next, M, cap) * local_operator(LocalKind::raise, j, M, cap);
        h = h - 0.25 * (sz_next * sz_j - id);
    }
    return h;
}

struct TransferHamiltonian {
    TensorOperator H;
    double richardson_gap = 0.0; // max |H(h) - H(h/2)| entrywise, derivative-step sensitivity
};

/// H = -1/2 tau^{-1}(1) d/du tau(u) at u = 1. The derivative is a central
/// difference with step h, refined by one Richardson step-halving.
inline TransferHamiltonian hamiltonian_from_transfer(int M, double step = 1e-5, int cap = default_site_cap) {
    check_sites(M, cap);
    // tau(1) is a permutation matrix, so its inverse is its adjoint.
    const TensorOperator tau_inv = transfer_matrix(1.0, M, cap).adjoint();
    auto central = [&](double h) {
        return (1.0 / (2.0 * h)) * (transfer_matrix(1.0 + h, M, cap) - transfer_matrix(1.0 - h, M, cap));
    };
    const TensorOperator d_h = central(step);
    const TensorOperator d_half = central(step / 2.0);
    const TensorOperator refined = (4.0 / 3.0) * d_half - (1.0 / 3.0) * d_h;
    TransferHamiltonian out;
    out.H = -0.5 * (tau_inv * refined);
    out.richardson_gap = (-0.5 * (tau_inv * (d_h - d_half))).max_abs();
    return out;
}

/// Dense restriction of a 2^M operator to the N-particle sector, in colex order.
inline ComplexMatrix restrict_to_sector(const TensorOperator &op, const RingShape &shape) {
    const SectorBasis basis(shape);
    const ComplexMatrix full = op.dense();
    const auto n = static_cast<Eigen::Index>(basis.size());
    ComplexMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = full(static_cast<Eigen::Index>(basis.config(static_cast<std::size_t>(i))),
                             static_cast<Eigen::Index>(basis.config(static_cast<std::size_t>(j))));
        }
    }
    return out;
}

} // namespace tasep::qism
