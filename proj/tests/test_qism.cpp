#include <gtest/gtest.h>

#include <random>

#include "tasep/oracle.hpp"
#include "tasep/qism.hpp"

using namespace tasep;
using namespace tasep::qism;

namespace {

ComplexVector vacuum(int M) {
    ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << M);
    v[0] = 1.0;
    return v;
}

double max_abs(const ComplexVector &v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

} // namespace

TEST(RMatrix, Weights) {
    EXPECT_LT(std::abs(weight_f(2.0, 1.0) - cplx(-1.0 / 3.0)), 1e-15);
    EXPECT_LT(std::abs(weight_g(2.0, 1.0) - cplx(-2.0 / 3.0)), 1e-15);
    EXPECT_THROW(r_matrix(1.0, 1.0), DomainError);
    EXPECT_THROW(r_matrix(1.0, -1.0), DomainError);
    EXPECT_THROW(r_matrix(0.0, 1.0), DomainError);
    const auto r = r_matrix(1.3, cplx(0.7, 0.2));
    EXPECT_EQ(r(1, 2), cplx(1.0));
    EXPECT_EQ(r(2, 1), cplx(0.0));
}

TEST(LOperator, SingleSiteVacuum) {
    const cplx u(0.8, 0.3);
    const auto L = build_L(1, u, 1);
    const ComplexVector out = L[0][0] * vacuum(1);
    EXPECT_LT(std::abs(out[0] - u), 1e-15);
    EXPECT_EQ(out[1], cplx(0.0));
    EXPECT_THROW(build_L(1, 0.0, 1), DomainError);
    EXPECT_THROW(build_L(2, 1.0, 1), DomainError);
}

TEST(Monodromy, VacuumEigenvalues) {
    const cplx u(1.1, -0.4);
    for (int M = 1; M <= 6; ++M) {
        const auto T = build_monodromy(u, M);
        const ComplexVector omega = vacuum(M);
        EXPECT_LT(max_abs(T.A * omega - ipow(u, M) * omega), 1e-13);
        EXPECT_LT(max_abs(T.D * omega - ipow(u - 1.0 / u, M) * omega), 1e-13);
        EXPECT_LT(max_abs(T.C * omega), 1e-15);
        // <Omega| B(u) = 0
        EXPECT_LT(T.B.dense().row(0).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Monodromy, SiteCap) {
    EXPECT_THROW(build_monodromy(1.0, 11), DomainError);
    EXPECT_NO_THROW(build_monodromy(1.0, 3, 3));
    EXPECT_THROW(build_monodromy(1.0, 4, 3), DomainError);
}

TEST(RTT, SpecPoint) {
    EXPECT_LT(rtt_residual(1.3, cplx(0.7, 0.2), 2), 1e-12);
    const auto ex = exchange_residuals(1.3, cplx(0.7, 0.2), 2);
    EXPECT_LT(ex.b_b, 1e-12);
    EXPECT_LT(ex.c_b, 1e-12);
    EXPECT_THROW(rtt_residual(1.3, 1.3, 2), DomainError);
}

TEST(RTT, RandomPoints) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> radius(0.6, 1.8);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    for (int M = 1; M <= 6; ++M) {
        for (int k = 0; k < 5; ++k) {
            const cplx u = std::polar(radius(rng), angle(rng));
            const cplx v = std::polar(radius(rng), angle(rng));
            EXPECT_LT(rtt_residual(u, v, M), 1e-12);
            EXPECT_LT(exchange_residuals(u, v, M).max(), 1e-12);
            const auto tu = transfer_matrix(u, M);
            const auto tv = transfer_matrix(v, M);
            EXPECT_LT(relative_gap(tu * tv, tv * tu), 1e-12);
        }
    }
}

TEST(RTT, DetectsWrongRMatrix) {
    // swapping R(1,2) into R(2,1) breaks the identity; guards the orientation
    const cplx u(1.3), v(0.7, 0.2);
    const int M = 3;
    Eigen::Matrix4cd r = r_matrix(u, v);
    r(1, 2) = 0.0;
    r(2, 1) = 1.0;
    const Monodromy tu = build_monodromy(u, M), tv = build_monodromy(v, M);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            TensorOperator lhs = TensorOperator::zero(M), rhs = TensorOperator::zero(M);
            for (int k = 0; k < 4; ++k) {
                lhs = lhs + r(i, k) * (tu(k / 2, j / 2) * tv(k % 2, j % 2));
                rhs = rhs + r(k, j) * (tv(i / 2, k / 2) * tu(i % 2, k % 2));
            }
            worst = std::max(worst, relative_gap(lhs, rhs));
        }
    }
    EXPECT_GT(worst, 1e-3);
}

TEST(States, VacuumAndSectorPurity) {
    EXPECT_EQ(build_state({}, Side::right, 4), vacuum(4));
    EXPECT_EQ(build_state({}, Side::left, 4), vacuum(4));
    const std::vector<cplx> us{cplx(0.9, 0.2), cplx(1.4, -0.5), cplx(0.7, 0.1)};
    for (const Side side : {Side::left, Side::right}) {
        const ComplexVector st = build_state(us, side, 6);
        double outside = 0.0, inside = 0.0;
        for (Eigen::Index i = 0; i < st.size(); ++i) {
            double &slot = std::popcount(static_cast<std::uint64_t>(i)) == 3 ? inside : outside;
            slot = std::max(slot, std::abs(st[i]));
        }
        EXPECT_LT(outside, 1e-14);
        EXPECT_GT(inside, 1e-3);
    }
    EXPECT_THROW(build_state(std::vector<cplx>{0.0}, Side::right, 3), DomainError);
}

TEST(States, PermutationInvariance) {
    std::vector<cplx> us{cplx(0.9, 0.2), cplx(1.4, -0.5), cplx(0.7, 0.1)};
    const ComplexVector ref = build_state(us, Side::right, 5);
    std::reverse(us.begin(), us.end());
    EXPECT_LT(max_abs(build_state(us, Side::right, 5) - ref), 1e-13);
    std::swap(us[0], us[1]);
    EXPECT_LT(max_abs(build_state(us, Side::right, 5) - ref), 1e-13);
}

TEST(Shift, Identities) {
    for (int M = 1; M <= 7; ++M) {
        const auto tau = shift_operator(M);
        auto power = TensorOperator::identity(M);
        for (int i = 0; i < M; ++i) {
            power = power * tau;
        }
        EXPECT_EQ((power - TensorOperator::identity(M)).max_abs(), 0.0);
        EXPECT_EQ((transfer_matrix(1.0, M) - tau).max_abs(), 0.0);
    }
}

TEST(Shift, MovesSiteIndices) {
    const int M = 3;
    const auto tau = shift_operator(M);
    const auto inv = tau.adjoint();
    for (const LocalKind kind : {LocalKind::lower, LocalKind::raise, LocalKind::empty_projector}) {
        for (int n = 1; n <= M; ++n) {
            const auto moved = tau * local_operator(kind, n, M) * inv;
            EXPECT_EQ((moved - local_operator(kind, n % M + 1, M)).max_abs(), 0.0);
        }
    }
}

TEST(Hamiltonian, TwoSiteSector) {
    const auto h = hamiltonian_from_transfer(2);
    const ComplexMatrix sector = restrict_to_sector(h.H, {2, 1});
    ComplexMatrix want(2, 2);
    want << 1.0, -1.0, -1.0, 1.0;
    EXPECT_LT((sector - want).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Hamiltonian, TransferPauliOracleAgree) {
    for (int M = 2; M <= 7; ++M) {
        const auto h = hamiltonian_from_transfer(M);
        EXPECT_LT((h.H - hamiltonian_pauli(M)).max_abs(), 1e-8);
        EXPECT_LT(h.richardson_gap, 1e-6);
        for (int N = 0; N <= M; ++N) {
            const ComplexMatrix sector = restrict_to_sector(hamiltonian_pauli(M), {M, N});
            EXPECT_EQ((sector - build_generator({M, N}).matrix.cast<cplx>()).cwiseAbs().maxCoeff(), 0.0);
            EXPECT_LT(max_abs(h.H * steady_state(M, N)), 1e-8);
        }
    }
}
