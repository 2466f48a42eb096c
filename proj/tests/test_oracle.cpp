#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "tasep/oracle.hpp"

using namespace tasep;

TEST(Generator, TwoSiteOneParticle) {
    const auto gen = build_generator({2, 1});
    RealMatrix want(2, 2);
    want << 1, -1, -1, 1;
    EXPECT_EQ(gen.matrix, want);
    EXPECT_EQ(gen.lambda_max, 1.0);
}

TEST(Generator, JammedAndEmptyRings) {
    EXPECT_EQ(build_generator({3, 3}).matrix, RealMatrix::Zero(1, 1));
    EXPECT_EQ(build_generator({3, 0}).matrix, RealMatrix::Zero(1, 1));
    EXPECT_EQ(build_generator({1, 1}).matrix, RealMatrix::Zero(1, 1));
}

TEST(Generator, ColumnSumsAndTrace) {
    for (int M = 2; M <= 10; ++M) {
        for (int N = 0; N <= M; ++N) {
            const auto gen = build_generator({M, N});
            // entries are small integers, so the sums are exact
            EXPECT_EQ(gen.matrix.colwise().sum().cwiseAbs().maxCoeff(), 0.0);
            const double trace = N >= 1 ? M * static_cast<double>(binomial(M - 2, N - 1)) : 0.0;
            EXPECT_EQ(gen.matrix.trace(), trace) << M << " " << N;
        }
    }
    EXPECT_EQ(build_generator({4, 2}).matrix.trace(), 8.0);
}

TEST(Generator, DimensionCap) {
    EXPECT_THROW(build_generator({20, 10}), DomainError);
    EXPECT_NO_THROW(build_generator({6, 3}, 20));
    EXPECT_THROW(build_generator({6, 3}, 19), DomainError);
}

TEST(Spectrum, SmallRings) {
    const auto two = spectrum(build_generator({2, 1}));
    ASSERT_EQ(two.eigenvalues.size(), 2U);
    EXPECT_NEAR(std::abs(two.eigenvalues[0]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(two.eigenvalues[1] - 2.0), 0.0, 1e-12);
    EXPECT_NEAR(two.gap, 2.0, 1e-12);

    const auto three = spectrum(build_generator({3, 1}));
    ASSERT_EQ(three.eigenvalues.size(), 3U);
    const double s = std::sqrt(3.0) / 2.0;
    EXPECT_NEAR(std::abs(three.eigenvalues[0]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(three.eigenvalues[1] - cplx(1.5, -s)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(three.eigenvalues[2] - cplx(1.5, s)), 0.0, 1e-12);
}

TEST(Spectrum, ExactlyOneZero) {
    for (int M = 2; M <= 9; ++M) {
        for (int N = 1; N < M; ++N) {
            const auto rep = spectrum(build_generator({M, N}));
            EXPECT_LT(std::abs(rep.eigenvalues[rep.zero_index]), 1e-10);
            EXPECT_GT(rep.gap, 0.0);
        }
    }
    EXPECT_EQ(spectrum(build_generator({4, 0})).gap, 0.0);
}

TEST(Evolve, ClosedFormTwoSites) {
    const auto gen = build_generator({2, 1});
    RealVector v(2);
    v << 1.0, 0.0;
    const RealVector out = evolve(gen, v, 1.0);
    EXPECT_NEAR(out[0], (1 + std::exp(-2.0)) / 2, 1e-14);
    EXPECT_NEAR(out[1], (1 - std::exp(-2.0)) / 2, 1e-14);
    EXPECT_EQ(evolve(gen, v, 0.0), v);
    EXPECT_THROW(evolve(gen, v, -1.0), DomainError);
}

TEST(Evolve, MatchesDenseExponential) {
    for (const RingShape shape : {RingShape{5, 2}, RingShape{6, 3}, RingShape{7, 2}}) {
        const auto gen = build_generator(shape);
        const RealVector v = RealVector::LinSpaced(gen.dimension(), 1.0, 2.0);
        for (const double t : {0.05, 0.7, 3.0, 12.0}) {
            const RealMatrix e = (-t * gen.matrix).exp();
            const RealVector want = e * v;
            const RealVector got = evolve(gen, v, t);
            EXPECT_LT((got - want).cwiseAbs().maxCoeff() / want.cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Evolve, PreservesMassAndSteadyState) {
    const auto gen = build_generator({8, 3});
    RealVector delta = RealVector::Zero(gen.dimension());
    delta[5] = 1.0;
    const RealVector steady = steady_state_vector({8, 3});
    for (const double t : {0.3, 2.0, 40.0}) {
        const RealVector p = evolve(gen, delta, t);
        EXPECT_NEAR(p.sum(), 1.0, 1e-12);
        EXPECT_GE(p.minCoeff(), -1e-15);
        EXPECT_LT((evolve(gen, steady, t) - steady).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(DirectCorrelation, StaticValues) {
    EXPECT_NEAR(direct_correlation({4, 2}, 3, 0.0), 1.0 / 6.0, 1e-15);
    for (int M = 2; M <= 7; ++M) {
        for (int N = 0; N <= M; ++N) {
            EXPECT_NEAR(direct_correlation({M, N}, 1, 0.0), static_cast<double>(M - N) / M, 1e-14);
        }
    }
    for (const double t : {0.0, 0.5, 3.0}) {
        for (int m = 1; m <= 5; ++m) {
            EXPECT_NEAR(direct_correlation({5, 0}, m, t), 1.0, 1e-13);
        }
    }
}

TEST(DirectCorrelation, TranslationCovariance) {
    const RingShape shape{7, 3};
    const auto gen = build_generator(shape);
    const SectorBasis basis(shape);
    for (int m = 1; m <= shape.M; ++m) {
        for (const double t : {0.4, 1.7}) {
            const double ref = direct_correlation(gen, basis, m, t);
            for (int k = 2; k <= shape.M; ++k) {
                const int right = (k + m - 2) % shape.M + 1;
                EXPECT_NEAR(two_time_correlation(gen, basis, k, right, t), ref, 1e-13);
            }
        }
    }
}

TEST(DirectCorrelation, LongTimeLimit) {
    for (const RingShape shape : {RingShape{5, 2}, RingShape{6, 3}, RingShape{8, 3}}) {
        const auto gen = build_generator(shape);
        const double t = 50.0 / spectrum(gen).gap;
        const double limit = std::pow(static_cast<double>(shape.M - shape.N) / shape.M, 2);
        for (int m = 1; m <= shape.M; ++m) {
            EXPECT_NEAR(direct_correlation(gen, SectorBasis(shape), m, t), limit, 1e-8);
        }
    }
}
