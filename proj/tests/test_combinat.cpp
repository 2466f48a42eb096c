#include <gtest/gtest.h>

#include "tasep/combinat.hpp"

using namespace tasep;

namespace {

Bitmask sites(std::initializer_list<int> occupied) {
    Bitmask m = 0;
    for (int s : occupied) {
        m |= Bitmask{1} << (s - 1);
    }
    return m;
}

} // namespace

TEST(Binomial, Values) {
    EXPECT_EQ(binomial(4, 2), 6U);
    EXPECT_EQ(binomial(5, 0), 1U);
    EXPECT_EQ(binomial(10, 5), 252U);
    EXPECT_EQ(binomial(3, 5), 0U);
    EXPECT_EQ(binomial(64, 32), 1832624140942590534ULL);
    EXPECT_THROW(binomial(-1, 0), DomainError);
    EXPECT_THROW(binomial(70, 35), std::overflow_error);
}

TEST(Binomial, PascalRecurrence) {
    for (int n = 1; n <= 40; ++n) {
        for (int k = 1; k < n; ++k) {
            EXPECT_EQ(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
        }
    }
}

TEST(RingShape, Validation) {
    EXPECT_NO_THROW((RingShape{1, 1}.validate()));
    EXPECT_NO_THROW((RingShape{64, 0}.validate()));
    EXPECT_THROW((RingShape{0, 0}.validate()), DomainError);
    EXPECT_THROW((RingShape{65, 1}.validate()), DomainError);
    EXPECT_THROW((RingShape{3, 4}.validate()), DomainError);
    EXPECT_THROW((RingShape{3, -1}.validate()), DomainError);
}

TEST(Rank, Examples) {
    EXPECT_EQ(rank(sites({1, 2}), {4, 2}), 0U);
    EXPECT_EQ(rank(sites({3, 4}), {4, 2}), 5U);
    EXPECT_EQ(rank(sites({1, 4}), {5, 2}), 3U);
    EXPECT_EQ(rank(0, {5, 0}), 0U);
}

TEST(Rank, RejectsWrongParticleNumber) {
    EXPECT_THROW(rank(sites({1}), {4, 2}), DomainError);
    EXPECT_THROW(rank(sites({5}), {4, 1}), DomainError);
    EXPECT_THROW(unrank(6, {4, 2}), DomainError);
}

TEST(Rank, RoundTripAllSectorsUpTo12) {
    for (int M = 1; M <= 12; ++M) {
        for (int N = 0; N <= M; ++N) {
            const RingShape shape{M, N};
            const auto dim = sector_dimension(shape);
            for (std::uint64_t r = 0; r < dim; ++r) {
                const Bitmask c = unrank(r, shape);
                ASSERT_EQ(std::popcount(c), N);
                ASSERT_EQ(c & ~full_mask(M), 0U);
                ASSERT_EQ(rank(c, shape), r);
            }
        }
    }
}

TEST(SectorBasis, ColexOrderMatchesRank) {
    const SectorBasis basis({7, 3});
    ASSERT_EQ(basis.size(), 35U);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        EXPECT_EQ(rank(basis.config(i), basis.shape()), i);
        EXPECT_EQ(basis.index_of(basis.config(i)), i);
    }
}

TEST(SectorBasis, DegenerateSectors) {
    const SectorBasis empty({5, 0});
    ASSERT_EQ(empty.size(), 1U);
    EXPECT_EQ(empty.config(0), 0U);
    const SectorBasis full({5, 5});
    ASSERT_EQ(full.size(), 1U);
    EXPECT_EQ(full.config(0), full_mask(5));
}

TEST(SteadyState, Examples) {
    const auto v = steady_state_vector({4, 2});
    EXPECT_EQ(v.size(), 6);
    EXPECT_DOUBLE_EQ(v.dot(v), 6.0);
    EXPECT_EQ(steady_state_vector({3, 0}).size(), 1);
    EXPECT_DOUBLE_EQ(steady_state_vector({3, 0})[0], 1.0);
    EXPECT_DOUBLE_EQ(steady_state_vector({5, 2}).sum(), 10.0);
}

TEST(Projector, Examples) {
    RealVector v(2);
    v << 1.0, 1.0;
    const RealVector p = apply_projector(v, 1, RingShape{2, 1});
    // rank 0 is site 1 occupied, rank 1 is site 2 occupied
    EXPECT_DOUBLE_EQ(p[0], 0.0);
    EXPECT_DOUBLE_EQ(p[1], 1.0);
    EXPECT_DOUBLE_EQ(apply_projector(steady_state_vector({4, 2}), 1, RingShape{4, 2}).sum(), 3.0);
}

TEST(Projector, IdempotentAndDiagonal) {
    const RingShape shape{6, 3};
    const SectorBasis basis(shape);
    RealVector v = RealVector::LinSpaced(static_cast<Eigen::Index>(basis.size()), 0.5, 3.0);
    for (int site = 1; site <= shape.M; ++site) {
        const RealVector mask = projector_mask(basis, site);
        for (Eigen::Index i = 0; i < mask.size(); ++i) {
            EXPECT_TRUE(mask[i] == 0.0 || mask[i] == 1.0);
        }
        const RealVector once = apply_projector(v, site, basis);
        EXPECT_EQ(once, apply_projector(once, site, basis));
        EXPECT_EQ(once, RealVector(mask.cwiseProduct(v)));
    }
    EXPECT_THROW(apply_projector(v, 0, basis), DomainError);
    EXPECT_THROW(apply_projector(v, 7, basis), DomainError);
}

TEST(Projector, TwoEmptySitesCount) {
    for (int M = 2; M <= 10; ++M) {
        for (int N = 0; N <= M; ++N) {
            const SectorBasis basis({M, N});
            const RealVector s1 = projector_mask(basis, 1);
            for (int m = 2; m <= M; ++m) {
                const double count = s1.cwiseProduct(projector_mask(basis, m)).sum();
                EXPECT_EQ(count, static_cast<double>(binomial(M - 2, N))) << M << " " << N << " " << m;
            }
        }
    }
}
