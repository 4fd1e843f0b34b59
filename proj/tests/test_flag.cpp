#include <cmath>

#include <gtest/gtest.h>

#include <tpflag/flag.hpp>

using namespace tpflag;

namespace {

Rational q(const char* text) { return parse_rational(text); }

}  // namespace

TEST(EigenFlag, Sl2Example) {
    const RealMatrix g{{2, 1}, {1, 1}};
    const EigenFlag flag = eigen_flag(g);
    EXPECT_NEAR(flag.eigenvalues[0], (3 + std::sqrt(5.0)) / 2, 1e-14);
    EXPECT_NEAR(flag.eigenvalues[1], (3 - std::sqrt(5.0)) / 2, 1e-14);
}

TEST(EigenFlag, Rejections) {
    EXPECT_THROW(eigen_flag(RealMatrix::identity(3)), EigenvalueCollision);
    EXPECT_THROW(eigen_flag(RealMatrix{{0, -1}, {1, 0}}), EigenvalueCollision);
    EXPECT_THROW(eigen_flag(RealMatrix{{-1, 0}, {0, -2}}), EigenvalueCollision);
}

TEST(EigenFlag, SpectrumOfPositiveMatricesIsSimpleAndPositive) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t n = 2 + s % 4;
        const RationalMatrix g = sample_g_positive(n, derive_seed(31, s));
        const EigenFlag flag = eigen_flag(matrix_cast<double>(g));
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_GT(flag.eigenvalues[k], 0);
            if (k) {
                EXPECT_GT(flag.eigenvalues[k - 1] - flag.eigenvalues[k], 1e-10);
            }
        }
    }
}

TEST(Zeta, Sl2Example) {
    const RationalMatrix g{{2, 1}, {1, 1}};
    const FlagPoint<double> B = zeta(g);
    EXPECT_NEAR(B.rep(1, 0), (std::sqrt(5.0) - 1) / 2, 1e-14);
    EXPECT_DOUBLE_EQ(B.rep(0, 1), 0.0);
}

TEST(Zeta, RejectsNonPositive) {
    EXPECT_THROW(zeta(RationalMatrix::identity(3)), NotTotallyPositive);
    EXPECT_THROW(zeta(RationalMatrix{{2, 0}, {0, 1}}), DomainError);
}

TEST(Zeta, FibreProperty) {
    for (std::uint64_t s = 0; s < 60; ++s) {
        const std::size_t n = 2 + s % 4;
        const RationalMatrix g = sample_g_positive(n, derive_seed(32, s));
        const FlagPoint<double> B = zeta(g);
        EXPECT_TRUE(is_totally_positive_unitriangular(B.rep, Triangle::Lower).member);
        const RealMatrix conj = inverse(B.rep) * matrix_cast<double>(g) * B.rep;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < i; ++k) EXPECT_LT(std::abs(conj(i, k)), 1e-9 * max_abs(conj));
    }
}

TEST(Zeta, RecoversConstructedBorel) {
    for (std::uint64_t s = 0; s < 40; ++s) {
        const std::size_t n = 2 + s % 3;
        const FibreSample f = sample_fibre_element(n, derive_seed(33, s));
        const FlagPoint<double> B = zeta(f.g);
        EXPECT_LT(max_abs_diff(B.rep, matrix_cast<double>(f.B.rep)), 1e-8 * (1 + max_abs(f.B.rep)));
        const auto snapped = snap_flag_point(B, f.g);
        ASSERT_TRUE(snapped.has_value());
        EXPECT_EQ(snapped->rep, f.B.rep);
    }
}

TEST(SigmaB, WorkedSl2Instance) {
    // u' a=1, v x=1, t = diag(2, 1/2): (u'v)^- has a = 1/2 and t^-1 has R = 4.
    const FlagPoint<Rational> B{RationalMatrix{{1, 0}, {1, 1}}};
    const RationalMatrix g{{q("3/2"), q("1/2")}, {1, 1}};
    const CellCoordinates c = sigma_b(g, B);
    EXPECT_EQ(c.v.params, (std::vector<Rational>{Rational(1)}));
    EXPECT_EQ(c.zvec, (ZVector<Rational>{Rational(1)}));
    EXPECT_EQ(sigma_b_inverse_exact(c, B), g);
}

TEST(SigmaB, RoundTrips) {
    for (std::size_t n = 2; n <= 4; ++n) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const FibreSample f = sample_fibre_element(n, derive_seed(34 + n, s));
            ASSERT_TRUE(is_g_positive(f.g).member);
            const CellCoordinates c = sigma_b(f.g, f.B);
            EXPECT_EQ(c.v, f.v);
            EXPECT_EQ(c.zvec, f.zvec);
            const RealMatrix back = sigma_b_inverse(c, f.B);
            EXPECT_LT(max_abs_diff(back, matrix_cast<double>(f.g)), 1e-9 * (1 + max_abs(f.g))) << n << " " << s;
            if (n == 2) {
                EXPECT_EQ(sigma_b_inverse_exact(c, f.B), f.g);
            }
        }
    }
}

TEST(SigmaB, Errors) {
    const FlagPoint<Rational> B{RationalMatrix{{1, 0}, {1, 1}}};
    EXPECT_THROW(sigma_b(RationalMatrix{{2, 1}, {1, 1}}, B), NotInFibre);
    EXPECT_THROW(sigma_b(RationalMatrix::identity(2), B), NotTotallyPositive);
    CellCoordinates bad{{{1}, {Rational(1)}}, {Rational(0)}};
    EXPECT_THROW(sigma_b_inverse(bad, B), std::invalid_argument);
}

TEST(SplitCell, Examples) {
    const Rational p = q("2/3"), qq = q("5"), r = q("1/4");
    const RationalMatrix u1 = evaluate_params(LusztigParams<Rational>{{1, 2, 1}, {p, qq, r}}, Triangle::Lower, 3);
    const auto s = split_cell(u1, {1});
    EXPECT_EQ(s.parabolic, RationalMatrix(elementary(3, 1, p, Triangle::Lower) * elementary(3, 2, qq, Triangle::Lower)));
    EXPECT_EQ(s.fibre, elementary(3, 1, r, Triangle::Lower));
    EXPECT_EQ(s.parabolic * s.fibre, u1);

    const auto empty = split_cell(u1, {});
    EXPECT_EQ(empty.parabolic, u1);
    EXPECT_EQ(empty.fibre, RationalMatrix::identity(3));
    const auto full = split_cell(u1, {1, 2});
    EXPECT_EQ(full.parabolic, RationalMatrix::identity(3));
    EXPECT_EQ(full.fibre, u1);
}

TEST(SplitCell, ProductReproducesInput) {
    for (std::size_t n = 2; n <= 5; ++n) {
        for (const auto& J : all_parabolic_indices(n)) {
            const RationalMatrix u1 = sample_unipotent(n, Triangle::Lower, n * 100 + J.size());
            const auto s = split_cell(u1, J);
            EXPECT_EQ(s.parabolic * s.fibre, u1);
        }
    }
}

TEST(GammaP, BijectionWithSplit) {
    for (std::size_t n = 2; n <= 4; ++n) {
        for (const auto& J : all_parabolic_indices(n)) {
            for (std::uint64_t s = 0; s < 5; ++s) {
                const ParabolicPoint<Rational> P = sample_parabolic_point(n, J, derive_seed(40, s));
                const auto v = sample_positive<Rational>(longest_element(J, n), derive_seed(41, s));
                const FlagPoint<Rational> B = gamma_p_point(P, v);
                const auto split = split_cell(B.rep, J);
                EXPECT_EQ(split.parabolic, P.rep);
                EXPECT_EQ(split.fibre_params, v);
                const auto other = sample_positive<Rational>(longest_element(J, n), derive_seed(42, s));
                if (other != v) {
                    EXPECT_NE(gamma_p_point(P, other), B);
                }
            }
        }
    }
    const ParabolicPoint<Rational> G{{1, 2}, RationalMatrix::identity(3)};
    const auto v = sample_positive<Rational>(longest_element(3), 5);
    EXPECT_EQ(gamma_p_point(G, v).rep, evaluate_params(v, Triangle::Lower, 3));
    EXPECT_THROW(gamma_p_point(G, LusztigParams<Rational>{{1}, {Rational(1)}}), std::invalid_argument);
}

TEST(ZetaJ, TrivialIndices) {
    const RationalMatrix g = sample_g_positive(3, 7);
    EXPECT_LT(max_abs_diff(zeta_j(g, {}).rep, zeta(g).rep), 1e-14);
    EXPECT_EQ(zeta_j(g, {1, 2}).rep, RealMatrix::identity(3));
}

TEST(ZetaJ, Sl3TwoParameterCell) {
    const RationalMatrix g = sample_g_positive(3, 8);
    const Classification c = classify(g, {1});
    EXPECT_TRUE(c.consistent);
    ASSERT_EQ(c.checks.size(), 1u);
    EXPECT_EQ(c.checks[0].j, 2u);
    // rep = y1(p) y2(q): two positive parameters and a zero (3,1) entry.
    EXPECT_EQ(extract_params(c.point.rep, Word{1, 2}, Triangle::Lower).params.size(), 2u);
    EXPECT_EQ(c.point.rep(2, 0), 0.0);
    EXPECT_GT(c.point.rep(1, 0), 0.0);
    EXPECT_GT(c.point.rep(2, 1), 0.0);
}

TEST(Partition, HoldsOnSamples) {
    for (std::size_t n = 2; n <= 4; ++n) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const RationalMatrix g = sample_g_positive(n, derive_seed(50 + n, s));
            for (const auto& J : all_parabolic_indices(n)) {
                EXPECT_TRUE(check_partition(g, J)) << n << " " << s;
                EXPECT_LT(classify(g, J).max_distance(), 1e-8);
            }
        }
    }
}

TEST(Partition, DetectsWrongParabolic) {
    const RationalMatrix g = sample_g_positive(3, 9);
    const ParabolicPoint<double> wrong{{1}, matrix_cast<double>(sample_parabolic_point(3, {1}, 10).rep)};
    const auto checks = perron_line_checks(matrix_cast<double>(g), eigen_flag(matrix_cast<double>(g)), wrong);
    EXPECT_GT(checks[0].parabolic_distance, 1e-4);
}
