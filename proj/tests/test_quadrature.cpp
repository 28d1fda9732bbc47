#include "ctrldisc/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ctrldisc;

TEST(SimplexRule, Midpoint)
{
    const auto r = simplex_rule(1, 1);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_DOUBLE_EQ(r.point(0)[0], 0.5);
    EXPECT_DOUBLE_EQ(r.weights[0], 1.0);
}

TEST(SimplexRule, Centroid)
{
    const auto r = simplex_rule(2, 1);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_DOUBLE_EQ(r.point(0)[0], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.point(0)[1], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.weights[0], 0.5);
}

TEST(SimplexRule, QuarticIntegratesX2Y2)
{
    const auto r = simplex_rule(2, 4);
    double s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q)
        s += r.weights[q] * std::pow(r.point(q)[0], 2) * std::pow(r.point(q)[1], 2);
    EXPECT_NEAR(s, 1.0 / 180.0, 1e-16);
}

TEST(SimplexRule, ExactnessCertificateForAllShippedRules)
{
    for (std::size_t d = 1; d <= 2; ++d)
        for (unsigned e = 0; e <= max_rule_exactness(d); ++e) {
            const auto r = simplex_rule(d, e);
            EXPECT_LE(exactness_defect(r), 1e-13) << "d=" << d << " exactness=" << e;
            double sum = 0.0, abs_sum = 0.0;
            for (double w : r.weights) {
                EXPECT_TRUE(std::isfinite(w));
                sum += w;
                abs_sum += std::abs(w);
            }
            const double vol = d == 1 ? 1.0 : 0.5;
            EXPECT_NEAR(sum, vol, 1e-14);
            EXPECT_LE(abs_sum, 10.0 * vol);
        }
}

TEST(SimplexRule, UnsupportedRequestsThrow)
{
    EXPECT_THROW(simplex_rule(3, 2), std::invalid_argument);
    EXPECT_THROW(simplex_rule(2, max_rule_exactness(2) + 1), std::invalid_argument);
    EXPECT_THROW(simplex_rule(1, max_rule_exactness(1) + 1), std::invalid_argument);
}

TEST(GaussLegendre, PointsInsideAndSymmetric)
{
    for (std::size_t n = 1; n <= 20; ++n) {
        auto [x, w] = gauss_legendre_unit(n);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_GT(x[i], 0.0);
            EXPECT_LT(x[i], 1.0);
            EXPECT_GT(w[i], 0.0);
            EXPECT_NEAR(x[i] + x[n - 1 - i], 1.0, 1e-15);
        }
    }
}
