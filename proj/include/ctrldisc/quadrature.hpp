#pragma once

#include "ctrldisc/polynomial.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ctrldisc {

struct QuadratureRule {
    std::size_t dimension = 0;
    std::vector<double> points;  // flat, stride = dimension
    std::vector<double> weights;
    unsigned exactness = 0;

    std::size_t size() const { return weights.size(); }
    std::span<const double> point(std::size_t q) const
    {
        return {points.data() + q * dimension, dimension};
    }
};

inline unsigned max_rule_exactness(std::size_t d)
{
    switch (d) {
    case 1: return 61;
    case 2: return 41;
    default: return 0;
    }
}

/// Gauss-Legendre nodes/weights on [0, 1], Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(std::size_t n)
{
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        const double wi = 1.0 / ((1.0 - z * z) * dp * dp);  // 2/(...) on [-1,1], halved
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    return {x, w};
}

namespace detail {

inline double rule_moment(const QuadratureRule& rule, const MultiIndex& alpha)
{
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        double v = rule.weights[q];
        for (std::size_t i = 0; i < rule.dimension; ++i)
            v *= std::pow(rule.points[q * rule.dimension + i], static_cast<int>(alpha[i]));
        s += v;
    }
    return s;
}

} // namespace detail

/// Largest relative moment error over all monomials of order <= rule.exactness.
inline double exactness_defect(const QuadratureRule& rule)
{
    double worst = 0.0;
    for (const auto& alpha : graded_multi_indices(rule.dimension, rule.exactness)) {
        const double exact = to_double(monomial_integral(alpha, rule.dimension));
        worst = std::max(worst, std::abs(detail::rule_moment(rule, alpha) - exact) / exact);
    }
    return worst;
}

inline constexpr double kRuleTolerance = 1e-13;

/// Simplex rule integrating every polynomial of degree <= exactness.
/// d=1: Gauss-Legendre. d=2: centroid rule for exactness <= 1, otherwise
/// the collapsed (Duffy) tensor Gauss-Legendre rule. Every rule is checked
/// against the exact moments before it is returned.
inline QuadratureRule simplex_rule(std::size_t d, unsigned exactness)
{
    if (d < 1 || d > 2)
        throw std::invalid_argument("simplex_rule: unsupported dimension " + std::to_string(d));
    if (exactness > max_rule_exactness(d))
        throw std::invalid_argument("simplex_rule: exactness " + std::to_string(exactness) +
                                    " unsupported in dimension " + std::to_string(d));
    QuadratureRule rule;
    rule.dimension = d;
    rule.exactness = exactness;

    if (d == 1) {
        auto [x, w] = gauss_legendre_unit(exactness / 2 + 1);
        rule.points = std::move(x);
        rule.weights = std::move(w);
    } else if (exactness <= 1) {
        rule.points = {1.0 / 3.0, 1.0 / 3.0};
        rule.weights = {0.5};
    } else {
        // x = u, y = (1 - u) v, dx dy = (1 - u) du dv; degree in u is at most exactness + 1.
        auto [x, w] = gauss_legendre_unit((exactness + 2 + 1) / 2);
        for (std::size_t a = 0; a < x.size(); ++a)
            for (std::size_t b = 0; b < x.size(); ++b) {
                rule.points.push_back(x[a]);
                rule.points.push_back((1.0 - x[a]) * x[b]);
                rule.weights.push_back(w[a] * w[b] * (1.0 - x[a]));
            }
    }

    double abs_sum = 0.0;
    for (double w : rule.weights) {
        if (!std::isfinite(w))
            throw std::logic_error("simplex_rule: non-finite weight");
        abs_sum += std::abs(w);
    }
    const double ref_volume = d == 1 ? 1.0 : 0.5;
    if (abs_sum > 10.0 * ref_volume)
        throw std::logic_error("simplex_rule: weights too ill-conditioned");
    const double defect = exactness_defect(rule);
    if (!(defect <= kRuleTolerance))
        throw std::logic_error("simplex_rule: exactness check failed (relative error " +
                               std::to_string(defect) + ")");
    return rule;
}

} // namespace ctrldisc
