#pragma once

// Reference computations used only by the tests. None of them go through the
// code paths they are used to check.

#include "ctrldisc/rational.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

using ctrldisc::BigInteger;
using ctrldisc::BigRational;
using ctrldisc::factorial;

/// Integral over the unit d-simplex of prod lambda_i^{a_i} (d + 1 barycentric
/// coordinates): prod a_i! / (sum a_i + d)!.
inline BigRational barycentric_moment(const std::vector<unsigned>& powers)
{
    const std::size_t d = powers.size() - 1;
    BigInteger num = 1;
    unsigned order = 0;
    for (unsigned a : powers) {
        num *= factorial(a);
        order += a;
    }
    BigRational r(num, factorial(order + d));
    r.canonicalize();
    return r;
}

/// Solves a square rational system by plain Gaussian elimination (first
/// non-zero pivot, back substitution).
inline std::vector<BigRational> solve_rational(std::vector<std::vector<BigRational>> a, std::vector<BigRational> b)
{
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0)
            ++p;
        if (p == n)
            throw std::runtime_error("oracle: singular system");
        std::swap(a[c], a[p]);
        std::swap(b[c], b[p]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const BigRational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k)
                a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<BigRational> x(n);
    for (std::size_t i = n; i-- > 0;) {
        BigRational s = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Closed Newton-Cotes weights on [0, 1] with nodes j/k, from the moment
/// equations sum_j w_j (j/k)^p = 1/(p+1), p = 0..k.
inline std::vector<BigRational> newton_cotes_weights(unsigned k)
{
    const std::size_t n = k + 1;
    std::vector<std::vector<BigRational>> a(n, std::vector<BigRational>(n));
    std::vector<BigRational> b(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t j = 0; j < n; ++j) {
            BigRational x(static_cast<long>(j), static_cast<long>(k));
            x.canonicalize();
            BigRational v = 1;
            for (std::size_t e = 0; e < p; ++e)
                v *= x;
            a[p][j] = v;
        }
        b[p] = BigRational(1, static_cast<long>(p + 1));
        b[p].canonicalize();
    }
    return solve_rational(std::move(a), std::move(b));
}

/// Dense row-major n x n solve by Gaussian elimination with partial pivoting
/// in long double.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    std::vector<long double> m(a.begin(), a.end()), r(b.begin(), b.end());
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::fabs(m[i * n + c]) > std::fabs(m[p * n + c]))
                p = i;
        if (m[p * n + c] == 0)
            throw std::runtime_error("oracle: singular dense system");
        for (std::size_t k = 0; k < n; ++k)
            std::swap(m[c * n + k], m[p * n + k]);
        std::swap(r[c], r[p]);
        for (std::size_t i = c + 1; i < n; ++i) {
            const long double f = m[i * n + c] / m[c * n + c];
            for (std::size_t k = c; k < n; ++k)
                m[i * n + k] -= f * m[c * n + k];
            r[i] -= f * r[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double s = r[i];
        for (std::size_t k = i + 1; k < n; ++k)
            s -= m[i * n + k] * x[k];
        x[i] = static_cast<double>(s / m[i * n + i]);
    }
    return x;
}

/// min 0.5 x^T Q x + c^T x s.t. x >= 0 by enumerating all 2^n free sets.
inline double active_set_enumeration(const std::vector<double>& q, const std::vector<double>& c,
                                     std::vector<double>* argmin = nullptr)
{
    const std::size_t n = c.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i))
                free.push_back(i);
        std::vector<double> x(n, 0.0);
        if (!free.empty()) {
            const std::size_t f = free.size();
            std::vector<double> sub(f * f), rhs(f);
            for (std::size_t a = 0; a < f; ++a) {
                rhs[a] = -c[free[a]];
                for (std::size_t b = 0; b < f; ++b)
                    sub[a * f + b] = q[free[a] * n + free[b]];
            }
            const auto xf = dense_solve(sub, rhs);
            bool feasible = true;
            for (std::size_t a = 0; a < f; ++a) {
                if (xf[a] < 0.0)
                    feasible = false;
                x[free[a]] = xf[a];
            }
            if (!feasible)
                continue;
        }
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double qi = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                qi += q[i * n + j] * x[j];
            v += 0.5 * x[i] * qi + c[i] * x[i];
        }
        if (v < best) {
            best = v;
            if (argmin)
                *argmin = x;
        }
    }
    return best;
}

} // namespace oracle
