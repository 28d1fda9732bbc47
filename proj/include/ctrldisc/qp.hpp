#pragma once

#include "ctrldisc/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrldisc {

/// Convex quadratic objective accessed through callbacks, so the reduced
/// optimal-control functional (one state solve per value) fits as well as an
/// explicit dense matrix.
struct QuadraticModel {
    std::size_t size = 0;
    std::function<double(std::span<const double>)> value;
    std::function<double(std::span<const double>, Vector&)> value_and_gradient;
    std::function<Vector(std::span<const double>)> hessian_apply;
};

struct QpOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 200000;
    std::size_t power_iterations = 60;
    std::uint64_t seed = 20240611;
};

struct QpResult {
    Vector x;
    double value = 0.0;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
    double lipschitz = 0.0;
};

class QpIterationLimit : public std::runtime_error {
public:
    QpIterationLimit(const std::string& what, QpResult best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const QpResult& best() const { return best_; }

private:
    QpResult best_;
};

inline Vector project_nonnegative(std::span<const double> x)
{
    Vector p(x.begin(), x.end());
    for (double& v : p)
        v = std::max(v, 0.0);
    return p;
}

/// ||x - max(x - g / L, 0)||, zero exactly at KKT points of min f s.t. x >= 0.
inline double projected_gradient_residual(std::span<const double> x, std::span<const double> g, double lipschitz)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - std::max(x[i] - g[i] / lipschitz, 0.0);
        s += d * d;
    }
    return std::sqrt(s);
}

/// Largest Hessian eigenvalue by power iteration from a seeded random start.
inline double estimate_hessian_norm(const QuadraticModel& model, std::size_t iterations, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Vector v(model.size);
    for (double& x : v)
        x = dist(rng);
    double nv = norm2(v);
    double est = 0.0;
    for (std::size_t it = 0; it < iterations && nv > 0.0; ++it) {
        for (double& x : v)
            x /= nv;
        v = model.hessian_apply(v);
        nv = norm2(v);
        est = std::max(est, nv);
    }
    return est;
}

/// Accelerated projected gradient (FISTA) with function-value restart and a
/// doubling safeguard on the Lipschitz estimate. Iterates stay feasible and
/// their objective values never increase.
inline QpResult solve_nonnegative_qp(const QuadraticModel& model, std::span<const double> start,
                                     const QpOptions& options = {})
{
    const std::size_t n = model.size;
    if (start.size() != n)
        throw std::invalid_argument("solve_nonnegative_qp: start vector has wrong length");

    double lip = 1.05 * estimate_hessian_norm(model, options.power_iterations, options.seed);
    if (!(lip > 0.0))
        lip = 1.0;

    Vector x = project_nonnegative(start);
    Vector gx(n);
    double fx = model.value_and_gradient(x, gx);
    bool gx_valid = true;

    Vector y = x, gy = gx;
    double fy = fx;
    double t = 1.0;
    bool restarted = true;

    QpResult result;
    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
        Vector xn(n);
        for (std::size_t i = 0; i < n; ++i)
            xn[i] = std::max(y[i] - gy[i] / lip, 0.0);

        double model_gap = 0.0, step2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = xn[i] - y[i];
            model_gap += gy[i] * d;
            step2 += d * d;
        }
        const double fxn = model.value(xn);
        const double slack = 1e-12 * (std::abs(fy) + std::abs(fxn) + 1.0);
        if (fxn > fy + model_gap + 0.5 * lip * step2 + slack) {
            lip *= 2.0;
            continue;
        }

        if (std::sqrt(step2) <= options.tol) {
            Vector gn(n);
            const double fn = model.value_and_gradient(xn, gn);
            const double r = projected_gradient_residual(xn, gn, lip);
            if (r <= options.tol) {
                result = {std::move(xn), fn, r, it + 1, lip};
                return result;
            }
        }

        if (fxn > fx && !restarted) {
            // Momentum overshot: restart from x with a plain gradient step.
            t = 1.0;
            restarted = true;
            if (!gx_valid) {
                fx = model.value_and_gradient(x, gx);
                gx_valid = true;
            }
            y = x;
            gy = gx;
            fy = fx;
            continue;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < n; ++i)
            y[i] = xn[i] + beta * (xn[i] - x[i]);
        x = std::move(xn);
        fx = fxn;
        gx_valid = false;
        restarted = false;
        t = t_next;
        fy = model.value_and_gradient(y, gy);
    }

    if (!gx_valid)
        fx = model.value_and_gradient(x, gx);
    result = {x, fx, projected_gradient_residual(x, gx, lip), it, lip};
    throw QpIterationLimit("solve_nonnegative_qp: iteration limit " + std::to_string(options.max_iterations) +
                               " reached (KKT residual " + std::to_string(result.kkt_residual) + ")",
                           std::move(result));
}

} // namespace ctrldisc
