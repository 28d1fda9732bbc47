#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace ctrldisc {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Compressed sparse rows.
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    bool symmetric = false;

    std::size_t nonzeros() const { return values.size(); }

    void multiply(std::span<const double> x, std::span<double> y) const
    {
        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
                s += values[p] * x[col_idx[p]];
            y[r] = s;
        }
    }

    Vector operator*(std::span<const double> x) const
    {
        Vector y(rows);
        multiply(x, y);
        return y;
    }

    Vector multiply_transpose(std::span<const double> x) const
    {
        Vector y(cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
                y[col_idx[p]] += values[p] * x[r];
        return y;
    }

    double at(std::size_t r, std::size_t c) const
    {
        auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
        auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
        auto it = std::lower_bound(first, last, c);
        return (it != last && *it == c) ? values[static_cast<std::size_t>(it - col_idx.begin())] : 0.0;
    }

    Vector diagonal() const
    {
        Vector d(std::min(rows, cols), 0.0);
        for (std::size_t r = 0; r < d.size(); ++r)
            d[r] = at(r, r);
        return d;
    }

    /// Bitwise A == A^T.
    bool is_exactly_symmetric() const
    {
        if (rows != cols)
            return false;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
                if (at(col_idx[p], r) != values[p])
                    return false;
        return true;
    }
};

/// Collects (row, col, value) contributions; duplicates are summed in
/// insertion order, so the result is deterministic.
class TripletBuilder {
public:
    TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    void add(std::size_t r, std::size_t c, double v)
    {
        if (r >= rows_ || c >= cols_)
            throw std::out_of_range("TripletBuilder::add: index out of range");
        entries_.push_back({r, c, v});
    }

    SparseMatrix build() const { return compress(entries_, false); }

    /// Treats the added entries as the upper triangle (r <= c) and mirrors
    /// them, so the result is symmetric bit for bit.
    SparseMatrix build_symmetric() const
    {
        if (rows_ != cols_)
            throw std::logic_error("build_symmetric: matrix not square");
        std::vector<Entry> all;
        all.reserve(2 * entries_.size());
        for (const auto& e : entries_) {
            if (e.r > e.c)
                throw std::logic_error("build_symmetric: entry below the diagonal");
            all.push_back(e);
        }
        // Sum duplicates in the upper triangle first, then mirror the sums.
        SparseMatrix upper = compress(all, false);
        std::vector<Entry> mirrored;
        for (std::size_t r = 0; r < upper.rows; ++r)
            for (std::size_t p = upper.row_ptr[r]; p < upper.row_ptr[r + 1]; ++p) {
                mirrored.push_back({r, upper.col_idx[p], upper.values[p]});
                if (upper.col_idx[p] != r)
                    mirrored.push_back({upper.col_idx[p], r, upper.values[p]});
            }
        return compress(mirrored, true);
    }

private:
    struct Entry {
        std::size_t r, c;
        double v;
    };

    SparseMatrix compress(std::vector<Entry> entries, bool symmetric) const
    {
        std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return std::tie(a.r, a.c) < std::tie(b.r, b.c);
        });
        SparseMatrix m;
        m.rows = rows_;
        m.cols = cols_;
        m.symmetric = symmetric;
        m.row_ptr.assign(rows_ + 1, 0);
        for (std::size_t i = 0; i < entries.size();) {
            std::size_t j = i;
            double s = 0.0;
            while (j < entries.size() && entries[j].r == entries[i].r && entries[j].c == entries[i].c)
                s += entries[j++].v;
            m.col_idx.push_back(entries[i].c);
            m.values.push_back(s);
            ++m.row_ptr[entries[i].r + 1];
            i = j;
        }
        std::partial_sum(m.row_ptr.begin(), m.row_ptr.end(), m.row_ptr.begin());
        return m;
    }

    std::size_t rows_, cols_;
    std::vector<Entry> entries_;
};

struct LinearSolveReport {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, LinearSolveReport report)
        : std::runtime_error(what), report_(report) {}
    const LinearSolveReport& report() const { return report_; }

private:
    LinearSolveReport report_;
};

struct CgResult {
    Vector solution;
    LinearSolveReport report;
};

/// Jacobi-preconditioned conjugate gradients. Stops on the recurrence
/// residual, then confirms with the true residual b - A x and restarts from
/// the current iterate if the two have drifted apart.
inline CgResult cg_solve(const SparseMatrix& a, std::span<const double> rhs, double tol = 1e-10,
                         std::size_t max_iterations = 0)
{
    const std::size_t n = a.rows;
    if (a.cols != n || rhs.size() != n)
        throw std::invalid_argument("cg_solve: dimension mismatch");
    if (max_iterations == 0)
        max_iterations = 10 * n;

    CgResult out;
    out.solution.assign(n, 0.0);
    const double bnorm = norm2(rhs);
    if (bnorm == 0.0) {
        out.report = {0, 0.0, true};
        return out;
    }

    Vector inv_diag = a.diagonal();
    for (double& d : inv_diag) {
        if (!(d > 0.0))
            throw std::invalid_argument("cg_solve: non-positive diagonal entry");
        d = 1.0 / d;
    }

    Vector& x = out.solution;
    Vector r(rhs.begin(), rhs.end()), z(n), p(n), ap(n);
    std::size_t it = 0;
    double true_rel = 1.0;

    while (true) {
        for (std::size_t i = 0; i < n; ++i)
            z[i] = inv_diag[i] * r[i];
        p = z;
        double rz = dot(r, z);
        double rel = norm2(r) / bnorm;
        while (rel > tol && it < max_iterations) {
            a.multiply(p, ap);
            const double step = rz / dot(p, ap);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
            }
            for (std::size_t i = 0; i < n; ++i)
                z[i] = inv_diag[i] * r[i];
            const double rz_next = dot(r, z);
            for (std::size_t i = 0; i < n; ++i)
                p[i] = z[i] + (rz_next / rz) * p[i];
            rz = rz_next;
            rel = norm2(r) / bnorm;
            ++it;
        }
        a.multiply(x, ap);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = rhs[i] - ap[i];
        true_rel = norm2(r) / bnorm;
        if (true_rel <= tol || it >= max_iterations)
            break;
    }

    out.report = {it, true_rel, true_rel <= tol};
    if (!out.report.converged)
        throw NonConvergenceError("cg_solve: no convergence after " + std::to_string(it) +
                                      " iterations (relative residual " + std::to_string(true_rel) + ")",
                                  out.report);
    return out;
}

} // namespace ctrldisc
