#pragma once

#include "ctrldisc/polynomial.hpp"
#include "ctrldisc/rational.hpp"

#include <json.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ctrldisc {

using RationalPoint = std::vector<BigRational>;

/// Largest degree accepted by lagrange_basis for the given dimension.
inline unsigned max_basis_degree(std::size_t d)
{
    switch (d) {
    case 1: return 16;
    case 2: return 10;
    case 3: return 7;
    default: return 0;
    }
}

inline void check_basis_arguments(std::size_t d, unsigned k)
{
    if (d < 1 || d > 3)
        throw std::invalid_argument("unsupported dimension " + std::to_string(d) + " (expected 1, 2 or 3)");
    if (k < 1 || k > max_basis_degree(d))
        throw std::invalid_argument("unsupported degree " + std::to_string(k) + " for dimension " +
                                    std::to_string(d) + " (expected 1.." +
                                    std::to_string(max_basis_degree(d)) + ")");
}

/// Equispaced nodes alpha/k, |alpha| <= k, in graded_multi_indices order.
inline std::vector<RationalPoint> lattice_nodes(std::size_t d, unsigned k)
{
    check_basis_arguments(d, k);
    std::vector<RationalPoint> nodes;
    for (const auto& alpha : graded_multi_indices(d, k)) {
        RationalPoint p(d);
        for (std::size_t i = 0; i < d; ++i) {
            p[i] = BigRational(alpha[i], k);
            p[i].canonicalize();
        }
        nodes.push_back(std::move(p));
    }
    return nodes;
}

struct LagrangeBasisSpec {
    std::size_t dimension = 0;
    unsigned degree = 0;
    std::vector<MultiIndex> node_indices;  // node j = node_indices[j] / degree
    std::vector<RationalPoint> nodes;
    std::vector<ExactPolynomial> basis;    // basis[i](nodes[j]) == delta_ij

    std::size_t node_count() const { return nodes.size(); }
};

namespace detail {

/// Inverse of a square rational matrix by Gauss-Jordan elimination with
/// partial pivoting on |entry|. Throws std::logic_error if singular.
inline std::vector<std::vector<BigRational>> invert(std::vector<std::vector<BigRational>> a)
{
    const std::size_t n = a.size();
    std::vector<std::vector<BigRational>> inv(n, std::vector<BigRational>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        inv[i][i] = 1;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        BigRational best = abs(a[col][col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            BigRational mag = abs(a[r][col]);
            if (mag > best) {
                best = mag;
                piv = r;
            }
        }
        if (best == 0)
            throw std::logic_error("singular Vandermonde matrix");
        std::swap(a[col], a[piv]);
        std::swap(inv[col], inv[piv]);

        const BigRational scale = 1 / a[col][col];
        for (std::size_t c = col; c < n; ++c)
            a[col][c] *= scale;
        for (std::size_t c = 0; c < n; ++c)
            inv[col][c] *= scale;

        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0)
                continue;
            const BigRational f = a[r][col];
            for (std::size_t c = col; c < n; ++c)
                if (a[col][c] != 0)
                    a[r][c] -= f * a[col][c];
            for (std::size_t c = 0; c < n; ++c)
                if (inv[col][c] != 0)
                    inv[r][c] -= f * inv[col][c];
        }
    }
    return inv;
}

} // namespace detail

/// Nodal basis of P_k on the unit simplex, from the exact inverse of the
/// generalized Vandermonde matrix V[j][b] = nodes[j]^monomials[b].
inline LagrangeBasisSpec lagrange_basis(std::size_t d, unsigned k)
{
    check_basis_arguments(d, k);
    LagrangeBasisSpec spec;
    spec.dimension = d;
    spec.degree = k;
    spec.node_indices = graded_multi_indices(d, k);
    spec.nodes = lattice_nodes(d, k);

    const auto& monomials = spec.node_indices;
    const std::size_t m = monomials.size();

    std::vector<std::vector<BigRational>> vandermonde(m, std::vector<BigRational>(m));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t b = 0; b < m; ++b) {
            BigRational v = 1;
            for (std::size_t i = 0; i < d; ++i)
                for (unsigned p = 0; p < monomials[b][i]; ++p)
                    v *= spec.nodes[j][i];
            vandermonde[j][b] = v;
        }

    const auto coeffs = detail::invert(std::move(vandermonde));
    spec.basis.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        ExactPolynomial p(d);
        for (std::size_t b = 0; b < m; ++b)
            p.add_term(monomials[b], coeffs[b][i]);
        spec.basis.push_back(std::move(p));
    }
    return spec;
}

inline std::vector<BigRational> basis_integrals(const LagrangeBasisSpec& spec)
{
    std::vector<BigRational> out;
    out.reserve(spec.basis.size());
    for (const auto& p : spec.basis)
        out.push_back(p.integrate_reference());
    return out;
}

struct DegreeAudit {
    unsigned degree = 0;
    std::vector<BigRational> integrals;
    bool all_nonnegative = true;
    std::vector<std::size_t> negative_indices;
};

struct AuditReport {
    std::size_t dimension = 0;
    std::vector<DegreeAudit> records;
};

/// Exact sign audit of the reference basis integrals for k = 1..k_max.
/// A zero integral counts as non-negative.
inline DegreeAudit audit_degree(std::size_t d, unsigned k)
{
    DegreeAudit rec;
    rec.degree = k;
    rec.integrals = basis_integrals(lagrange_basis(d, k));
    for (std::size_t j = 0; j < rec.integrals.size(); ++j)
        if (sign(rec.integrals[j]) < 0)
            rec.negative_indices.push_back(j);
    rec.all_nonnegative = rec.negative_indices.empty();
    return rec;
}

inline AuditReport audit_degrees(std::size_t d, unsigned k_max)
{
    check_basis_arguments(d, k_max);
    AuditReport report;
    report.dimension = d;
    for (unsigned k = 1; k <= k_max; ++k)
        report.records.push_back(audit_degree(d, k));
    return report;
}

inline nlohmann::json to_json(const AuditReport& report)
{
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : report.records) {
        nlohmann::json integrals = nlohmann::json::array();
        for (const auto& q : rec.integrals)
            integrals.push_back(to_fraction_string(q));
        records.push_back({{"k", rec.degree},
                           {"integrals", std::move(integrals)},
                           {"all_nonnegative", rec.all_nonnegative},
                           {"negative_indices", rec.negative_indices}});
    }
    return {{"dimension", report.dimension}, {"records", std::move(records)}};
}

} // namespace ctrldisc
