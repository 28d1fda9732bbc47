#pragma once

#include "ctrldisc/exact_basis.hpp"
#include "ctrldisc/mesh.hpp"
#include "ctrldisc/quadrature.hpp"
#include "ctrldisc/sparse.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrldisc {

using MeshPtr = std::shared_ptr<const SimplexMesh>;

/// Continuous P1 on the mesh vertices.
struct StateSpace {
    MeshPtr mesh;

    explicit StateSpace(MeshPtr m) : mesh(std::move(m))
    {
        if (!mesh)
            throw std::invalid_argument("StateSpace: null mesh");
    }

    std::size_t dof_count() const { return mesh->vertex_count(); }
    std::size_t local_count() const { return mesh->dimension + 1; }
    std::size_t dof(std::size_t cell, std::size_t local) const { return mesh->vertex_of(cell, local); }
};

/// Barycentric coordinate `local` of the reference point xi.
inline double p1_reference_value(std::size_t local, std::span<const double> xi)
{
    if (local == 0) {
        double s = 1.0;
        for (double x : xi)
            s -= x;
        return s;
    }
    return xi[local - 1];
}

/// Reference gradient of barycentric coordinate `local`.
inline std::array<double, 3> p1_reference_gradient(std::size_t d, std::size_t local)
{
    std::array<double, 3> g{};
    for (std::size_t i = 0; i < d; ++i)
        g[i] = local == 0 ? -1.0 : (local == i + 1 ? 1.0 : 0.0);
    return g;
}

/// Discontinuous degree-k Lagrange: global index = cell * m + local node.
class ControlSpace {
public:
    ControlSpace(MeshPtr mesh, unsigned degree)
        : mesh_(std::move(mesh)), basis_(lagrange_basis(check_mesh(mesh_)->dimension, degree)),
          exact_integrals_(basis_integrals(basis_))
    {
        for (const auto& q : exact_integrals_)
            reference_integrals_.push_back(to_double(q));
    }

    const MeshPtr& mesh() const { return mesh_; }
    std::size_t dimension() const { return basis_.dimension; }
    unsigned degree() const { return basis_.degree; }
    std::size_t local_count() const { return basis_.node_count(); }
    std::size_t dof_count() const { return local_count() * mesh_->cell_count(); }
    std::size_t dof(std::size_t cell, std::size_t local) const { return cell * local_count() + local; }

    const LagrangeBasisSpec& reference_basis() const { return basis_; }
    const std::vector<BigRational>& exact_reference_integrals() const { return exact_integrals_; }
    const std::vector<double>& reference_integrals() const { return reference_integrals_; }

    /// values[q * m + j] = psi_j(point_q). Evaluated exactly at the (exactly
    /// representable) quadrature points and rounded once.
    std::vector<double> tabulate(const QuadratureRule& rule) const
    {
        if (rule.dimension != dimension())
            throw std::invalid_argument("ControlSpace::tabulate: rule dimension mismatch");
        const std::size_t m = local_count();
        std::vector<double> values(rule.size() * m);
        RationalPoint xi(dimension());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            for (std::size_t i = 0; i < dimension(); ++i)
                xi[i] = from_double(rule.point(q)[i]);
            for (std::size_t j = 0; j < m; ++j)
                values[q * m + j] = to_double(basis_.basis[j].evaluate(xi));
        }
        return values;
    }

private:
    static const MeshPtr& check_mesh(const MeshPtr& m)
    {
        if (!m)
            throw std::invalid_argument("ControlSpace: null mesh");
        return m;
    }

    MeshPtr mesh_;
    LagrangeBasisSpec basis_;
    std::vector<BigRational> exact_integrals_;
    std::vector<double> reference_integrals_;
};

inline void require_exactness(const QuadratureRule& rule, unsigned needed, const char* what)
{
    if (rule.exactness < needed)
        throw std::invalid_argument(std::string(what) + ": quadrature exactness " +
                                    std::to_string(rule.exactness) + " < required " +
                                    std::to_string(needed));
}

/// stiffness_weight * K + mass_weight * M for P1 states.
inline SparseMatrix assemble_p1_operator(const StateSpace& space, const QuadratureRule& rule,
                                         double stiffness_weight, double mass_weight)
{
    const SimplexMesh& mesh = *space.mesh;
    const std::size_t d = mesh.dimension;
    const std::size_t nloc = space.local_count();
    if (rule.dimension != d)
        throw std::invalid_argument("assemble_p1_operator: rule dimension mismatch");
    require_exactness(rule, 2, "assemble_p1_operator");

    TripletBuilder builder(space.dof_count(), space.dof_count());
    std::vector<double> local(nloc * nloc);
    std::vector<std::array<double, 3>> grads(nloc);
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const AffineMap map = cell_affine_map(mesh, cell);
        for (std::size_t a = 0; a < nloc; ++a) {
            const auto ref = p1_reference_gradient(d, a);
            grads[a] = {};
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t c = 0; c < d; ++c)
                    grads[a][r] += map.inverse_transpose[r * d + c] * ref[c];
        }
        std::fill(local.begin(), local.end(), 0.0);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[q] * map.abs_det;
            const auto xi = rule.point(q);
            for (std::size_t a = 0; a < nloc; ++a)
                for (std::size_t b = a; b < nloc; ++b) {
                    double g = 0.0;
                    for (std::size_t r = 0; r < d; ++r)
                        g += grads[a][r] * grads[b][r];
                    local[a * nloc + b] += w * (stiffness_weight * g + mass_weight * p1_reference_value(a, xi) *
                                                                           p1_reference_value(b, xi));
                }
        }
        for (std::size_t a = 0; a < nloc; ++a)
            for (std::size_t b = a; b < nloc; ++b) {
                std::size_t i = space.dof(cell, a), j = space.dof(cell, b);
                if (i > j)
                    std::swap(i, j);
                builder.add(i, j, local[a * nloc + b]);
            }
    }
    return builder.build_symmetric();
}

/// A = K + M of the Neumann problem (grad y, grad v) + (y, v).
inline SparseMatrix assemble_state_operator(const StateSpace& space, const QuadratureRule& rule)
{
    return assemble_p1_operator(space, rule, 1.0, 1.0);
}

inline SparseMatrix assemble_stiffness(const StateSpace& space, const QuadratureRule& rule)
{
    return assemble_p1_operator(space, rule, 1.0, 0.0);
}

inline SparseMatrix assemble_state_mass(const StateSpace& space, const QuadratureRule& rule)
{
    return assemble_p1_operator(space, rule, 0.0, 1.0);
}

/// Dense m x m reference mass matrix of the control basis.
inline std::vector<double> reference_control_mass(const ControlSpace& space, const QuadratureRule& rule)
{
    require_exactness(rule, 2 * space.degree(), "reference_control_mass");
    const std::size_t m = space.local_count();
    const auto psi = space.tabulate(rule);
    std::vector<double> mass(m * m, 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j)
                mass[i * m + j] += rule.weights[q] * psi[q * m + i] * psi[q * m + j];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j)
            mass[i * m + j] = mass[j * m + i];
    return mass;
}

/// Block diagonal M_u; block(T) = |det B_T| * reference mass.
inline SparseMatrix assemble_control_mass(const ControlSpace& space, const QuadratureRule& rule)
{
    const std::size_t m = space.local_count();
    const auto ref = reference_control_mass(space, rule);
    const SimplexMesh& mesh = *space.mesh();
    TripletBuilder builder(space.dof_count(), space.dof_count());
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const double det = cell_affine_map(mesh, cell).abs_det;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j)
                builder.add(space.dof(cell, i), space.dof(cell, j), det * ref[i * m + j]);
    }
    return builder.build_symmetric();
}

/// C[a, i] = integral of v_a * phi_i.
inline SparseMatrix assemble_coupling(const StateSpace& state, const ControlSpace& control,
                                      const QuadratureRule& rule)
{
    if (state.mesh != control.mesh())
        throw std::invalid_argument("assemble_coupling: spaces live on different meshes");
    require_exactness(rule, control.degree() + 1, "assemble_coupling");
    const std::size_t m = control.local_count();
    const std::size_t nloc = state.local_count();
    const auto psi = control.tabulate(rule);

    std::vector<double> ref(nloc * m, 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q)
        for (std::size_t a = 0; a < nloc; ++a) {
            const double va = rule.weights[q] * p1_reference_value(a, rule.point(q));
            for (std::size_t j = 0; j < m; ++j)
                ref[a * m + j] += va * psi[q * m + j];
        }

    const SimplexMesh& mesh = *state.mesh;
    TripletBuilder builder(state.dof_count(), control.dof_count());
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const double det = cell_affine_map(mesh, cell).abs_det;
        for (std::size_t a = 0; a < nloc; ++a)
            for (std::size_t j = 0; j < m; ++j)
                builder.add(state.dof(cell, a), control.dof(cell, j), det * ref[a * m + j]);
    }
    return builder.build();
}

using ScalarField = std::function<double(std::span<const double>)>;

/// b_a = integral of f * v_a.
inline Vector assemble_load(const StateSpace& space, const ScalarField& f, const QuadratureRule& rule)
{
    const SimplexMesh& mesh = *space.mesh;
    Vector b(space.dof_count(), 0.0);
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const AffineMap map = cell_affine_map(mesh, cell);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto xi = rule.point(q);
            const auto x = map.apply(xi.data());
            const double fw = f(std::span<const double>(x.data(), mesh.dimension)) * rule.weights[q] * map.abs_det;
            for (std::size_t a = 0; a < space.local_count(); ++a)
                b[space.dof(cell, a)] += fw * p1_reference_value(a, xi);
        }
    }
    return b;
}

/// L2 distance between a P1 function and a given field.
inline double p1_l2_error(const StateSpace& space, std::span<const double> y, const ScalarField& exact,
                          const QuadratureRule& rule)
{
    const SimplexMesh& mesh = *space.mesh;
    double sum = 0.0;
    for (std::size_t cell = 0; cell < mesh.cell_count(); ++cell) {
        const AffineMap map = cell_affine_map(mesh, cell);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto xi = rule.point(q);
            const auto x = map.apply(xi.data());
            double yh = 0.0;
            for (std::size_t a = 0; a < space.local_count(); ++a)
                yh += y[space.dof(cell, a)] * p1_reference_value(a, xi);
            const double e = yh - exact(std::span<const double>(x.data(), mesh.dimension));
            sum += rule.weights[q] * map.abs_det * e * e;
        }
    }
    return std::sqrt(sum);
}

/// Discrete state equation A y = C u with cached operators.
class StateEquation {
public:
    StateEquation(const StateSpace& state, const ControlSpace& control, double tol = 1e-10)
        : tol_(tol)
    {
        const std::size_t d = state.mesh->dimension;
        const auto p1_rule = simplex_rule(d, 2);
        const auto mixed_rule = simplex_rule(d, control.degree() + 1);
        const auto control_rule = simplex_rule(d, 2 * control.degree() + 2);
        a_ = assemble_state_operator(state, p1_rule);
        mass_ = assemble_state_mass(state, p1_rule);
        control_mass_ = assemble_control_mass(control, control_rule);
        coupling_ = assemble_coupling(state, control, mixed_rule);
        Vector ones(state.dof_count(), 1.0);
        mass_ones_ = mass_ * ones;
        control_integrals_ = coupling_.multiply_transpose(ones);
    }

    const SparseMatrix& state_operator() const { return a_; }
    const SparseMatrix& state_mass() const { return mass_; }
    const SparseMatrix& control_mass() const { return control_mass_; }
    const SparseMatrix& coupling() const { return coupling_; }
    /// M 1, i.e. the integrals of the P1 basis functions.
    const Vector& state_mass_ones() const { return mass_ones_; }
    /// Column sums of C, i.e. the integrals of the control basis functions.
    const Vector& control_integrals() const { return control_integrals_; }
    double tolerance() const { return tol_; }

    Vector solve(std::span<const double> rhs, LinearSolveReport* report = nullptr) const
    {
        auto result = cg_solve(a_, rhs, tol_);
        if (report)
            *report = result.report;
        return std::move(result.solution);
    }

    Vector solve_state(std::span<const double> u, LinearSolveReport* report = nullptr) const
    {
        if (u.size() != coupling_.cols)
            throw std::invalid_argument("solve_state: control vector has wrong length");
        return solve(coupling_ * u, report);
    }

private:
    double tol_;
    SparseMatrix a_, mass_, control_mass_, coupling_;
    Vector mass_ones_, control_integrals_;
};

} // namespace ctrldisc
