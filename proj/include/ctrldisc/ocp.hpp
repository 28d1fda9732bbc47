#pragma once

#include "ctrldisc/exact_basis.hpp"
#include "ctrldisc/fem.hpp"
#include "ctrldisc/mesh.hpp"
#include "ctrldisc/qp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrldisc {

/// min ||y - y_d||^2 + alpha ||u||^2, u = sum lambda_i phi_i, lambda >= 0,
/// (grad y, grad v) + (y, v) = (u, v), with y_d = -1 on the unit interval
/// or unit square.
struct OcpConfig {
    static constexpr double desired_state = -1.0;

    std::size_t dimension = 2;
    unsigned degree = 1;
    std::size_t mesh = 4;
    double alpha = 0.1;
    double qp_tol = 1e-10;
    double linear_tol = 1e-12;
    std::size_t max_qp_iterations = 200000;

    static unsigned max_degree(std::size_t d) { return d == 1 ? 11 : d == 2 ? 8 : 0; }

    void validate() const
    {
        if (dimension != 1 && dimension != 2)
            throw std::invalid_argument("dimension must be 1 or 2, got " + std::to_string(dimension));
        if (degree < 1 || degree > max_degree(dimension))
            throw std::invalid_argument("degree must be in 1.." + std::to_string(max_degree(dimension)) +
                                        " for dimension " + std::to_string(dimension));
        if (mesh < 1)
            throw std::invalid_argument("mesh parameter must be >= 1");
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("alpha must be positive");
        if (!(qp_tol > 0.0) || !(linear_tol > 0.0))
            throw std::invalid_argument("tolerances must be positive");
    }
};

struct QpSolution {
    Vector lambda;
    Vector state;
    double objective = 0.0;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
};

struct CounterexampleCertificate {
    std::vector<std::size_t> negative_local;    // reference nodes j with integral(psi_j) < 0
    std::vector<std::size_t> negative_indices;  // global I_n
    Vector direction;                           // coefficients of w_n (indicator of I_n)
    BigRational beta_exact;                     // -|Omega| d! integral(w_ref)
    BigRational m2_exact;                       // |Omega| d! ||w_ref||^2
    double beta = 0.0;
    double m2 = 0.0;
    double beta_mesh = 0.0;  // -integral(w_n) from the assembled coupling
    double m2_mesh = 0.0;    // w_n^T M_u w_n
    double l_n = 0.0;        // ||y_n(w_n)||
    double t_hat = 0.0;
    double delta = 0.0;
    double objective_bound = 0.0;     // |Omega| - delta
    double measured_objective = 0.0;  // J_n(t_hat w_n)
};

class NoNegativeBasis : public std::runtime_error {
public:
    NoNegativeBasis(std::size_t d, unsigned k)
        : std::runtime_error("all degree-" + std::to_string(k) + " reference basis integrals in dimension " +
                             std::to_string(d) + " are non-negative") {}
};

struct FeasibilityAudit {
    Vector cell_averages;
    double min_cell_average = 0.0;
    double negative_part_norm = 0.0;  // quadrature of min(u, 0)^2, approximate
    double negative_cell_fraction = 0.0;
};

inline MeshPtr make_unit_mesh(std::size_t d, std::size_t n)
{
    if (d == 1)
        return std::make_shared<const SimplexMesh>(unit_interval_mesh(n));
    if (d == 2)
        return std::make_shared<const SimplexMesh>(unit_square_mesh(n));
    throw std::invalid_argument("no mesh generator for dimension " + std::to_string(d));
}

class ControlProblem {
public:
    explicit ControlProblem(const OcpConfig& config)
        : config_((config.validate(), config)), mesh_(make_unit_mesh(config.dimension, config.mesh)),
          state_(mesh_), control_(mesh_, config.degree), equation_(state_, control_, config.linear_tol),
          audit_rule_(simplex_rule(config.dimension, 2 * config.degree + 2))
    {
        const auto& m1 = equation_.state_mass_ones();
        for (double v : m1)
            volume_ += v;
    }

    const OcpConfig& config() const { return config_; }
    const SimplexMesh& mesh() const { return *mesh_; }
    const StateSpace& state_space() const { return state_; }
    const ControlSpace& control_space() const { return control_; }
    const StateEquation& equation() const { return equation_; }
    std::size_t control_size() const { return control_.dof_count(); }
    /// 1^T M 1.
    double domain_volume() const { return volume_; }

    Vector solve_state(std::span<const double> lambda) const { return equation_.solve_state(lambda); }

    double objective(std::span<const double> lambda) const
    {
        check_size(lambda);
        return objective_from_state(lambda, solve_state(lambda));
    }

    /// g = 2 C^T p + 2 alpha M_u lambda with A p = M (y - y_d).
    double objective_and_gradient(std::span<const double> lambda, Vector& gradient) const
    {
        check_size(lambda);
        const Vector y = solve_state(lambda);
        const double j = objective_from_state(lambda, y);
        Vector rhs = equation_.state_mass() * y;
        const auto& m1 = equation_.state_mass_ones();
        for (std::size_t a = 0; a < rhs.size(); ++a)
            rhs[a] -= OcpConfig::desired_state * m1[a];
        const Vector p = equation_.solve(rhs);
        gradient = equation_.coupling().multiply_transpose(p);
        const Vector mu = equation_.control_mass() * lambda;
        for (std::size_t i = 0; i < gradient.size(); ++i)
            gradient[i] = 2.0 * gradient[i] + 2.0 * config_.alpha * mu[i];
        return j;
    }

    Vector gradient(std::span<const double> lambda) const
    {
        Vector g;
        objective_and_gradient(lambda, g);
        return g;
    }

    /// H s = 2 C^T A^{-1} M A^{-1} C s + 2 alpha M_u s.
    Vector hessian_apply(std::span<const double> s) const
    {
        check_size(s);
        const Vector z = solve_state(s);
        const Vector p = equation_.solve(equation_.state_mass() * z);
        Vector h = equation_.coupling().multiply_transpose(p);
        const Vector mu = equation_.control_mass() * s;
        for (std::size_t i = 0; i < h.size(); ++i)
            h[i] = 2.0 * h[i] + 2.0 * config_.alpha * mu[i];
        return h;
    }

    QuadraticModel quadratic_model() const
    {
        QuadraticModel model;
        model.size = control_size();
        model.value = [this](std::span<const double> x) { return objective(x); };
        model.value_and_gradient = [this](std::span<const double> x, Vector& g) {
            return objective_and_gradient(x, g);
        };
        model.hessian_apply = [this](std::span<const double> x) { return hessian_apply(x); };
        return model;
    }

    /// Starts from lambda = 0; throws QpIterationLimit on the iteration cap.
    QpSolution solve_qp() const
    {
        QpOptions options;
        options.tol = config_.qp_tol;
        options.max_iterations = config_.max_qp_iterations;
        const Vector start(control_size(), 0.0);
        QpResult r = solve_nonnegative_qp(quadratic_model(), start, options);
        QpSolution sol;
        sol.state = solve_state(r.x);
        sol.lambda = std::move(r.x);
        sol.objective = r.value;
        sol.kkt_residual = r.kkt_residual;
        sol.iterations = r.iterations;
        return sol;
    }

    CounterexampleCertificate build_certificate() const
    {
        const std::size_t d = config_.dimension;
        const auto& exact = control_.exact_reference_integrals();
        CounterexampleCertificate cert;
        for (std::size_t j = 0; j < exact.size(); ++j)
            if (sign(exact[j]) < 0)
                cert.negative_local.push_back(j);
        if (cert.negative_local.empty())
            throw NoNegativeBasis(d, config_.degree);

        // |det B| > 0 on every cell, so the sign of a global integral is the
        // sign of its reference integral.
        cert.direction.assign(control_size(), 0.0);
        for (std::size_t cell = 0; cell < mesh_->cell_count(); ++cell)
            for (std::size_t j : cert.negative_local) {
                const std::size_t i = control_.dof(cell, j);
                cert.negative_indices.push_back(i);
                cert.direction[i] = 1.0;
            }

        ExactPolynomial w_ref(d);
        for (std::size_t j : cert.negative_local)
            w_ref += control_.reference_basis().basis[j];
        const BigRational inv_ref_volume(factorial(d));
        const BigRational omega = 1;  // unit interval / unit square
        cert.beta_exact = -omega * inv_ref_volume * w_ref.integrate_reference();
        cert.m2_exact = omega * inv_ref_volume * (w_ref * w_ref).integrate_reference();
        cert.beta = to_double(cert.beta_exact);
        cert.m2 = to_double(cert.m2_exact);

        const auto& col = equation_.control_integrals();
        for (std::size_t i : cert.negative_indices)
            cert.beta_mesh -= col[i];
        cert.m2_mesh = dot(cert.direction, equation_.control_mass() * cert.direction);

        const Vector z = solve_state(cert.direction);
        cert.l_n = std::sqrt(dot(z, equation_.state_mass() * z));

        cert.t_hat = cert.beta / ((1.0 + config_.alpha) * cert.m2);
        cert.delta = cert.beta * cert.t_hat;
        cert.objective_bound = volume_ - cert.delta;
        Vector u = cert.direction;
        for (double& v : u)
            v *= cert.t_hat;
        cert.measured_objective = objective(u);
        return cert;
    }

    FeasibilityAudit feasibility_audit(std::span<const double> lambda) const
    {
        check_size(lambda);
        const std::size_t m = control_.local_count();
        const double ref_scale = to_double(BigRational(factorial(config_.dimension)));
        const auto& ref_int = control_.reference_integrals();
        if (!tabulated_)
            tabulated_ = control_.tabulate(audit_rule_);
        const auto& psi = *tabulated_;

        FeasibilityAudit audit;
        audit.cell_averages.resize(mesh_->cell_count());
        double neg2 = 0.0;
        std::size_t negative_cells = 0;
        for (std::size_t cell = 0; cell < mesh_->cell_count(); ++cell) {
            const auto coeffs = lambda.subspan(control_.dof(cell, 0), m);
            double avg = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                avg += coeffs[j] * ref_int[j];
            avg *= ref_scale;
            audit.cell_averages[cell] = avg;
            if (avg < 0.0)
                ++negative_cells;

            const double det = cell_affine_map(*mesh_, cell).abs_det;
            for (std::size_t q = 0; q < audit_rule_.size(); ++q) {
                double u = 0.0;
                for (std::size_t j = 0; j < m; ++j)
                    u += coeffs[j] * psi[q * m + j];
                if (u < 0.0)
                    neg2 += audit_rule_.weights[q] * det * u * u;
            }
        }
        audit.min_cell_average = *std::min_element(audit.cell_averages.begin(), audit.cell_averages.end());
        audit.negative_part_norm = std::sqrt(neg2);
        audit.negative_cell_fraction =
            static_cast<double>(negative_cells) / static_cast<double>(mesh_->cell_count());
        return audit;
    }

private:
    void check_size(std::span<const double> lambda) const
    {
        if (lambda.size() != control_size())
            throw std::invalid_argument("control coefficient vector has length " + std::to_string(lambda.size()) +
                                        ", expected " + std::to_string(control_size()));
    }

    /// ||y - y_d||^2 expanded as y^T M y - 2 y_d 1^T M y + y_d^2 1^T M 1.
    double objective_from_state(std::span<const double> lambda, std::span<const double> y) const
    {
        const double yd = OcpConfig::desired_state;
        const Vector my = equation_.state_mass() * y;
        const double tracking = dot(y, my) - 2.0 * yd * dot(equation_.state_mass_ones(), y) + yd * yd * volume_;
        const double control = dot(lambda, equation_.control_mass() * lambda);
        return tracking + config_.alpha * control;
    }

    OcpConfig config_;
    MeshPtr mesh_;
    StateSpace state_;
    ControlSpace control_;
    StateEquation equation_;
    QuadratureRule audit_rule_;
    mutable std::optional<std::vector<double>> tabulated_;
    double volume_ = 0.0;
};

enum class Regime { FeasibleLimit, InfeasibleLimit };

inline const char* to_string(Regime r)
{
    return r == Regime::FeasibleLimit ? "FEASIBLE_LIMIT" : "INFEASIBLE_LIMIT";
}

class InconclusiveStudy : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StudyRun {
    std::size_t n = 0;
    double objective = 0.0;
    double min_cell_average = 0.0;
    double negative_part_norm = 0.0;
    double negative_cell_fraction = 0.0;
    std::size_t iterations = 0;
    double kkt_residual = 0.0;
    std::optional<double> certificate_bound;
    std::optional<double> certificate_objective;  // J_n(t_hat w_n)
};

struct StudyReport {
    OcpConfig config;
    std::vector<std::size_t> meshes;
    Regime regime = Regime::FeasibleLimit;
    std::optional<CounterexampleCertificate> certificate;
    std::vector<StudyRun> runs;
};

inline constexpr double kObjectiveTolerance = 1e-8;
inline constexpr double kCellAverageTolerance = 1e-12;
inline constexpr double kMeshIndependenceTolerance = 1e-10;

/// Solves the discrete problem on every mesh and classifies the limit:
/// INFEASIBLE_LIMIT needs J_n <= |Omega| - delta and a negative cell average
/// at every n; FEASIBLE_LIMIT needs J_n = |Omega| and clean audits at every
/// n. Anything else throws InconclusiveStudy.
inline StudyReport convergence_study(const OcpConfig& base, std::vector<std::size_t> meshes)
{
    std::sort(meshes.begin(), meshes.end());
    meshes.erase(std::unique(meshes.begin(), meshes.end()), meshes.end());
    if (meshes.size() < 2)
        throw std::invalid_argument("convergence_study: need at least two distinct mesh parameters");

    StudyReport report;
    report.config = base;
    report.meshes = meshes;
    bool infeasible_evidence = true;
    bool feasible_evidence = true;
    for (std::size_t n : meshes) {
        OcpConfig cfg = base;
        cfg.mesh = n;
        const ControlProblem problem(cfg);
        StudyRun run;
        run.n = n;
        std::optional<CounterexampleCertificate> cert;
        try {
            cert = problem.build_certificate();
        } catch (const NoNegativeBasis&) {
        }
        const QpSolution sol = problem.solve_qp();
        const FeasibilityAudit audit = problem.feasibility_audit(sol.lambda);
        run.objective = sol.objective;
        run.min_cell_average = audit.min_cell_average;
        run.negative_part_norm = audit.negative_part_norm;
        run.negative_cell_fraction = audit.negative_cell_fraction;
        run.iterations = sol.iterations;
        run.kkt_residual = sol.kkt_residual;
        if (cert) {
            run.certificate_bound = cert->objective_bound;
            run.certificate_objective = cert->measured_objective;
            if (!(run.objective <= cert->objective_bound + kObjectiveTolerance) || !(run.min_cell_average < 0.0))
                infeasible_evidence = false;
            if (!report.certificate)
                report.certificate = std::move(cert);
            feasible_evidence = false;
        } else {
            infeasible_evidence = false;
            if (!(std::abs(run.objective - problem.domain_volume()) <= kObjectiveTolerance) ||
                !(run.min_cell_average >= -kCellAverageTolerance))
                feasible_evidence = false;
        }
        report.runs.push_back(run);
    }
    if (infeasible_evidence)
        report.regime = Regime::InfeasibleLimit;
    else if (feasible_evidence)
        report.regime = Regime::FeasibleLimit;
    else
        throw InconclusiveStudy("convergence_study: runs match neither the feasible nor the infeasible regime");
    return report;
}

inline nlohmann::json to_json(const OcpConfig& c, const std::vector<std::size_t>& meshes = {})
{
    nlohmann::json j = {{"dim", c.dimension},   {"degree", c.degree},  {"alpha", c.alpha},
                        {"y_d", OcpConfig::desired_state}, {"tol", c.qp_tol}, {"linear_tol", c.linear_tol}};
    if (meshes.empty())
        j["mesh"] = c.mesh;
    else
        j["meshes"] = meshes;
    return j;
}

inline nlohmann::json to_json(const CounterexampleCertificate& c)
{
    return {{"beta", c.beta},
            {"M2", c.m2},
            {"t_hat", c.t_hat},
            {"delta", c.delta},
            {"beta_exact", to_fraction_string(c.beta_exact)},
            {"M2_exact", to_fraction_string(c.m2_exact)},
            {"beta_mesh", c.beta_mesh},
            {"M2_mesh", c.m2_mesh},
            {"L_n", c.l_n},
            {"objective_bound", c.objective_bound},
            {"measured_objective", c.measured_objective},
            {"negative_local_indices", c.negative_local},
            {"negative_count", c.negative_indices.size()}};
}

inline nlohmann::json to_json(const StudyReport& r)
{
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : r.runs) {
        nlohmann::json j = {{"n", run.n},
                            {"J", run.objective},
                            {"min_cell_avg", run.min_cell_average},
                            {"neg_part_norm", run.negative_part_norm},
                            {"negative_cell_fraction", run.negative_cell_fraction},
                            {"iters", run.iterations},
                            {"kkt_residual", run.kkt_residual}};
        j["certificate_bound"] = run.certificate_bound ? nlohmann::json(*run.certificate_bound) : nlohmann::json();
        runs.push_back(std::move(j));
    }
    return {{"config", to_json(r.config, r.meshes)},
            {"regime", to_string(r.regime)},
            {"certificate", r.certificate ? to_json(*r.certificate) : nlohmann::json()},
            {"runs", std::move(runs)}};
}

} // namespace ctrldisc
