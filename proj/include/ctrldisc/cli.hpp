#pragma once

#include "ctrldisc/exact_basis.hpp"
#include "ctrldisc/ocp.hpp"
#include "ctrldisc/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ctrldisc::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 2, kNumericalFailure = 3 };

namespace detail {

struct Options {
    std::size_t dim = 0;
    unsigned max_degree = 0;
    unsigned degree = 0;
    double alpha = 0.1;
    std::size_t mesh = 4;
    double tol = 1e-10;
    std::size_t max_iterations = OcpConfig{}.max_qp_iterations;
    std::vector<std::size_t> meshes{4, 8, 16};
    bool json = false;
    bool csv = false;
    std::string out_path;
};

inline nlohmann::json error_payload(const std::string& kind, const std::string& message)
{
    return {{"error", kind}, {"message", message}};
}

inline std::string audit_csv(const AuditReport& report)
{
    std::ostringstream os;
    os << "dimension,k,index,integral,negative,all_nonnegative\n";
    for (const auto& rec : report.records)
        for (std::size_t j = 0; j < rec.integrals.size(); ++j)
            os << report.dimension << ',' << rec.degree << ',' << j << ',' << to_fraction_string(rec.integrals[j])
               << ',' << (sign(rec.integrals[j]) < 0 ? "true" : "false") << ','
               << (rec.all_nonnegative ? "true" : "false") << '\n';
    return os.str();
}

inline std::string study_csv(const StudyReport& report)
{
    std::ostringstream os;
    os << "n,J,min_cell_avg,neg_part_norm,iters,regime\n";
    for (const auto& run : report.runs)
        os << run.n << ',' << format_double(run.objective) << ',' << format_double(run.min_cell_average) << ','
           << format_double(run.negative_part_norm) << ',' << run.iterations << ',' << to_string(report.regime)
           << '\n';
    return os.str();
}

inline OcpConfig make_config(const Options& o)
{
    OcpConfig c;
    c.dimension = o.dim;
    c.degree = o.degree;
    c.mesh = o.mesh;
    c.alpha = o.alpha;
    c.qp_tol = o.tol;
    c.max_qp_iterations = o.max_iterations;
    c.validate();
    return c;
}

} // namespace detail

/// Runs one invocation. `args` excludes the program name. Reports go to `out`
/// (or --out PATH); diagnostics go to `err`. Usage errors exit 2, numerical
/// failures exit 3, and both also emit {"error": ..., "message": ...} on `out`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    using detail::error_payload;
    detail::Options o;

    CLI::App app{"Lagrange control discretization audits and model optimal control solves", "ctrldisc"};
    app.require_subcommand(1);

    auto* audit = app.add_subcommand("audit-basis", "Exact sign audit of reference Lagrange basis integrals");
    audit->add_option("--dim", o.dim, "Spatial dimension")->required()->check(CLI::Range(1, 3));
    audit->add_option("--max-degree", o.max_degree, "Largest polynomial degree")->required()->check(CLI::PositiveNumber);
    auto* json_flag = audit->add_flag("--json", o.json, "JSON output (default)");
    audit->add_flag("--csv", o.csv, "CSV output")->excludes(json_flag);
    audit->add_option("--out", o.out_path, "Write the report to PATH");

    auto* cert = app.add_subcommand("certificate", "Counterexample certificate for a negative basis integral");
    cert->add_option("--dim", o.dim, "Spatial dimension")->required()->check(CLI::Range(1, 2));
    cert->add_option("--degree", o.degree, "Control degree")->required()->check(CLI::PositiveNumber);
    cert->add_option("--alpha", o.alpha, "Tikhonov weight")->capture_default_str();
    cert->add_option("--mesh", o.mesh, "Mesh parameter for the measured quantities")->capture_default_str();
    cert->add_option("--out", o.out_path, "Write the report to PATH");

    auto* solve = app.add_subcommand("solve", "Solve the discrete optimal control problem on one mesh");
    solve->add_option("--dim", o.dim, "Spatial dimension")->required()->check(CLI::Range(1, 2));
    solve->add_option("--degree", o.degree, "Control degree")->required()->check(CLI::PositiveNumber);
    solve->add_option("--alpha", o.alpha, "Tikhonov weight")->capture_default_str();
    solve->add_option("--mesh", o.mesh, "Cells (d=1) or subdivisions per side (d=2)")->required()->check(CLI::PositiveNumber);
    solve->add_option("--tol", o.tol, "Projected-gradient KKT tolerance")->capture_default_str();
    solve->add_option("--max-iterations", o.max_iterations, "QP iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    solve->add_option("--out", o.out_path, "Write the report to PATH");

    auto* conv = app.add_subcommand("convergence", "Solve on a mesh sequence and classify the limit");
    conv->add_option("--dim", o.dim, "Spatial dimension")->required()->check(CLI::Range(1, 2));
    conv->add_option("--degree", o.degree, "Control degree")->required()->check(CLI::PositiveNumber);
    conv->add_option("--alpha", o.alpha, "Tikhonov weight")->capture_default_str();
    conv->add_option("--meshes", o.meshes, "Comma separated mesh parameters")->delimiter(',')->check(CLI::PositiveNumber);
    conv->add_option("--tol", o.tol, "Projected-gradient KKT tolerance")->capture_default_str();
    conv->add_option("--max-iterations", o.max_iterations, "QP iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    conv->add_flag("--csv", o.csv, "CSV output");
    conv->add_option("--out", o.out_path, "Write the report to PATH");

    std::vector<std::string> argv_storage;
    argv_storage.emplace_back("ctrldisc");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_storage)
        argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        write_json(out, error_payload("usage", e.what()));
        return kUsage;
    }

    auto emit = [&](const std::string& text) -> int {
        if (o.out_path.empty()) {
            out << text;
            return kSuccess;
        }
        std::ofstream file(o.out_path, std::ios::binary);
        if (!file) {
            err << "cannot open " << o.out_path << '\n';
            write_json(out, error_payload("usage", "cannot open output path " + o.out_path));
            return kUsage;
        }
        file << text;
        return kSuccess;
    };

    // Validate everything before computing.
    OcpConfig config;
    try {
        if (audit->parsed()) {
            check_basis_arguments(o.dim, o.max_degree);
        } else {
            config = detail::make_config(o);
            if (conv->parsed()) {
                std::vector<std::size_t> m = o.meshes;
                std::sort(m.begin(), m.end());
                if (std::unique(m.begin(), m.end()) - m.begin() < 2)
                    throw std::invalid_argument("--meshes needs at least two distinct values");
            }
        }
    } catch (const std::invalid_argument& e) {
        err << e.what() << '\n';
        write_json(out, error_payload("usage", e.what()));
        return kUsage;
    }

    try {
        if (audit->parsed()) {
            const AuditReport report = audit_degrees(o.dim, o.max_degree);
            return emit(o.csv ? detail::audit_csv(report) : dump_json(to_json(report)));
        }
        if (cert->parsed()) {
            const ControlProblem problem(config);
            try {
                const CounterexampleCertificate c = problem.build_certificate();
                return emit(dump_json({{"config", to_json(config)}, {"certificate", to_json(c)}}));
            } catch (const NoNegativeBasis& e) {
                nlohmann::json j = error_payload("NoNegativeBasis", e.what());
                j["config"] = to_json(config);
                j["certificate"] = nullptr;
                return emit(dump_json(j));
            }
        }
        if (solve->parsed()) {
            const ControlProblem problem(config);
            const QpSolution sol = problem.solve_qp();
            const FeasibilityAudit fa = problem.feasibility_audit(sol.lambda);
            nlohmann::json j = {{"config", to_json(config)},
                                {"J", sol.objective},
                                {"iters", sol.iterations},
                                {"kkt_residual", sol.kkt_residual},
                                {"lambda_norm", norm2(sol.lambda)},
                                {"control_dofs", problem.control_size()},
                                {"state_dofs", problem.state_space().dof_count()},
                                {"min_cell_avg", fa.min_cell_average},
                                {"neg_part_norm", fa.negative_part_norm},
                                {"negative_cell_fraction", fa.negative_cell_fraction}};
            return emit(dump_json(j));
        }
        const StudyReport report = convergence_study(config, o.meshes);
        return emit(o.csv ? detail::study_csv(report) : dump_json(to_json(report)));
    } catch (const QpIterationLimit& e) {
        err << e.what() << '\n';
        write_json(out, error_payload("QpIterationLimit", e.what()));
        return kNumericalFailure;
    } catch (const NonConvergenceError& e) {
        err << e.what() << '\n';
        write_json(out, error_payload("NonConvergence", e.what()));
        return kNumericalFailure;
    } catch (const InconclusiveStudy& e) {
        err << e.what() << '\n';
        write_json(out, error_payload("InconclusiveStudy", e.what()));
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        write_json(out, error_payload("NumericalFailure", e.what()));
        return kNumericalFailure;
    }
}

} // namespace ctrldisc::cli
