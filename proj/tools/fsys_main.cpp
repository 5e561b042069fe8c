#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include "fsys/errors.hpp"
#include "fsys/report.hpp"

namespace {

using namespace fsys;

constexpr int kExitSchema = 2;
constexpr int kExitAxioms = 3;
constexpr int kExitSolve = 4;
constexpr int kExitInconclusive = 5;

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error("cannot open output file: " + out_path);
    out << text;
}

Which parse_operator(const std::string& name) {
    if (name == "T1") return Which::T1;
    if (name == "T1t") return Which::T1Tilde;
    throw DomainError("operator must be T1 or T1t");
}

int cmd_analyze(const std::string& problem_path, const std::string& out_path, int samples, bool timings) {
    const FriedrichsProblem problem = load_problem(problem_path);
    const AnalysisReport report = analyze(problem, samples);
    emit(report_to_json(report, timings), out_path);
    return report.f2_ok ? 0 : kExitAxioms;
}

int cmd_kernel(const std::string& problem_path, const std::string& operator_name,
               const std::vector<int>& grids, double svd_tol, const std::string& out_path) {
    const FriedrichsProblem problem = load_problem(problem_path);
    const Which which = parse_operator(operator_name);
    const KernelMeasurement measurement = numerical_kernel(problem, which, grids, svd_tol);

    std::string json = "{\"problem_id\":\"" + problem.id + "\",\"operator\":\"" + operator_name +
                       "\",\"dimension\":" + std::to_string(measurement.dimension) +
                       ",\"conclusive\":" + (measurement.conclusive ? "true" : "false") + ",\"nullities\":[";
    for (size_t i = 0; i < measurement.nullities.size(); ++i) {
        if (i) json += ",";
        json += std::to_string(measurement.nullities[i]);
    }
    json += "]}\n";
    std::cout << json;
    if (!out_path.empty() && measurement.conclusive) write_basis_csv(out_path, measurement.basis);
    return measurement.conclusive ? 0 : kExitInconclusive;
}

std::vector<Polynomial> parse_polynomial_vector(const nlohmann::json& node, int r, const char* what) {
    if (!node.is_array() || static_cast<int>(node.size()) != r)
        throw SchemaError(std::string(what) + " must be an r-array of polynomial entries");
    std::vector<Polynomial> out;
    for (const auto& entry : node) {
        std::vector<Complex> coeffs;
        for (const auto& pair : entry) {
            if (!pair.is_array() || pair.size() != 2)
                throw SchemaError(std::string(what) + ": coefficients must be [re, im] pairs");
            coeffs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
        out.emplace_back(std::move(coeffs));
    }
    return out;
}

std::vector<Polynomial> load_polynomial_vector(const std::string& path, int r, const char* key) {
    std::ifstream in(path);
    if (!in) throw SchemaError(std::string("cannot open file: ") + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains(key)) return parse_polynomial_vector(doc[key], r, key);
    return parse_polynomial_vector(doc, r, key);
}

int cmd_solve(const std::string& problem_path, const std::string& rhs_arg, const std::string& bc_arg,
              int grid_n, const std::string& operator_name, const std::string& out_path,
              const std::string& mms_u_path) {
    const FriedrichsProblem problem = load_problem(problem_path);
    const Which which = parse_operator(operator_name);
    const int r = problem.size();

    BoundaryConditionSpec spec;
    if (bc_arg == "constructed") {
        spec = construct_admissible_pair(problem);
    } else {
        spec = load_bc_spec(bc_arg, r);
        const VConditionReport admissibility = check_V_conditions(problem, spec);
        if (!admissibility.surrogate()) {
            std::cerr << "boundary conditions not admissible or grid too coarse (pair failed the "
                         "orthogonality/count check)\n";
            return kExitSolve;
        }
    }

    const Interval iv = problem.interval();
    const bool manufactured = rhs_arg == "manufactured";
    std::vector<Polynomial> u_exact;
    std::vector<Polynomial> rhs(static_cast<size_t>(r));
    if (manufactured) {
        if (mms_u_path.empty()) {
            // (x-a)(b-x) per component: vanishing full trace satisfies any constraint set
            const Polynomial bump = Polynomial(std::vector<Complex>{{-iv.a * iv.b, 0.0}}) +
                                    Polynomial(std::vector<Complex>{{0.0, 0.0}, {iv.a + iv.b, 0.0}}) +
                                    Polynomial(std::vector<Complex>{{0.0, 0.0}, {0.0, 0.0}, {-1.0, 0.0}});
            u_exact.assign(static_cast<size_t>(r), bump);
        } else {
            u_exact = load_polynomial_vector(mms_u_path, r, "u");
        }
        const auto& side = which == Which::T1 ? spec.V : spec.Vtilde;
        for (const BoundaryConstraint& c : side) {
            const double x = c.endpoint == 'a' ? iv.a : iv.b;
            Eigen::VectorXcd trace(r);
            for (int i = 0; i < r; ++i) trace(i) = u_exact[static_cast<size_t>(i)](x);
            if ((c.projector * trace).norm() > 1e-8 * (1.0 + trace.norm())) {
                std::cerr << "manufactured solution violates the boundary conditions\n";
                return kExitSolve;
            }
        }
        rhs = apply_operator_symbolic(problem, u_exact, which);
    } else if (rhs_arg == "zero") {
        // rhs stays zero
    } else if (rhs_arg.empty()) {
        if (problem.rhs) rhs = *problem.rhs;
    } else {
        rhs = load_polynomial_vector(rhs_arg, r, "rhs");
    }

    auto run = [&](int n) {
        const DiscreteOperator op = discretize(problem, spec, n, which);
        Eigen::MatrixXcd f_mid(r, op.grid.cells());
        for (int j = 0; j < op.grid.cells(); ++j)
            for (int i = 0; i < r; ++i) f_mid(i, j) = rhs[static_cast<size_t>(i)](op.grid.midpoint(j));
        return solve_bvp(op, f_mid);
    };

    const SolveResult fine = run(grid_n);
    std::string json = "{\"problem_id\":\"" + problem.id + "\",\"operator\":\"" + operator_name +
                       "\",\"grid\":" + std::to_string(grid_n) +
                       ",\"residual\":" + format_double(fine.residual) +
                       ",\"residual_ok\":" + (fine.residual_ok ? "true" : "false");
    if (manufactured) {
        const GridFunction exact = sample_polynomials(u_exact, fine.u.grid);
        GridFunction diff = fine.u;
        diff.values -= exact.values;
        const double error_fine = grid_norm(diff);

        const int coarse_n = (grid_n - 1) % 2 == 0 ? (grid_n - 1) / 2 + 1 : (grid_n + 1) / 2;
        const SolveResult coarse = run(coarse_n);
        const GridFunction exact_coarse = sample_polynomials(u_exact, coarse.u.grid);
        GridFunction diff_coarse = coarse.u;
        diff_coarse.values -= exact_coarse.values;
        const double error_coarse = grid_norm(diff_coarse);

        const double order =
            (error_fine > 0.0 && error_coarse > 0.0) ? std::log2(error_coarse / error_fine) : 0.0;
        json += ",\"error\":" + format_double(error_fine) +
                ",\"error_coarse\":" + format_double(error_coarse) +
                ",\"observed_order\":" + format_double(order);
    }
    json += "}\n";
    std::cout << json;
    if (!out_path.empty()) write_solution_csv(out_path, fine.u);

    if (!fine.residual_ok) {
        std::cerr << "boundary conditions not admissible or grid too coarse (residual "
                  << format_double(fine.residual) << ")\n";
        return kExitSolve;
    }
    return 0;
}

int thread_cap() {
    if (const char* env = std::getenv("FSYS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int cmd_verify(const std::string& problem_path, bool all_bundled, const std::vector<int>& grids) {
    std::vector<std::pair<std::string, FriedrichsProblem>> problems;
    if (all_bundled) {
        for (const auto& [name, text] : bundled_problems()) problems.emplace_back(name, parse_problem(text, name));
        std::sort(problems.begin(), problems.end(),
                  [](const auto& lhs, const auto& rhs) { return lhs.first < rhs.first; });
    } else {
        FriedrichsProblem problem = load_problem(problem_path);
        problems.emplace_back(problem.id, std::move(problem));
    }

    std::vector<std::vector<VerifyLine>> results(problems.size());
    const int cap = std::max(1, thread_cap());
    for (size_t begin = 0; begin < problems.size(); begin += static_cast<size_t>(cap)) {
        const size_t end = std::min(problems.size(), begin + static_cast<size_t>(cap));
        std::vector<std::future<std::vector<VerifyLine>>> futures;
        for (size_t i = begin; i < end; ++i)
            futures.push_back(std::async(std::launch::async,
                                         [&, i] { return verify_problem(problems[i].second, grids); }));
        for (size_t i = begin; i < end; ++i) results[i] = futures[i - begin].get();
    }

    size_t total = 0;
    for (const auto& lines : results) total += lines.size();
    std::cout << "1.." << total << "\n";
    bool all_ok = true;
    size_t counter = 0;
    for (size_t i = 0; i < problems.size(); ++i) {
        for (const VerifyLine& line : results[i]) {
            ++counter;
            all_ok = all_ok && line.ok;
            std::cout << (line.ok ? "ok " : "not ok ") << counter << " - " << problems[i].first << ": "
                      << line.name;
            if (!line.detail.empty()) std::cout << " " << line.detail;
            std::cout << "\n";
        }
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analysis of first-order symmetric positive systems on an interval"};
    app.require_subcommand(1);

    std::string problem_path, out_path, operator_name = "T1";
    int samples = 257;
    bool timings = false;

    auto* analyze_cmd = app.add_subcommand("analyze", "Axiom checks, endpoint data, kernel dimensions");
    analyze_cmd->add_option("problem", problem_path, "problem JSON file")->required();
    analyze_cmd->add_option("--out", out_path, "write the report to a file instead of stdout");
    analyze_cmd->add_option("--samples", samples, "Chebyshev sample count for the axiom checks");
    analyze_cmd->add_flag("--timings", timings, "include per-stage timings (non-reproducible)");

    std::vector<int> kernel_grids{65, 129, 257};
    double svd_tol = 1e-8;
    auto* kernel_cmd = app.add_subcommand("kernel", "Measure kernel dimensions on a grid ladder");
    kernel_cmd->add_option("problem", problem_path, "problem JSON file")->required();
    kernel_cmd->add_option("--operator", operator_name, "T1 or T1t")->capture_default_str();
    kernel_cmd->add_option("--grids", kernel_grids, "increasing grid sizes")->delimiter(',');
    kernel_cmd->add_option("--svd-tol", svd_tol, "relative singular value threshold");
    kernel_cmd->add_option("--out", out_path, "write the kernel basis CSV here");

    std::string rhs_arg, bc_arg = "constructed", mms_u_path;
    int grid_n = 129;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a boundary value problem");
    solve_cmd->add_option("problem", problem_path, "problem JSON file")->required();
    solve_cmd->add_option("--rhs", rhs_arg, "'manufactured', 'zero', or a JSON file with an 'rhs' entry");
    solve_cmd->add_option("--bc", bc_arg, "'constructed' or a constraint JSON file")->capture_default_str();
    solve_cmd->add_option("--grid", grid_n, "node count")->capture_default_str();
    solve_cmd->add_option("--operator", operator_name, "T1 or T1t")->capture_default_str();
    solve_cmd->add_option("--out", out_path, "write the solution CSV here");
    solve_cmd->add_option("--mms-u", mms_u_path, "JSON file with the manufactured solution 'u'");

    bool all_bundled = false;
    std::vector<int> verify_grids{33, 65, 129};
    auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suites");
    verify_cmd->add_option("problem", problem_path, "problem JSON file");
    verify_cmd->add_flag("--all-bundled", all_bundled, "verify every bundled problem");
    verify_cmd->add_option("--grids", verify_grids, "grid ladder for the kernel measurement")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(problem_path, out_path, samples, timings);
        if (kernel_cmd->parsed()) return cmd_kernel(problem_path, operator_name, kernel_grids, svd_tol, out_path);
        if (solve_cmd->parsed())
            return cmd_solve(problem_path, rhs_arg, bc_arg, grid_n, operator_name, out_path, mms_u_path);
        if (verify_cmd->parsed()) {
            if (!all_bundled && problem_path.empty()) {
                std::cerr << "verify needs a problem file or --all-bundled\n";
                return kExitSchema;
            }
            return cmd_verify(problem_path, all_bundled, verify_grids);
        }
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
