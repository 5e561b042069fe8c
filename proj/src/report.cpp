#include "fsys/report.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "fsys/errors.hpp"

namespace fsys {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string describe_constraint(const BoundaryConstraint& c) {
    char buffer[128];
    std::snprintf(buffer, sizeof(buffer), "(P[lambda=%g] u)(%c) = 0 (rank %d)", c.lambda, c.endpoint,
                  c.rank);
    return buffer;
}

}  // namespace

AnalysisReport analyze(const FriedrichsProblem& problem, int n_samples) {
    AnalysisReport report;
    report.problem_id = problem.id;

    auto t0 = std::chrono::steady_clock::now();
    const SymmetryReport symmetry = check_symmetry(problem, n_samples);
    report.f1_ok = symmetry.ok;
    report.f1_max_defect = symmetry.max_defect;
    if (!symmetry.ok) throw DomainError("coefficient A is not Hermitian; analysis requires (F1)");
    report.timings_ms.emplace_back("symmetry", elapsed_ms(t0));

    t0 = std::chrono::steady_clock::now();
    const PositivityCertificate positivity = certify_mu0(problem, n_samples);
    report.mu0 = positivity.mu0_sampled;
    report.mu0_certified = positivity.mu0_certified;
    report.f2_ok = report.mu0 > 0.0;
    report.timings_ms.emplace_back("positivity", elapsed_ms(t0));

    t0 = std::chrono::steady_clock::now();
    const EndpointPair endpoints = endpoint_analysis(problem);
    report.inertia_a = endpoints.a.inertia;
    report.inertia_b = endpoints.b.inertia;
    report.predicted = kernel_dimensions(endpoints);
    report.graph_codim = graph_codimension(endpoints);
    report.timings_ms.emplace_back("endpoints", elapsed_ms(t0));

    t0 = std::chrono::steady_clock::now();
    const BoundaryConditionSpec spec = construct_admissible_pair(endpoints);
    for (const BoundaryConstraint& c : spec.V) report.bc_summary.push_back("V: " + describe_constraint(c));
    for (const BoundaryConstraint& c : spec.Vtilde)
        report.bc_summary.push_back("Vtilde: " + describe_constraint(c));

    const int r = problem.size();
    for (int i = 0; i < r; ++i) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(r);
        e(i) = 1.0;
        const TraceSet traces = project_traces(endpoints, e, e);
        char label[32];
        std::snprintf(label, sizeof(label), "u=v=e%d", i + 1);
        report.form_samples.push_back({label, boundary_form(endpoints, traces, traces)});
    }
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(r);
    const TraceSet ones_traces = project_traces(endpoints, ones, ones);
    report.form_samples.push_back({"u=v=ones", boundary_form(endpoints, ones_traces, ones_traces)});
    report.timings_ms.emplace_back("boundary", elapsed_ms(t0));
    return report;
}

namespace {

// hand-rolled writer: key order and float formatting must be reproducible
class JsonWriter {
public:
    void begin_object() {
        separator();
        out_ += '{';
        fresh_ = true;
    }
    void end_object() {
        out_ += '}';
        fresh_ = false;
    }
    void begin_array() {
        separator();
        out_ += '[';
        fresh_ = true;
    }
    void end_array() {
        out_ += ']';
        fresh_ = false;
    }
    void key(const std::string& name) {
        separator();
        out_ += '"' + name + "\":";
        fresh_ = true;
    }
    void value(double v) {
        separator();
        char buffer[40];
        std::snprintf(buffer, sizeof(buffer), "%.17g", v);
        out_ += buffer;
        fresh_ = false;
    }
    void value(int v) {
        separator();
        out_ += std::to_string(v);
        fresh_ = false;
    }
    void value(bool v) {
        separator();
        out_ += v ? "true" : "false";
        fresh_ = false;
    }
    void value(const std::string& v) {
        separator();
        out_ += '"';
        for (char c : v) {
            if (c == '"' || c == '\\') out_ += '\\';
            out_ += c;
        }
        out_ += '"';
        fresh_ = false;
    }
    void null() {
        separator();
        out_ += "null";
        fresh_ = false;
    }
    const std::string& str() const { return out_; }

private:
    void separator() {
        if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[' && out_.back() != ':')
            out_ += ',';
        fresh_ = false;
    }
    std::string out_;
    bool fresh_ = true;
};

void write_inertia(JsonWriter& w, const Inertia& inertia) {
    w.begin_object();
    w.key("n_plus");
    w.value(inertia.n_plus);
    w.key("n_zero");
    w.value(inertia.n_zero);
    w.key("n_minus");
    w.value(inertia.n_minus);
    w.key("zero_tol");
    w.value(inertia.zero_tol);
    w.end_object();
}

}  // namespace

std::string report_to_json(const AnalysisReport& report, bool include_timings) {
    JsonWriter w;
    w.begin_object();
    w.key("problem_id");
    w.value(report.problem_id);

    w.key("axiom_checks");
    w.begin_object();
    w.key("f1_ok");
    w.value(report.f1_ok);
    w.key("f1_max_defect");
    w.value(report.f1_max_defect);
    w.key("mu0");
    w.value(report.mu0);
    w.key("mu0_certified");
    w.value(report.mu0_certified);
    w.key("f2_ok");
    w.value(report.f2_ok);
    w.end_object();

    w.key("endpoint_inertias");
    w.begin_object();
    w.key("a");
    write_inertia(w, report.inertia_a);
    w.key("b");
    write_inertia(w, report.inertia_b);
    w.end_object();

    w.key("predicted_dims");
    w.begin_object();
    w.key("dim_ker_T1");
    w.value(report.predicted.dim_ker_T1);
    w.key("dim_ker_T1_tilde");
    w.value(report.predicted.dim_ker_T1_tilde);
    w.end_object();

    w.key("measured_dims");
    if (report.measured) {
        w.begin_object();
        w.key("dim_ker_T1");
        w.value(report.measured->dim_ker_T1);
        w.key("dim_ker_T1_tilde");
        w.value(report.measured->dim_ker_T1_tilde);
        w.end_object();
    } else {
        w.null();
    }

    w.key("graph_codim");
    w.value(report.graph_codim);

    w.key("bc_spec_summary");
    w.begin_array();
    for (const std::string& line : report.bc_summary) w.value(line);
    w.end_array();

    w.key("boundary_form_samples");
    w.begin_array();
    for (const AnalysisReport::FormSample& sample : report.form_samples) {
        w.begin_object();
        w.key("trace");
        w.value(sample.trace);
        w.key("re");
        w.value(sample.value.real());
        w.key("im");
        w.value(sample.value.imag());
        w.end_object();
    }
    w.end_array();

    if (include_timings) {
        w.key("timings_ms");
        w.begin_object();
        for (const auto& [stage, ms] : report.timings_ms) {
            w.key(stage);
            w.value(ms);
        }
        w.end_object();
    }
    w.end_object();
    return w.str() + "\n";
}

const std::vector<std::pair<std::string, std::string>>& bundled_problems() {
    static const std::vector<std::pair<std::string, std::string>> corpus = {
#include "bundled_problems.inc"
    };
    return corpus;
}

FriedrichsProblem load_bundled(const std::string& name) {
    for (const auto& [id, text] : bundled_problems())
        if (id == name) return parse_problem(text, id);
    throw SchemaError("no bundled problem named '" + name + "'");
}

namespace {

std::string format_dims(const KernelDims& dims) {
    return std::to_string(dims.dim_ker_T1) + "," + std::to_string(dims.dim_ker_T1_tilde);
}

}  // namespace

std::vector<VerifyLine> verify_problem(const FriedrichsProblem& problem, const std::vector<int>& grids) {
    std::vector<VerifyLine> lines;
    char buffer[160];

    const SymmetryReport symmetry = check_symmetry(problem);
    std::snprintf(buffer, sizeof(buffer), "max_defect=%.3g", symmetry.max_defect);
    lines.push_back({symmetry.ok, "f1_symmetry", buffer});
    if (!symmetry.ok) return lines;

    const double mu0 = estimate_mu0(problem);
    std::snprintf(buffer, sizeof(buffer), "mu0=%.6g", mu0);
    lines.push_back({mu0 > 0.0, "f2_positivity", buffer});

    // partition of unity and mutual orthogonality of the endpoint projections
    double partition_defect = 0.0, orthogonality_defect = 0.0, contour_defect = 0.0;
    bool contour_tested = false;
    for (double x : {problem.interval().a, problem.interval().b}) {
        const PointSpectrum spectrum = point_spectrum(problem.A, x);
        const std::vector<LambdaGroup> groups = lambda_groups(spectrum);
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(problem.size(), problem.size());
        std::vector<Eigen::MatrixXcd> projections;
        for (const LambdaGroup& group : groups) {
            const TotalProjection direct = total_projection_direct(spectrum, group);
            sum += direct.matrix;
            projections.push_back(direct.matrix);
            if (std::isfinite(group.gap) && group.gap >= 10.0 * kDefaultGapTol) {
                const TotalProjection contour = total_projection_contour(problem.A, x, group);
                contour_defect = std::max(contour_defect, (contour.matrix - direct.matrix).norm());
                contour_tested = true;
            }
        }
        partition_defect = std::max(
            partition_defect,
            (sum - Eigen::MatrixXcd::Identity(problem.size(), problem.size())).norm());
        for (size_t i = 0; i < projections.size(); ++i)
            for (size_t j = i + 1; j < projections.size(); ++j)
                orthogonality_defect =
                    std::max(orthogonality_defect, (projections[i] * projections[j]).norm());
    }
    std::snprintf(buffer, sizeof(buffer), "defect=%.3g", partition_defect);
    lines.push_back({partition_defect <= 1e-10, "projection_partition_of_unity", buffer});
    std::snprintf(buffer, sizeof(buffer), "defect=%.3g", orthogonality_defect);
    lines.push_back({orthogonality_defect <= 1e-10, "projection_orthogonality", buffer});
    if (contour_tested) {
        std::snprintf(buffer, sizeof(buffer), "defect=%.3g", contour_defect);
        lines.push_back({contour_defect <= 1e-8, "contour_vs_direct", buffer});
    } else {
        lines.push_back({true, "contour_vs_direct", "skipped (no isolated nonzero group)"});
    }

    const EndpointPair endpoints = endpoint_analysis(problem);
    const KernelDims predicted = kernel_dimensions(endpoints);
    const int codim = graph_codimension(endpoints);

    const BoundaryConditionSpec spec = construct_admissible_pair(endpoints);
    const VConditionReport admissibility = check_V_conditions(problem, spec);
    std::snprintf(buffer, sizeof(buffer), "v1=%d v2=%d counts=%d", int(admissibility.v1_ok),
                  int(admissibility.v2_necessary_ok), int(admissibility.counts_ok));
    lines.push_back({admissibility.all(), "constructed_pair_admissible", buffer});

    const KernelMeasurement forward = numerical_kernel(problem, Which::T1, grids);
    const KernelMeasurement adjoint_side = numerical_kernel(problem, Which::T1Tilde, grids);
    const KernelDims measured{forward.dimension, adjoint_side.dimension};
    const bool kernels_ok = forward.conclusive && adjoint_side.conclusive && measured == predicted;
    std::snprintf(buffer, sizeof(buffer), "predicted=%s measured=%s", format_dims(predicted).c_str(),
                  format_dims(measured).c_str());
    lines.push_back({kernels_ok, "kernel_dims_match", buffer});

    std::snprintf(buffer, sizeof(buffer), "dims_sum=%d rank_sum=%d", predicted.sum(), codim);
    lines.push_back({predicted.sum() == codim && measured.sum() == codim, "kernel_sum_identity", buffer});

    // second-order decay of the discrete adjointness defect
    std::vector<Polynomial> u(static_cast<size_t>(problem.size())), v(static_cast<size_t>(problem.size()));
    for (int i = 0; i < problem.size(); ++i) {
        u[static_cast<size_t>(i)] = Polynomial(std::vector<Complex>{{1.0, 0.0}, {0.5 * (i + 1), 0.0}});
        v[static_cast<size_t>(i)] = Polynomial(std::vector<Complex>{{0.25, 0.0}, {-1.0, 0.0}, {0.75, 0.0}});
    }
    const double defect_coarse = adjointness_defect(problem, u, v, 33);
    const double defect_fine = adjointness_defect(problem, u, v, 65);
    const bool adjoint_ok = defect_fine <= 1e-10 || defect_fine <= 0.35 * defect_coarse;
    std::snprintf(buffer, sizeof(buffer), "defect(33)=%.3g defect(65)=%.3g", defect_coarse, defect_fine);
    lines.push_back({adjoint_ok, "adjointness_defect_second_order", buffer});

    return lines;
}

}  // namespace fsys
