#include "fsys/boundary.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fsys/errors.hpp"

namespace fsys {

namespace {

// single-linkage clustering restricted to the descending index range [lo, hi)
std::vector<LambdaGroup> cluster_index_range(const PointSpectrum& spectrum, int lo, int hi, double gap_tol) {
    std::vector<LambdaGroup> groups;
    int start = lo;
    for (int i = lo + 1; i <= hi; ++i) {
        if (i == hi || spectrum.eigenvalues[i - 1] - spectrum.eigenvalues[i] > gap_tol) {
            LambdaGroup group;
            for (int k = start; k < i; ++k) group.members.push_back(k);
            const double top = spectrum.eigenvalues[start];
            const double bottom = spectrum.eigenvalues[i - 1];
            group.center = 0.5 * (top + bottom);
            group.half_width = 0.5 * (top - bottom);
            double gap = std::numeric_limits<double>::infinity();
            for (int k = 0; k < spectrum.size(); ++k) {
                if (k >= start && k < i) continue;
                gap = std::min(gap, std::abs(spectrum.eigenvalues[k] - group.center));
            }
            group.gap = gap;
            groups.push_back(std::move(group));
            start = i;
        }
    }
    return groups;
}

EndpointData analyze_endpoint(const FriedrichsProblem& problem, char label, double x, double zero_tol,
                              double gap_tol) {
    EndpointData data;
    data.label = label;
    data.x = x;
    data.spectrum = point_spectrum(problem.A, x);
    if (zero_tol < 0.0) zero_tol = default_zero_tol(data.spectrum);
    data.inertia = inertia_of(data.spectrum, zero_tol);

    // positive eigenvalues occupy a prefix of the descending list, negative a suffix;
    // clustering each sign class separately keeps the zero group out of the projections
    const int r = data.spectrum.size();
    for (const LambdaGroup& group : cluster_index_range(data.spectrum, 0, data.inertia.n_plus, gap_tol))
        data.projections.emplace_back(group.center, total_projection_direct(data.spectrum, group));
    for (const LambdaGroup& group :
         cluster_index_range(data.spectrum, r - data.inertia.n_minus, r, gap_tol))
        data.projections.emplace_back(group.center, total_projection_direct(data.spectrum, group));
    return data;
}

}  // namespace

EndpointPair endpoint_analysis(const FriedrichsProblem& problem, double zero_tol, double gap_tol) {
    EndpointPair endpoints;
    endpoints.a = analyze_endpoint(problem, 'a', problem.interval().a, zero_tol, gap_tol);
    endpoints.b = analyze_endpoint(problem, 'b', problem.interval().b, zero_tol, gap_tol);
    return endpoints;
}

KernelDims kernel_dimensions(const EndpointPair& endpoints) {
    KernelDims dims;
    dims.dim_ker_T1 = endpoints.a.inertia.n_plus + endpoints.b.inertia.n_minus;
    dims.dim_ker_T1_tilde = endpoints.a.inertia.n_minus + endpoints.b.inertia.n_plus;
    return dims;
}

KernelDims kernel_dimensions(const FriedrichsProblem& problem) {
    return kernel_dimensions(endpoint_analysis(problem));
}

int graph_codimension(const EndpointPair& endpoints) {
    return endpoints.a.inertia.rank() + endpoints.b.inertia.rank();
}

int graph_codimension(const FriedrichsProblem& problem) {
    return graph_codimension(endpoint_analysis(problem));
}

int BoundaryConditionSpec::rank_sum_V() const {
    return std::accumulate(V.begin(), V.end(), 0,
                           [](int acc, const BoundaryConstraint& c) { return acc + c.rank; });
}

int BoundaryConditionSpec::rank_sum_Vtilde() const {
    return std::accumulate(Vtilde.begin(), Vtilde.end(), 0,
                           [](int acc, const BoundaryConstraint& c) { return acc + c.rank; });
}

BoundaryConditionSpec construct_admissible_pair(const EndpointPair& endpoints) {
    BoundaryConditionSpec spec;
    for (const auto& [lambda, projection] : endpoints.a.projections) {
        BoundaryConstraint constraint{'a', lambda, projection.matrix, projection.rank};
        (lambda > 0.0 ? spec.V : spec.Vtilde).push_back(std::move(constraint));
    }
    for (const auto& [lambda, projection] : endpoints.b.projections) {
        BoundaryConstraint constraint{'b', lambda, projection.matrix, projection.rank};
        (lambda < 0.0 ? spec.V : spec.Vtilde).push_back(std::move(constraint));
    }
    return spec;
}

BoundaryConditionSpec construct_admissible_pair(const FriedrichsProblem& problem) {
    return construct_admissible_pair(endpoint_analysis(problem));
}

TraceSet project_traces(const EndpointPair& endpoints, const Eigen::VectorXcd& u_a,
                        const Eigen::VectorXcd& u_b) {
    TraceSet traces;
    for (const auto& [lambda, projection] : endpoints.a.projections)
        traces.at_a.push_back(projection.matrix * u_a);
    for (const auto& [lambda, projection] : endpoints.b.projections)
        traces.at_b.push_back(projection.matrix * u_b);
    return traces;
}

namespace {

void check_in_range(const Eigen::MatrixXcd& projector, const Eigen::VectorXcd& trace, char label) {
    const double defect = (trace - projector * trace).norm();
    if (defect > 1e-8 * (1.0 + trace.norm())) {
        std::ostringstream msg;
        msg << "trace at endpoint " << label << " leaves the range of its projection (defect " << defect
            << ")";
        throw DomainError(msg.str());
    }
}

std::complex<double> one_sided_form(const std::vector<std::pair<double, TotalProjection>>& projections,
                                    const std::vector<Eigen::VectorXcd>& u,
                                    const std::vector<Eigen::VectorXcd>& v, char label) {
    if (u.size() != projections.size() || v.size() != projections.size())
        throw DomainError("trace list length does not match the endpoint group count");
    std::complex<double> acc(0.0, 0.0);
    for (size_t g = 0; g < projections.size(); ++g) {
        check_in_range(projections[g].second.matrix, u[g], label);
        check_in_range(projections[g].second.matrix, v[g], label);
        acc += projections[g].first * v[g].dot(u[g]);  // Eigen: dot conjugates the left argument
    }
    return acc;
}

}  // namespace

std::complex<double> boundary_form(const EndpointPair& endpoints, const TraceSet& u, const TraceSet& v) {
    return one_sided_form(endpoints.b.projections, u.at_b, v.at_b, 'b') -
           one_sided_form(endpoints.a.projections, u.at_a, v.at_a, 'a');
}

bool in_minimal_domain(const EndpointPair& endpoints, const TraceSet& u, double tol) {
    if (u.at_a.size() != endpoints.a.projections.size() || u.at_b.size() != endpoints.b.projections.size())
        throw DomainError("trace list length does not match the endpoint group count");
    for (const Eigen::VectorXcd& trace : u.at_a)
        if (trace.norm() > tol) return false;
    for (const Eigen::VectorXcd& trace : u.at_b)
        if (trace.norm() > tol) return false;
    return true;
}

namespace {

// orthogonal projector onto the joint kernel of all constraint projectors at one endpoint
Eigen::MatrixXcd admissible_trace_projector(const std::vector<BoundaryConstraint>& constraints,
                                            char endpoint, int r) {
    Eigen::MatrixXcd stacked(0, r);
    for (const BoundaryConstraint& c : constraints) {
        if (c.endpoint != endpoint) continue;
        stacked.conservativeResize(stacked.rows() + r, r);
        stacked.bottomRows(r) = c.projector;
    }
    if (stacked.rows() == 0) return Eigen::MatrixXcd::Identity(r, r);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeThinV);
    const double tol = 1e-10 * (1.0 + svd.singularValues()(0));
    Eigen::MatrixXcd projector = Eigen::MatrixXcd::Identity(r, r);
    for (int k = 0; k < svd.singularValues().size(); ++k) {
        if (svd.singularValues()(k) > tol) {
            const Eigen::VectorXcd dir = svd.matrixV().col(k);
            projector -= dir * dir.adjoint();
        }
    }
    return projector;
}

}  // namespace

VConditionReport check_V_conditions(const FriedrichsProblem& problem, const BoundaryConditionSpec& spec,
                                    int n_random, std::uint64_t seed) {
    if (n_random < 10) throw DomainError("need at least 10 random trace samples");

    const EndpointPair endpoints = endpoint_analysis(problem);
    const KernelDims dims = kernel_dimensions(endpoints);
    const int r = problem.size();

    VConditionReport report;
    report.counts_ok =
        spec.rank_sum_V() == dims.dim_ker_T1 && spec.rank_sum_Vtilde() == dims.dim_ker_T1_tilde;

    const Eigen::MatrixXcd free_va = admissible_trace_projector(spec.V, 'a', r);
    const Eigen::MatrixXcd free_vb = admissible_trace_projector(spec.V, 'b', r);
    const Eigen::MatrixXcd free_ta = admissible_trace_projector(spec.Vtilde, 'a', r);
    const Eigen::MatrixXcd free_tb = admissible_trace_projector(spec.Vtilde, 'b', r);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_vector = [&](int n) {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        return v;
    };
    auto sample_traces = [&](const Eigen::MatrixXcd& free_a, const Eigen::MatrixXcd& free_b) {
        Eigen::VectorXcd u_a = free_a * random_vector(r);
        Eigen::VectorXcd u_b = free_b * random_vector(r);
        const double norm = std::sqrt(u_a.squaredNorm() + u_b.squaredNorm());
        if (norm > 0.0) {
            u_a /= norm;
            u_b /= norm;
        }
        return project_traces(endpoints, u_a, u_b);
    };

    std::vector<TraceSet> v_samples, vtilde_samples;
    for (int k = 0; k < n_random; ++k) {
        v_samples.push_back(sample_traces(free_va, free_vb));
        vtilde_samples.push_back(sample_traces(free_ta, free_tb));
    }

    double min_on_v = 0.0, max_on_vtilde = 0.0, max_cross = 0.0;
    for (const TraceSet& u : v_samples)
        min_on_v = std::min(min_on_v, boundary_form(endpoints, u, u).real());
    for (const TraceSet& v : vtilde_samples)
        max_on_vtilde = std::max(max_on_vtilde, boundary_form(endpoints, v, v).real());
    for (const TraceSet& u : v_samples)
        for (const TraceSet& v : vtilde_samples)
            max_cross = std::max(max_cross, std::abs(boundary_form(endpoints, u, v)));

    report.worst_v1 = std::max(-min_on_v, max_on_vtilde);
    report.worst_v2 = max_cross;
    report.v1_ok = min_on_v >= -1e-10 && max_on_vtilde <= 1e-10;
    report.v2_necessary_ok = max_cross <= 1e-10;
    return report;
}

int codimension_sum(const std::vector<int>& codims, const std::vector<int>& overlap_codims) {
    if (codims.empty()) throw DomainError("need at least one codimension");
    if (!overlap_codims.empty() && overlap_codims.size() != codims.size() - 1)
        throw DomainError("overlap list must be one entry shorter than the codimension list");
    for (int c : codims)
        if (c < 0) throw DomainError("codimensions must be nonnegative");
    for (int c : overlap_codims)
        if (c < 0) throw DomainError("overlap codimensions must be nonnegative");
    const int total = std::accumulate(codims.begin(), codims.end(), 0) -
                      std::accumulate(overlap_codims.begin(), overlap_codims.end(), 0);
    if (total < 0) throw DomainError("codimension arithmetic produced a negative result");
    return total;
}

namespace {

using nlohmann::json;

Eigen::MatrixXcd parse_projector(const json& node, int r) {
    if (!node.is_array() || static_cast<int>(node.size()) != r)
        throw SchemaError("projector must be an r x r array of [re, im] pairs");
    Eigen::MatrixXcd p(r, r);
    for (int i = 0; i < r; ++i) {
        const json& row = node[i];
        if (!row.is_array() || static_cast<int>(row.size()) != r)
            throw SchemaError("projector row has wrong length");
        for (int j = 0; j < r; ++j) {
            const json& cell = row[j];
            if (!cell.is_array() || cell.size() != 2)
                throw SchemaError("projector entries must be [re, im] pairs");
            p(i, j) = Complex(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    if ((p - p.adjoint()).norm() > 1e-8 * (1.0 + p.norm()))
        throw SchemaError("projector is not Hermitian");
    if ((p * p - p).norm() > 1e-8 * (1.0 + p.norm()))
        throw SchemaError("projector is not idempotent");
    return p;
}

std::vector<BoundaryConstraint> parse_constraints(const json& node, int r, const char* what) {
    if (!node.is_array()) throw SchemaError(std::string(what) + " must be an array of constraints");
    std::vector<BoundaryConstraint> out;
    for (const json& item : node) {
        if (!item.is_object() || !item.contains("endpoint") || !item.contains("P"))
            throw SchemaError(std::string(what) + ": each constraint needs 'endpoint' and 'P'");
        const std::string endpoint = item["endpoint"].get<std::string>();
        if (endpoint != "a" && endpoint != "b")
            throw SchemaError(std::string(what) + ": endpoint must be \"a\" or \"b\"");
        BoundaryConstraint constraint;
        constraint.endpoint = endpoint[0];
        constraint.lambda = item.value("lambda", 0.0);
        constraint.projector = parse_projector(item["P"], r);
        constraint.rank = static_cast<int>(std::lround(constraint.projector.trace().real()));
        out.push_back(std::move(constraint));
    }
    return out;
}

}  // namespace

BoundaryConditionSpec parse_bc_spec(const std::string& json_text, int r) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("V") || !doc.contains("Vtilde"))
        throw SchemaError("constraint document needs 'V' and 'Vtilde' arrays");
    BoundaryConditionSpec spec;
    spec.V = parse_constraints(doc["V"], r, "V");
    spec.Vtilde = parse_constraints(doc["Vtilde"], r, "Vtilde");
    return spec;
}

BoundaryConditionSpec load_bc_spec(const std::string& path, int r) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open constraint file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_bc_spec(buffer.str(), r);
}

}  // namespace fsys
