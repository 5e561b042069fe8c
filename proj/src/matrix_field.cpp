#include "fsys/matrix_field.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "fsys/errors.hpp"

namespace fsys {

PolynomialMatrixField::PolynomialMatrixField(int r, Interval interval)
    : r_(r), interval_(interval), entries_(static_cast<size_t>(r) * r) {
    if (r <= 0) throw DomainError("matrix field size must be positive");
    if (!(interval.a < interval.b)) throw DomainError("interval must satisfy a < b");
}

Eigen::MatrixXcd PolynomialMatrixField::operator()(double x) const {
    if (!interval_.contains(x)) {
        std::ostringstream msg;
        msg << "evaluation point " << x << " outside [" << interval_.a << ", " << interval_.b << "]";
        throw DomainError(msg.str());
    }
    Eigen::MatrixXcd out(r_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) out(i, j) = entry(i, j)(x);
    return out;
}

PolynomialMatrixField PolynomialMatrixField::derivative() const {
    PolynomialMatrixField out(r_, interval_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) out.entry(i, j) = entry(i, j).derivative();
    return out;
}

PolynomialMatrixField PolynomialMatrixField::adjoint() const {
    PolynomialMatrixField out(r_, interval_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) out.entry(i, j) = entry(j, i).conjugated();
    return out;
}

PolynomialMatrixField PolynomialMatrixField::operator+(const PolynomialMatrixField& rhs) const {
    if (rhs.r_ != r_ || !(rhs.interval_ == interval_))
        throw DomainError("field shapes do not match");
    PolynomialMatrixField out(r_, interval_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) out.entry(i, j) = entry(i, j) + rhs.entry(i, j);
    return out;
}

std::vector<Polynomial> PolynomialMatrixField::apply(const std::vector<Polynomial>& u) const {
    if (static_cast<int>(u.size()) != r_) throw DomainError("vector length does not match field size");
    std::vector<Polynomial> out(r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) out[i] += entry(i, j) * u[j];
    return out;
}

double PolynomialMatrixField::frobenius_sup_bound() const {
    double sum = 0.0;
    for (const Polynomial& p : entries_) {
        const double s = p.sup_bound(interval_.a, interval_.b);
        sum += s * s;
    }
    return std::sqrt(sum);
}

double PolynomialMatrixField::max_coefficient() const {
    double m = 0.0;
    for (const Polynomial& p : entries_)
        for (const Complex& c : p.coefficients()) m = std::max(m, std::abs(c));
    return m;
}

std::vector<double> chebyshev_nodes(const Interval& interval, int n) {
    if (n < 2) throw DomainError("need at least 2 sample points");
    std::vector<double> nodes(n);
    const double mid = interval.midpoint();
    const double half = 0.5 * interval.length();
    for (int j = 0; j < n; ++j)
        nodes[j] = mid - half * std::cos(std::numbers::pi * double(j) / double(n - 1));
    nodes.front() = interval.a;
    nodes.back() = interval.b;
    return nodes;
}

PolynomialMatrixField symmetric_part_field(const FriedrichsProblem& problem) {
    return problem.B + problem.B.adjoint() + problem.A.derivative();
}

SymmetryReport check_symmetry(const FriedrichsProblem& problem, int n_samples) {
    SymmetryReport report;
    double max_entry = 0.0;
    for (double x : chebyshev_nodes(problem.interval(), n_samples)) {
        const Eigen::MatrixXcd ax = problem.A(x);
        report.max_defect = std::max(report.max_defect, (ax - ax.adjoint()).norm());
        max_entry = std::max(max_entry, ax.cwiseAbs().maxCoeff());
    }
    report.tolerance = 1e-12 * (1.0 + max_entry);
    report.ok = report.max_defect <= report.tolerance;
    return report;
}

namespace {

double sampled_min_eigenvalue(const FriedrichsProblem& problem, int n_samples) {
    const PolynomialMatrixField sym = symmetric_part_field(problem);
    double min_eig = std::numeric_limits<double>::infinity();
    for (double x : chebyshev_nodes(problem.interval(), n_samples)) {
        Eigen::MatrixXcd m = sym(x);
        m = 0.5 * (m + m.adjoint()).eval();  // scrub rounding skew
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    return min_eig;
}

}  // namespace

double estimate_mu0(const FriedrichsProblem& problem, int n_samples) {
    return std::max(0.0, 0.5 * sampled_min_eigenvalue(problem, n_samples));
}

PositivityCertificate certify_mu0(const FriedrichsProblem& problem, int n_samples) {
    PositivityCertificate cert;
    const double sampled = sampled_min_eigenvalue(problem, n_samples);
    cert.mu0_sampled = std::max(0.0, 0.5 * sampled);
    // eigenvalue curves inherit the Frobenius Lipschitz constant of the field
    cert.lipschitz_bound = symmetric_part_field(problem).derivative().frobenius_sup_bound();
    const std::vector<double> nodes = chebyshev_nodes(problem.interval(), n_samples);
    for (size_t j = 1; j < nodes.size(); ++j) cert.max_gap = std::max(cert.max_gap, nodes[j] - nodes[j - 1]);
    cert.mu0_certified = std::max(0.0, 0.5 * (sampled - cert.lipschitz_bound * cert.max_gap));
    return cert;
}

std::vector<Polynomial> apply_operator_symbolic(const FriedrichsProblem& problem,
                                                const std::vector<Polynomial>& u, Which which) {
    if (static_cast<int>(u.size()) != problem.size())
        throw DomainError("vector length does not match system size");
    std::vector<Polynomial> au_prime = problem.A.apply(u);
    for (Polynomial& p : au_prime) p = p.derivative();

    if (which == Which::T1) {
        std::vector<Polynomial> bu = problem.B.apply(u);
        for (int i = 0; i < problem.size(); ++i) bu[i] += au_prime[i];
        return bu;
    }
    const PolynomialMatrixField coeff = problem.B.adjoint() + problem.A.derivative();
    std::vector<Polynomial> out = coeff.apply(u);
    for (int i = 0; i < problem.size(); ++i) out[i] -= au_prime[i];
    return out;
}

namespace {

using nlohmann::json;

Polynomial parse_entry(const json& node, const char* what) {
    if (!node.is_array()) throw SchemaError(std::string(what) + ": entry must be an array of [re, im] pairs");
    std::vector<Complex> coeffs;
    coeffs.reserve(node.size());
    for (const json& pair : node) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw SchemaError(std::string(what) + ": coefficient must be a [re, im] pair");
        coeffs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return Polynomial(std::move(coeffs));
}

PolynomialMatrixField parse_field(const json& node, int r, Interval interval, const char* what) {
    if (!node.is_array() || node.empty()) throw SchemaError(std::string(what) + ": expected a nonempty r x r array");
    if (static_cast<int>(node.size()) != r) throw SchemaError(std::string(what) + ": row count does not match r");
    PolynomialMatrixField field(r, interval);
    for (int i = 0; i < r; ++i) {
        const json& row = node[i];
        if (!row.is_array() || static_cast<int>(row.size()) != r)
            throw SchemaError(std::string(what) + ": column count does not match r");
        for (int j = 0; j < r; ++j) field.entry(i, j) = parse_entry(row[j], what);
    }
    return field;
}

}  // namespace

FriedrichsProblem parse_problem(const std::string& json_text, const std::string& id) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("top level must be an object");
    if (!doc.contains("r") || !doc["r"].is_number_integer() || doc["r"].get<int>() <= 0)
        throw SchemaError("'r' must be a positive integer");
    if (!doc.contains("interval") || !doc["interval"].is_array() || doc["interval"].size() != 2)
        throw SchemaError("'interval' must be [a, b]");
    const int r = doc["r"].get<int>();
    const double a = doc["interval"][0].get<double>();
    const double b = doc["interval"][1].get<double>();
    if (!(a < b)) throw SchemaError("interval is degenerate: a >= b");
    if (!doc.contains("A") || !doc.contains("B")) throw SchemaError("'A' and 'B' are required");

    FriedrichsProblem problem;
    problem.id = id;
    problem.A = parse_field(doc["A"], r, {a, b}, "A");
    problem.B = parse_field(doc["B"], r, {a, b}, "B");
    if (doc.contains("rhs")) {
        const json& node = doc["rhs"];
        if (!node.is_array() || static_cast<int>(node.size()) != r)
            throw SchemaError("'rhs' must be an r-array of polynomial entries");
        std::vector<Polynomial> rhs(r);
        for (int i = 0; i < r; ++i) rhs[i] = parse_entry(node[i], "rhs");
        problem.rhs = std::move(rhs);
    }
    if (doc.contains("mu0_hint")) {
        if (!doc["mu0_hint"].is_number()) throw SchemaError("'mu0_hint' must be a number");
        problem.mu0 = std::max(0.0, doc["mu0_hint"].get<double>());
        if (problem.mu0 > 0.0) {
            // a sampled value below the claimed bound disproves the hint
            const double sampled = estimate_mu0(problem, 33);
            if (sampled < problem.mu0 - 1e-9 * (1.0 + problem.mu0))
                throw SchemaError("mu0_hint exceeds the sampled positivity bound");
        }
    }
    return problem;
}

FriedrichsProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open problem file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem(buffer.str(), std::filesystem::path(path).stem().string());
}

}  // namespace fsys
