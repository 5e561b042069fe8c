#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fsys/polynomial.hpp"

namespace fsys {

struct Interval {
    double a = 0.0;
    double b = 1.0;

    double length() const { return b - a; }
    double midpoint() const { return 0.5 * (a + b); }
    bool contains(double x) const { return x >= a && x <= b; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Square matrix whose entries are polynomials in the interval coordinate.
/// Evaluation at a point yields a dense complex matrix.
class PolynomialMatrixField {
public:
    PolynomialMatrixField() = default;
    PolynomialMatrixField(int r, Interval interval);

    int size() const { return r_; }
    const Interval& interval() const { return interval_; }

    Polynomial& entry(int i, int j) { return entries_[static_cast<size_t>(i) * r_ + j]; }
    const Polynomial& entry(int i, int j) const { return entries_[static_cast<size_t>(i) * r_ + j]; }

    /// Entrywise Horner evaluation.  Throws DomainError for x outside [a, b].
    Eigen::MatrixXcd operator()(double x) const;

    /// Exact entrywise differentiation.
    PolynomialMatrixField derivative() const;

    /// Conjugate transpose as a field: entry (i,j) = conj entry (j,i).
    /// Agrees with pointwise adjoint on the real line.
    PolynomialMatrixField adjoint() const;

    PolynomialMatrixField operator+(const PolynomialMatrixField& rhs) const;

    /// Matrix-vector product with a polynomial vector, exact.
    std::vector<Polynomial> apply(const std::vector<Polynomial>& u) const;

    /// Upper bound for sup over [a, b] of the Frobenius norm.
    double frobenius_sup_bound() const;

    /// Largest coefficient magnitude over all entries.
    double max_coefficient() const;

private:
    int r_ = 0;
    Interval interval_;
    std::vector<Polynomial> entries_;  // row-major
};

/// One-dimensional first-order system (Au)' + Bu with Hermitian A and
/// accretive symmetric part.  mu0 is a certified positivity bound
/// (0 when uncertified).
struct FriedrichsProblem {
    std::string id;
    PolynomialMatrixField A;
    PolynomialMatrixField B;
    double mu0 = 0.0;
    std::optional<std::vector<Polynomial>> rhs;

    int size() const { return A.size(); }
    const Interval& interval() const { return A.interval(); }
};

/// Chebyshev-Lobatto sample points including both endpoints, ascending.
std::vector<double> chebyshev_nodes(const Interval& interval, int n);

/// B + B* + A', the symmetric part that controls positivity.
PolynomialMatrixField symmetric_part_field(const FriedrichsProblem& problem);

struct SymmetryReport {
    bool ok = false;
    double max_defect = 0.0;
    double tolerance = 0.0;
};

/// Max Frobenius defect of A(x) - A(x)* over Chebyshev samples.
/// ok iff the defect is below 1e-12 * (1 + largest sampled entry magnitude).
SymmetryReport check_symmetry(const FriedrichsProblem& problem, int n_samples = 257);

/// Half the sampled minimum eigenvalue of (B + B* + A')(x), clamped at 0.
double estimate_mu0(const FriedrichsProblem& problem, int n_samples = 257);

struct PositivityCertificate {
    double mu0_sampled = 0.0;    ///< half the raw sampled minimum, clamped at 0
    double mu0_certified = 0.0;  ///< sampled bound minus the Lipschitz slack, clamped at 0
    double lipschitz_bound = 0.0;
    double max_gap = 0.0;        ///< largest distance between adjacent samples
};

/// Certified lower bound: eigenvalue curves of the symmetric part are
/// Lipschitz with constant bounded by sup ||(B+B*+A')'||_F, so the sampled
/// minimum can under-shoot the true minimum by at most L * max_gap.
PositivityCertificate certify_mu0(const FriedrichsProblem& problem, int n_samples = 257);

enum class Which { T1, T1Tilde };

/// Exact polynomial image of u under (Au)' + Bu, or -(Au)' + (B* + A')u.
std::vector<Polynomial> apply_operator_symbolic(const FriedrichsProblem& problem,
                                                const std::vector<Polynomial>& u, Which which);

/// Parse a problem document (see README for the JSON schema).
/// Throws SchemaError on malformed input.
FriedrichsProblem parse_problem(const std::string& json_text, const std::string& id = "");

/// Read and parse a problem file; id defaults to the file stem.
FriedrichsProblem load_problem(const std::string& path);

}  // namespace fsys
