#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "fsys/spectral.hpp"

namespace fsys {

/// Spectral data of A at one endpoint: full spectrum, inertia, and one
/// total projection per nonzero eigenvalue group (the zero group carries
/// no boundary information and is excluded).
struct EndpointData {
    char label = 'a';
    double x = 0.0;
    PointSpectrum spectrum;
    Inertia inertia;
    std::vector<std::pair<double, TotalProjection>> projections;  // (lambda, P), lambda != 0
};

struct EndpointPair {
    EndpointData a;
    EndpointData b;

    int size() const { return a.spectrum.size(); }
};

/// zero_tol < 0 selects the default 1e-9 * (1 + max |lambda|) per endpoint.
EndpointPair endpoint_analysis(const FriedrichsProblem& problem, double zero_tol = -1.0,
                               double gap_tol = kDefaultGapTol);

struct KernelDims {
    int dim_ker_T1 = 0;
    int dim_ker_T1_tilde = 0;

    int sum() const { return dim_ker_T1 + dim_ker_T1_tilde; }
    friend bool operator==(const KernelDims&, const KernelDims&) = default;
};

/// dim ker T1 = n_a+ + n_b-,  dim ker T1~ = n_a- + n_b+.
KernelDims kernel_dimensions(const EndpointPair& endpoints);
KernelDims kernel_dimensions(const FriedrichsProblem& problem);

/// rank A(a) + rank A(b), with numerical rank from the inertia zero_tol.
int graph_codimension(const EndpointPair& endpoints);
int graph_codimension(const FriedrichsProblem& problem);

/// One homogeneous constraint (P u)(endpoint) = 0.
struct BoundaryConstraint {
    char endpoint = 'a';
    double lambda = 0.0;  ///< originating eigenvalue; informational for user-supplied projectors
    Eigen::MatrixXcd projector;
    int rank = 0;
};

struct BoundaryConditionSpec {
    std::vector<BoundaryConstraint> V;
    std::vector<BoundaryConstraint> Vtilde;

    int rank_sum_V() const;
    int rank_sum_Vtilde() const;
};

/// The sign-based construction: V constrains positive groups at a and
/// negative groups at b; the adjoint side flips the signs.
BoundaryConditionSpec construct_admissible_pair(const EndpointPair& endpoints);
BoundaryConditionSpec construct_admissible_pair(const FriedrichsProblem& problem);

/// Projected endpoint traces, one vector per entry of the corresponding
/// EndpointData::projections list.
struct TraceSet {
    std::vector<Eigen::VectorXcd> at_a;
    std::vector<Eigen::VectorXcd> at_b;
};

/// Project full endpoint values onto the nonzero-eigenvalue groups.
TraceSet project_traces(const EndpointPair& endpoints, const Eigen::VectorXcd& u_a,
                        const Eigen::VectorXcd& u_b);

/// Boundary form [u, v] = sum_b lambda (P u)(b).(P v)(b) - sum_a lambda (P u)(a).(P v)(a),
/// linear in u, antilinear in v.  Throws DomainError when a supplied trace
/// leaves the range of its projection by more than 1e-8.
std::complex<double> boundary_form(const EndpointPair& endpoints, const TraceSet& u, const TraceSet& v);

/// Membership test for the minimal domain: every projected trace below tol.
bool in_minimal_domain(const EndpointPair& endpoints, const TraceSet& u, double tol);

struct VConditionReport {
    bool v1_ok = false;            ///< form nonnegative on V samples, nonpositive on adjoint-side samples
    bool v2_necessary_ok = false;  ///< form vanishes between the two sampled families
    bool counts_ok = false;        ///< constraint rank sums match the kernel dimension formula
    double worst_v1 = 0.0;
    double worst_v2 = 0.0;

    bool all() const { return v1_ok && v2_necessary_ok && counts_ok; }
    /// The pair-admissibility surrogate: trace-level orthogonality plus counts.
    bool surrogate() const { return v2_necessary_ok && counts_ok; }
};

/// Finite-dimensional admissibility check of a candidate pair on random
/// trace families satisfying the constraints.  n_random must be >= 10.
VConditionReport check_V_conditions(const FriedrichsProblem& problem, const BoundaryConditionSpec& spec,
                                    int n_random = 50, std::uint64_t seed = 0x5eedULL);

/// Codimension of an intersection from per-subspace codimensions and the
/// overlap codimensions codim(M_1 ∩ ... ∩ M_{j-1} + M_j); overlap list is
/// one entry shorter.  Throws DomainError on inconsistent (negative) input.
int codimension_sum(const std::vector<int>& codims, const std::vector<int>& overlap_codims);

/// Parse a boundary-condition document (projector format, see README).
BoundaryConditionSpec parse_bc_spec(const std::string& json_text, int r);
BoundaryConditionSpec load_bc_spec(const std::string& path, int r);

}  // namespace fsys
