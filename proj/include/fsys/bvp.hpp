#pragma once

#include <string>
#include <vector>

#include "fsys/boundary.hpp"

namespace fsys {

/// Uniform grid on [a, b] with n nodes, node 0 at a and node n-1 at b.
struct Grid {
    double a = 0.0;
    double b = 1.0;
    int n = 0;

    double h() const { return (b - a) / double(n - 1); }
    double node(int j) const { return a + h() * double(j); }
    double midpoint(int j) const { return a + h() * (double(j) + 0.5); }
    int cells() const { return n - 1; }

    static Grid uniform(const Interval& interval, int n);
};

/// Node values of a C^r-valued function; column j holds the value at node j.
struct GridFunction {
    Grid grid;
    Eigen::MatrixXcd values;  // r x n

    int r() const { return static_cast<int>(values.rows()); }
};

/// Trapezoid L2 norm and inner product on node values.
double grid_norm(const GridFunction& u);
std::complex<double> grid_inner(const GridFunction& u, const GridFunction& v);

GridFunction sample_polynomials(const std::vector<Polynomial>& u, const Grid& grid);

/// Box-scheme discretization: one centered row per cell,
///   [A(x_{j+1}) u_{j+1} - A(x_j) u_j] / h + C(x_{j+1/2}) (u_j + u_{j+1}) / 2,
/// with C = B for the forward operator and the A-part sign flipped and
/// C = B* + A' for the adjoint-side operator, followed by one row per unit
/// of boundary-constraint rank.
struct DiscreteOperator {
    Eigen::MatrixXcd matrix;  // (r * cells + k) x (r * n)
    Grid grid;
    int r = 0;
    int k = 0;  ///< total boundary-constraint rank
    Which which = Which::T1;

    bool square() const { return matrix.rows() == matrix.cols(); }
};

/// Assembles the chosen side's constraints (V rows for T1, Vtilde rows for
/// the adjoint side).  Throws DomainError on projector shape mismatch.
DiscreteOperator discretize(const FriedrichsProblem& problem, const BoundaryConditionSpec& spec, int n,
                            Which which);

/// Interior rows only (no boundary constraints); used by the adjointness
/// and kernel probes.
DiscreteOperator discretize_unconstrained(const FriedrichsProblem& problem, int n, Which which);

/// Apply the interior scheme to node values; returns one r-vector per cell.
Eigen::MatrixXcd apply_interior(const DiscreteOperator& op, const Eigen::MatrixXcd& node_values);

struct SolveResult {
    GridFunction u;
    double residual = 0.0;    ///< sqrt(h)-weighted l2 residual of the stacked system
    double rhs_norm = 0.0;
    bool residual_ok = false;
};

/// Minimum-norm least-squares solve; f holds one r-vector per cell midpoint.
/// residual_ok iff residual <= 1e-8 * (1 + ||f||).
SolveResult solve_bvp(const DiscreteOperator& op, const Eigen::MatrixXcd& f_mid);

double smallest_singular_value(const DiscreteOperator& op);

struct KernelMeasurement {
    int dimension = 0;
    bool conclusive = false;
    std::vector<int> nullities;            ///< discrete nullity per grid
    std::vector<GridFunction> basis;       ///< kept candidates on the finest grid
    std::vector<std::vector<double>> growth;  ///< per finest-grid candidate, per refinement step
    std::vector<bool> kept;
    std::vector<double> exponents;         ///< local exponent fit near the dominant singular point
};

/// Measures dim ker by singular-value thresholding of the unconstrained
/// operator across a refinement ladder.  A candidate counts as an L2 kernel
/// element iff its reference-normalized trapezoid norm does not keep growing
/// by a factor >= 2 per grid doubling over the last two refinements.
KernelMeasurement numerical_kernel(const FriedrichsProblem& problem, Which which,
                                   const std::vector<int>& n_list, double svd_tol = 1e-8);

/// | <T1 u, v>_h - <u, T1~ v>_h - [u, v] | for polynomial samples; O(h^2).
double adjointness_defect(const FriedrichsProblem& problem, const std::vector<Polynomial>& u,
                          const std::vector<Polynomial>& v, int n);

struct ConvergenceResult {
    std::vector<int> grids;
    std::vector<double> errors;  ///< trapezoid L2 errors against the exact solution
    double order = 0.0;          ///< least-squares slope of log error vs log h
    bool monotone = false;
    bool at_rounding_level = false;  ///< all errors at rounding level; slope is meaningless
};

/// Manufactured-solution study: f = T u_exact evaluated symbolically, then
/// solved on each grid.  u_exact must satisfy the spec's constraints.
ConvergenceResult convergence_order(const FriedrichsProblem& problem, const BoundaryConditionSpec& spec,
                                    const std::vector<Polynomial>& u_exact, const std::vector<int>& n_list,
                                    Which which = Which::T1);

/// Zeros of det A on [a, b] (endpoints included when A degenerates there).
std::vector<double> singular_points(const PolynomialMatrixField& field);

void write_solution_csv(const std::string& path, const GridFunction& u);
void write_basis_csv(const std::string& path, const std::vector<GridFunction>& basis);

}  // namespace fsys
