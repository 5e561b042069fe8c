#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fsys/matrix_field.hpp"

namespace fsys {

/// Hermitian eigendecomposition at one point: eigenvalues descending,
/// eigenvector columns orthonormal with a deterministic phase (first
/// nonzero component real positive).
struct PointSpectrum {
    double x = 0.0;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

constexpr double kDefaultGapTol = 1e-6;
constexpr int kDefaultContourNodes = 64;

/// Decompose a Hermitian matrix.  Throws DomainError if the Hermitian
/// defect exceeds 1e-12 * (1 + max entry magnitude).
PointSpectrum point_spectrum(const Eigen::MatrixXcd& m);

PointSpectrum point_spectrum(const PolynomialMatrixField& field, double x);

struct Inertia {
    int n_plus = 0;
    int n_zero = 0;
    int n_minus = 0;
    double zero_tol = 0.0;

    int rank() const { return n_plus + n_minus; }
};

/// 1e-9 * (1 + max |eigenvalue|); absorbs rounding only.
double default_zero_tol(const PointSpectrum& spectrum);

Inertia inertia_of(const PointSpectrum& spectrum, double zero_tol);

/// Cluster of eigenvalues that merge under perturbation.  members index
/// into the descending eigenvalue list.  gap is the distance from the
/// cluster center to the nearest outside eigenvalue (infinite when the
/// cluster is the whole spectrum).
struct LambdaGroup {
    double center = 0.0;
    std::vector<int> members;
    double gap = 0.0;

    double half_width = 0.0;
};

/// Single-linkage clustering on the sorted eigenvalues: adjacent values
/// closer than gap_tol join the same group.  Deterministic.
std::vector<LambdaGroup> lambda_groups(const PointSpectrum& spectrum, double gap_tol = kDefaultGapTol);

struct TotalProjection {
    enum class Source { Direct, Contour };

    Eigen::MatrixXcd matrix;
    int rank = 0;
    Source source = Source::Direct;
};

/// Sum of outer products of the group's eigenvectors.
TotalProjection total_projection_direct(const PointSpectrum& spectrum, const LambdaGroup& group);

/// Trapezoid quadrature of the resolvent contour integral over the circle
/// centered at group.center with radius group.gap / 2.  Spectrally accurate
/// for isolated groups; refuses nearly-degenerate gaps (below 10x gap_tol),
/// where the direct sum should be used instead.
TotalProjection total_projection_contour(const PolynomialMatrixField& field, double x,
                                         const LambdaGroup& group, int n_nodes = kDefaultContourNodes);

struct EigenvalueCurves {
    std::vector<double> grid;
    Eigen::MatrixXd values;  ///< r x |grid|, row i is the i-th descending eigenvalue
    double hw_defect = 0.0;  ///< max over adjacent nodes of l2(eig diffs) - frobenius(matrix diff)
};

/// Sorted eigenvalue curves over a grid, with the Hoffman-Wielandt defect
/// as a consistency certificate (must stay below rounding level).
EigenvalueCurves track_eigenvalues(const PolynomialMatrixField& field, const std::vector<double>& grid);

struct ContinuityReport {
    double max_step_ratio = 0.0;    ///< max ||P(x)-P(y)||_F / ||A(x)-A(y)||_F, 0 when both vanish
    double resolvent_bound = 0.0;   ///< radius * (max sampled resolvent norm)^2
};

/// Samples the group's total projection on [x0-eps, x0+eps] and checks the
/// Lipschitz ratio against the resolvent bound.  Throws NumericsError if an
/// eigenvalue crosses the contour inside the window.
ContinuityReport projection_continuity_check(const PolynomialMatrixField& field, double x0, double eps,
                                             const LambdaGroup& group, int n_window = 33);

}  // namespace fsys
