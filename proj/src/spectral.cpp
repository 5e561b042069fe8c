#include "fsys/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fsys/errors.hpp"

namespace fsys {

namespace {

void fix_phases(Eigen::MatrixXcd& vectors) {
    for (int j = 0; j < vectors.cols(); ++j) {
        for (int i = 0; i < vectors.rows(); ++i) {
            const Complex v = vectors(i, j);
            if (std::abs(v) > 1e-12) {
                vectors.col(j) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }
}

}  // namespace

PointSpectrum point_spectrum(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw DomainError("matrix must be square");
    const double defect = (m - m.adjoint()).norm();
    if (defect > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
        throw DomainError("matrix is not Hermitian within tolerance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (m + m.adjoint()));
    if (solver.info() != Eigen::Success) throw NumericsError("eigendecomposition failed");

    PointSpectrum spectrum;
    spectrum.eigenvalues = solver.eigenvalues().reverse();
    spectrum.eigenvectors = solver.eigenvectors().rowwise().reverse();
    fix_phases(spectrum.eigenvectors);
    return spectrum;
}

PointSpectrum point_spectrum(const PolynomialMatrixField& field, double x) {
    PointSpectrum spectrum = point_spectrum(field(x));
    spectrum.x = x;
    return spectrum;
}

double default_zero_tol(const PointSpectrum& spectrum) {
    const double scale = spectrum.size() > 0 ? spectrum.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    return 1e-9 * (1.0 + scale);
}

Inertia inertia_of(const PointSpectrum& spectrum, double zero_tol) {
    if (zero_tol < 0.0) throw DomainError("zero_tol must be nonnegative");
    Inertia inertia;
    inertia.zero_tol = zero_tol;
    for (int i = 0; i < spectrum.size(); ++i) {
        const double lambda = spectrum.eigenvalues[i];
        if (lambda > zero_tol)
            ++inertia.n_plus;
        else if (lambda < -zero_tol)
            ++inertia.n_minus;
        else
            ++inertia.n_zero;
    }
    return inertia;
}

std::vector<LambdaGroup> lambda_groups(const PointSpectrum& spectrum, double gap_tol) {
    if (gap_tol <= 0.0) throw DomainError("gap_tol must be positive");
    std::vector<LambdaGroup> groups;
    const int r = spectrum.size();
    int start = 0;
    for (int i = 1; i <= r; ++i) {
        if (i == r || spectrum.eigenvalues[i - 1] - spectrum.eigenvalues[i] > gap_tol) {
            LambdaGroup group;
            for (int k = start; k < i; ++k) group.members.push_back(k);
            const double hi = spectrum.eigenvalues[start];
            const double lo = spectrum.eigenvalues[i - 1];
            group.center = 0.5 * (hi + lo);
            group.half_width = 0.5 * (hi - lo);
            groups.push_back(std::move(group));
            start = i;
        }
    }
    for (LambdaGroup& group : groups) {
        double gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i < r; ++i) {
            if (i >= group.members.front() && i <= group.members.back()) continue;
            gap = std::min(gap, std::abs(spectrum.eigenvalues[i] - group.center));
        }
        group.gap = gap;
    }
    return groups;
}

TotalProjection total_projection_direct(const PointSpectrum& spectrum, const LambdaGroup& group) {
    const int r = spectrum.size();
    TotalProjection projection;
    projection.source = TotalProjection::Source::Direct;
    projection.matrix = Eigen::MatrixXcd::Zero(r, r);
    for (int index : group.members) {
        if (index < 0 || index >= r) throw DomainError("group member index out of range");
        const Eigen::VectorXcd v = spectrum.eigenvectors.col(index);
        projection.matrix += v * v.adjoint();
    }
    projection.rank = static_cast<int>(group.members.size());
    return projection;
}

TotalProjection total_projection_contour(const PolynomialMatrixField& field, double x,
                                         const LambdaGroup& group, int n_nodes) {
    if (n_nodes < 16) throw DomainError("contour quadrature needs at least 16 nodes");
    if (!std::isfinite(group.gap))
        throw DomainError("group spans the whole spectrum; no isolating contour exists");
    if (group.gap < 10.0 * kDefaultGapTol)
        throw NumericsError("cluster gap too small for a trustworthy contour; use the direct sum");

    const Eigen::MatrixXcd a = field(x);
    const int r = static_cast<int>(a.rows());
    const double radius = 0.5 * group.gap;

    // eigenvalues on or near the contour mean the clustering was wrong
    {
        const PointSpectrum spectrum = point_spectrum(a);
        for (int i = 0; i < r; ++i) {
            const double dist = std::abs(std::abs(spectrum.eigenvalues[i] - group.center) - radius);
            if (dist < 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(group.center)))
                throw NumericsError("eigenvalue sits on the contour; clustering is inconsistent");
        }
    }

    // -(1/2πi) ∮ (A - ξ)^{-1} dξ over ξ(θ) = c + ρ e^{iθ}, periodic trapezoid
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(r, r);
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(r, r);
    for (int k = 0; k < n_nodes; ++k) {
        const double theta = 2.0 * std::numbers::pi * double(k) / double(n_nodes);
        const Complex unit = std::polar(1.0, theta);
        const Complex xi = Complex(group.center, 0.0) + radius * unit;
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a - xi * identity);
        acc += unit * lu.solve(identity);
    }
    TotalProjection projection;
    projection.source = TotalProjection::Source::Contour;
    projection.matrix = (-radius / double(n_nodes)) * acc;
    projection.matrix = 0.5 * (projection.matrix + projection.matrix.adjoint()).eval();

    const double trace = projection.matrix.trace().real();
    projection.rank = static_cast<int>(std::lround(trace));
    if (std::abs(trace - projection.rank) > 1e-8)
        throw NumericsError("contour projection trace is not near an integer; clustering is inconsistent");
    const double idem = (projection.matrix * projection.matrix - projection.matrix).norm();
    if (idem > 1e-8)
        throw NumericsError("contour projection failed the idempotency check");
    return projection;
}

EigenvalueCurves track_eigenvalues(const PolynomialMatrixField& field, const std::vector<double>& grid) {
    EigenvalueCurves curves;
    curves.grid = grid;
    const int r = field.size();
    curves.values.resize(r, static_cast<Eigen::Index>(grid.size()));

    Eigen::MatrixXcd previous;
    for (size_t j = 0; j < grid.size(); ++j) {
        if (j > 0 && !(grid[j] > grid[j - 1])) throw DomainError("grid must be strictly increasing");
        const Eigen::MatrixXcd a = field(grid[j]);
        curves.values.col(static_cast<Eigen::Index>(j)) = point_spectrum(a).eigenvalues;
        if (j > 0) {
            const double eig_dist =
                (curves.values.col(static_cast<Eigen::Index>(j)) - curves.values.col(static_cast<Eigen::Index>(j - 1)))
                    .norm();
            curves.hw_defect = std::max(curves.hw_defect, eig_dist - (a - previous).norm());
        }
        previous = a;
    }
    return curves;
}

ContinuityReport projection_continuity_check(const PolynomialMatrixField& field, double x0, double eps,
                                             const LambdaGroup& group, int n_window) {
    if (eps <= 0.0) throw DomainError("window half-width must be positive");
    if (n_window < 3) throw DomainError("window needs at least 3 samples");
    if (!std::isfinite(group.gap)) {
        // projection is identically the identity; nothing to measure
        return {0.0, 0.0};
    }
    const Interval iv = field.interval();
    const double lo = std::max(iv.a, x0 - eps);
    const double hi = std::min(iv.b, x0 + eps);
    const double radius = 0.5 * group.gap;

    ContinuityReport report;
    double max_resolvent = 0.0;
    Eigen::MatrixXcd prev_a, prev_p;
    const int r = field.size();
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(r, r);

    for (int j = 0; j < n_window; ++j) {
        const double x = lo + (hi - lo) * double(j) / double(n_window - 1);
        const Eigen::MatrixXcd a = field(x);
        const PointSpectrum spectrum = point_spectrum(a);

        // the contour must keep separating the group throughout the window
        int inside = 0;
        for (int i = 0; i < spectrum.size(); ++i) {
            const double dist = std::abs(spectrum.eigenvalues[i] - group.center);
            if (std::abs(dist - radius) < 1e-12 * (1.0 + std::abs(group.center)))
                throw NumericsError("eigenvalue crossed the contour inside the window");
            if (dist < radius) ++inside;
        }
        if (inside != static_cast<int>(group.members.size()))
            throw NumericsError("group is not uniformly isolated on the window");

        LambdaGroup local;
        for (int i = 0; i < spectrum.size(); ++i)
            if (std::abs(spectrum.eigenvalues[i] - group.center) < radius) local.members.push_back(i);
        const Eigen::MatrixXcd p = total_projection_direct(spectrum, local).matrix;

        for (int k = 0; k < 8; ++k) {  // coarse sweep is enough for a bound
            const Complex xi = Complex(group.center, 0.0) +
                               radius * std::polar(1.0, 2.0 * std::numbers::pi * double(k) / 8.0);
            const Eigen::MatrixXcd resolvent = (a - xi * identity).partialPivLu().solve(identity);
            max_resolvent = std::max(max_resolvent, resolvent.operatorNorm());
        }

        if (j > 0) {
            const double da = (a - prev_a).norm();
            const double dp = (p - prev_p).norm();
            if (da > 0.0)
                report.max_step_ratio = std::max(report.max_step_ratio, dp / da);
            else if (dp > 1e-12)
                throw NumericsError("projection jumped while the field stayed constant");
        }
        prev_a = a;
        prev_p = p;
    }
    report.resolvent_bound = radius * max_resolvent * max_resolvent;
    return report;
}

}  // namespace fsys
