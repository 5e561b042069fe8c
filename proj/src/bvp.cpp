#include "fsys/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "fsys/errors.hpp"

namespace fsys {

Grid Grid::uniform(const Interval& interval, int n) {
    if (n < 3) throw DomainError("grid needs at least 3 nodes");
    return Grid{interval.a, interval.b, n};
}

namespace {

double node_weight(const Grid& grid, int j) {
    return (j == 0 || j == grid.n - 1) ? 0.5 * grid.h() : grid.h();
}

}  // namespace

double grid_norm(const GridFunction& u) {
    double acc = 0.0;
    for (int j = 0; j < u.grid.n; ++j) acc += node_weight(u.grid, j) * u.values.col(j).squaredNorm();
    return std::sqrt(acc);
}

std::complex<double> grid_inner(const GridFunction& u, const GridFunction& v) {
    if (u.grid.n != v.grid.n || u.r() != v.r()) throw DomainError("grid functions are not compatible");
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < u.grid.n; ++j) acc += node_weight(u.grid, j) * v.values.col(j).dot(u.values.col(j));
    return acc;
}

GridFunction sample_polynomials(const std::vector<Polynomial>& u, const Grid& grid) {
    GridFunction out;
    out.grid = grid;
    out.values.resize(static_cast<Eigen::Index>(u.size()), grid.n);
    for (int j = 0; j < grid.n; ++j)
        for (size_t i = 0; i < u.size(); ++i) out.values(static_cast<Eigen::Index>(i), j) = u[i](grid.node(j));
    return out;
}

namespace {

// orthonormal basis of the projector range, one constraint row per basis vector
std::vector<Eigen::VectorXcd> projector_range_basis(const Eigen::MatrixXcd& projector) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(projector);
    std::vector<Eigen::VectorXcd> basis;
    for (int k = 0; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()(k) > 0.5) basis.push_back(es.eigenvectors().col(k));
    return basis;
}

DiscreteOperator assemble(const FriedrichsProblem& problem, const std::vector<BoundaryConstraint>* constraints,
                          int n, Which which) {
    const int r = problem.size();
    const Grid grid = Grid::uniform(problem.interval(), n);
    const double h = grid.h();
    const double sign = which == Which::T1 ? 1.0 : -1.0;
    const PolynomialMatrixField zero_order =
        which == Which::T1 ? problem.B : problem.B.adjoint() + problem.A.derivative();

    int k = 0;
    std::vector<std::pair<int, Eigen::VectorXcd>> rows;  // (node, row vector)
    if (constraints) {
        for (const BoundaryConstraint& c : *constraints) {
            if (c.projector.rows() != r || c.projector.cols() != r)
                throw DomainError("constraint projector dimension does not match the system size");
            const int node = c.endpoint == 'a' ? 0 : grid.n - 1;
            for (const Eigen::VectorXcd& v : projector_range_basis(c.projector)) rows.emplace_back(node, v);
        }
        k = static_cast<int>(rows.size());
    }

    DiscreteOperator op;
    op.grid = grid;
    op.r = r;
    op.k = k;
    op.which = which;
    op.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(r) * grid.cells() + k,
                                       static_cast<Eigen::Index>(r) * grid.n);

    for (int j = 0; j < grid.cells(); ++j) {
        const Eigen::MatrixXcd a_left = problem.A(grid.node(j));
        const Eigen::MatrixXcd a_right = problem.A(grid.node(j + 1));
        const Eigen::MatrixXcd c_mid = zero_order(grid.midpoint(j));
        op.matrix.block(static_cast<Eigen::Index>(j) * r, static_cast<Eigen::Index>(j) * r, r, r) =
            -sign / h * a_left + 0.5 * c_mid;
        op.matrix.block(static_cast<Eigen::Index>(j) * r, static_cast<Eigen::Index>(j + 1) * r, r, r) =
            sign / h * a_right + 0.5 * c_mid;
    }
    for (int c = 0; c < k; ++c) {
        const auto& [node, v] = rows[static_cast<size_t>(c)];
        op.matrix.block(static_cast<Eigen::Index>(r) * grid.cells() + c, static_cast<Eigen::Index>(node) * r, 1, r) =
            v.adjoint();
    }
    return op;
}

}  // namespace

DiscreteOperator discretize(const FriedrichsProblem& problem, const BoundaryConditionSpec& spec, int n,
                            Which which) {
    const auto& side = which == Which::T1 ? spec.V : spec.Vtilde;
    return assemble(problem, &side, n, which);
}

DiscreteOperator discretize_unconstrained(const FriedrichsProblem& problem, int n, Which which) {
    return assemble(problem, nullptr, n, which);
}

Eigen::MatrixXcd apply_interior(const DiscreteOperator& op, const Eigen::MatrixXcd& node_values) {
    if (node_values.rows() != op.r || node_values.cols() != op.grid.n)
        throw DomainError("node value shape does not match the operator");
    const Eigen::Map<const Eigen::VectorXcd> flat(node_values.data(),
                                                  static_cast<Eigen::Index>(op.r) * op.grid.n);
    const Eigen::VectorXcd image = op.matrix.topRows(static_cast<Eigen::Index>(op.r) * op.grid.cells()) * flat;
    return Eigen::Map<const Eigen::MatrixXcd>(image.data(), op.r, op.grid.cells());
}

SolveResult solve_bvp(const DiscreteOperator& op, const Eigen::MatrixXcd& f_mid) {
    if (f_mid.rows() != op.r || f_mid.cols() != op.grid.cells())
        throw DomainError("right-hand side shape does not match the operator");

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(op.matrix.rows());
    rhs.head(static_cast<Eigen::Index>(op.r) * op.grid.cells()) =
        Eigen::Map<const Eigen::VectorXcd>(f_mid.data(), static_cast<Eigen::Index>(op.r) * op.grid.cells());

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(op.matrix);
    const Eigen::VectorXcd solution = cod.solve(rhs);

    SolveResult result;
    result.u.grid = op.grid;
    result.u.values = Eigen::Map<const Eigen::MatrixXcd>(solution.data(), op.r, op.grid.n);
    const double sqrt_h = std::sqrt(op.grid.h());
    result.residual = sqrt_h * (op.matrix * solution - rhs).norm();
    result.rhs_norm = sqrt_h * f_mid.norm();
    result.residual_ok = result.residual <= 1e-8 * (1.0 + result.rhs_norm);
    return result;
}

double smallest_singular_value(const DiscreteOperator& op) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(op.matrix);
    return svd.singularValues().tail(1)(0);
}

namespace {

Polynomial determinant_polynomial(const std::vector<std::vector<Polynomial>>& m) {
    const size_t r = m.size();
    if (r == 1) return m[0][0];
    Polynomial det;
    for (size_t i = 0; i < r; ++i) {
        if (m[i][0].is_zero()) continue;
        std::vector<std::vector<Polynomial>> minor;
        minor.reserve(r - 1);
        for (size_t row = 0; row < r; ++row) {
            if (row == i) continue;
            minor.emplace_back(m[row].begin() + 1, m[row].end());
        }
        Polynomial term = m[i][0] * determinant_polynomial(minor);
        if (i % 2 == 1) term *= Complex(-1.0);
        det += term;
    }
    return det;
}

}  // namespace

std::vector<double> singular_points(const PolynomialMatrixField& field) {
    const int r = field.size();
    std::vector<std::vector<Polynomial>> entries(static_cast<size_t>(r),
                                                 std::vector<Polynomial>(static_cast<size_t>(r)));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = field.entry(i, j);
    const Polynomial det = determinant_polynomial(entries);

    // det of a Hermitian polynomial field is real on the real line
    double max_coeff = 0.0;
    for (const Complex& c : det.coefficients()) max_coeff = std::max(max_coeff, std::abs(c));
    if (max_coeff == 0.0) return {};  // identically singular; no isolated points to report

    std::vector<double> coeffs;
    for (const Complex& c : det.coefficients()) coeffs.push_back(c.real());
    while (!coeffs.empty() && std::abs(coeffs.back()) <= 1e-12 * max_coeff) coeffs.pop_back();
    if (coeffs.size() <= 1) return {};

    const int degree = static_cast<int>(coeffs.size()) - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[static_cast<size_t>(i)] / coeffs.back();

    const Interval iv = field.interval();
    const double len = iv.length();
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    std::vector<double> roots;
    for (int i = 0; i < degree; ++i) {
        const Complex root = es.eigenvalues()(i);
        if (std::abs(root.imag()) > 1e-6 * (1.0 + std::abs(root.real()))) continue;
        const double x = std::clamp(root.real(), iv.a, iv.b);
        if (root.real() < iv.a - 1e-9 * len || root.real() > iv.b + 1e-9 * len) continue;
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> unique_roots;
    for (double x : roots)
        if (unique_roots.empty() || x - unique_roots.back() > 1e-7 * len) unique_roots.push_back(x);
    return unique_roots;
}

namespace {

struct GridBasis {
    Grid grid;
    Eigen::MatrixXcd candidates;       // (r*n) x m, trapezoid-normalized, bulk-dominant first
    Eigen::VectorXd bulk_fractions;    // descending
};

Eigen::VectorXd trapezoid_weights(const Grid& grid, int r) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(r) * grid.n);
    for (int j = 0; j < grid.n; ++j)
        for (int c = 0; c < r; ++c) w(static_cast<Eigen::Index>(j) * r + c) = node_weight(grid, j);
    return w;
}

Eigen::VectorXd bulk_weights(const Grid& grid, int r, const std::vector<double>& sing, double delta) {
    Eigen::VectorXd w = trapezoid_weights(grid, r);
    for (int j = 0; j < grid.n; ++j) {
        const double x = grid.node(j);
        for (double s : sing) {
            if (std::abs(x - s) <= delta) {
                w.segment(static_cast<Eigen::Index>(j) * r, r).setZero();
                break;
            }
        }
    }
    return w;
}

// rotate the raw nullspace basis so each candidate is extremal for the
// bulk-mass fraction; disentangles smooth kernel directions from the
// spurious near-singularity spikes the raw SVD basis mixes together
GridBasis demix_nullspace(const Eigen::MatrixXcd& raw, const Grid& grid, int r,
                          const std::vector<double>& sing) {
    GridBasis out;
    out.grid = grid;
    const Eigen::Index m = raw.cols();
    if (m == 0) {
        out.candidates = raw;
        out.bulk_fractions = Eigen::VectorXd();
        return out;
    }
    const double delta = (grid.b - grid.a) / 16.0;
    const Eigen::VectorXd w_full = trapezoid_weights(grid, r);
    Eigen::VectorXd w_bulk = bulk_weights(grid, r, sing, delta);
    if ((w_bulk.array() > 0.0).count() < 4) w_bulk = w_full;

    const Eigen::MatrixXcd gram_full = raw.adjoint() * w_full.asDiagonal() * raw;
    const Eigen::MatrixXcd gram_bulk = raw.adjoint() * w_bulk.asDiagonal() * raw;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(gram_bulk, gram_full);
    if (ges.info() != Eigen::Success) throw NumericsError("nullspace demixing failed");

    // ascending from the solver; flip to bulk-dominant first
    out.candidates.resize(raw.rows(), m);
    out.bulk_fractions.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        out.candidates.col(j) = raw * ges.eigenvectors().col(m - 1 - j);
        out.bulk_fractions(j) = ges.eigenvalues()(m - 1 - j);
    }
    return out;
}

Complex interpolate(const Eigen::MatrixXcd& values, const Grid& grid, int component, double x) {
    const double t = (x - grid.a) / grid.h();
    int cell = std::clamp(static_cast<int>(std::floor(t)), 0, grid.n - 2);
    const double frac = std::clamp(t - cell, 0.0, 1.0);
    return (1.0 - frac) * values(component, cell) + frac * values(component, cell + 1);
}

double weighted_norm(const Eigen::VectorXcd& v, const Eigen::VectorXd& w) {
    return std::sqrt((v.array().abs2() * w.array()).sum());
}

}  // namespace

KernelMeasurement numerical_kernel(const FriedrichsProblem& problem, Which which,
                                   const std::vector<int>& n_list, double svd_tol) {
    if (n_list.size() < 3) throw DomainError("need at least 3 grid sizes");
    for (size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw DomainError("grid sizes must be increasing");

    const int r = problem.size();
    const std::vector<double> sing = singular_points(problem.A);

    KernelMeasurement result;
    std::vector<Grid> grids;
    std::vector<Eigen::MatrixXcd> nullspaces;  // l2-orthonormal columns per grid
    for (int n : n_list) {
        const DiscreteOperator op = discretize_unconstrained(problem, n, which);
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(op.matrix, Eigen::ComputeFullV);
        const double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > svd_tol * sigma_max) ++rank;
        const Eigen::Index nullity = op.matrix.cols() - rank;
        result.nullities.push_back(static_cast<int>(nullity));
        grids.push_back(op.grid);
        nullspaces.push_back(svd.matrixV().rightCols(nullity));
    }

    bool stable = std::adjacent_find(result.nullities.begin(), result.nullities.end(),
                                     std::not_equal_to<>()) == result.nullities.end();
    const int m = result.nullities.back();
    if (m == 0) {
        result.dimension = 0;
        result.conclusive = stable;
        return result;
    }
    if (!stable) {
        result.dimension = 0;
        result.conclusive = false;
        return result;
    }

    // canonical candidates on the coarsest grid, then tracked upward by
    // fitting each one inside the finer nullspace; anchoring the whole chain
    // at the coarsest demixing removes the basis-rotation freedom the raw
    // SVD bases have on every grid
    Eigen::MatrixXcd tracked = demix_nullspace(nullspaces[0], grids[0], r, sing).candidates;

    const size_t steps = n_list.size() - 1;
    const double delta = problem.interval().length() / 16.0;
    result.growth.assign(static_cast<size_t>(m), std::vector<double>(steps, 0.0));
    bool tracking_ok = true;

    for (size_t s = 0; s < steps; ++s) {
        const Grid& coarse_grid = grids[s];
        const Grid& fine_grid = grids[s + 1];
        const Eigen::VectorXd w_coarse = trapezoid_weights(coarse_grid, r);
        const Eigen::VectorXd w_fine = trapezoid_weights(fine_grid, r);
        const Eigen::VectorXd w_coarse_bulk = bulk_weights(coarse_grid, r, sing, delta);
        const bool have_bulk = (w_coarse_bulk.array() > 0.0).count() >= 4;

        // fine nullspace basis restricted to the coarse nodes
        Eigen::MatrixXcd restricted(w_coarse.size(), m);
        for (int j = 0; j < m; ++j) {
            const Eigen::Map<const Eigen::MatrixXcd> vals(nullspaces[s + 1].col(j).data(), r, fine_grid.n);
            for (int node = 0; node < coarse_grid.n; ++node)
                for (int c = 0; c < r; ++c)
                    restricted(static_cast<Eigen::Index>(node) * r + c, j) =
                        interpolate(vals, fine_grid, c, coarse_grid.node(node));
        }
        const Eigen::MatrixXcd gram = restricted.adjoint() * w_coarse.asDiagonal() * restricted;
        const Eigen::PartialPivLU<Eigen::MatrixXcd> gram_lu(gram);

        Eigen::MatrixXcd next(static_cast<Eigen::Index>(r) * fine_grid.n, m);
        for (int j = 0; j < m; ++j) {
            const Eigen::VectorXcd target = tracked.col(j);
            const Eigen::VectorXcd coeff =
                gram_lu.solve(restricted.adjoint() * (w_coarse.asDiagonal() * target));
            const double fit_defect = weighted_norm(restricted * coeff - target, w_coarse) /
                                      std::max(weighted_norm(target, w_coarse), 1e-300);
            if (fit_defect > 0.9) tracking_ok = false;

            Eigen::VectorXcd fine_vec = nullspaces[s + 1] * coeff;
            const double fine_norm = weighted_norm(fine_vec, w_fine);
            if (fine_norm > 0.0) fine_vec /= fine_norm;
            next.col(j) = fine_vec;

            // reference point: strongest coarse value away from the singular set
            const Eigen::Map<const Eigen::MatrixXcd> coarse_vals(target.data(), r, coarse_grid.n);
            int ref_node = 0, ref_comp = 0;
            double ref_value = -1.0;
            for (int node = 0; node < coarse_grid.n; ++node) {
                if (have_bulk && w_coarse_bulk(static_cast<Eigen::Index>(node) * r) == 0.0) continue;
                for (int c = 0; c < r; ++c) {
                    const double v = std::abs(coarse_vals(c, node));
                    if (v > ref_value) {
                        ref_value = v;
                        ref_node = node;
                        ref_comp = c;
                    }
                }
            }
            const Eigen::Map<const Eigen::MatrixXcd> fine_vals(next.col(j).data(), r, fine_grid.n);
            const double fine_value =
                std::abs(interpolate(fine_vals, fine_grid, ref_comp, coarse_grid.node(ref_node)));

            // both representatives are trapezoid-normalized, so the growth of
            // the reference-normalized norm is the ratio of reference values
            double ratio;
            if (ref_value <= 1e-300 || fine_value <= 1e-300)
                ratio = std::numeric_limits<double>::infinity();
            else
                ratio = ref_value / fine_value;

            const double h_ratio = coarse_grid.h() / fine_grid.h();
            const double per_doubling =
                std::isfinite(ratio) ? std::pow(ratio, std::log(2.0) / std::log(h_ratio)) : ratio;
            result.growth[static_cast<size_t>(j)][s] = per_doubling;
        }
        tracked = std::move(next);
    }

    result.kept.assign(static_cast<size_t>(m), false);
    result.conclusive = tracking_ok;
    int kept_count = 0;
    for (int j = 0; j < m; ++j) {
        const auto& g = result.growth[static_cast<size_t>(j)];
        const double last = g[g.size() - 1];
        const double prev = g[g.size() - 2];
        const bool reject = last >= 2.0 && prev >= 2.0;
        const bool keep = last < 2.0 && prev < 2.0;
        if (!reject && !keep) result.conclusive = false;
        result.kept[static_cast<size_t>(j)] = !reject;
        if (!reject) ++kept_count;
    }
    result.dimension = kept_count;

    // local exponent diagnostic near the dominant singular point
    const Grid& finest_grid = grids.back();
    for (int j = 0; j < m; ++j) {
        const Eigen::Map<const Eigen::MatrixXcd> vals(tracked.col(j).data(), r, finest_grid.n);
        double exponent = 0.0;
        if (!sing.empty()) {
            int peak = 0;
            double peak_value = -1.0;
            for (int node = 0; node < finest_grid.n; ++node) {
                const double v = vals.col(node).norm();
                if (v > peak_value) {
                    peak_value = v;
                    peak = node;
                }
            }
            const double x_peak = finest_grid.node(peak);
            double s_near = sing[0];
            for (double s : sing)
                if (std::abs(s - x_peak) < std::abs(s_near - x_peak)) s_near = s;
            const double side = x_peak >= s_near ? 1.0 : -1.0;
            std::vector<double> log_d, log_v;
            for (int node = 0; node < finest_grid.n; ++node) {
                const double d = side * (finest_grid.node(node) - s_near);
                if (d < 2.0 * finest_grid.h() || d > delta) continue;
                const double v = vals.col(node).norm();
                if (v <= 0.0) continue;
                log_d.push_back(std::log(d));
                log_v.push_back(std::log(v));
            }
            if (log_d.size() >= 3) {
                const double n_pts = double(log_d.size());
                const double sx = std::accumulate(log_d.begin(), log_d.end(), 0.0);
                const double sy = std::accumulate(log_v.begin(), log_v.end(), 0.0);
                double sxx = 0.0, sxy = 0.0;
                for (size_t p = 0; p < log_d.size(); ++p) {
                    sxx += log_d[p] * log_d[p];
                    sxy += log_d[p] * log_v[p];
                }
                const double denom = n_pts * sxx - sx * sx;
                if (std::abs(denom) > 0.0) exponent = (n_pts * sxy - sx * sy) / denom;
            }
        }
        result.exponents.push_back(exponent);
        if (result.kept[static_cast<size_t>(j)]) {
            GridFunction gf;
            gf.grid = finest_grid;
            gf.values = vals;
            const double norm = grid_norm(gf);
            if (norm > 0.0) gf.values /= norm;
            result.basis.push_back(std::move(gf));
        }
    }
    return result;
}

double adjointness_defect(const FriedrichsProblem& problem, const std::vector<Polynomial>& u,
                          const std::vector<Polynomial>& v, int n) {
    const DiscreteOperator forward = discretize_unconstrained(problem, n, Which::T1);
    const DiscreteOperator adjoint_side = discretize_unconstrained(problem, n, Which::T1Tilde);
    const Grid grid = forward.grid;
    const double h = grid.h();

    const GridFunction u_nodes = sample_polynomials(u, grid);
    const GridFunction v_nodes = sample_polynomials(v, grid);
    const Eigen::MatrixXcd t1_u = apply_interior(forward, u_nodes.values);
    const Eigen::MatrixXcd t1t_v = apply_interior(adjoint_side, v_nodes.values);

    std::complex<double> forward_term(0.0, 0.0), adjoint_term(0.0, 0.0);
    for (int j = 0; j < grid.cells(); ++j) {
        const Eigen::VectorXcd u_avg = 0.5 * (u_nodes.values.col(j) + u_nodes.values.col(j + 1));
        const Eigen::VectorXcd v_avg = 0.5 * (v_nodes.values.col(j) + v_nodes.values.col(j + 1));
        forward_term += h * v_avg.dot(t1_u.col(j));
        adjoint_term += h * Eigen::VectorXcd(t1t_v.col(j)).dot(u_avg);
    }

    const EndpointPair endpoints = endpoint_analysis(problem);
    const Interval iv = problem.interval();
    Eigen::VectorXcd u_a(problem.size()), u_b(problem.size()), v_a(problem.size()), v_b(problem.size());
    for (int i = 0; i < problem.size(); ++i) {
        u_a(i) = u[static_cast<size_t>(i)](iv.a);
        u_b(i) = u[static_cast<size_t>(i)](iv.b);
        v_a(i) = v[static_cast<size_t>(i)](iv.a);
        v_b(i) = v[static_cast<size_t>(i)](iv.b);
    }
    const std::complex<double> form =
        boundary_form(endpoints, project_traces(endpoints, u_a, u_b), project_traces(endpoints, v_a, v_b));
    return std::abs(forward_term - adjoint_term - form);
}

ConvergenceResult convergence_order(const FriedrichsProblem& problem, const BoundaryConditionSpec& spec,
                                    const std::vector<Polynomial>& u_exact, const std::vector<int>& n_list,
                                    Which which) {
    if (n_list.size() < 2) throw DomainError("need at least 2 grid sizes");
    const std::vector<Polynomial> f = apply_operator_symbolic(problem, u_exact, which);

    ConvergenceResult result;
    result.grids = n_list;
    double exact_scale = 0.0;
    for (int n : n_list) {
        const DiscreteOperator op = discretize(problem, spec, n, which);
        Eigen::MatrixXcd f_mid(problem.size(), op.grid.cells());
        for (int j = 0; j < op.grid.cells(); ++j)
            for (int i = 0; i < problem.size(); ++i)
                f_mid(i, j) = f[static_cast<size_t>(i)](op.grid.midpoint(j));
        const SolveResult solve = solve_bvp(op, f_mid);
        GridFunction diff = solve.u;
        const GridFunction exact = sample_polynomials(u_exact, op.grid);
        diff.values -= exact.values;
        result.errors.push_back(grid_norm(diff));
        exact_scale = std::max(exact_scale, grid_norm(exact));
    }

    result.at_rounding_level = true;
    for (double e : result.errors)
        if (e > 1e-12 * (1.0 + exact_scale)) result.at_rounding_level = false;
    if (result.at_rounding_level) {
        result.order = std::numeric_limits<double>::quiet_NaN();
        result.monotone = true;
        return result;
    }

    result.monotone = true;
    for (size_t i = 1; i < result.errors.size(); ++i)
        if (result.errors[i] >= result.errors[i - 1]) result.monotone = false;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double count = double(n_list.size());
    for (size_t i = 0; i < n_list.size(); ++i) {
        const double lx = std::log(problem.interval().length() / double(n_list[i] - 1));
        const double ly = std::log(std::max(result.errors[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    result.order = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return result;
}

void write_solution_csv(const std::string& path, const GridFunction& u) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    out << "x";
    for (int i = 1; i <= u.r(); ++i) out << ",re_u" << i << ",im_u" << i;
    out << "\r\n";
    out.precision(17);
    for (int j = 0; j < u.grid.n; ++j) {
        out << u.grid.node(j);
        for (int i = 0; i < u.r(); ++i) out << "," << u.values(i, j).real() << "," << u.values(i, j).imag();
        out << "\r\n";
    }
}

void write_basis_csv(const std::string& path, const std::vector<GridFunction>& basis) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    out << "x";
    for (size_t k = 0; k < basis.size(); ++k)
        for (int i = 1; i <= basis[k].r(); ++i)
            out << ",re_v" << (k + 1) << "_u" << i << ",im_v" << (k + 1) << "_u" << i;
    out << "\r\n";
    if (basis.empty()) return;
    out.precision(17);
    const Grid& grid = basis.front().grid;
    for (int j = 0; j < grid.n; ++j) {
        out << grid.node(j);
        for (const GridFunction& gf : basis)
            for (int i = 0; i < gf.r(); ++i) out << "," << gf.values(i, j).real() << "," << gf.values(i, j).imag();
        out << "\r\n";
    }
}

}  // namespace fsys
