#pragma once

#include <cmath>
#include <random>
#include <string>

#include "fsys/matrix_field.hpp"

namespace fsys::testing {

inline std::string problems_dir() {
#ifdef FSYS_PROBLEMS_DIR
    return FSYS_PROBLEMS_DIR;
#else
    return "problems";
#endif
}

inline FriedrichsProblem load_test_problem(const std::string& name) {
    return load_problem(problems_dir() + "/" + name + ".json");
}

/// Polynomial with small integer coefficients; sums and products of these
/// stay exact in double arithmetic.
inline Polynomial random_integer_polynomial(std::mt19937_64& rng, int max_degree, int max_abs = 3) {
    std::uniform_int_distribution<int> degree_dist(0, max_degree);
    std::uniform_int_distribution<int> coeff_dist(-max_abs, max_abs);
    std::vector<Complex> coeffs(static_cast<size_t>(degree_dist(rng)) + 1);
    for (Complex& c : coeffs) c = Complex(double(coeff_dist(rng)), double(coeff_dist(rng)));
    return Polynomial(std::move(coeffs));
}

/// Random Hermitian polynomial field: H(x) = M(x) + M(x)* entrywise.
inline PolynomialMatrixField random_hermitian_field(std::mt19937_64& rng, int r, Interval interval,
                                                    int max_degree = 3, int max_abs = 2) {
    PolynomialMatrixField m(r, interval);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) m.entry(i, j) = random_integer_polynomial(rng, max_degree, max_abs);
    return m + m.adjoint();
}

/// Problem with (F1)/(F2) satisfied by construction: Hermitian A and
/// B = shift * I + R with the shift dominating B + B* + A'.
inline FriedrichsProblem random_friedrichs_problem(std::mt19937_64& rng, int r, Interval interval,
                                                   int max_degree = 2) {
    FriedrichsProblem problem;
    problem.id = "random";
    problem.A = random_hermitian_field(rng, r, interval, max_degree, 1);
    PolynomialMatrixField b(r, interval);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) b.entry(i, j) = random_integer_polynomial(rng, 1, 1);
    // integral shift keeps all coefficient arithmetic exact in double
    const double shift =
        std::ceil(0.5 * (problem.A.derivative().frobenius_sup_bound() + 2.0 * b.frobenius_sup_bound())) + 1.0;
    for (int i = 0; i < r; ++i) b.entry(i, i) += Polynomial(shift);
    problem.B = b;
    return problem;
}

}  // namespace fsys::testing
