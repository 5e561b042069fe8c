#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fsys/errors.hpp"
#include "support.hpp"

using namespace fsys;
using fsys::testing::load_test_problem;

TEST_CASE("parse example problem") {
    const FriedrichsProblem problem = load_test_problem("example1");
    CHECK(problem.size() == 2);
    CHECK(problem.interval().a == 0.0);
    CHECK(problem.interval().b == 1.0);

    const Eigen::MatrixXcd a1 = problem.A(1.0);
    CHECK(a1(0, 0) == Complex(1.0, 0.0));
    CHECK(a1(1, 1) == Complex(0.0, 0.0));
    CHECK(a1(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(parse_problem(R"({"r":1,"interval":[0,1],"A":[],"B":[[[[1,0]]]]})"), SchemaError);
    CHECK_THROWS_AS(parse_problem(R"({"r":1,"interval":[1,0],"A":[[[[1,0]]]],"B":[[[[1,0]]]]})"),
                    SchemaError);
    // r mismatch between declared size and the coefficient grids
    CHECK_THROWS_AS(parse_problem(R"({"r":2,"interval":[0,1],"A":[[[[1,0]]]],"B":[[[[1,0]]]]})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_problem("not json"), SchemaError);
}

TEST_CASE("evaluate") {
    PolynomialMatrixField field(1, {0.0, 1.0});
    field.entry(0, 0) = Polynomial::monomial(2);  // x^2
    CHECK(field(0.5)(0, 0) == Complex(0.25, 0.0));
    CHECK_THROWS_AS(field(1.5), DomainError);
    CHECK_THROWS_AS(field(-0.1), DomainError);

    const PolynomialMatrixField zero(3, {0.0, 1.0});
    CHECK(zero(0.7).norm() == 0.0);
}

TEST_CASE("derivative") {
    const FriedrichsProblem problem = load_test_problem("example1");
    const PolynomialMatrixField da = problem.A.derivative();
    CHECK(da.entry(0, 0).is_zero());
    CHECK(da.entry(1, 1) == Polynomial(-1.0));

    PolynomialMatrixField cubic(1, {0.0, 1.0});
    cubic.entry(0, 0) = Polynomial::monomial(3);
    CHECK(cubic.derivative().entry(0, 0) == Polynomial::monomial(2, 3.0));

    const PolynomialMatrixField constant(2, {0.0, 1.0});
    CHECK(constant.derivative()(0.3).norm() == 0.0);
}

TEST_CASE("derivative matches central differences") {
    std::mt19937_64 rng(7);
    const Interval iv{0.0, 1.0};
    for (int trial = 0; trial < 10; ++trial) {
        PolynomialMatrixField field(2, iv);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) field.entry(i, j) = testing::random_integer_polynomial(rng, 5);
        const PolynomialMatrixField dfield = field.derivative();
        for (double h : {1e-3, 1e-4}) {
            for (double x : {0.2, 0.5, 0.8}) {
                const Eigen::MatrixXcd fd = (field(x + h) - field(x - h)) / (2.0 * h);
                CHECK((fd - dfield(x)).norm() <= 200.0 * h * h);
            }
        }
    }
}

TEST_CASE("check_symmetry") {
    const SymmetryReport ok = check_symmetry(load_test_problem("example1"));
    CHECK(ok.ok);
    CHECK(ok.max_defect == 0.0);

    CHECK(check_symmetry(load_test_problem("example2_rep1")).ok);

    FriedrichsProblem skew;
    skew.A = PolynomialMatrixField(2, {0.0, 1.0});
    skew.A.entry(0, 1) = Polynomial(Complex(0.0, 1.0));
    skew.B = PolynomialMatrixField(2, {0.0, 1.0});
    CHECK_FALSE(check_symmetry(skew).ok);
}

TEST_CASE("estimate_mu0") {
    CHECK(estimate_mu0(load_test_problem("example1")) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(estimate_mu0(load_test_problem("example2_rep1")) == doctest::Approx(1.0).epsilon(1e-12));

    FriedrichsProblem plain;  // A = 0, B = I
    plain.A = PolynomialMatrixField(2, {0.0, 1.0});
    plain.B = PolynomialMatrixField(2, {0.0, 1.0});
    plain.B.entry(0, 0) = Polynomial(1.0);
    plain.B.entry(1, 1) = Polynomial(1.0);
    CHECK(estimate_mu0(plain) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("certified bound is exact for constant fields and below the sampled one") {
    const PositivityCertificate cert = certify_mu0(load_test_problem("example2_rep1"));
    CHECK(cert.mu0_certified == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cert.lipschitz_bound == 0.0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const FriedrichsProblem problem = testing::random_friedrichs_problem(rng, 3, {0.0, 1.0});
        const PositivityCertificate c = certify_mu0(problem);
        CHECK(c.mu0_certified <= c.mu0_sampled + 1e-15);
    }
}

TEST_CASE("estimate_mu0 is nonincreasing along nested Chebyshev refinements") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 8; ++trial) {
        const FriedrichsProblem problem = testing::random_friedrichs_problem(rng, 2, {0.0, 1.0}, 4);
        double previous = std::numeric_limits<double>::infinity();
        for (int n : {5, 9, 17, 33, 65}) {  // n-1 doubling keeps Chebyshev-Lobatto grids nested
            const double estimate = estimate_mu0(problem, n);
            CHECK(estimate <= previous + 1e-13);
            previous = estimate;
        }
    }
}

TEST_CASE("apply_operator_symbolic") {
    const FriedrichsProblem example1 = load_test_problem("example1");

    SUBCASE("constant vector through the forward operator") {
        const std::vector<Polynomial> u{Polynomial(1.0), Polynomial(1.0)};
        const std::vector<Polynomial> image = apply_operator_symbolic(example1, u, Which::T1);
        CHECK(image[0] == Polynomial(1.0));
        CHECK(image[1].is_zero());
    }

    SUBCASE("zero vector maps to zero") {
        const std::vector<Polynomial> zero{Polynomial(), Polynomial()};
        for (Which which : {Which::T1, Which::T1Tilde})
            for (const Polynomial& p : apply_operator_symbolic(example1, zero, which)) CHECK(p.is_zero());
    }

    SUBCASE("scalar system (x)' + x") {
        FriedrichsProblem scalar;
        scalar.A = PolynomialMatrixField(1, {0.0, 1.0});
        scalar.A.entry(0, 0) = Polynomial(1.0);
        scalar.B = PolynomialMatrixField(1, {0.0, 1.0});
        scalar.B.entry(0, 0) = Polynomial(1.0);
        const std::vector<Polynomial> u{Polynomial::monomial(1)};
        const std::vector<Polynomial> image = apply_operator_symbolic(scalar, u, Which::T1);
        CHECK(image[0] == Polynomial(std::vector<Complex>{{1.0, 0.0}, {1.0, 0.0}}));
    }
}

TEST_CASE("forward plus adjoint side equals the symmetric part, exactly") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int r = 1 + int(rng() % 3);
        const FriedrichsProblem problem = testing::random_friedrichs_problem(rng, r, {0.0, 2.0});
        std::vector<Polynomial> u(static_cast<size_t>(r));
        for (Polynomial& p : u) p = testing::random_integer_polynomial(rng, 3);

        const std::vector<Polynomial> forward = apply_operator_symbolic(problem, u, Which::T1);
        const std::vector<Polynomial> adjoint_side = apply_operator_symbolic(problem, u, Which::T1Tilde);
        const std::vector<Polynomial> expected = symmetric_part_field(problem).apply(u);
        for (int i = 0; i < r; ++i) {
            const Polynomial sum = forward[static_cast<size_t>(i)] + adjoint_side[static_cast<size_t>(i)];
            // integer coefficients keep the identity exact in floating point
            CHECK(sum == expected[static_cast<size_t>(i)]);
        }
    }
}
