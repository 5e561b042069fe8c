#pragma once

#include <complex>
#include <vector>

namespace fsys {

using Complex = std::complex<double>;

/// Dense univariate polynomial with complex coefficients, stored in
/// ascending degree.  The zero polynomial has an empty coefficient list;
/// any other canonical form has a nonzero trailing coefficient.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(double constant) : Polynomial(Complex(constant, 0.0)) {}
    Polynomial(Complex constant);
    explicit Polynomial(std::vector<Complex> coefficients);

    /// The monomial c * x^k.
    static Polynomial monomial(int k, Complex c = 1.0);

    const std::vector<Complex>& coefficients() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    /// Degree of the canonical form; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    Complex operator()(double x) const;
    Complex operator()(Complex x) const;

    Polynomial derivative() const;
    /// Coefficient-wise conjugate; equals x -> conj(p(x)) on the real line.
    Polynomial conjugated() const;

    /// Upper bound for sup |p(x)| over [a, b] via |c_k| max(|a|,|b|)^k.
    double sup_bound(double a, double b) const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(const Polynomial& rhs);
    Polynomial& operator*=(Complex scalar);

    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
    friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
    friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
    friend Polynomial operator*(Polynomial lhs, Complex scalar) { return lhs *= scalar; }
    friend Polynomial operator*(Complex scalar, Polynomial rhs) { return rhs *= scalar; }
    friend Polynomial operator*(Polynomial lhs, double scalar) { return lhs *= Complex(scalar); }
    friend Polynomial operator*(double scalar, Polynomial rhs) { return rhs *= Complex(scalar); }
    friend Polynomial operator-(const Polynomial& p) { return p * Complex(-1.0); }

    friend bool operator==(const Polynomial& lhs, const Polynomial& rhs) {
        return lhs.coeffs_ == rhs.coeffs_;
    }

private:
    void canonicalize();

    std::vector<Complex> coeffs_;
};

}  // namespace fsys
