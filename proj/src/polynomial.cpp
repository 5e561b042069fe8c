#include "fsys/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace fsys {

Polynomial::Polynomial(Complex constant) {
    if (constant != Complex(0.0, 0.0)) coeffs_.push_back(constant);
}

Polynomial::Polynomial(std::vector<Complex> coefficients) : coeffs_(std::move(coefficients)) {
    canonicalize();
}

Polynomial Polynomial::monomial(int k, Complex c) {
    std::vector<Complex> coeffs(static_cast<size_t>(k) + 1, Complex(0.0, 0.0));
    coeffs.back() = c;
    return Polynomial(std::move(coeffs));
}

void Polynomial::canonicalize() {
    while (!coeffs_.empty() && coeffs_.back() == Complex(0.0, 0.0)) coeffs_.pop_back();
}

Complex Polynomial::operator()(double x) const {
    Complex acc(0.0, 0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Complex Polynomial::operator()(Complex x) const {
    Complex acc(0.0, 0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return Polynomial();
    std::vector<Complex> out(coeffs_.size() - 1);
    for (size_t k = 1; k < coeffs_.size(); ++k) out[k - 1] = coeffs_[k] * double(k);
    return Polynomial(std::move(out));
}

Polynomial Polynomial::conjugated() const {
    std::vector<Complex> out(coeffs_.size());
    std::transform(coeffs_.begin(), coeffs_.end(), out.begin(),
                   [](Complex c) { return std::conj(c); });
    return Polynomial(std::move(out));
}

double Polynomial::sup_bound(double a, double b) const {
    const double m = std::max(std::abs(a), std::abs(b));
    double bound = 0.0, power = 1.0;
    for (const Complex& c : coeffs_) {
        bound += std::abs(c) * power;
        power *= m;
    }
    return bound;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (coeffs_.size() < rhs.coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), Complex(0.0, 0.0));
    for (size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    canonicalize();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (coeffs_.size() < rhs.coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), Complex(0.0, 0.0));
    for (size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
    canonicalize();
    return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
    if (lhs.is_zero() || rhs.is_zero()) return Polynomial();
    std::vector<Complex> out(lhs.coeffs_.size() + rhs.coeffs_.size() - 1, Complex(0.0, 0.0));
    for (size_t i = 0; i < lhs.coeffs_.size(); ++i)
        for (size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += lhs.coeffs_[i] * rhs.coeffs_[j];
    return Polynomial(std::move(out));
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
    *this = *this * rhs;
    return *this;
}

Polynomial& Polynomial::operator*=(Complex scalar) {
    for (Complex& c : coeffs_) c *= scalar;
    canonicalize();
    return *this;
}

}  // namespace fsys
