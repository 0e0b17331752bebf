#pragma once

#include <vector>

#include "skewop/prec.hpp"

namespace skewop {

// Dense univariate polynomial with arbitrary-precision coefficients stored in
// ascending order. The zero polynomial is the empty coefficient vector and
// reports degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Real> coeffs) : c_(std::move(coeffs)) {
    trim();
  }

  static Polynomial monomial(int degree, Real coeff = Real(1));

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Real>& coeffs() const { return c_; }

  // Coefficient of x^k; zero outside the stored range.
  Real coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return Real(0);
    return c_[k];
  }
  Real leading() const { return c_.empty() ? Real(0) : c_.back(); }

  Real eval(const Real& x) const;
  double eval_double(double x) const;

  Polynomial derivative() const;
  Polynomial mul_x() const;  // multiply by x (degree shift)

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Real& s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) {
    a += b;
    return a;
  }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) {
    a -= b;
    return a;
  }
  friend Polynomial operator*(Polynomial a, const Real& s) {
    a *= s;
    return a;
  }
  friend Polynomial operator*(const Real& s, Polynomial a) {
    a *= s;
    return a;
  }
  Polynomial operator-() const;

  // Product by convolution; used for potential-derivative products.
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  bool is_zero() const { return c_.empty(); }

 private:
  void trim();
  std::vector<Real> c_;
};

}  // namespace skewop
