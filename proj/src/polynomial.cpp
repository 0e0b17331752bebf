#include "skewop/polynomial.hpp"

namespace skewop {

Polynomial Polynomial::monomial(int degree, Real coeff) {
  if (degree < 0) return Polynomial();
  std::vector<Real> c(degree + 1, Real(0));
  c[degree] = std::move(coeff);
  return Polynomial(std::move(c));
}

Real Polynomial::eval(const Real& x) const {
  Real acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::eval_double(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it)
    acc = acc * x + it->convert_to<double>();
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<Real> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<int>(k);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::mul_x() const {
  if (c_.empty()) return Polynomial();
  std::vector<Real> d(c_.size() + 1, Real(0));
  for (size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k];
  return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Real(0));
  for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Real(0));
  for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Real& s) {
  if (s == 0) {
    c_.clear();
    return *this;
  }
  for (auto& ck : c_) ck *= s;
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(*this);
  for (auto& ck : r.c_) ck = -ck;
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<Real> c(a.c_.size() + b.c_.size() - 1, Real(0));
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(c));
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

}  // namespace skewop
