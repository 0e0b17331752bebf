#pragma once

#include <string>
#include <vector>

#include "skewop/polynomial.hpp"
#include "skewop/prec.hpp"

namespace skewop {

// Confining polynomial potential
//   V(x) = sum_{l=1}^{d+1} u_l x^l / l,   d odd, u_{d+1} > 0,
// stored via the derivative coefficients u (index i holds u_{i+1}, so that
// V'(x) = sum u_l x^{l-1}). d odd makes deg V = d+1 even, so exp(-V) decays
// at both ends of the real line.
class Potential {
 public:
  explicit Potential(std::vector<double> u);

  int d() const { return static_cast<int>(u_.size()) - 1; }
  const std::vector<double>& u() const { return u_; }

  // True when V contains only even powers (all odd-l coefficients vanish).
  bool is_even() const;
  // True when V = u2 x^2 / 2 exactly; enables closed-form Gaussian paths.
  bool is_even_quadratic() const { return u_.size() == 2 && u_[0] == 0.0; }

  Real V(const Real& x) const;
  double V(double x) const;
  Real Vprime(const Real& x) const;

  Polynomial Vprime_poly() const;  // degree d

  std::string to_string() const;  // "u=[0,1]" style, for reports

 private:
  std::vector<double> u_;
};

}  // namespace skewop
