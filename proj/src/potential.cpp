#include "skewop/potential.hpp"

#include <cmath>
#include <sstream>

#include "skewop/errors.hpp"

namespace skewop {

Potential::Potential(std::vector<double> u) : u_(std::move(u)) {
  if (u_.empty())
    throw ValidationError("potential: coefficient list u must be non-empty");
  if (u_.size() % 2 != 0)
    throw ValidationError(
        "potential: need d odd (even number of u coefficients), got " +
        std::to_string(u_.size()));
  for (double ul : u_)
    if (!std::isfinite(ul))
      throw ValidationError("potential: non-finite coefficient");
  if (u_.back() <= 0.0)
    throw ValidationError("potential: leading coefficient u_{d+1} must be > 0");
}

bool Potential::is_even() const {
  // odd powers of V are the even-index entries of u (u_l with l odd).
  for (size_t i = 0; i < u_.size(); i += 2)
    if (u_[i] != 0.0) return false;
  return true;
}

Real Potential::V(const Real& x) const {
  // Horner over V's own coefficients v_l = u_l / l, highest first.
  Real acc(0);
  for (int l = static_cast<int>(u_.size()); l >= 1; --l)
    acc = acc * x + Real(u_[l - 1]) / l;
  return acc * x;
}

double Potential::V(double x) const {
  double acc = 0.0;
  for (int l = static_cast<int>(u_.size()); l >= 1; --l)
    acc = acc * x + u_[l - 1] / l;
  return acc * x;
}

Real Potential::Vprime(const Real& x) const {
  Real acc(0);
  for (int l = static_cast<int>(u_.size()); l >= 1; --l)
    acc = acc * x + Real(u_[l - 1]);
  return acc;
}

Polynomial Potential::Vprime_poly() const {
  std::vector<Real> c(u_.size());
  for (size_t i = 0; i < u_.size(); ++i) c[i] = Real(u_[i]);
  return Polynomial(std::move(c));
}

std::string Potential::to_string() const {
  std::ostringstream os;
  os << "u=[";
  for (size_t i = 0; i < u_.size(); ++i) {
    if (i) os << ",";
    os << u_[i];
  }
  os << "]";
  return os.str();
}

}  // namespace skewop
