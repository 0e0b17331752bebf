#pragma once

#include <memory>
#include <string>
#include <vector>

#include "skewop/polynomial.hpp"
#include "skewop/potential.hpp"
#include "skewop/quadrature.hpp"

namespace skewop {

// Incomplete weight moments C_j(y) = int_{-inf}^y t^j e^{-V(t)} dt together
// with their totals T_j. For V = u2 x^2/2 a closed-form erf recurrence is
// used; otherwise panel-wise prefix sums over a reference grid plus a partial
// panel evaluated on the fly. Self-contained (copies what it needs).
class CumulativeMoments {
 public:
  // force_grid_path disables the erf closed form (used for cross-validation)
  CumulativeMoments(const Potential& pot, const PanelGrid& grid, int jmax,
                    bool force_grid_path = false);

  int jmax() const { return jmax_; }
  // C_0(y)..C_jmax(y)
  void values(const Real& y, std::vector<Real>& out) const;
  const std::vector<Real>& totals() const { return totals_; }

 private:
  void values_erf(const Real& y, std::vector<Real>& out) const;
  void values_grid(const Real& y, std::vector<Real>& out) const;

  Potential pot_;
  int jmax_;
  bool erf_path_;
  Real a_;                     // e^{-V} = e^{-a x^2} when erf_path_
  int order_ = 0;              // GL order for partial panels
  std::vector<Real> edges_;    // panel boundaries
  std::vector<Real> prefix_;   // (panels+1) x (jmax+1): cumulative at edges
  std::vector<Real> totals_;
};

// Antisymmetric moment table M_{jk} = s_beta(x^j, x^k), 0 <= j,k <= size.
struct SkewMomentTable {
  int beta = 0;
  int size = 0;                 // max monomial power
  std::vector<double> u;        // potential fingerprint
  unsigned precision_bits = 0;
  std::vector<Real> m;          // (size+1)^2 row-major

  const Real& at(int j, int k) const { return m[j * (size + 1) + k]; }
  Real& at(int j, int k) { return m[j * (size + 1) + k]; }

  // sum_{j,k} f_j g_k M_{jk}; degrees must be <= size
  Real bilinear(const Polynomial& f, const Polynomial& g) const;

  std::string serialize() const;
  static SkewMomentTable deserialize(const std::string& text);
};

// Evaluation context for the two skew products
//   s4(f,g) = int (f g' - f' g) e^{-2V} dx
//   s1(f,g) = 1/2 int int f(x) g(y) sign(x-y) e^{-V(x)-V(y)} dx dy
// plus the symmetric Gram form t(f,g) = int f g e^{-2V} dx used by the
// beta=1 operator construction. Owns the quadrature rules and moment tables
// for one (beta, potential) pair.
class SkewProducts {
 public:
  SkewProducts(int beta, const Potential& pot, int max_degree);

  int beta() const { return beta_; }
  const Potential& potential() const { return pot_; }
  int max_degree() const { return max_degree_; }

  // the skew product s_beta; for beta=1 degrees must be <= max_degree
  Real skew(const Polynomial& f, const Polynomial& g) const;
  // symmetric Gram form int f g e^{-2V}
  Real gram(const Polynomial& f, const Polynomial& g) const;
  // plain moment int x^k e^{-2V} (k within the exactness budget)
  const Real& plain_moment2(int k) const;

  const SkewMomentTable& table() const { return table_; }

  // eps-transform of a weighted polynomial (beta=1):
  //   int sign(x - y) f(y) e^{-V(y)} dy = 2 C_f(x) - T_f
  Real epsilon_transform(const Polynomial& f, const Real& x) const;

  const WeightQuadrature& quad2() const { return q2_; }           // e^{-2V}
  const WeightQuadrature& quad1() const;                          // e^{-V}
  const CumulativeMoments& cumulative() const;                    // beta=1

 private:
  int beta_;
  Potential pot_;
  int max_degree_;
  WeightQuadrature q2_;
  std::vector<Real> m2_;  // plain e^{-2V} moments
  std::unique_ptr<WeightQuadrature> q1_;
  std::unique_ptr<CumulativeMoments> cum_;
  SkewMomentTable table_;
};

}  // namespace skewop
