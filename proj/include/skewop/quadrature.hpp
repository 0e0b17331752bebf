#pragma once

#include <vector>

#include "skewop/potential.hpp"
#include "skewop/prec.hpp"

namespace skewop {

// Gauss-Legendre rule on [-1, 1] at working precision; cached per
// (order, precision bits).
struct GaussLegendre {
  std::vector<Real> x, w;
};
const GaussLegendre& gauss_legendre_unit(int order);

// Composite Gauss-Legendre reference grid for the weight exp(-c V(x)).
// Panel widths are chosen so that the grid integrates x^k exp(-cV) for all
// 0 <= k <= max_power, and products of the first rec_depth orthonormal
// polynomials of the weight, to ~1e-40 relative accuracy. The grid is the
// ground truth for moments, Stieltjes recurrence extraction and incomplete
// (cumulative) integrals.
struct PanelGrid {
  double c = 1.0;           // weight exponent scale
  int order = 0;            // GL order per panel
  std::vector<Real> edges;  // panel boundaries, ascending
  std::vector<Real> x;      // concatenated mapped nodes (ascending)
  std::vector<Real> w;      // bare GL weights (no exponential factor)
  std::vector<Real> wexp;   // w * exp(-c V(x)): ready-to-sum weights
  int panels() const { return static_cast<int>(edges.size()) - 1; }
  int points() const { return static_cast<int>(x.size()); }
};
PanelGrid build_panel_grid(const Potential& pot, double c, int max_power,
                           int rec_depth, int order = 48);

// Plain moments m_k = int x^k exp(-cV) dx, k = 0..kmax, summed on the grid.
std::vector<Real> grid_moments(const PanelGrid& grid, int kmax);

// Three-term recurrence of the orthonormal polynomials of exp(-cV):
//   b_{k+1} p_{k+1}(x) = (x - a_k) p_k(x) - b_k p_{k-1}(x),
//   p_0 = 1/b_0,  b_0 = sqrt(mu_0),  mu_0 = int exp(-cV).
struct Recurrence {
  std::vector<Real> a;  // a_0 .. a_{depth-1}
  std::vector<Real> b;  // b_0 .. b_{depth-1}
  int depth() const { return static_cast<int>(a.size()); }
  Real mu0() const { return b[0] * b[0]; }
  // Fill out[0..nmax] with p_0(x)..p_{nmax}(x); requires nmax < depth().
  void orthonormal_values(const Real& x, int nmax,
                          std::vector<Real>& out) const;
};
Recurrence stieltjes_recurrence(const PanelGrid& grid, int depth);

// n-point Gauss rule for the weight exp(-cV):
//   sum_i w_i f(x_i) == int f(x) exp(-cV(x)) dx  exactly for deg f <= 2n-1.
struct GaussRule {
  double c = 1.0;
  std::vector<Real> x, w;
  int n() const { return static_cast<int>(x.size()); }
};
GaussRule golub_welsch(const Recurrence& rec, int n);

// Rule moments sum_i w_i x_i^k for k = 0..kmax (for validation).
std::vector<Real> rule_moments(const GaussRule& rule, int kmax);

// One-call builder: grid -> recurrence -> rule, then verifies that the rule
// reproduces the grid's moments for k <= 2n-1 within relative 1e-30 (scaled
// by the even neighbor moments, which bound odd ones via Cauchy-Schwarz).
struct WeightQuadrature {
  double c = 1.0;
  PanelGrid grid;
  Recurrence rec;
  GaussRule rule;
  std::vector<Real> moments;  // grid reference moments 0..2n-1
};
WeightQuadrature build_weight_quadrature(const Potential& pot, double c, int n,
                                         int extra_depth = 0);

}  // namespace skewop
