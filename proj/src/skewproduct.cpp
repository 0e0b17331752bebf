#include "skewop/skewproduct.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "skewop/errors.hpp"

namespace skewop {

// ---------------------------------------------------------------------------
// CumulativeMoments

CumulativeMoments::CumulativeMoments(const Potential& pot,
                                     const PanelGrid& grid, int jmax,
                                     bool force_grid_path)
    : pot_(pot),
      jmax_(jmax),
      erf_path_(pot.is_even_quadratic() && !force_grid_path),
      a_(0) {
  if (grid.c != 1.0)
    throw ValidationError("cumulative moments require the e^{-V} grid (c=1)");
  totals_.assign(jmax_ + 1, Real(0));

  if (erf_path_) {
    // e^{-V} = e^{-a x^2} with a = u2/2; totals by the Gamma recurrence
    a_ = Real(pot.u()[1]) / 2;
    Real pi_ = 4 * atan(Real(1));
    totals_[0] = sqrt(pi_ / a_);
    if (jmax_ >= 1) totals_[1] = 0;
    for (int j = 2; j <= jmax_; ++j)
      totals_[j] = (j - 1) * totals_[j - 2] / (2 * a_);
    return;
  }

  order_ = grid.order;
  edges_ = grid.edges;
  int panels = grid.panels();
  prefix_.assign(static_cast<size_t>(panels + 1) * (jmax_ + 1), Real(0));
  for (int p = 0; p < panels; ++p) {
    // panel sums of t^j e^{-V}
    std::vector<Real> s(jmax_ + 1, Real(0));
    for (int q = 0; q < order_; ++q) {
      size_t i = static_cast<size_t>(p) * order_ + q;
      Real xp = grid.wexp[i];
      for (int j = 0; j <= jmax_; ++j) {
        s[j] += xp;
        xp *= grid.x[i];
      }
    }
    for (int j = 0; j <= jmax_; ++j)
      prefix_[static_cast<size_t>(p + 1) * (jmax_ + 1) + j] =
          prefix_[static_cast<size_t>(p) * (jmax_ + 1) + j] + s[j];
  }
  for (int j = 0; j <= jmax_; ++j)
    totals_[j] = prefix_[static_cast<size_t>(panels) * (jmax_ + 1) + j];
}

void CumulativeMoments::values_erf(const Real& y, std::vector<Real>& out) const {
  out.assign(jmax_ + 1, Real(0));
  Real pi_ = 4 * atan(Real(1));
  Real e = exp(-a_ * y * y);
  out[0] = sqrt(pi_ / a_) * (1 + erf(sqrt(a_) * y)) / 2;
  if (jmax_ >= 1) out[1] = -e / (2 * a_);
  Real ypow = y;  // y^{j-1} for j = 2
  for (int j = 2; j <= jmax_; ++j) {
    out[j] = ((j - 1) * out[j - 2] - ypow * e) / (2 * a_);
    ypow *= y;
  }
}

void CumulativeMoments::values_grid(const Real& y,
                                    std::vector<Real>& out) const {
  out.assign(jmax_ + 1, Real(0));
  if (y <= edges_.front()) return;
  if (y >= edges_.back()) {
    out = totals_;
    return;
  }
  // locate the panel containing y
  auto it = std::upper_bound(edges_.begin(), edges_.end(), y);
  int p = static_cast<int>(it - edges_.begin()) - 1;
  for (int j = 0; j <= jmax_; ++j)
    out[j] = prefix_[static_cast<size_t>(p) * (jmax_ + 1) + j];
  // partial panel [edges_[p], y) via a mapped GL rule
  const GaussLegendre& gl = gauss_legendre_unit(order_);
  Real mid = (edges_[p] + y) / 2, half = (y - edges_[p]) / 2;
  for (int q = 0; q < order_; ++q) {
    Real t = mid + half * gl.x[q];
    Real xp = half * gl.w[q] * exp(-pot_.V(t));
    for (int j = 0; j <= jmax_; ++j) {
      out[j] += xp;
      xp *= t;
    }
  }
}

void CumulativeMoments::values(const Real& y, std::vector<Real>& out) const {
  if (erf_path_)
    values_erf(y, out);
  else
    values_grid(y, out);
}

// ---------------------------------------------------------------------------
// SkewMomentTable

Real SkewMomentTable::bilinear(const Polynomial& f, const Polynomial& g) const {
  if (f.degree() > size || g.degree() > size)
    throw ValidationError("moment table bilinear: degree exceeds table size");
  Real acc(0);
  const auto& fc = f.coeffs();
  const auto& gc = g.coeffs();
  for (size_t j = 0; j < fc.size(); ++j) {
    if (fc[j] == 0) continue;
    Real row(0);
    for (size_t k = 0; k < gc.size(); ++k)
      row += gc[k] * at(static_cast<int>(j), static_cast<int>(k));
    acc += fc[j] * row;
  }
  return acc;
}

std::string SkewMomentTable::serialize() const {
  nlohmann::json j;
  j["format"] = "skewop-moment-table/1";
  j["beta"] = beta;
  j["size"] = size;
  j["u"] = u;
  j["precision_bits"] = precision_bits;
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r <= size; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c <= size; ++c) row.push_back(to_decimal(at(r, c)));
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j.dump(1);
}

SkewMomentTable SkewMomentTable::deserialize(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "skewop-moment-table/1")
    throw ValidationError("moment table: unrecognized format");
  SkewMomentTable t;
  t.beta = j.at("beta").get<int>();
  t.size = j.at("size").get<int>();
  t.u = j.at("u").get<std::vector<double>>();
  t.precision_bits = j.at("precision_bits").get<unsigned>();
  t.m.assign(static_cast<size_t>(t.size + 1) * (t.size + 1), Real(0));
  const auto& rows = j.at("entries");
  if (static_cast<int>(rows.size()) != t.size + 1)
    throw ValidationError("moment table: row count mismatch");
  for (int r = 0; r <= t.size; ++r)
    for (int c = 0; c <= t.size; ++c)
      t.at(r, c) = from_decimal(rows[r][c].get<std::string>());
  return t;
}

// ---------------------------------------------------------------------------
// SkewProducts

SkewProducts::SkewProducts(int beta, const Potential& pot, int max_degree)
    : beta_(beta), pot_(pot), max_degree_(max_degree) {
  if (beta != 1 && beta != 4)
    throw ValidationError("skew products: beta must be 1 or 4");
  if (max_degree < 1)
    throw ValidationError("skew products: max_degree must be >= 1");

  const int d = pot_.d();
  const int n2 = max_degree_ + d + 10;
  q2_ = build_weight_quadrature(pot_, 2.0, n2);
  m2_ = rule_moments(q2_.rule, 2 * n2 - 1);
  if (pot_.is_even())
    for (size_t k = 1; k < m2_.size(); k += 2) m2_[k] = 0;

  table_.beta = beta_;
  table_.size = max_degree_;
  table_.u = pot_.u();
  table_.precision_bits = precision_bits();
  table_.m.assign(static_cast<size_t>(max_degree_ + 1) * (max_degree_ + 1),
                  Real(0));

  if (beta_ == 4) {
    // s4(x^j, x^k) = (k - j) int x^{j+k-1} e^{-2V}: exactly antisymmetric
    for (int j = 0; j <= max_degree_; ++j)
      for (int k = 0; k <= max_degree_; ++k)
        if (j + k >= 1) table_.at(j, k) = (k - j) * m2_[j + k - 1];
  } else {
    // The outer integrand contains eps-transform (erf-like) profiles, for
    // which Gauss rules converge root-exponentially (~exp(-5.6 sqrt(n)) here,
    // measured), not geometrically; size the rule accordingly.
    const int n1 = 3 * (max_degree_ + d + 10) + 160;
    q1_ = std::make_unique<WeightQuadrature>(
        build_weight_quadrature(pot_, 1.0, n1));
    cum_ = std::make_unique<CumulativeMoments>(pot_, q1_->grid, max_degree_);

    // node tables: wpow[i][k] = w_i y_i^k, W[i][j] = T_j - 2 C_j(y_i)
    const GaussRule& R = q1_->rule;
    const int P = R.n();
    const int S = max_degree_ + 1;
    std::vector<Real> wpow(static_cast<size_t>(P) * S);
    std::vector<Real> W(static_cast<size_t>(P) * S);
    std::vector<Real> C;
    for (int i = 0; i < P; ++i) {
      Real xp = R.w[i];
      for (int k = 0; k < S; ++k) {
        wpow[static_cast<size_t>(i) * S + k] = xp;
        xp *= R.x[i];
      }
      cum_->values(R.x[i], C);
      for (int j = 0; j < S; ++j)
        W[static_cast<size_t>(i) * S + j] = cum_->totals()[j] - 2 * C[j];
    }
    for (int j = 0; j < S; ++j)
      for (int k = 0; k < S; ++k) {
        Real acc(0);
        for (int i = 0; i < P; ++i)
          acc += wpow[static_cast<size_t>(i) * S + k] *
                 W[static_cast<size_t>(i) * S + j];
        table_.at(j, k) = acc / 2;
      }

    // the two triangles are computed independently (different cumulative
    // decompositions), so the antisymmetry residual measures quadrature error
    Real scale(0), resid(0);
    for (int j = 0; j < S; ++j)
      for (int k = 0; k < S; ++k) {
        Real av = abs(table_.at(j, k));
        if (av > scale) scale = av;
        Real rv = abs(table_.at(j, k) + table_.at(k, j));
        if (rv > resid) resid = rv;
      }
    if (resid > Real("1e-25") * scale)
      throw NumericalError(
          "skew moment table: antisymmetry residual too large (" +
          to_decimal(resid / scale) + " relative)");
    for (int j = 0; j < S; ++j)
      for (int k = j; k < S; ++k) {
        Real v = (table_.at(j, k) - table_.at(k, j)) / 2;
        table_.at(j, k) = v;
        table_.at(k, j) = -v;
      }
  }

  for (int j = 0; j <= max_degree_; ++j) table_.at(j, j) = 0;
  if (pot_.is_even()) {
    // even total degree pairs vanish by parity; verify then make them exact
    Real scale(0);
    for (const Real& v : table_.m)
      if (abs(v) > scale) scale = abs(v);
    for (int j = 0; j <= max_degree_; ++j)
      for (int k = 0; k <= max_degree_; ++k)
        if ((j + k) % 2 == 0) {
          if (abs(table_.at(j, k)) > Real("1e-25") * scale)
            throw NumericalError("skew moment table: parity violation");
          table_.at(j, k) = 0;
        }
  }
}

Real SkewProducts::skew(const Polynomial& f, const Polynomial& g) const {
  if (beta_ == 4) {
    Polynomial h = f * g.derivative() - f.derivative() * g;
    if (h.degree() >= static_cast<int>(m2_.size()))
      throw ValidationError("skew product: degree exceeds moment budget");
    Real acc(0);
    for (int m = 0; m <= h.degree(); ++m)
      if (!(h.coeff(m) == 0)) acc += h.coeff(m) * m2_[m];
    return acc;
  }
  return table_.bilinear(f, g);
}

Real SkewProducts::gram(const Polynomial& f, const Polynomial& g) const {
  Polynomial h = f * g;
  if (h.degree() >= static_cast<int>(m2_.size()))
    throw ValidationError("gram form: degree exceeds moment budget");
  Real acc(0);
  for (int m = 0; m <= h.degree(); ++m)
    if (!(h.coeff(m) == 0)) acc += h.coeff(m) * m2_[m];
  return acc;
}

const Real& SkewProducts::plain_moment2(int k) const {
  if (k < 0 || k >= static_cast<int>(m2_.size()))
    throw ValidationError("plain moment index out of range");
  return m2_[k];
}

Real SkewProducts::epsilon_transform(const Polynomial& f, const Real& x) const {
  if (!cum_)
    throw ValidationError("epsilon transform is only defined for beta=1");
  if (f.degree() > cum_->jmax())
    throw ValidationError("epsilon transform: degree exceeds table");
  std::vector<Real> C;
  cum_->values(x, C);
  Real acc(0);
  for (int j = 0; j <= f.degree(); ++j)
    if (!(f.coeff(j) == 0))
      acc += f.coeff(j) * (2 * C[j] - cum_->totals()[j]);
  return acc;
}

const WeightQuadrature& SkewProducts::quad1() const {
  if (!q1_) throw ValidationError("e^{-V} quadrature only exists for beta=1");
  return *q1_;
}

const CumulativeMoments& SkewProducts::cumulative() const {
  if (!cum_) throw ValidationError("cumulative moments only exist for beta=1");
  return *cum_;
}

}  // namespace skewop
