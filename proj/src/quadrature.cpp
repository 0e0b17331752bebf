#include "skewop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "skewop/eigen_tridiag.hpp"
#include "skewop/errors.hpp"

namespace skewop {

namespace {

constexpr double kPi = 3.14159265358979323846;

GaussLegendre make_gauss_legendre(int order) {
  GaussLegendre gl;
  gl.x.resize(order);
  gl.w.resize(order);
  const Real one(1);
  const Real eps = ldexp(one, -static_cast<int>(precision_bits()) - 8);
  for (int i = 0; i < order; ++i) {
    Real t(std::cos(kPi * (i + 0.75) / (order + 0.5)));
    Real p = 0, dp = 0;
    for (int iter = 0; iter < 200; ++iter) {
      // Legendre P_n(t) and derivative by recurrence.
      Real p0(1), p1 = t;
      for (int k = 1; k < order; ++k) {
        Real p2 = ((2 * k + 1) * t * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      p = p1;
      dp = order * (t * p1 - p0) / (t * t - 1);
      Real dt = p / dp;
      t -= dt;
      if (abs(dt) <= eps * (1 + abs(t))) break;
    }
    // guesses run from cos(small) down, so reverse into ascending order
    gl.x[order - 1 - i] = t;
    gl.w[order - 1 - i] = 2 / ((1 - t * t) * dp * dp);
  }
  return gl;
}

std::mutex g_gl_mutex;
std::map<std::pair<int, unsigned>, GaussLegendre> g_gl_cache;

// ---------------------------------------------------------------------------
// Panel layout planning (double precision). For the weight exp(-W(x)) with
// W(x) = c V(sign x) on a half-line, panel widths are driven by the local
// exponential rate lambda of the integrands x^k exp(-W): a K-point panel of
// width h integrates exp(lambda x) to relative accuracy exp(-target) once
//   (lambda h e / (4K))^{2K} <= exp(-target),
// and integrands that are suppressed by exp(-delta) relative to their own
// peak may lose delta in accuracy for free. Oscillatory orthonormal
// polynomials (frequency omega) impose the same bound with lambda = omega.

struct SidePlan {
  std::vector<double> edges;  // 0 = first edge, ascending, last = L
};

struct Envelope {
  std::vector<double> ks;      // coarse powers
  std::vector<double> xpeak;   // argmax of g_k
  std::vector<double> gpeak;   // max of g_k
};

SidePlan plan_side(const Potential& pot, double c, int max_power,
                   int rec_depth, int order, double sgn) {
  auto W = [&](double x) { return c * pot.V(sgn * x); };
  auto Wp = [&](double x) {
    // derivative of W along this side
    double vp = 0.0;
    const auto& u = pot.u();
    double y = sgn * x;
    for (int l = static_cast<int>(u.size()); l >= 1; --l) vp = vp * y + u[l - 1];
    return c * sgn * vp;
  };
  const double kmax = std::max(1, max_power);
  auto g = [&](double k, double x) { return k * std::log(x) - W(x); };

  // Outer cap: beyond X the envelope of every k <= kmax decays.
  double X = 1.0;
  while (!(X * Wp(X) > kmax + 10 && W(2 * X) > W(X)) && X < 1e8) X *= 2;
  X *= 2;

  // coarse k table (always includes the small k individually)
  Envelope env;
  for (int k = 0; k <= 8 && k <= max_power; ++k) env.ks.push_back(k);
  double step = std::max(1.0, kmax / 96.0);
  for (double k = 8 + step; k < kmax; k += step) env.ks.push_back(k);
  env.ks.push_back(kmax);

  // scan grid for peak finding: log-spaced plus linear
  std::vector<double> scan;
  for (int j = 0; j <= 1500; ++j)
    scan.push_back(X * std::pow(1e-8, 1.0 - j / 1500.0));
  for (int j = 1; j <= 3000; ++j) scan.push_back(X * j / 3000.0);
  std::sort(scan.begin(), scan.end());

  env.xpeak.resize(env.ks.size());
  env.gpeak.resize(env.ks.size());
  for (size_t i = 0; i < env.ks.size(); ++i) {
    double best = -1e300, bx = scan.front();
    for (double x : scan) {
      double v = env.ks[i] == 0 ? -W(x) : g(env.ks[i], x);
      if (v > best) {
        best = v;
        bx = x;
      }
    }
    env.xpeak[i] = bx;
    env.gpeak[i] = best;
  }

  // side length: where every k has dropped 130 nats below its own peak
  double L = 0.0;
  for (size_t i = 0; i < env.ks.size(); ++i) {
    double lo = env.xpeak[i], hi = X;
    auto drop = [&](double x) {
      double v = env.ks[i] == 0 ? -W(x) : g(env.ks[i], x);
      return env.gpeak[i] - v;
    };
    for (int it = 0; it < 60 && drop(hi) < 130.0; ++it) hi *= 1.5;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      (drop(mid) < 130.0 ? lo : hi) = mid;
    }
    L = std::max(L, hi);
  }

  // Oscillation bound for the first rec_depth orthonormal polynomials: their
  // zeros span roughly 1.5x the envelope peak of x^{2 rec_depth}, and the
  // local frequency follows a semicircle-like profile peaking at
  // ~4 rec_depth / span (twice the semicircle value, for safety).
  double osc_span = 0.0, osc_omega0 = 0.0;
  if (rec_depth > 0) {
    double kz = std::min(2.0 * rec_depth, kmax);
    double xp = scan.front();
    double best = -1e300;
    for (double x : scan) {
      double v = g(kz, x);
      if (v > best) {
        best = v;
        xp = x;
      }
    }
    osc_span = 1.5 * xp;
    osc_omega0 = 4.0 * rec_depth / std::max(osc_span, 1e-6);
  }
  auto h_osc_at = [&](double x) {
    if (rec_depth <= 0 || x >= osc_span) return 1e300;
    double shape = std::sqrt(1.0 - (x / osc_span) * (x / osc_span));
    double omega = osc_omega0 * std::max(shape, 0.35);
    return 25.0 / omega;
  };

  const double K = order;
  const double hcap = std::max(L / 8.0, 1e-6);
  const double hfloor = L / 100000.0;

  SidePlan plan;
  plan.edges.push_back(0.0);
  double x = 0.0;
  while (x < L) {
    double h = std::min(hcap, h_osc_at(x));
    for (size_t i = 0; i < env.ks.size(); ++i) {
      double k = env.ks[i];
      double gv = (k == 0) ? -W(std::max(x, 1e-300))
                           : g(k, std::max(x, 1e-300));
      double delta = env.gpeak[i] - gv;
      if (delta > 130.0) continue;  // can't contribute at target accuracy
      double lambda = std::abs((x > 0 ? k / x : (k > 0 ? 1e300 : 0.0)) - Wp(x));
      if (lambda <= 0) continue;
      double hk = (4.0 * K / 2.718281828459045) / lambda *
                  std::exp((delta - 100.0) / (2.0 * K));
      h = std::min(h, hk);
    }
    h = std::max(h, hfloor);
    x += h;
    plan.edges.push_back(std::min(x, x >= L ? x : L));
    if (plan.edges.size() > 60000)
      throw NumericalError("panel grid: layout exceeded 60000 panels");
  }
  return plan;
}

}  // namespace

const GaussLegendre& gauss_legendre_unit(int order) {
  std::lock_guard<std::mutex> lock(g_gl_mutex);
  auto key = std::make_pair(order, precision_bits());
  auto it = g_gl_cache.find(key);
  if (it == g_gl_cache.end())
    it = g_gl_cache.emplace(key, make_gauss_legendre(order)).first;
  return it->second;
}

PanelGrid build_panel_grid(const Potential& pot, double c, int max_power,
                           int rec_depth, int order) {
  PanelGrid grid;
  grid.c = c;
  grid.order = order;

  SidePlan pos = plan_side(pot, c, max_power, rec_depth, order, +1.0);
  SidePlan neg = plan_side(pot, c, max_power, rec_depth, order, -1.0);

  for (auto it = neg.edges.rbegin(); it != neg.edges.rend(); ++it)
    if (*it != 0.0) grid.edges.emplace_back(-*it);
  for (double e : pos.edges) grid.edges.emplace_back(e);

  const GaussLegendre& gl = gauss_legendre_unit(order);
  const Real cr(c);
  size_t npts = (grid.edges.size() - 1) * order;
  grid.x.reserve(npts);
  grid.w.reserve(npts);
  grid.wexp.reserve(npts);
  for (size_t p = 0; p + 1 < grid.edges.size(); ++p) {
    Real mid = (grid.edges[p] + grid.edges[p + 1]) / 2;
    Real half = (grid.edges[p + 1] - grid.edges[p]) / 2;
    for (int j = 0; j < order; ++j) {
      Real xj = mid + half * gl.x[j];
      Real wj = half * gl.w[j];
      grid.x.push_back(xj);
      grid.w.push_back(wj);
      grid.wexp.push_back(wj * exp(-cr * pot.V(xj)));
    }
  }
  return grid;
}

std::vector<Real> grid_moments(const PanelGrid& grid, int kmax) {
  std::vector<Real> m(kmax + 1, Real(0));
  for (size_t i = 0; i < grid.x.size(); ++i) {
    Real xp = grid.wexp[i];
    for (int k = 0; k <= kmax; ++k) {
      m[k] += xp;
      xp *= grid.x[i];
    }
  }
  return m;
}

void Recurrence::orthonormal_values(const Real& x, int nmax,
                                    std::vector<Real>& out) const {
  out.resize(nmax + 1);
  Real prev(0), cur = 1 / b[0];
  out[0] = cur;
  for (int k = 0; k < nmax; ++k) {
    Real next = ((x - a[k]) * cur - (k > 0 ? b[k] * prev : Real(0))) / b[k + 1];
    prev = cur;
    cur = next;
    out[k + 1] = cur;
  }
}

Recurrence stieltjes_recurrence(const PanelGrid& grid, int depth) {
  const size_t P = grid.x.size();
  Recurrence rec;
  rec.a.assign(depth, Real(0));
  rec.b.assign(depth, Real(0));

  Real mu0(0);
  for (size_t i = 0; i < P; ++i) mu0 += grid.wexp[i];
  if (mu0 <= 0) throw NumericalError("stieltjes: weight has no mass");
  rec.b[0] = sqrt(mu0);

  std::vector<Real> prev(P, Real(0)), cur(P, 1 / rec.b[0]), t(P);
  {
    Real s(0);
    for (size_t i = 0; i < P; ++i) s += grid.wexp[i] * grid.x[i];
    rec.a[0] = s / mu0;
  }
  for (int k = 1; k < depth; ++k) {
    Real s2(0);
    for (size_t i = 0; i < P; ++i) {
      t[i] = (grid.x[i] - rec.a[k - 1]) * cur[i] -
             (k > 1 ? rec.b[k - 1] * prev[i] : Real(0));
      s2 += grid.wexp[i] * t[i] * t[i];
    }
    if (s2 <= 0)
      throw NumericalError(
          "stieltjes: discretized measure lost positive-definiteness at k=" +
          std::to_string(k));
    rec.b[k] = sqrt(s2);
    Real ax(0);
    for (size_t i = 0; i < P; ++i) {
      prev[i] = cur[i];
      cur[i] = t[i] / rec.b[k];
      ax += grid.wexp[i] * grid.x[i] * cur[i] * cur[i];
    }
    rec.a[k] = ax;
  }
  return rec;
}

namespace {

// #eigenvalues of the leading n x n Jacobi block below x (Sturm/LDL count).
// b2[k] = b_k^2 precomputed.
int sturm_count(const Recurrence& rec, const std::vector<Real>& b2, int n,
                const Real& x, const Real& tiny) {
  int cnt = 0;
  Real d = rec.a[0] - x;
  if (d == 0) d = -tiny;
  if (d < 0) ++cnt;
  for (int k = 1; k < n; ++k) {
    d = (rec.a[k] - x) - b2[k] / d;
    if (d == 0) d = -tiny;
    if (d < 0) ++cnt;
  }
  return cnt;
}

// p_n(x) and p_n'(x) via the recurrence (orthonormal normalization).
// binv[k] = 1/b_k precomputed.
void eval_pn(const Recurrence& rec, const std::vector<Real>& binv, int n,
             const Real& x, Real& pn, Real& dpn) {
  Real p0(0), p1 = binv[0], d0(0), d1(0);
  for (int k = 0; k < n; ++k) {
    Real xa = x - rec.a[k];
    Real p2 = (xa * p1 - (k > 0 ? rec.b[k] * p0 : Real(0))) * binv[k + 1];
    Real d2 = (p1 + xa * d1 - (k > 0 ? rec.b[k] * d0 : Real(0))) * binv[k + 1];
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  pn = p1;
  dpn = d1;
}

}  // namespace

GaussRule golub_welsch(const Recurrence& rec, int n) {
  if (n > rec.depth() - 1)
    throw ValidationError("golub_welsch: recurrence depth too small");
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);

  // Gershgorin bounds for the n x n Jacobi block
  Real lo = rec.a[0], hi = rec.a[0];
  for (int k = 0; k < n; ++k) {
    Real r(0);
    if (k >= 1) r += rec.b[k];
    if (k + 1 <= n - 1) r += rec.b[k + 1];
    Real rlo = rec.a[k] - r, rhi = rec.a[k] + r;
    if (rlo < lo) lo = rlo;
    if (rhi > hi) hi = rhi;
  }
  Real pad = (hi - lo) / 100 + 1;
  lo -= pad;
  hi += pad;

  const unsigned bits = precision_bits();
  const Real tiny = ldexp(Real(1) + abs(lo) + abs(hi),
                          -3 * static_cast<int>(bits));
  // Newton stops once the step is ~2^12 ulp; tighter thresholds sit inside
  // the rounding noise of p_n and make the loop run to its iteration cap.
  const Real tol = ldexp(Real(1), -static_cast<int>(bits) + 12);

  // hoist the divisions out of the inner recurrences
  std::vector<Real> binv(n + 1), b2(n);
  for (int k = 0; k <= n; ++k) binv[k] = 1 / rec.b[k];
  for (int k = 0; k < n; ++k) b2[k] = rec.b[k] * rec.b[k];

  // cheap double-precision eigenvalues seed tight brackets
  std::vector<double> dd(n), ee(n - 1);
  for (int k = 0; k < n; ++k) dd[k] = to_double(rec.a[k]);
  for (int k = 0; k + 1 < n; ++k) ee[k] = to_double(rec.b[k + 1]);
  std::vector<double> seed = tridiagonal_eigenvalues_ql(dd, ee);

  for (int i = 0; i < n; ++i) {
    // bracket the (i+1)-th smallest eigenvalue around the double seed
    double gap_lo = (i > 0) ? seed[i] - seed[i - 1] : 1e300;
    double gap_hi = (i + 1 < n) ? seed[i + 1] - seed[i] : 1e300;
    double delta = std::max(0.25 * std::min(gap_lo, gap_hi),
                            1e-10 * (1.0 + std::fabs(seed[i])));
    Real a = Real(seed[i]) - delta, b = Real(seed[i]) + delta;
    if (sturm_count(rec, b2, n, a, tiny) != i ||
        sturm_count(rec, b2, n, b, tiny) != i + 1) {
      // seed unusable (clustered spectrum): full-range Sturm bisection
      a = lo;
      b = hi;
      for (int it = 0; it < 80; ++it) {
        Real mid = (a + b) / 2;
        if (sturm_count(rec, b2, n, mid, tiny) <= i)
          a = mid;
        else
          b = mid;
      }
    }
    // Newton polish on p_n within the bracket; p_n's sign at the upper
    // bracket end is (-1)^{n-(i+1)} (count eigenvalues above).
    const int sign_hi = ((n - i - 1) % 2 == 0) ? 1 : -1;
    Real x = (a + b) / 2;
    Real pn, dpn;
    for (int it = 0; it < 60; ++it) {
      eval_pn(rec, binv, n, x, pn, dpn);
      if (pn == 0) break;
      // bracket update from the sign of p_n
      bool upper_side = (pn > 0) == (sign_hi > 0);
      (upper_side ? b : a) = x;
      Real step = pn / dpn;
      // convergence must be judged on the raw Newton correction, before any
      // bracket clamping: near the root the correction drops below one ulp,
      // x - step rounds onto a bracket endpoint, and a post-clamp test would
      // discard the converged value and restart from the stale midpoint
      if (abs(step) <= tol * (1 + abs(x))) {
        x -= step;
        break;
      }
      Real x1 = x - step;
      if (!(x1 > a && x1 < b)) x1 = (a + b) / 2;  // fall back to bisection
      x = x1;
    }
    rule.x[i] = x;
  }

  // Christoffel weights w_i = 1 / sum_k p_k(x_i)^2
  std::vector<Real> pv;
  for (int i = 0; i < n; ++i) {
    rec.orthonormal_values(rule.x[i], n - 1, pv);
    Real s(0);
    for (const Real& v : pv) s += v * v;
    rule.w[i] = 1 / s;
  }
  return rule;
}

std::vector<Real> rule_moments(const GaussRule& rule, int kmax) {
  std::vector<Real> m(kmax + 1, Real(0));
  for (size_t i = 0; i < rule.x.size(); ++i) {
    Real xp = rule.w[i];
    for (int k = 0; k <= kmax; ++k) {
      m[k] += xp;
      xp *= rule.x[i];
    }
  }
  return m;
}

WeightQuadrature build_weight_quadrature(const Potential& pot, double c, int n,
                                         int extra_depth) {
  WeightQuadrature wq;
  wq.c = c;
  int depth = n + 1 + std::max(extra_depth, 0);
  wq.grid = build_panel_grid(pot, c, 2 * n + 3, depth);
  wq.rec = stieltjes_recurrence(wq.grid, depth);
  wq.rule = golub_welsch(wq.rec, n);
  wq.moments = grid_moments(wq.grid, 2 * n - 1);

  std::vector<Real> rm = rule_moments(wq.rule, 2 * n - 1);
  const Real rel("1e-30");
  for (int k = 0; k <= 2 * n - 1; ++k) {
    // odd moments can vanish; scale them by the even neighbors, which bound
    // them via Cauchy-Schwarz for any nonnegative weight
    Real scale;
    if (k % 2 == 0) {
      scale = abs(wq.moments[k]);
    } else {
      scale = sqrt(abs(wq.moments[k - 1]) *
                   abs(k + 1 <= 2 * n - 1 ? wq.moments[k + 1]
                                          : wq.moments[k - 1]));
    }
    if (abs(rm[k] - wq.moments[k]) > rel * scale)
      throw NumericalError(
          "weight quadrature: moment reproduction failed at power " +
          std::to_string(k));
  }
  return wq;
}

}  // namespace skewop
