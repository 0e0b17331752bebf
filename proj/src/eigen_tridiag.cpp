#include "skewop/eigen_tridiag.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "skewop/errors.hpp"

namespace skewop {

std::vector<double> tridiagonal_eigenvalues_ql(std::vector<double> d,
                                               std::vector<double> e) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return {};
  if (static_cast<int>(e.size()) != n - 1)
    throw ValidationError("tridiagonal QL: off-diagonal size must be n-1");
  e.push_back(0.0);

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      // find the first negligible off-diagonal at or after l
      for (m = l; m < n - 1; ++m) {
        double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= DBL_EPSILON * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw NumericalError("tridiagonal QL: no convergence in 60 sweeps");
        // Wilkinson-style shift from the leading 2x2
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            // underflow in the rotation chain: deflate and restart sweep
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

int tridiagonal_count_below(const std::vector<double>& d,
                            const std::vector<double>& e, double x) {
  const int n = static_cast<int>(d.size());
  int count = 0;
  double q = 1.0;
  for (int i = 0; i < n; ++i) {
    double off2 = (i > 0) ? e[i - 1] * e[i - 1] : 0.0;
    q = d[i] - x - (i > 0 ? off2 / q : 0.0);
    if (q == 0.0) q = -DBL_MIN;  // tie-break: count boundary as below
    if (std::fabs(q) < DBL_MIN) q = std::copysign(DBL_MIN, q);
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> tridiagonal_eigenvalues_bisect(
    const std::vector<double>& d, const std::vector<double>& e) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return {};
  if (static_cast<int>(e.size()) != n - 1)
    throw ValidationError("tridiagonal bisect: off-diagonal size must be n-1");
  double lo = d[0], hi = d[0];
  for (int i = 0; i < n; ++i) {
    double r = (i > 0 ? std::fabs(e[i - 1]) : 0.0) +
               (i < n - 1 ? std::fabs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  double pad = 1e-3 * (hi - lo) + 1e-300;
  lo -= pad;
  hi += pad;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > DBL_EPSILON * (std::fabs(a) + std::fabs(b) + 1); ++it) {
      double mid = 0.5 * (a + b);
      if (tridiagonal_count_below(d, e, mid) <= i)
        a = mid;
      else
        b = mid;
    }
    out[i] = 0.5 * (a + b);
  }
  return out;
}

std::vector<double> dense_symmetric_eigenvalues(std::vector<double> a, int n) {
  if (n < 0 || static_cast<std::size_t>(n) * n != a.size())
    throw ValidationError("dense eigensolver: matrix must be n*n entries");
  if (n == 0) return {};
  auto at = [&](int i, int j) -> double& { return a[i * n + j]; };

  // Householder reduction to tridiagonal form (lower triangle, no vectors)
  std::vector<double> d(n, 0.0), e(n, 0.0);
  for (int i = n - 1; i >= 1; --i) {
    int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::fabs(at(i, k));
      if (scale == 0.0) {
        e[i] = at(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          at(i, k) /= scale;
          h += at(i, k) * at(i, k);
        }
        double f = at(i, l);
        double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
        e[i] = scale * g;
        h -= f * g;
        at(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
          for (int k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
          e[j] = g / h;
          f += e[j] * at(i, j);
        }
        double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = at(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k)
            at(j, k) -= f * e[k] + g * at(i, k);
        }
      }
    } else {
      e[i] = at(i, l);
    }
  }
  for (int i = 0; i < n; ++i) d[i] = at(i, i);
  std::vector<double> off(e.begin() + 1, e.end());
  return tridiagonal_eigenvalues_ql(std::move(d), std::move(off));
}

}  // namespace skewop
