#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "skewop/eigen_tridiag.hpp"
#include "skewop/errors.hpp"
#include "skewop/kernels.hpp"
#include "skewop/potential.hpp"
#include "skewop/prec.hpp"
#include "skewop/quadrature.hpp"
#include "skewop/rmtmc.hpp"
#include "skewop/skewproduct.hpp"
#include "skewop/sopfamily.hpp"

using namespace skewop;

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (static_cast<double>(v.size()) - 1.0));
}

std::vector<double> pool_eigenvalues(const std::vector<SpectrumSample>& xs) {
  std::vector<double> out;
  for (const auto& s : xs)
    out.insert(out.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  return out;
}

}  // namespace

TEST_CASE("counter cipher known answers and variate pins") {
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  // published known-answer vectors for the 10-round 4x32 cipher
  CHECK(philox4x32_block(Block{0u, 0u, 0u, 0u}, Key{0u, 0u}) ==
        Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_block(Block{0xffffffffu, 0xffffffffu, 0xffffffffu,
                               0xffffffffu},
                         Key{0xffffffffu, 0xffffffffu}) ==
        Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_block(Block{0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                               0x03707344u},
                         Key{0xa4093822u, 0x299f31d0u}) ==
        Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});

  // stream addressing: counter words are (counter lo, hi, stream lo, hi),
  // key words are (seed lo, hi); first block of (seed=42, stream=7)
  {
    Philox g(42, 7);
    CHECK(g.next_u32() == 0x67ee6f2cu);
    CHECK(g.next_u32() == 0xe55410ccu);
    CHECK(g.next_u32() == 0x6c7eca35u);
    CHECK(g.next_u32() == 0x557398d3u);
  }
  // uniform mapping (two words high-first, 53-bit, half-step offset)
  {
    Philox g(42, 7);
    CHECK(g.next_uniform() == 0.4059819683655664);
    CHECK(g.next_uniform() == 0.4238096599778615);
    CHECK(g.next_uniform() == 0.8979173452535725);  // from the second block
  }
  // inverse-CDF transforms of those uniforms
  {
    Philox g(42, 7);
    CHECK(g.next_normal() ==
          doctest::Approx(-0.23789319099857735).epsilon(1e-13));
  }
  {
    Philox g(42, 7);
    g.next_uniform();
    CHECK(g.next_chi(3) == doctest::Approx(1.4077683127406703).epsilon(1e-12));
  }

  // same address reproduces, different stream differs
  {
    Philox a(9, 4), b(9, 4), c(9, 5);
    bool same = true, diff = false;
    for (int i = 0; i < 100; ++i) {
      std::uint32_t x = a.next_u32(), y = b.next_u32(), z = c.next_u32();
      same = same && (x == y);
      diff = diff || (x != z);
    }
    CHECK(same);
    CHECK(diff);
  }

  // moments: uniform mean, normal mean/variance, chi_3 mean
  {
    Philox g(1, 0);
    const int m = 100000;
    double su = 0;
    double lo = 1, hi = 0;
    for (int i = 0; i < m; ++i) {
      double u = g.next_uniform();
      su += u;
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    CHECK(std::fabs(su / m - 0.5) < 5.0 * 0.288675 / std::sqrt(double(m)));
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
  }
  {
    Philox g(2, 0);
    const int m = 100000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < m; ++i) {
      double x = g.next_normal();
      s1 += x;
      s2 += x * x;
    }
    CHECK(std::fabs(s1 / m) < 5.0 / std::sqrt(double(m)));
    CHECK(std::fabs(s2 / m - 1.0) < 5.0 * std::sqrt(2.0 / double(m)));
  }
  {
    Philox g(3, 0);
    const int m = 10000;
    double s1 = 0;
    for (int i = 0; i < m; ++i) s1 += g.next_chi(3);
    // mean of chi_3 = sqrt(2) Gamma(2) / Gamma(3/2), sd = sqrt(3 - mean^2)
    CHECK(std::fabs(s1 / m - 1.5957691216057307) <
          5.0 * 0.673439 / std::sqrt(double(m)));
  }

  Philox g(0, 0);
  CHECK_THROWS_AS(g.next_chi(0), ValidationError);
  CHECK(to_string(SampleMethod::Dense) == "dense");
  CHECK(sample_method_from_string("tridiagonal") == SampleMethod::Tridiagonal);
  CHECK_THROWS_AS(sample_method_from_string("qr"), ValidationError);
}

TEST_CASE("tridiagonal eigensolver closed forms") {
  {
    auto ev = tridiagonal_eigenvalues_ql({2.0, 2.0}, {0.0});
    REQUIRE(ev.size() == 2);
    CHECK(ev[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-14));
  }
  {
    auto ev = tridiagonal_eigenvalues_ql({0.0, 0.0}, {1.0});
    REQUIRE(ev.size() == 2);
    CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    // free Laplacian-type chain: eigenvalues 1 + 2 cos(k pi / 4)
    auto ev = tridiagonal_eigenvalues_ql({1.0, 1.0, 1.0}, {1.0, 1.0});
    REQUIRE(ev.size() == 3);
    CHECK(ev[0] == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-13));
    CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(ev[2] == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-13));
  }
  {
    // random 12x12 against the bisection oracle, plus the two invariants
    Philox g(11, 0);
    std::vector<double> d(12), e(11);
    for (auto& x : d) x = g.next_normal();
    for (auto& x : e) x = std::fabs(g.next_normal()) + 0.1;
    auto ql = tridiagonal_eigenvalues_ql(d, e);
    auto bi = tridiagonal_eigenvalues_bisect(d, e);
    REQUIRE(ql.size() == 12);
    double scale = 0;
    for (double x : ql) scale = std::max(scale, std::fabs(x));
    for (int i = 0; i < 12; ++i)
      CHECK(std::fabs(ql[i] - bi[i]) < 1e-10 * scale);
    double tr = std::accumulate(d.begin(), d.end(), 0.0);
    double fr = 0;
    for (double x : d) fr += x * x;
    for (double x : e) fr += 2 * x * x;
    double trq = std::accumulate(ql.begin(), ql.end(), 0.0);
    double frq = 0;
    for (double x : ql) frq += x * x;
    CHECK(std::fabs(trq - tr) < 1e-12 * fr);
    CHECK(std::fabs(frq - fr) < 1e-12 * fr);
    CHECK(std::is_sorted(ql.begin(), ql.end()));
  }
  CHECK_THROWS_AS(tridiagonal_eigenvalues_ql({1.0, 2.0}, {}), ValidationError);
}

TEST_CASE("dense symmetric eigensolver") {
  {
    auto ev = dense_symmetric_eigenvalues({5.0}, 1);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0] == 5.0);
  }
  {
    // [[1, 2], [2, -1]]: eigenvalues -sqrt(5), sqrt(5)
    auto ev = dense_symmetric_eigenvalues({1.0, 2.0, 2.0, -1.0}, 2);
    CHECK(ev[0] == doctest::Approx(-std::sqrt(5.0)).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  }
  {
    // diagonal input comes back sorted
    std::vector<double> a(16, 0.0);
    a[0] = 3.0;
    a[5] = -1.0;
    a[10] = 7.0;
    a[15] = 0.5;
    auto ev = dense_symmetric_eigenvalues(a, 4);
    CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ev[2] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(ev[3] == doctest::Approx(7.0).epsilon(1e-14));
  }
  {
    // reflector conjugation of a known spectrum: A = Q diag(D) Q^T with
    // Q = I - 2 v v^T / (v^T v)
    const std::vector<double> D = {-3.0, -1.0, 0.5, 2.0, 7.0};
    const int n = 5;
    Philox g(13, 0);
    std::vector<double> v(n);
    double vv = 0;
    for (auto& x : v) {
      x = g.next_normal();
      vv += x * x;
    }
    std::vector<double> q(n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        q[i * n + j] = (i == j ? 1.0 : 0.0) - 2.0 * v[i] * v[j] / vv;
    std::vector<double> a(n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += q[i * n + k] * D[k] * q[j * n + k];
        a[i * n + j] = s;
      }
    auto ev = dense_symmetric_eigenvalues(a, n);
    std::vector<double> want = D;
    std::sort(want.begin(), want.end());
    for (int i = 0; i < n; ++i)
      CHECK(ev[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
  {
    // random 10x10: trace and Frobenius norm are preserved
    Philox g(17, 0);
    const int n = 10;
    std::vector<double> a(n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double x = g.next_normal();
        a[i * n + j] = a[j * n + i] = x;
      }
    double tr = 0, fr = 0;
    for (int i = 0; i < n; ++i) tr += a[i * n + i];
    for (double x : a) fr += x * x;
    auto ev = dense_symmetric_eigenvalues(a, n);
    double trq = std::accumulate(ev.begin(), ev.end(), 0.0);
    double frq = 0;
    for (double x : ev) frq += x * x;
    CHECK(std::fabs(trq - tr) < 1e-11 * fr);
    CHECK(std::fabs(frq - fr) < 1e-11 * fr);
  }
  CHECK_THROWS_AS(dense_symmetric_eigenvalues({1.0, 2.0, 3.0}, 2),
                  ValidationError);
}

TEST_CASE("sampler conventions across methods") {
  // bit-exact reproducibility at the same address
  auto s1 = sample_spectrum(1, 8, 42, 3, SampleMethod::Tridiagonal);
  auto s2 = sample_spectrum(1, 8, 42, 3, SampleMethod::Tridiagonal);
  CHECK(s1.eigenvalues == s2.eigenvalues);
  CHECK(s1.beta == 1);
  REQUIRE(s1.eigenvalues.size() == 8);
  CHECK(std::is_sorted(s1.eigenvalues.begin(), s1.eigenvalues.end()));

  auto q1 = sample_spectrum(4, 8, 42, 3, SampleMethod::Dense);
  auto q2 = sample_spectrum(4, 8, 42, 3, SampleMethod::Dense);
  CHECK(q1.eigenvalues == q2.eigenvalues);
  REQUIRE(q1.eigenvalues.size() == 8);  // Kramers-distinct levels only

  CHECK_THROWS_AS(sample_spectrum(2, 8, 0, 0, SampleMethod::Dense),
                  ValidationError);
  CHECK_THROWS_AS(sample_spectrum(1, 0, 0, 0, SampleMethod::Dense),
                  ValidationError);

  // the dense and tridiagonal models draw from the same joint law:
  // two-sample KS on pooled eigenvalues under the 1% critical value
  {
    const int m = 10000, lev = 8;
    auto td = pool_eigenvalues(
        sample_many(1, lev, 101, 0, m, SampleMethod::Tridiagonal, 4));
    auto dn = pool_eigenvalues(
        sample_many(1, lev, 202, 0, m, SampleMethod::Dense, 4));
    double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(m * lev));
    CHECK(ks_statistic(td, dn) < crit);
  }
  {
    const int m = 2000, lev = 6;
    auto td = pool_eigenvalues(
        sample_many(4, lev, 303, 0, m, SampleMethod::Tridiagonal));
    auto dn = pool_eigenvalues(
        sample_many(4, lev, 404, 0, m, SampleMethod::Dense));
    double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(m * lev));
    CHECK(ks_statistic(td, dn) < crit);
  }

  // second-moment identities, E sum x^2 over one spectrum:
  //   beta=1, n levels:          n(n+1)/2
  //   beta=4, N distinct levels: N(2N-1)/4
  {
    const int m = 4000;
    std::vector<double> t2(m);
    auto xs = sample_many(1, 8, 55, 0, m, SampleMethod::Dense);
    for (int i = 0; i < m; ++i) {
      double s = 0;
      for (double x : xs[i].eigenvalues) s += x * x;
      t2[i] = s;
    }
    // beta=1, n=8: E = n + n(n-1)/2 = 36
    CHECK(std::fabs(mean_of(t2) - 36.0) < 5.0 * sd_of(t2) / std::sqrt(double(m)));
  }
  {
    const int m = 4000;
    auto xs_d = sample_many(4, 8, 66, 0, m, SampleMethod::Dense);
    auto xs_t = sample_many(4, 8, 77, 0, m, SampleMethod::Tridiagonal);
    std::vector<double> td(m), dd(m);
    for (int i = 0; i < m; ++i) {
      double a = 0, b = 0;
      for (double x : xs_d[i].eigenvalues) a += x * x;
      for (double x : xs_t[i].eigenvalues) b += x * x;
      dd[i] = a;
      td[i] = b;
    }
    // beta=4, N=8 distinct levels: E sum x^2 = N(2N-1)/4 = 30
    CHECK(std::fabs(mean_of(dd) - 30.0) < 5.0 * sd_of(dd) / std::sqrt(double(m)));
    CHECK(std::fabs(mean_of(td) - 30.0) < 5.0 * sd_of(td) / std::sqrt(double(m)));
  }

  // support: spectra concentrate inside the semicircle edge sqrt(2*levels)
  {
    auto xs = sample_many(1, 100, 88, 0, 200, SampleMethod::Tridiagonal, 4);
    double edge = std::sqrt(200.0);
    int inside = 0;
    double reach = 0;
    for (const auto& s : xs) {
      double biggest = std::max(std::fabs(s.eigenvalues.front()),
                                std::fabs(s.eigenvalues.back()));
      if (biggest <= 1.15 * edge) ++inside;
      reach = std::max(reach, s.eigenvalues.back());
    }
    CHECK(inside >= 198);  // 99% within 1.15x the edge
    CHECK(reach > 0.85 * edge);
  }
  {
    auto xs = sample_many(4, 50, 99, 0, 50, SampleMethod::Tridiagonal);
    double edge = std::sqrt(100.0);
    double biggest = 0, reach = 0;
    for (const auto& s : xs) {
      biggest = std::max(
          biggest, std::max(std::fabs(s.eigenvalues.front()),
                            std::fabs(s.eigenvalues.back())));
      reach = std::max(reach, s.eigenvalues.back());
    }
    CHECK(biggest < 1.2 * edge);
    CHECK(reach > 0.85 * edge);
  }
}

TEST_CASE("two-level spacing law") {
  // two levels with weight e^{-x^2/2} and linear repulsion: the gap is
  // Rayleigh, p(s) = (s/2) e^{-s^2/4}
  const int m = 100000;
  auto xs = sample_many(1, 2, 1234, 0, m, SampleMethod::Tridiagonal, 4);
  std::vector<double> gap(m);
  for (int i = 0; i < m; ++i)
    gap[i] = xs[i].eigenvalues[1] - xs[i].eigenvalues[0];

  // binned counts against exact masses e^{-lo^2/4} - e^{-hi^2/4}
  const int bins = 20;
  const double hi = 6.0, w = hi / bins;
  std::vector<int> count(bins, 0);
  for (double s : gap) {
    int b = static_cast<int>(s / w);
    if (b >= 0 && b < bins) ++count[b];
  }
  int outliers = 0;
  for (int b = 0; b < bins; ++b) {
    double lo_edge = b * w, hi_edge = (b + 1) * w;
    double p = std::exp(-lo_edge * lo_edge / 4.0) -
               std::exp(-hi_edge * hi_edge / 4.0);
    double se = std::sqrt(p * (1.0 - p) / m);
    double z = (static_cast<double>(count[b]) / m - p) / se;
    CHECK(std::fabs(z) < 4.5);
    if (std::fabs(z) > 3.0) ++outliers;
  }
  CHECK(outliers <= 1);

  // the dense model for the same two-level ensemble agrees (two-sample KS)
  const int md = 10000;
  auto ds = sample_many(1, 2, 4321, 0, md, SampleMethod::Dense);
  std::vector<double> gap_d(md);
  for (int i = 0; i < md; ++i)
    gap_d[i] = ds[i].eigenvalues[1] - ds[i].eigenvalues[0];
  std::vector<double> gap_t(gap.begin(), gap.begin() + md);
  CHECK(ks_statistic(gap_t, gap_d) <
        1.628 * std::sqrt((md + md) / (static_cast<double>(md) * md)));

  // one-sample KS against F(s) = 1 - e^{-s^2/4} (1% critical 1.628/sqrt(m))
  std::sort(gap.begin(), gap.end());
  double d = 0;
  for (int i = 0; i < m; ++i) {
    double f = 1.0 - std::exp(-gap[i] * gap[i] / 4.0);
    d = std::max(d, std::fabs(f - (i + 1.0) / m));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / m));
  }
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(m)));

  // mean spacing sqrt(pi), sd sqrt(4 - pi)
  CHECK(std::fabs(mean_of(gap) - std::sqrt(M_PI)) <
        5.0 * std::sqrt((4.0 - M_PI) / m));
}

TEST_CASE("histogram estimators") {
  std::vector<SpectrumSample> xs(2);
  xs[0].eigenvalues = {0.5, 1.5};
  xs[1].eigenvalues = {0.5, 2.5};

  auto h = density_histogram(xs, 0.0, 3.0, 3);
  CHECK(h.dims == 1);
  CHECK(h.samples == 2);
  CHECK(h.cell() == doctest::Approx(1.0));
  REQUIRE(h.counts.size() == 3);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 1);
  CHECK(h.counts[2] == 1);
  CHECK(h.density(0) == doctest::Approx(1.0));
  CHECK(h.density(1) == doctest::Approx(0.5));
  CHECK(h.stderr_at(0) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(h.center(0) == doctest::Approx(0.5));
  CHECK(h.center(2) == doctest::Approx(2.5));

  // out-of-range values are dropped but the sample still counts
  std::vector<SpectrumSample> ys = xs;
  ys.push_back({});
  ys[2].eigenvalues = {-1.0, 10.0};
  auto h3 = density_histogram(ys, 0.0, 3.0, 3);
  CHECK(h3.samples == 3);
  CHECK(h3.counts[0] == 2);
  CHECK(h3.density(0) == doctest::Approx(2.0 / 3.0));

  // ordered pairs land symmetrically off the diagonal
  std::vector<SpectrumSample> ps(1);
  ps[0].eigenvalues = {0.5, 1.5};
  auto hp = pair_histogram(ps, 0.0, 3.0, 3);
  CHECK(hp.dims == 2);
  REQUIRE(hp.counts.size() == 9);
  CHECK(hp.counts[0 * 3 + 1] == 1);
  CHECK(hp.counts[1 * 3 + 0] == 1);
  CHECK(std::accumulate(hp.counts.begin(), hp.counts.end(), 0ull) == 2);
  CHECK(hp.cell() == doctest::Approx(1.0));
  CHECK(hp.density(1) == doctest::Approx(1.0));

  // a sample with k in-range levels contributes k(k-1) ordered pairs
  std::vector<SpectrumSample> zs(1);
  zs[0].eigenvalues = {0.2, 0.4, 1.2, 2.9};
  auto hz = pair_histogram(zs, 0.0, 3.0, 3);
  CHECK(std::accumulate(hz.counts.begin(), hz.counts.end(), 0ull) == 12);

  CHECK_THROWS_AS(density_histogram(xs, 1.0, 1.0, 3), ValidationError);
  CHECK_THROWS_AS(density_histogram(xs, 0.0, 3.0, 0), ValidationError);
  CHECK_THROWS_AS(density_histogram({}, 0.0, 3.0, 3), ValidationError);
}

TEST_CASE("comparison rule") {
  HistogramEstimate h;
  h.lo = 0.0;
  h.hi = 2.0;
  h.bins = 2;
  h.dims = 1;
  h.samples = 100;
  h.counts = {100, 200};

  // analytic equal to the estimate: all z vanish
  std::vector<double> exact = {h.density(0), h.density(1)};
  auto rep = compare_histogram(h, exact);
  CHECK(rep.outliers == 0);
  CHECK(rep.chi2 == doctest::Approx(0.0));
  CHECK(rep.pass);
  CHECK(rep.z.size() == 2);

  // one 10-sigma bin is within the minimum allowance of one outlier
  std::vector<double> off1 = exact;
  off1[0] += 10.0 * h.stderr_at(0);
  auto rep1 = compare_histogram(h, off1);
  CHECK(rep1.outliers == 1);
  CHECK(rep1.z[0] == doctest::Approx(-10.0).epsilon(1e-12));
  CHECK(rep1.pass);

  // twenty bins with two gross outliers fail the one-in-twenty rule
  HistogramEstimate h20;
  h20.lo = 0.0;
  h20.hi = 20.0;
  h20.bins = 20;
  h20.dims = 1;
  h20.samples = 100;
  h20.counts.assign(20, 400);
  std::vector<double> a20(20, h20.density(0));
  a20[3] += 8.0 * h20.stderr_at(3);
  a20[11] -= 8.0 * h20.stderr_at(11);
  auto rep20 = compare_histogram(h20, a20);
  CHECK(rep20.outliers == 2);
  CHECK_FALSE(rep20.pass);

  CHECK_THROWS_AS(compare_histogram(h, std::vector<double>(3, 0.0)),
                  ValidationError);

  // KS helper sanity: identical samples give zero, disjoint give one
  CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == doctest::Approx(0.0));
  CHECK(ks_statistic({1, 2}, {5, 6}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ks_statistic({}, {1.0}), ValidationError);
}

namespace {

// A histogram estimates the cell average, so the analytic comparator must
// be cell-averaged as well (the finite-size densities oscillate within a
// bin). Simpson with four intervals per axis.
template <class F>
double bin_average(const F& f, double a, double b) {
  double h = (b - a) / 4.0;
  return (f(a) + 4.0 * f(a + h) + 2.0 * f(a + 2.0 * h) + 4.0 * f(a + 3.0 * h) +
          f(b)) /
         12.0;
}

template <class F>
double cell_average(const F& f, double ax, double bx, double ay, double by) {
  static const double wgt[5] = {1.0, 4.0, 2.0, 4.0, 1.0};
  double hx = (bx - ax) / 4.0, hy = (by - ay) / 4.0;
  double s = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      s += wgt[i] * wgt[j] * f(ax + i * hx, ay + j * hy);
  return s / 144.0;
}

// The pair correlation vanishes like |x-y| across the diagonal, so cells
// straddling it hold a kinked integrand: integrate the smooth lower
// triangle y < x (the function is symmetric) and double.
template <class F>
double diagonal_cell_average(const F& f, double a, double b) {
  const GaussLegendre& gl = gauss_legendre_unit(12);
  double w = b - a, acc = 0;
  for (std::size_t i = 0; i < gl.x.size(); ++i)
    for (std::size_t j = 0; j < gl.x.size(); ++j) {
      double si = 0.5 * (to_double(gl.x[i]) + 1.0);
      double tj = 0.5 * (to_double(gl.x[j]) + 1.0);
      double wi = 0.5 * to_double(gl.w[i]);
      double wj = 0.5 * to_double(gl.w[j]);
      acc += wi * wj * si * f(a + w * si, a + w * si * tj);
    }
  return 2.0 * acc;
}

}  // namespace

TEST_CASE("sampled spectra match the analytic kernels") {
  PrecisionScope scope(256);
  const int m = 20000;

  {
    // weight e^{-x^2/2}, 8 levels (4 kernel pairs)
    Potential pot(std::vector<double>{0.0, 1.0});
    SkewProducts sp(1, pot, 16);
    SopFamily fam = build_sop(sp, 15, Normalization::Monic);
    KernelSet ks(fam, sp, 4, KernelMethod::GaussianReduced);
    auto rho_f = [&](double x) {
      return to_double(ks.level_density(Real(x)));
    };
    auto r2_f = [&](double x, double y) {
      return to_double(ks.r2(Real(x), Real(y)));
    };

    auto xs = sample_many(1, 8, 2026, 0, m, SampleMethod::Tridiagonal, 4);
    auto h = density_histogram(xs, -4.2, 4.2, 20);
    const double w = (h.hi - h.lo) / h.bins;
    std::vector<double> rho(20);
    for (int b = 0; b < 20; ++b)
      rho[b] = bin_average(rho_f, h.lo + b * w, h.lo + (b + 1) * w);
    auto rep = compare_histogram(h, rho);
    INFO("density outliers: ", rep.outliers, " chi2: ", rep.chi2);
    CHECK(rep.pass);

    // two-point function against the 12x12 pair histogram in the bulk
    auto hp = pair_histogram(xs, -3.6, 3.6, 12);
    const double wp = (hp.hi - hp.lo) / hp.bins;
    std::vector<double> r2a(144);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        r2a[i * 12 + j] =
            (i == j)
                ? diagonal_cell_average(r2_f, hp.lo + i * wp,
                                        hp.lo + (i + 1) * wp)
                : cell_average(r2_f, hp.lo + i * wp, hp.lo + (i + 1) * wp,
                               hp.lo + j * wp, hp.lo + (j + 1) * wp);
    auto rep2 = compare_histogram(hp, r2a);
    INFO("pair outliers: ", rep2.outliers, " chi2: ", rep2.chi2);
    CHECK(rep2.pass);
  }

  {
    // weight e^{-2x^2} with fourfold repulsion, 8 Kramers-distinct levels
    Potential pot(std::vector<double>{0.0, 2.0});
    SkewProducts sp(4, pot, 26);
    SopFamily fam = build_sop(sp, 25, Normalization::Monic);
    KernelSet ks(fam, sp, 8, KernelMethod::GaussianReduced);
    auto rho_f = [&](double x) {
      return to_double(ks.level_density(Real(x)));
    };

    auto xs = sample_many(4, 8, 2027, 0, m, SampleMethod::Tridiagonal, 4);
    auto h = density_histogram(xs, -4.2, 4.2, 20);
    const double w = (h.hi - h.lo) / h.bins;
    std::vector<double> rho(20);
    for (int b = 0; b < 20; ++b)
      rho[b] = bin_average(rho_f, h.lo + b * w, h.lo + (b + 1) * w);
    auto rep = compare_histogram(h, rho);
    INFO("density outliers: ", rep.outliers, " chi2: ", rep.chi2);
    CHECK(rep.pass);
  }
}

TEST_CASE("streams and threads") {
  // thread count must not change results
  auto a = sample_many(1, 6, 9, 100, 40, SampleMethod::Tridiagonal, 1);
  auto b = sample_many(1, 6, 9, 100, 40, SampleMethod::Tridiagonal, 4);
  REQUIRE(a.size() == 40);
  REQUIRE(b.size() == 40);
  for (int i = 0; i < 40; ++i) CHECK(a[i].eigenvalues == b[i].eigenvalues);

  // smallest eigenvalue decorrelates across adjacent streams
  const int m = 2000;
  auto xs = sample_many(1, 4, 7, 0, m + 1, SampleMethod::Tridiagonal, 4);
  std::vector<double> u(m), v(m);
  for (int i = 0; i < m; ++i) {
    u[i] = xs[i].eigenvalues[0];
    v[i] = xs[i + 1].eigenvalues[0];
  }
  double mu = mean_of(u), mv = mean_of(v);
  double num = 0, du = 0, dv = 0;
  for (int i = 0; i < m; ++i) {
    num += (u[i] - mu) * (v[i] - mv);
    du += (u[i] - mu) * (u[i] - mu);
    dv += (v[i] - mv) * (v[i] - mv);
  }
  CHECK(std::fabs(num / std::sqrt(du * dv)) < 3.0 / std::sqrt(double(m)));

  CHECK(sample_many(1, 4, 0, 0, 0, SampleMethod::Dense).empty());
  CHECK_THROWS_AS(sample_many(1, 4, 0, 0, -1, SampleMethod::Dense),
                  ValidationError);
}
