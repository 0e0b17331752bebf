#include "skewop/rmtmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "skewop/eigen_tridiag.hpp"
#include "skewop/errors.hpp"

namespace skewop {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, std::uint32_t k0,
                         std::uint32_t k1) {
  std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
  std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
  std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_block(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key) {
  auto x = counter;
  std::uint32_t k0 = key[0];
  std::uint32_t k1 = key[1];
  for (int r = 0; r < 10; ++r) {
    philox_round(x, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return x;
}

Philox::Philox(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

std::uint32_t Philox::next_u32() {
  if (used_ == 4) {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32)};
    block_ = philox4x32_block(ctr, key_);
    ++counter_;
    used_ = 0;
  }
  return block_[used_++];
}

double Philox::next_uniform() {
  std::uint64_t hi = next_u32();
  std::uint64_t lo = next_u32();
  std::uint64_t u = (hi << 32) | lo;
  // 53 significant bits, offset half a step: strictly inside (0, 1)
  return static_cast<double>(u >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double Philox::next_normal() {
  double u = next_uniform();
  return std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
}

double Philox::next_chi(double k) {
  if (!(k > 0))
    throw ValidationError("chi variate: degrees of freedom must be positive");
  double u = next_uniform();
  return std::sqrt(2.0 * boost::math::gamma_p_inv(k / 2.0, u));
}

std::string to_string(SampleMethod m) {
  return m == SampleMethod::Tridiagonal ? "tridiagonal" : "dense";
}

SampleMethod sample_method_from_string(const std::string& s) {
  if (s == "tridiagonal") return SampleMethod::Tridiagonal;
  if (s == "dense") return SampleMethod::Dense;
  throw ValidationError("unknown sample method: " + s);
}

namespace {

std::vector<double> tridiagonal_draw(int beta, int n, Philox& rng) {
  std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
  for (int i = 0; i < n; ++i) diag[i] = rng.next_normal();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i + 1 < n; ++i)
    off[i] = rng.next_chi(static_cast<double>(beta) * (n - 1 - i)) * inv_sqrt2;
  auto ev = tridiagonal_eigenvalues_ql(std::move(diag), std::move(off));
  // general-beta model carries weight exp(-x^2/2); rescale onto the target
  // weight (exp(-x^2/2) for beta=1, exp(-2 x^2) for beta=4)
  const double scale = 1.0 / std::sqrt(static_cast<double>(beta));
  for (double& x : ev) x *= scale;
  return ev;
}

std::vector<double> dense_draw_beta1(int n, Philox& rng) {
  // weight exp(-tr H^2 / 2): diagonal N(0,1), off-diagonal N(0,1/2)
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = (i == j) ? rng.next_normal() : rng.next_normal() * inv_sqrt2;
      a[static_cast<std::size_t>(i) * n + j] = v;
      a[static_cast<std::size_t>(j) * n + i] = v;
    }
  }
  return dense_symmetric_eigenvalues(std::move(a), n);
}

std::vector<double> dense_draw_beta4(int n_pairs, Philox& rng) {
  // Self-dual matrix C = [[A, B], [-conj(B), conj(A)]] with A Hermitian and
  // B antisymmetric, weight exp(-tr C^2) over the doubled representation:
  //   tr C^2 = 2 sum_i A_ii^2 + 4 sum_{i<j} |A_ij|^2 + 4 sum_{i<j} |B_ij|^2,
  // so A_ii ~ N(0,1/4) and each remaining real component ~ N(0,1/8).
  const int m = 2 * n_pairs;  // complex dimension
  std::vector<double> re(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> im(static_cast<std::size_t>(m) * m, 0.0);
  auto set_herm = [&](int i, int j, double xr, double xi) {
    re[static_cast<std::size_t>(i) * m + j] = xr;
    im[static_cast<std::size_t>(i) * m + j] = xi;
    re[static_cast<std::size_t>(j) * m + i] = xr;
    im[static_cast<std::size_t>(j) * m + i] = -xi;
  };
  const double s8 = 1.0 / std::sqrt(8.0);
  for (int i = 0; i < n_pairs; ++i) {
    double d = rng.next_normal() * 0.5;
    set_herm(i, i, d, 0.0);
    set_herm(n_pairs + i, n_pairs + i, d, 0.0);
  }
  for (int i = 0; i < n_pairs; ++i) {
    for (int j = i + 1; j < n_pairs; ++j) {
      double ar = rng.next_normal() * s8;
      double ai = rng.next_normal() * s8;
      set_herm(i, j, ar, ai);
      set_herm(n_pairs + i, n_pairs + j, ar, -ai);
    }
  }
  for (int i = 0; i < n_pairs; ++i) {
    for (int j = i + 1; j < n_pairs; ++j) {
      double br = rng.next_normal() * s8;
      double bi = rng.next_normal() * s8;
      set_herm(i, n_pairs + j, br, bi);
      set_herm(j, n_pairs + i, -br, -bi);
    }
  }
  // real embedding [[X, -Y], [Y, X]] of X + iY doubles each eigenvalue
  const int r = 2 * m;
  std::vector<double> emb(static_cast<std::size_t>(r) * r, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double xr = re[static_cast<std::size_t>(i) * m + j];
      double xi = im[static_cast<std::size_t>(i) * m + j];
      emb[static_cast<std::size_t>(i) * r + j] = xr;
      emb[static_cast<std::size_t>(i) * r + (m + j)] = -xi;
      emb[static_cast<std::size_t>(m + i) * r + j] = xi;
      emb[static_cast<std::size_t>(m + i) * r + (m + j)] = xr;
    }
  }
  auto ev = dense_symmetric_eigenvalues(std::move(emb), r);
  // each Kramers-distinct level appears four times; average each run of
  // four to suppress the solver's round-off splitting
  std::vector<double> out(n_pairs);
  for (int k = 0; k < n_pairs; ++k)
    out[k] = 0.25 * (ev[4 * k] + ev[4 * k + 1] + ev[4 * k + 2] + ev[4 * k + 3]);
  return out;
}

}  // namespace

SpectrumSample sample_spectrum(int beta, int levels, std::uint64_t seed,
                               std::uint64_t stream, SampleMethod method) {
  if (beta != 1 && beta != 4)
    throw ValidationError("sampler: beta must be 1 or 4");
  if (levels < 1) throw ValidationError("sampler: levels must be positive");
  Philox rng(seed, stream);
  SpectrumSample out;
  out.beta = beta;
  if (method == SampleMethod::Tridiagonal) {
    out.eigenvalues = tridiagonal_draw(beta, levels, rng);
  } else if (beta == 1) {
    out.eigenvalues = dense_draw_beta1(levels, rng);
  } else {
    out.eigenvalues = dense_draw_beta4(levels, rng);
  }
  return out;
}

std::vector<SpectrumSample> sample_many(int beta, int levels,
                                        std::uint64_t seed,
                                        std::uint64_t stream0, int count,
                                        SampleMethod method, int threads) {
  if (count < 0) throw ValidationError("sample_many: count must be >= 0");
  std::vector<SpectrumSample> out(static_cast<std::size_t>(count));
  int nthreads = std::max(1, std::min(threads, count));
  if (nthreads == 1) {
    for (int i = 0; i < count; ++i)
      out[static_cast<std::size_t>(i)] =
          sample_spectrum(beta, levels, seed, stream0 + i, method);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    try {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        out[static_cast<std::size_t>(i)] =
            sample_spectrum(beta, levels, seed, stream0 + i, method);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

double HistogramEstimate::cell() const {
  double w = (hi - lo) / bins;
  return dims == 2 ? w * w : w;
}

double HistogramEstimate::density(int flat) const {
  return static_cast<double>(counts[static_cast<std::size_t>(flat)]) /
         (static_cast<double>(samples) * cell());
}

double HistogramEstimate::stderr_at(int flat) const {
  double c = static_cast<double>(counts[static_cast<std::size_t>(flat)]);
  return std::sqrt(std::max(c, 1.0)) / (static_cast<double>(samples) * cell());
}

double HistogramEstimate::center(int axis_index) const {
  return lo + (axis_index + 0.5) * (hi - lo) / bins;
}

namespace {

HistogramEstimate make_histogram(double lo, double hi, int bins, int dims,
                                 std::uint64_t samples) {
  if (!(hi > lo)) throw ValidationError("histogram: need hi > lo");
  if (bins < 1) throw ValidationError("histogram: need at least one bin");
  if (samples == 0) throw ValidationError("histogram: no samples");
  HistogramEstimate h;
  h.lo = lo;
  h.hi = hi;
  h.bins = bins;
  h.dims = dims;
  h.samples = samples;
  h.counts.assign(dims == 2 ? static_cast<std::size_t>(bins) * bins
                            : static_cast<std::size_t>(bins),
                  0);
  return h;
}

inline int bin_of(double x, double lo, double hi, int bins) {
  if (!(x >= lo) || !(x < hi)) return -1;
  int b = static_cast<int>((x - lo) / (hi - lo) * bins);
  return std::min(b, bins - 1);
}

}  // namespace

HistogramEstimate density_histogram(const std::vector<SpectrumSample>& samples,
                                    double lo, double hi, int bins) {
  HistogramEstimate h = make_histogram(lo, hi, bins, 1, samples.size());
  for (const auto& s : samples) {
    for (double x : s.eigenvalues) {
      int b = bin_of(x, lo, hi, bins);
      if (b >= 0) ++h.counts[static_cast<std::size_t>(b)];
    }
  }
  return h;
}

HistogramEstimate pair_histogram(const std::vector<SpectrumSample>& samples,
                                 double lo, double hi, int bins) {
  HistogramEstimate h = make_histogram(lo, hi, bins, 2, samples.size());
  for (const auto& s : samples) {
    const auto& ev = s.eigenvalues;
    const int n = static_cast<int>(ev.size());
    for (int i = 0; i < n; ++i) {
      int bi = bin_of(ev[static_cast<std::size_t>(i)], lo, hi, bins);
      if (bi < 0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        int bj = bin_of(ev[static_cast<std::size_t>(j)], lo, hi, bins);
        if (bj >= 0)
          ++h.counts[static_cast<std::size_t>(bi) * bins +
                     static_cast<std::size_t>(bj)];
      }
    }
  }
  return h;
}

CompareReport compare_histogram(const HistogramEstimate& estimate,
                                const std::vector<double>& analytic) {
  if (analytic.size() != estimate.counts.size())
    throw ValidationError("compare: analytic grid size mismatch");
  CompareReport rep;
  rep.z.resize(analytic.size());
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    int flat = static_cast<int>(i);
    double z = (estimate.density(flat) - analytic[i]) / estimate.stderr_at(flat);
    rep.z[i] = z;
    if (std::fabs(z) > 3.0) ++rep.outliers;
    rep.chi2 += z * z;
  }
  rep.pass = rep.outliers <= std::max<int>(1, static_cast<int>(analytic.size()) / 20);
  return rep;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw ValidationError("ks statistic: samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace skewop
