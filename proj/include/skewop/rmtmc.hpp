#pragma once

// Monte Carlo eigenvalue sampling for the Gaussian orthogonal (beta=1) and
// symplectic (beta=4) ensembles in the conventions used by the kernel
// machinery:
//   beta=1: joint law |Delta(x)|^1 exp(-sum x_i^2/2) over `levels` values
//           (weight e^{-V}, V = x^2/2; support edge sqrt(2*levels)),
//   beta=4: joint law |Delta(x)|^4 exp(-2 sum x_i^2) over `levels`
//           Kramers-distinct values (V = x^2 with the doubled trace;
//           support edge sqrt(2*levels)).
// Two samplers are provided: an explicit dense matrix model and the
// general-beta tridiagonal model (normal diagonal, chi off-diagonals with
// parameter beta*(n-1-i), all divided by sqrt(2), then rescaled by
// edge_target / sqrt(2*beta*levels) so the support edges match).
//
// Randomness is a counter-based generator addressed by (seed, stream):
// every variate is a pure function of that address, so samples are
// bit-reproducible and streams can be assigned to threads freely.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace skewop {

// One keyed block of the 10-round 4x32 counter cipher underlying Philox.
std::array<std::uint32_t, 4> philox4x32_block(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key);

// Counter-based random stream. Uniforms consume two 32-bit words; normals
// and chi variates are inverse-CDF transforms of one uniform each, so the
// variate sequence is a fixed function of (seed, stream).
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  // strictly inside (0,1), 53-bit resolution
  double next_uniform();
  // standard normal by inverse CDF
  double next_normal();
  // chi distribution with k degrees of freedom (k > 0), inverse CDF
  double next_chi(double k);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

enum class SampleMethod { Tridiagonal, Dense };
std::string to_string(SampleMethod m);
SampleMethod sample_method_from_string(const std::string& s);

struct SpectrumSample {
  int beta = 1;
  // ascending; for beta=4 each Kramers pair is reported once
  std::vector<double> eigenvalues;
};

// Draw one spectrum with `levels` distinct eigenvalues. The dense method
// builds the matrix explicitly (beta=4: the doubled self-dual complex
// representation via its real embedding, averaging the degenerate copies);
// the tridiagonal method uses the general-beta model above. Both produce
// the same joint law.
SpectrumSample sample_spectrum(int beta, int levels, std::uint64_t seed,
                               std::uint64_t stream, SampleMethod method);

// Batch sampling across consecutive streams [stream0, stream0 + count);
// the result is independent of the thread count.
std::vector<SpectrumSample> sample_many(int beta, int levels,
                                        std::uint64_t seed,
                                        std::uint64_t stream0, int count,
                                        SampleMethod method, int threads = 1);

// Uniform-bin histogram estimate. For dims == 1 the value estimated is the
// one-level density (levels per sample per unit length); for dims == 2 it
// is the two-level correlation R2 over ordered pairs (i != j). Values
// outside [lo, hi] are dropped.
struct HistogramEstimate {
  double lo = 0;
  double hi = 0;
  int bins = 0;  // per axis
  int dims = 1;
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> counts;  // bins (1-D) or bins*bins row-major

  double cell() const;            // bin width (1-D) or cell area (2-D)
  double density(int flat) const; // counts / (samples * cell)
  // empirical standard error sqrt(max(count,1)) / (samples * cell)
  double stderr_at(int flat) const;
  double center(int axis_index) const;  // bin center along one axis
};

HistogramEstimate density_histogram(const std::vector<SpectrumSample>& samples,
                                    double lo, double hi, int bins);
HistogramEstimate pair_histogram(const std::vector<SpectrumSample>& samples,
                                 double lo, double hi, int bins);

// Per-bin z-scores of a histogram against analytic values at the bin
// centers (same flat layout), the 3-sigma outlier count, the chi-square
// statistic, and the one-in-twenty verdict.
struct CompareReport {
  std::vector<double> z;
  int outliers = 0;
  double chi2 = 0;
  bool pass = false;
};
CompareReport compare_histogram(const HistogramEstimate& estimate,
                                const std::vector<double>& analytic);

// Two-sample Kolmogorov-Smirnov statistic (inputs need not be sorted).
// The 1% critical value for the null is 1.628 * sqrt((m+n)/(m*n)).
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace skewop
