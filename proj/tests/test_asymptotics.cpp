#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "skewop/asymptotics.hpp"
#include "skewop/errors.hpp"
#include "skewop/kernels.hpp"

using namespace skewop;

namespace {

constexpr double kPi = std::numbers::pi;

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (std::abs(a) + std::abs(b) + 1e-300);
}

}  // namespace

TEST_CASE("oscillation phase closed form") {
  // At the band center (theta = pi/2) the sin(2 theta) term vanishes and the
  // phase reduces to -n pi (beta=4) or -n pi + pi/2 (beta=1).
  for (int n : {1, 5, 20, 137}) {
    double tol = 1e-12 * (1.0 + n * kPi);
    CHECK(std::abs(f_phase(4, n, kPi / 2) - (-n * kPi)) <= tol);
    CHECK(std::abs(f_phase(1, n, kPi / 2) - (-n * kPi + kPi / 2)) <= tol);
  }

  // pinned values
  CHECK(close_rel(f_phase(4, 50, 0.9), -39.571038242739249, 1e-13));
  CHECK(close_rel(f_phase(1, 50, 0.9), -39.157962058178347, 1e-13));

  // derivative in theta: d/dtheta [(n+c)(sin 2theta - 2theta)] =
  // -4 (n+c) sin^2 theta, checked against a symmetric finite difference
  const double h = 1e-6;
  for (int beta : {1, 4}) {
    double c = beta == 4 ? 0.75 : 0.25;
    for (int n : {20, 50, 300}) {
      for (double theta : {0.4, 1.1, 2.0, 2.7}) {
        double fd = (f_phase(beta, n, theta + h) - f_phase(beta, n, theta - h)) / (2 * h);
        double closed = -4 * (n + c) * std::sin(theta) * std::sin(theta);
        CHECK(std::abs(fd - closed) <= 1e-6 * (1.0 + std::abs(closed)));
      }
    }
  }

  CHECK_THROWS_AS(f_phase(4, 10, 0.0), ValidationError);
  CHECK_THROWS_AS(f_phase(4, 10, kPi), ValidationError);
  CHECK_THROWS_AS(f_phase(1, 10, -0.2), ValidationError);
  CHECK_THROWS_AS(f_phase(2, 10, 1.0), ValidationError);
}

TEST_CASE("phase integral representation") {
  // The closed form equals 3pi/4 minus (2 for beta=4, 1 for beta=1) times the
  // integral of sqrt(R^2 - t^2) from x to the scaling radius R; the
  // quadrature evaluation must agree to 1e-8.
  for (int beta : {1, 4}) {
    for (int n : {20, 50, 137}) {
      double R = pair_radius(beta, n);
      for (double theta : {0.3, 0.9, 1.5, 2.2, 2.8}) {
        double x = R * std::cos(theta);
        CHECK(std::abs(f_phase(beta, n, theta) - f_phase_integral(beta, n, x)) <= 1e-8);
      }
      // at x = R the integral vanishes and the phase is exactly 3pi/4
      CHECK(std::abs(f_phase_integral(beta, n, R) - 3 * kPi / 4) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(f_phase_integral(1, 20, pair_radius(1, 20) + 0.1), ValidationError);
}

TEST_CASE("asymptotic quasi-polynomial values") {
  // pinned against an independent multiprecision evaluation of the formulas
  AsymptoticPair p4 = phi4_asymptotic(50, 1.0);
  CHECK(close_rel(p4.even, 0.13521990187285863, 1e-12));
  CHECK(close_rel(p4.odd, 0.20293946349583627, 1e-12));

  AsymptoticPair p1 = psi1_asymptotic(50, 0.5);
  CHECK(close_rel(p1.even, 0.010814757471274979, 1e-12));
  CHECK(close_rel(p1.odd, 0.14724515374320324, 1e-12));

  // the odd member is an odd function: it vanishes at the origin
  for (int n : {20, 51, 200, 999}) {
    CHECK(std::abs(phi4_asymptotic(n, 0.0).odd) <= 1e-12);
  }

  // domain: the expansion is restricted to the bulk and to n >= 20
  CHECK_THROWS_AS(phi4_asymptotic(19, 0.5), ValidationError);
  CHECK_THROWS_AS(psi1_asymptotic(19, 0.5), ValidationError);
  CHECK_THROWS_AS(phi4_asymptotic(50, 0.96 * pair_radius(4, 50)), ValidationError);
  CHECK_THROWS_AS(psi1_asymptotic(50, -0.97 * pair_radius(1, 50)), ValidationError);
}

TEST_CASE("asymptotics match the exact construction") {
  // Build the degree-101 quadratic-weight families exactly and compare the
  // index-50 pair against the closed-form asymptotics. The expansion carries
  // O(1/n) corrections, so 5% relative agreement is the honest bar.
  {
    PrecisionScope scope(384);
    Potential pot(std::vector<double>{0.0, 2.0});
    SkewProducts sp(4, pot, 102);
    SopFamily fam = build_sop(sp, 101, Normalization::PaperGaussian);
    double exact_even = to_double(fam.phi(100, Real(1)));
    double exact_odd = to_double(fam.phi(101, Real(1)));
    AsymptoticPair a = phi4_asymptotic(50, 1.0);
    CHECK(close_rel(a.even, exact_even, 0.05));
    CHECK(close_rel(a.odd, exact_odd, 0.05));
  }
  {
    PrecisionScope scope(384);
    Potential pot(std::vector<double>{0.0, 1.0});
    SkewProducts sp(1, pot, 102);
    SopFamily fam = build_sop(sp, 101, Normalization::PaperGaussian);
    // the partner in the kernel carries the halved sign-transform
    double exact_even = to_double(fam.psi(100, Real("0.5"), sp)) / 2;
    double exact_odd = to_double(fam.psi(101, Real("0.5"), sp)) / 2;
    AsymptoticPair a = psi1_asymptotic(50, 0.5);
    CHECK(close_rel(a.even, exact_even, 0.05));
    CHECK(close_rel(a.odd, exact_odd, 0.05));
  }
}

TEST_CASE("bulk kernel closed form") {
  // zero-separation limit is the semicircle
  CHECK(close_rel(bulk_kernel(1, 20, 1.5, 0.0), std::sqrt(80 - 2.25) / kPi, 1e-15));
  CHECK(close_rel(bulk_kernel(4, 20, 1.5, 0.0), std::sqrt(40 - 2.25) / kPi, 1e-15));
  CHECK(close_rel(bulk_kernel(1, 20, 1.5, 1e-9), std::sqrt(80 - 2.25) / kPi, 1e-12));
  CHECK(close_rel(bulk_kernel(4, 20, 1.5, 1e-9), std::sqrt(40 - 2.25) / kPi, 1e-12));

  // unit r = dx * S(x,x) lands on the first zero of the sine
  {
    double s0 = bulk_kernel(1, 30, 0.7, 0.0);
    CHECK(std::abs(bulk_kernel(1, 30, 0.7, 1.0 / s0) / s0) <= 1e-14);
  }
  {
    double s0 = bulk_kernel(4, 30, 0.7, 0.0);
    CHECK(std::abs(bulk_kernel(4, 30, 0.7, 0.5 / s0) / s0) <= 1e-14);
  }

  // the oscillation wavelength is pi / sqrt(edge^2 - x^2) for beta=1
  for (double x : {0.0, 2.1}) {
    double dx = kPi / std::sqrt(4 * 25 - x * x);
    CHECK(std::abs(bulk_kernel(1, 25, x, dx)) <= 1e-14);
  }

  CHECK_THROWS_AS(bulk_kernel(1, 10, std::sqrt(40.0) + 0.1, 0.1), ValidationError);
  CHECK_THROWS_AS(bulk_kernel(4, 10, -4.48, 0.0), ValidationError);
  CHECK_THROWS_AS(bulk_kernel(3, 10, 0.0, 0.1), ValidationError);
}

TEST_CASE("sine kernel ratio") {
  CHECK(sine_kernel_ratio(1, 0.0) == 1.0);
  CHECK(sine_kernel_ratio(4, 0.0) == 1.0);
  CHECK(close_rel(sine_kernel_ratio(1, 0.5), 2 / kPi, 1e-15));
  CHECK(std::abs(sine_kernel_ratio(4, 0.5)) <= 1e-15);
  CHECK(std::abs(sine_kernel_ratio(1, 1.0)) <= 1e-15);
  CHECK(close_rel(sine_kernel_ratio(1, 0.25), sine_kernel_ratio(4, 0.125), 1e-15));
  CHECK_THROWS_AS(sine_kernel_ratio(2, 0.5), ValidationError);
}

TEST_CASE("semicircle density") {
  CHECK(close_rel(semicircle_density(1, 25, 0.0), 2 * 5 / kPi, 1e-15));
  CHECK(close_rel(semicircle_density(4, 25, 0.0), std::sqrt(50.0) / kPi, 1e-15));
  CHECK(semicircle_density(1, 25, 10.0) == 0.0);
  CHECK(semicircle_density(1, 25, -10.0) == 0.0);
  CHECK(semicircle_density(4, 25, std::sqrt(50.0)) == 0.0);
  CHECK(semicircle_density(1, 25, 10.0 + 1e-9) == 0.0);

  // the beta=1 density integrates to 2N exactly (semicircle area); Simpson
  // on the arc-parametrized integrand integral sqrt(e^2-x^2), x = e sin t
  for (int N : {7, 25}) {
    double e = std::sqrt(4.0 * N);
    int panels = 2000;
    double h = kPi / panels;  // t in [-pi/2, pi/2]
    double acc = 0;
    for (int i = 0; i <= panels; ++i) {
      double t = -kPi / 2 + i * h;
      double x = e * std::sin(t);
      double f = semicircle_density(1, N, x) * e * std::cos(t);
      acc += (i == 0 || i == panels) ? f : (i % 2 ? 4 * f : 2 * f);
    }
    acc *= h / 3;
    CHECK(std::abs(acc - 2.0 * N) <= 1e-8 * N);
  }
}

TEST_CASE("asymptotic kernel evaluator") {
  // Pinned against an independent multiprecision assembly of the reduced
  // quotient with the large-N operator entries. The beta=4 value sits on a
  // two-order cancellation between the R terms, so double rounding of the
  // O(500 pi) phase costs ~1e-10 of it.
  CHECK(close_rel(kernel_S_asymptotic(1, 500, 0.0, 0.1), -3.0939200115293345, 1e-12));
  CHECK(close_rel(kernel_S_asymptotic(4, 500, 0.0, 0.05), 0.21368183802555429, 1e-9));

  // diagonal reproduces the semicircle at the origin; the beta=4 value
  // carries a known O(1/sqrt(N)) relative background residual
  CHECK(close_rel(kernel_S_asymptotic(1, 500, 0.0, 0.0), semicircle_density(1, 500, 0.0), 0.01));
  CHECK(close_rel(kernel_S_asymptotic(4, 500, 0.0, 0.0), semicircle_density(4, 500, 0.0), 0.04));

  // agreement with the closed-form bulk kernel off the origin (beta=1)
  for (double x : {0.0, 3.0}) {
    for (double dx : {0.05, 0.1, 0.2}) {
      CHECK(std::abs(kernel_S_asymptotic(1, 500, x, x + dx) -
                     bulk_kernel(1, 500, x, dx)) <= 0.05);
    }
  }

  CHECK_THROWS_AS(kernel_S_asymptotic(1, 20, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(kernel_S_asymptotic(1, 500, 43.0, 43.1), ValidationError);
}

TEST_CASE("sine-kernel limit at five hundred pairs") {
  // normalized two-point kernel against the universal sine kernel over
  // r in [0.1, 3], built purely from the asymptotic quasi-polynomials
  for (int beta : {1, 4}) {
    double s00 = kernel_S_asymptotic(beta, 500, 0.0, 0.0);
    double worst = 0;
    for (int i = 0; i <= 290; ++i) {
      double r = 0.1 + 0.01 * i;
      double dx = r / s00;
      double ratio = kernel_S_asymptotic(beta, 500, 0.0, dx) / s00;
      worst = std::max(worst, std::abs(ratio - sine_kernel_ratio(beta, r)));
    }
    CAPTURE(beta);
    CHECK(worst <= 0.02);
  }
}

TEST_CASE("finite-size density approaches the semicircle") {
  // window-averaged deviation from the semicircle, normalized by the peak,
  // shrinks monotonically as the matrix grows and is below 5% by 2N = 80
  for (int beta : {1, 4}) {
    std::vector<double> devs;
    for (int N : {10, 20, 40}) {
      PrecisionScope scope(320);
      Potential pot(std::vector<double>{0.0, beta == 4 ? 2.0 : 1.0});
      int n_max = 2 * N + 7;
      SkewProducts sp(beta, pot, n_max + 1);
      SopFamily fam = build_sop(sp, n_max, Normalization::Monic);
      KernelSet ks(fam, sp, N, KernelMethod::GaussianReduced);
      devs.push_back(semicircle_deviation(ks));
    }
    CAPTURE(beta);
    CAPTURE(devs[0]);
    CAPTURE(devs[1]);
    CAPTURE(devs[2]);
    CHECK(devs[0] > devs[1]);
    CHECK(devs[1] > devs[2]);
    CHECK(devs[2] <= 0.05);
  }
}
