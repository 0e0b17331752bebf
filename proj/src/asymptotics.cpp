#include "skewop/asymptotics.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "skewop/errors.hpp"

namespace skewop {

namespace {

constexpr double kPi = std::numbers::pi;

void require_beta(int beta) {
  if (beta != 1 && beta != 4) {
    throw ValidationError("asymptotics: beta must be 1 or 4, got " +
                          std::to_string(beta));
  }
}

// theta, sin(theta) and the radius for a bulk point of the index-n pair
struct BulkPoint {
  double radius = 0;
  double theta = 0;
  double sin_theta = 0;
};

BulkPoint bulk_point(int beta, int n, double x) {
  if (n < 20) {
    throw ValidationError(
        "asymptotic quasi-polynomials require pair index n >= 20, got " +
        std::to_string(n));
  }
  BulkPoint p;
  p.radius = pair_radius(beta, n);
  if (std::abs(x) >= 0.95 * p.radius) {
    throw ValidationError("asymptotic quasi-polynomials need a bulk point: "
                          "|x| = " +
                          std::to_string(std::abs(x)) +
                          " is not below 0.95 * radius = " +
                          std::to_string(0.95 * p.radius));
  }
  double c = x / p.radius;
  p.theta = std::acos(c);  // branch in (0, pi)
  p.sin_theta = std::sqrt((1 - c) * (1 + c));
  return p;
}

// numerator of the four-entry reduced quotient with the large-N entries;
// the straddling R entry is zero in the cancelling gauge
double reduced_numerator(int beta, int N, double x, double y) {
  auto at = [&](double t, double* f) {
    AsymptoticPair lo =
        beta == 4 ? phi4_asymptotic(N - 1, t) : psi1_asymptotic(N - 1, t);
    AsymptoticPair hi = beta == 4 ? phi4_asymptotic(N, t) : psi1_asymptotic(N, t);
    f[0] = lo.even;
    f[1] = lo.odd;
    f[2] = hi.even;
    f[3] = hi.odd;
  };
  double fx[4], fy[4];
  at(x, fx);
  at(y, fy);
  auto w = [&](int j, int k) { return fx[j] * fy[k] - fy[j] * fx[k]; };
  double p12 = beta == 4 ? -4.0 * N / std::sqrt(2.0) : double(N);
  double r02 = -double(N);
  double r13 = -double(N);
  double lead = (beta == 4 ? x : y) * p12;
  return lead * w(0, 2) + r02 * w(1, 2) - r13 * w(0, 3);
}

}  // namespace

double pair_radius(int beta, int n) {
  require_beta(beta);
  return beta == 4 ? std::sqrt(2.0 * n + 1.5) : std::sqrt(4.0 * n + 1.0);
}

double f_phase(int beta, int n, double theta) {
  require_beta(beta);
  if (!(theta > 0 && theta < kPi)) {
    throw ValidationError("f_phase requires theta in (0, pi), got " +
                          std::to_string(theta));
  }
  double c = n + (beta == 4 ? 0.75 : 0.25);
  return c * (std::sin(2 * theta) - 2 * theta) + 3 * kPi / 4;
}

double f_phase_integral(int beta, int n, double x) {
  double R = pair_radius(beta, n);
  if (!(std::abs(x) <= R)) {
    throw ValidationError("f_phase_integral requires |x| <= radius = " +
                          std::to_string(R));
  }
  boost::math::quadrature::tanh_sinh<double> integrator;
  double integral = x >= R ? 0.0
                           : integrator.integrate(
                                 [R](double t) {
                                   return std::sqrt((R - t) * (R + t));
                                 },
                                 x, R, 1e-12);
  double multiplicity = beta == 4 ? 2.0 : 1.0;
  return 3 * kPi / 4 - multiplicity * integral;
}

AsymptoticPair phi4_asymptotic(int n, double x) {
  BulkPoint p = bulk_point(4, n, x);
  double f = f_phase(4, n, p.theta);
  double s = p.sin_theta;
  AsymptoticPair out;
  out.odd = std::sin(f) / (std::pow(n, 0.25) * std::sqrt(kPi * s));
  out.even = (std::cos(f) / (2 * std::sqrt(2 * n * kPi * s * s * s)) + 0.5) /
             std::pow(4.0 * n, 0.25);
  return out;
}

AsymptoticPair psi1_asymptotic(int n, double x) {
  BulkPoint p = bulk_point(1, n, x);
  double f = f_phase(1, n, p.theta);
  double s = p.sin_theta;
  AsymptoticPair out;
  out.odd = std::sin(f) / (std::pow(n, 0.25) * std::sqrt(kPi * s));
  out.even =
      -std::cos(f) / (2 * std::pow(n, 0.25) * std::sqrt(n * kPi * s * s * s));
  return out;
}

double bulk_kernel(int beta, int N, double x, double delta_x) {
  require_beta(beta);
  double edge2 = beta == 4 ? 2.0 * N : 4.0 * N;
  if (!(x * x < edge2)) {
    throw ValidationError(
        "bulk_kernel requires |x| inside the support, |x| = " +
        std::to_string(std::abs(x)) + " vs edge = " +
        std::to_string(std::sqrt(edge2)));
  }
  double k = std::sqrt(edge2 - x * x);
  if (beta == 4) {
    return delta_x == 0 ? k / kPi
                        : std::sin(2 * k * delta_x) / (2 * kPi * delta_x);
  }
  return delta_x == 0 ? k / kPi : std::sin(k * delta_x) / (kPi * delta_x);
}

double sine_kernel_ratio(int beta, double r) {
  require_beta(beta);
  if (r == 0) return 1.0;
  double z = (beta == 4 ? 2 * kPi : kPi) * r;
  return std::sin(z) / z;
}

double semicircle_density(int beta, int N, double x) {
  require_beta(beta);
  double edge2 = beta == 4 ? 2.0 * N : 4.0 * N;
  double rest = edge2 - x * x;
  return rest <= 0 ? 0.0 : std::sqrt(rest) / kPi;
}

double kernel_S_asymptotic(int beta, int N, double x, double y) {
  require_beta(beta);
  if (N < 21) {
    throw ValidationError(
        "kernel_S_asymptotic requires N >= 21 so both pairs sit in the "
        "asymptotic regime, got N = " +
        std::to_string(N));
  }
  if (x == y) {
    double h =
        std::cbrt(std::numeric_limits<double>::epsilon()) * (1 + std::abs(x));
    double d = (reduced_numerator(beta, N, x, x + h) -
                reduced_numerator(beta, N, x, x - h)) /
               (2 * h);
    return beta == 4 ? -d : d;
  }
  double num = reduced_numerator(beta, N, x, y);
  return num / (beta == 4 ? x - y : y - x);
}

double semicircle_deviation(const KernelSet& ks, double fraction,
                            int grid_points, int window_samples) {
  if (!(fraction > 0 && fraction < 1) || grid_points < 2 ||
      window_samples < 3) {
    throw ValidationError("semicircle_deviation: need 0 < fraction < 1, "
                          "grid_points >= 2, window_samples >= 3");
  }
  int beta = ks.beta();
  int N = ks.N();
  double edge2 = beta == 4 ? 2.0 * N : 4.0 * N;
  double edge = std::sqrt(edge2);
  double peak = edge / kPi;
  double worst = 0;
  for (int i = 0; i < grid_points; ++i) {
    double x = -fraction * edge + 2 * fraction * edge * i / (grid_points - 1);
    double window = kPi / std::sqrt(edge2 - x * x);
    // trapezoid over one full oscillation period: cancels the oscillatory
    // component of the finite-N density, leaving the systematic deviation
    double acc = 0;
    for (int j = 0; j < window_samples; ++j) {
      double t = x - window / 2 + window * j / (window_samples - 1);
      double diff =
          to_double(ks.level_density(Real(t))) - semicircle_density(beta, N, t);
      acc += (j == 0 || j == window_samples - 1) ? diff / 2 : diff;
    }
    acc /= window_samples - 1;
    worst = std::max(worst, std::abs(acc) / peak);
  }
  return worst;
}

}  // namespace skewop
