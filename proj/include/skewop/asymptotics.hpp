#pragma once

// Closed-form large-N expressions for the quadratic-weight ensembles:
// asymptotic quasi-polynomials, the bulk sine kernel, and semicircle
// densities. Everything here is an analytic comparator for the exact
// finite-N machinery and is computed in plain double precision -- the
// formulas are smooth in the bulk of the spectrum.
//
// Conventions (quadratic weights only):
//   beta=4, weight e^{-x^2}:   pair n scales as x = sqrt(2n+3/2) cos(theta),
//     phase f(n,theta) = (n+3/4)(sin 2theta - 2theta) + 3pi/4,
//     phi_{2n+1} = sin f / (n^{1/4} sqrt(pi sin theta)),
//     phi_{2n}   = (4n)^{-1/4} [ cos f / (2 sqrt(2 n pi sin^3 theta)) + 1/2 ].
//   beta=1, weight e^{-x^2/2}: pair n scales as x = sqrt(4n+1) cos(theta),
//     phase f(n,theta) = (n+1/4)(sin 2theta - 2theta) + 3pi/4,
//     psi_{2n+1} = sin f / (n^{1/4} sqrt(pi sin theta)),
//     psi_{2n}   = -cos f / (2 n^{1/4} sqrt(n pi sin^3 theta)),
//   where psi is the halved sign-transform partner entering the kernel.
// The branch theta = arccos(x / radius) in (0, pi) is used throughout.

#include "skewop/kernels.hpp"

namespace skewop {

// scaling radius of the index-n pair: sqrt(2n+3/2) for beta=4,
// sqrt(4n+1) for beta=1
double pair_radius(int beta, int n);

// oscillation phase f(n, theta); requires theta in (0, pi)
double f_phase(int beta, int n, double theta);

// the same phase as 3pi/4 minus (2 for beta=4, 1 for beta=1) times the
// integral of sqrt(radius^2 - t^2) from x to the radius, evaluated by
// quadrature; cross-checks the closed form. Requires |x| <= radius.
double f_phase_integral(int beta, int n, double x);

// asymptotic values of the (2n, 2n+1) pair at x
struct AsymptoticPair {
  double even = 0;
  double odd = 0;
};

// Large-n quasi-polynomials for the weight e^{-x^2} (beta=4) and the
// halved sign-transform partners for e^{-x^2/2} (beta=1). Both require
// n >= 20 and a bulk point |x| < 0.95 * pair_radius; outside that the
// expansion is not trustworthy and a ValidationError is thrown.
AsymptoticPair phi4_asymptotic(int n, double x);
AsymptoticPair psi1_asymptotic(int n, double x);

// closed-form bulk kernel S_{2N}(x, x + delta_x):
//   beta=4: sin(2 sqrt(2N - x^2) dx) / (2 pi dx), |x| < sqrt(2N)
//   beta=1: sin(sqrt(4N - x^2) dx) / (pi dx),     |x| < sqrt(4N)
// delta_x = 0 returns the zero-separation limit (the semicircle density);
// outside the support a ValidationError is thrown.
double bulk_kernel(int beta, int N, double x, double delta_x);

// universal bulk ratio S(x, x+dx)/S(x, x) at r = dx * S(x, x):
// sin(pi r)/(pi r) for beta=1, sin(2 pi r)/(2 pi r) for beta=4; r = 0 -> 1
double sine_kernel_ratio(int beta, double r);

// limiting one-level density: sqrt(4N - x^2)/pi (beta=1, integrates to 2N)
// or sqrt(2N - x^2)/pi (beta=4, integrates to N); zero outside the support
double semicircle_density(int beta, int N, double x);

// S_{2N}(x, y) assembled from the four-entry reduced quotient with the
// large-N operator entries of the quadratic weight
//   beta=4: P = -4N/sqrt(2), R = -N;  beta=1: P = N, R = -N
// and the asymptotic quasi-polynomials above (the remaining straddling
// entry is removed by the gauge choice). Coincident points take a
// symmetric-difference limit. Requires N >= 21 and bulk x, y.
double kernel_S_asymptotic(int beta, int N, double x, double y);

// Sup over |x| <= fraction * edge of the window-averaged
// |level_density - semicircle| / semicircle peak for the ensemble carried
// by ks. The moving-average window at x spans one oscillation wavelength
// pi / sqrt(edge^2 - x^2) of the finite-N density, so the sup tracks the
// systematic deviation rather than the oscillation amplitude.
double semicircle_deviation(const KernelSet& ks, double fraction = 0.8,
                            int grid_points = 41, int window_samples = 17);

}  // namespace skewop
