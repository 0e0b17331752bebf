#pragma once

#include <string>
#include <vector>

#include "skewop/polynomial.hpp"
#include "skewop/skewproduct.hpp"
#include "skewop/sopfamily.hpp"

namespace skewop {

// Evaluation strategy for the scalar kernel S. Later entries precompute
// strictly more than earlier ones, so a set built with a later method can
// still evaluate all earlier ones.
enum class KernelMethod { Direct, Gcd, GaussianReduced };

std::string to_string(KernelMethod m);
KernelMethod kernel_method_from_string(const std::string& s);

// off-diagonal ingredients of the two-level correlator
struct Sigma2 {
  Real s_xy, s_yx, d_xy, i_xy;
};

// Correlation kernels of the 2N-point (beta=1) or N-pair (beta=4) ensemble
// built from a skew-orthonormal family. Writing phi_n = Pi_n e^{-V}/sqrt(g_n)
// and pairing it with the partner function (phi' for beta=4, the halved
// sign-transform for beta=1), the scalar kernel is
//   S(x,y) = sum_{k<N} [phi_{2k}(x) part_{2k+1}(y) - phi_{2k+1}(x) part_{2k}(y)]
// and D, I are the antisymmetric companions on the phi and partner sides;
// for beta=1 the I kernel carries the extra -sign(x-y)/2 jump. The
// two-level correlator is
//   R2(x,y) = S(x,x)S(y,y) - S(x,y)S(y,x) + D(x,y)I(x,y).
//
// Besides the direct spectral sum, S admits a quotient (Christoffel-Darboux
// type) form driven by the banded multiplication operators: with
//   F_A(x,y) = sum_{n,m} hat_n(x) A_{nm} (1[m<2N] - 1[n<2N]) base_m(y),
//   hat_{2k} = base_{2k+1}, hat_{2k+1} = -base_{2k},
// where base is phi (beta=4) or the halved partner (beta=1), one has
//   beta=4:  S(x,y) = [x F_P - F_R] / (x - y),
//   beta=1:  S(x,y) = [y F_P - F_R] / (y - x),
// with the index sums confined to a fixed window around 2N. For quadratic
// weights the window collapses to four straddling entries (the reduced
// evaluator). All evaluators are const and reentrant.
class KernelSet {
 public:
  // Requires matching (beta, potential) between the family and the product
  // context, and 2N + 2(d+2) <= n_max so the quotient window fits. The
  // reduced method additionally requires a quadratic weight and N >= 1.
  KernelSet(const SopFamily& fam, const SkewProducts& sp, int N,
            KernelMethod method);

  int N() const { return N_; }
  int beta() const { return fam_.beta(); }
  KernelMethod method() const { return method_; }
  const SopFamily& family() const { return fam_; }

  // scalar kernel via the method selected at construction
  Real kernel_S(const Real& x, const Real& y) const;

  // componentwise spectral sum; S(x,x) is the level density
  Real kernel_S_direct(const Real& x, const Real& y) const;

  // quotient form over the operator window (method >= Gcd). Coincident
  // points take a symmetric-difference limit; points closer than the
  // quotient resolution (but not equal) are rejected -- use level_density
  // or pass x == y exactly.
  Real kernel_S_gcd(const Real& x, const Real& y) const;

  // four-entry quotient for quadratic weights (method == GaussianReduced)
  Real kernel_S_gaussian_reduced(const Real& x, const Real& y) const;

  // antisymmetric companion kernels; for beta=1, I includes the
  // -sign(x-y)/2 jump away from the diagonal. At x == y the jump is
  // omitted (its distributional value is taken as zero) and
  // *jump_omitted, when given, reports whether an omission happened.
  Real kernel_D(const Real& x, const Real& y) const;
  Real kernel_I(const Real& x, const Real& y,
                bool* jump_omitted = nullptr) const;

  // diagonal of S: one-level density, integrating to 2N (beta=1) or N
  // (beta=4)
  Real level_density(const Real& x) const;

  Sigma2 sigma2(const Real& x, const Real& y) const;

  // two-level correlator R2(x,y); identically zero on the diagonal
  Real r2(const Real& x, const Real& y) const;

  // the bilinear form F_A above for A = 'P' or 'R' (method >= Gcd);
  // satisfies S(x,y) - S(y,x) = F_P and
  //   beta=4: y S(x,y) - x S(y,x) = F_R,
  //   beta=1: x S(x,y) - y S(y,x) = F_R.
  Real commutator_form(char op, const Real& x, const Real& y) const;

 private:
  // base-function values at x: phi[0..count) and, when wanted, the partner
  // part[0..count) (phi' for beta=4, halved sign-transform for beta=1)
  void basis(const Real& x, std::vector<Real>* phi,
             std::vector<Real>* part) const;
  // both commutator forms from one basis evaluation
  void forms(const Real& x, const Real& y, Real* fp, Real* fr) const;
  Real quotient(const Real& x, const Real& y, bool reduced) const;
  Real quotient_num(const Real& x, const Real& y, bool reduced) const;
  Real window_at(const std::vector<Real>& w, int n, int m) const;

  const SopFamily& fam_;
  const SkewProducts& sp_;
  int N_;
  KernelMethod method_;
  int count_ = 0;                    // base functions evaluated per point
  std::vector<Real> sqrtg_;          // sqrt(g_m), m < count
  std::vector<Polynomial> dpi_;      // Pi_m' (beta=4)
  std::vector<Real> tvals_;          // totals of Pi_m e^{-V} (beta=1)
  int wlo_ = 0, whi_ = -1;           // operator window (method >= Gcd)
  std::vector<Real> pwin_, rwin_;    // window blocks of P and R
  Real p12_, r12_, r02_, r13_;       // straddling entries (reduced)
};

// Christoffel-Darboux kernel of the orthonormal polynomials of e^{-2V},
// including the e^{-V(x)-V(y)} weights: the beta=2 cross-check companion.
// Requires 1 <= N < depth of the recurrence carried by sp.
Real kernel_S_beta2_reference(const SkewProducts& sp, int N, const Real& x,
                              const Real& y);

}  // namespace skewop
