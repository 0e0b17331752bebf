#pragma once

#include <string>
#include <vector>

#include "skewop/polynomial.hpp"
#include "skewop/potential.hpp"
#include "skewop/skewproduct.hpp"

namespace skewop {

enum class Normalization { Monic, PaperGaussian };

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

// Family of skew-orthonormal polynomials Pi_0..Pi_{n_max} for one (beta, V):
//   s(Pi_{2m}, Pi_{2n+1}) = ghat_n delta_{mn},
//   s(Pi_{2m}, Pi_{2n}) = s(Pi_{2m+1}, Pi_{2n+1}) = 0,   ghat_n > 0.
// Both members of a pair share the normalization: g_{2n} = g_{2n+1} = ghat_n.
// The odd members carry the residual freedom
//   Pi_{2n+1} -> Pi_{2n+1} + gamma_n Pi_{2n},
// tracked by the gauge vector (all zero for a freshly built family, whose
// convention is a vanishing coefficient of x^{2n} inside Pi_{2n+1}).
class SopFamily {
 public:
  int beta() const { return beta_; }
  const Potential& potential() const { return pot_; }
  int n_max() const { return static_cast<int>(pi_.size()) - 1; }
  int pairs() const { return static_cast<int>(pi_.size()) / 2; }
  Normalization normalization() const { return norm_; }
  unsigned precision_bits() const { return precision_bits_; }

  const std::vector<Polynomial>& pi() const { return pi_; }
  const Polynomial& pi(int n) const;
  // per-member normalization g_n (g_{2n} == g_{2n+1})
  const Real& g(int n) const;
  // per-pair normalization ghat_n
  const Real& ghat(int n) const;
  const std::vector<Real>& gauge() const { return gauge_; }

  // quasi-polynomial phi_n(x) = Pi_n(x) e^{-V(x)} / sqrt(g_n)
  Real phi(int n, const Real& x) const;
  // partner function: beta=4 psi_n = phi_n'; beta=1 psi_n(x) =
  // int phi_n(y) sign(x-y) dy (sp supplies the cumulative integrals)
  Real psi(int n, const Real& x, const SkewProducts& sp) const;

  std::string serialize() const;
  static SopFamily deserialize(const std::string& text);

  friend SopFamily build_sop(const SkewProducts& sp, int n_max,
                             Normalization norm);
  friend SopFamily apply_gauge(const SopFamily& fam,
                               const std::vector<Real>& gammas);

 private:
  SopFamily() = default;

  int beta_ = 0;
  Potential pot_{std::vector<double>{0.0, 1.0}};
  Normalization norm_ = Normalization::Monic;
  unsigned precision_bits_ = 0;
  std::vector<Polynomial> pi_;
  std::vector<Real> ghat_;   // one per pair
  std::vector<Real> gauge_;  // one per pair, cumulative
};

// Skew Gram-Schmidt over monomial pairs (x^{2n}, x^{2n+1}). n_max must be
// odd and the moment table inside sp must cover degree n_max. Runs at the
// ambient precision, which is recorded in the family.
SopFamily build_sop(const SkewProducts& sp, int n_max, Normalization norm);

// Convenience overload that owns a temporary product context.
SopFamily build_sop(const Potential& pot, int beta, int n_max,
                    Normalization norm, unsigned precision_bits);

// Pi_{2n+1} += gamma_n Pi_{2n}; normalizations are unchanged and the result
// is still skew-orthonormal. gammas must have one entry per pair.
SopFamily apply_gauge(const SopFamily& fam, const std::vector<Real>& gammas);

// ghat_0 .. ghat_{pairs-1}
std::vector<Real> normalization_constants(const SopFamily& fam);

// N! * prod_{j=0}^{2N-1} g_j in both log and linear form (the linear value
// is representable thanks to the wide exponent range of the backing type)
struct PartitionValue {
  Real log_value;
  Real value;
};
PartitionValue partition_function(const SopFamily& fam, int N);

}  // namespace skewop
