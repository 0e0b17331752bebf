#include "skewop/kernels.hpp"

#include <vector>

#include "skewop/errors.hpp"
#include "skewop/operators.hpp"

namespace skewop {

std::string to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::Direct:
      return "direct";
    case KernelMethod::Gcd:
      return "gcd";
    case KernelMethod::GaussianReduced:
      return "gaussian-reduced";
  }
  throw ValidationError("unknown kernel method");
}

KernelMethod kernel_method_from_string(const std::string& s) {
  if (s == "direct") return KernelMethod::Direct;
  if (s == "gcd") return KernelMethod::Gcd;
  if (s == "gaussian-reduced") return KernelMethod::GaussianReduced;
  throw ValidationError("unknown kernel method: " + s);
}

namespace {

// sum_{k<N} a_{2k} b_{2k+1} - a_{2k+1} b_{2k}
Real pair_sum(const std::vector<Real>& a, const std::vector<Real>& b, int N) {
  Real acc(0);
  for (int k = 0; k < N; ++k)
    acc += a[2 * k] * b[2 * k + 1] - a[2 * k + 1] * b[2 * k];
  return acc;
}

}  // namespace

KernelSet::KernelSet(const SopFamily& fam, const SkewProducts& sp, int N,
                     KernelMethod method)
    : fam_(fam), sp_(sp), N_(N), method_(method) {
  if (sp.beta() != fam.beta() || sp.potential().u() != fam.potential().u())
    throw ValidationError("kernel set: family/product context mismatch");
  if (N < 0) throw ValidationError("kernel set: N must be >= 0");
  const int d = fam.potential().d();
  if (2 * N + 2 * (d + 2) > fam.n_max())
    throw ValidationError(
        "kernel set: family too short, need 2N + 2(d+2) <= n_max");

  if (method_ == KernelMethod::GaussianReduced) {
    if (d != 1)
      throw ValidationError(
          "reduced kernel evaluation requires a quadratic weight");
    if (N < 1)
      throw ValidationError("reduced kernel evaluation requires N >= 1");
  }

  count_ = method_ >= KernelMethod::Gcd ? 2 * N + d + 3 : 2 * N;
  sqrtg_.reserve(count_);
  for (int m = 0; m < count_; ++m) sqrtg_.push_back(sqrt(fam.g(m)));

  if (fam.beta() == 4) {
    dpi_.reserve(count_);
    for (int m = 0; m < count_; ++m) dpi_.push_back(fam.pi(m).derivative());
  } else {
    if (count_ > 0 && count_ - 1 > sp.cumulative().jmax())
      throw ValidationError("kernel set: cumulative moment table too short");
    const std::vector<Real>& tot = sp.cumulative().totals();
    tvals_.reserve(count_);
    for (int m = 0; m < count_; ++m) {
      Real acc(0);
      const Polynomial& p = fam.pi(m);
      for (int j = 0; j <= p.degree(); ++j) acc += p.coeff(j) * tot[j];
      tvals_.push_back(acc);
    }
  }

  if (method_ >= KernelMethod::Gcd) {
    wlo_ = 2 * N - (d + 2);
    if (wlo_ < 0) wlo_ = 0;
    whi_ = 2 * N + d + 2;
    const int W = whi_ - wlo_ + 1;
    pwin_.resize(static_cast<size_t>(W) * W);
    rwin_.resize(static_cast<size_t>(W) * W);
    for (int n = wlo_; n <= whi_; ++n)
      for (int m = wlo_; m <= whi_; ++m) {
        pwin_[static_cast<size_t>(n - wlo_) * W + (m - wlo_)] =
            operator_entry(fam, sp, 'P', n, m);
        rwin_[static_cast<size_t>(n - wlo_) * W + (m - wlo_)] =
            operator_entry(fam, sp, 'R', n, m);
      }
  }
  if (method_ == KernelMethod::GaussianReduced) {
    p12_ = window_at(pwin_, 2 * N - 1, 2 * N);
    r12_ = window_at(rwin_, 2 * N - 1, 2 * N);
    r02_ = window_at(rwin_, 2 * N - 2, 2 * N);
    r13_ = window_at(rwin_, 2 * N - 1, 2 * N + 1);
  }
}

Real KernelSet::window_at(const std::vector<Real>& w, int n, int m) const {
  const int W = whi_ - wlo_ + 1;
  return w[static_cast<size_t>(n - wlo_) * W + (m - wlo_)];
}

void KernelSet::basis(const Real& x, std::vector<Real>* phi,
                      std::vector<Real>* part) const {
  const Potential& pot = fam_.potential();
  const Real w = exp(-pot.V(x));
  std::vector<Real> pv(count_);
  for (int m = 0; m < count_; ++m) pv[m] = fam_.pi(m).eval(x);

  if (phi) {
    phi->resize(count_);
    for (int m = 0; m < count_; ++m) (*phi)[m] = pv[m] * w / sqrtg_[m];
  }
  if (!part) return;
  part->resize(count_);
  if (fam_.beta() == 4) {
    const Real vp = pot.Vprime(x);
    for (int m = 0; m < count_; ++m)
      (*part)[m] = (dpi_[m].eval(x) - vp * pv[m]) * w / sqrtg_[m];
  } else {
    std::vector<Real> C;
    sp_.cumulative().values(x, C);
    for (int m = 0; m < count_; ++m) {
      Real acc(0);
      const Polynomial& p = fam_.pi(m);
      for (int j = 0; j <= p.degree(); ++j) acc += p.coeff(j) * C[j];
      (*part)[m] = (2 * acc - tvals_[m]) / (2 * sqrtg_[m]);
    }
  }
}

Real KernelSet::kernel_S_direct(const Real& x, const Real& y) const {
  std::vector<Real> px, qy;
  basis(x, &px, nullptr);
  basis(y, nullptr, &qy);
  return pair_sum(px, qy, N_);
}

Real KernelSet::kernel_D(const Real& x, const Real& y) const {
  std::vector<Real> px, py;
  basis(x, &px, nullptr);
  basis(y, &py, nullptr);
  return pair_sum(py, px, N_);
}

Real KernelSet::kernel_I(const Real& x, const Real& y,
                         bool* jump_omitted) const {
  std::vector<Real> qx, qy;
  basis(x, nullptr, &qx);
  basis(y, nullptr, &qy);
  Real v = pair_sum(qx, qy, N_);
  const bool on_diagonal = x == y;
  if (fam_.beta() == 1 && !on_diagonal) v -= x > y ? Real("0.5") : Real("-0.5");
  if (jump_omitted) *jump_omitted = fam_.beta() == 1 && on_diagonal;
  return v;
}

Real KernelSet::level_density(const Real& x) const {
  std::vector<Real> px, qx;
  basis(x, &px, &qx);
  return pair_sum(px, qx, N_);
}

Sigma2 KernelSet::sigma2(const Real& x, const Real& y) const {
  std::vector<Real> px, qx, py, qy;
  basis(x, &px, &qx);
  basis(y, &py, &qy);
  Real i = pair_sum(qx, qy, N_);
  if (fam_.beta() == 1 && x != y) i -= x > y ? Real("0.5") : Real("-0.5");
  return Sigma2{pair_sum(px, qy, N_), pair_sum(py, qx, N_),
                pair_sum(py, px, N_), i};
}

Real KernelSet::r2(const Real& x, const Real& y) const {
  std::vector<Real> px, qx, py, qy;
  basis(x, &px, &qx);
  basis(y, &py, &qy);
  Real sxx = pair_sum(px, qx, N_), syy = pair_sum(py, qy, N_);
  Real sxy = pair_sum(px, qy, N_), syx = pair_sum(py, qx, N_);
  Real dd = pair_sum(py, px, N_);
  Real ii = pair_sum(qx, qy, N_);
  if (fam_.beta() == 1 && x != y) ii -= x > y ? Real("0.5") : Real("-0.5");
  return sxx * syy - sxy * syx + dd * ii;
}

void KernelSet::forms(const Real& x, const Real& y, Real* fp, Real* fr) const {
  std::vector<Real> bx, by;
  if (fam_.beta() == 4) {
    basis(x, &bx, nullptr);
    basis(y, &by, nullptr);
  } else {
    basis(x, nullptr, &bx);
    basis(y, nullptr, &by);
  }
  const int tn = 2 * N_;
  Real accp(0), accr(0);
  for (int n = wlo_; n <= whi_; ++n) {
    const Real hat = n % 2 == 0 ? bx[n + 1] : -bx[n - 1];
    for (int m = wlo_; m <= whi_; ++m) {
      const int ind = (m < tn ? 1 : 0) - (n < tn ? 1 : 0);
      if (ind == 0) continue;
      Real f = ind > 0 ? hat * by[m] : -hat * by[m];
      if (fp) accp += f * window_at(pwin_, n, m);
      if (fr) accr += f * window_at(rwin_, n, m);
    }
  }
  if (fp) *fp = accp;
  if (fr) *fr = accr;
}

Real KernelSet::commutator_form(char op, const Real& x, const Real& y) const {
  if (method_ < KernelMethod::Gcd)
    throw ValidationError(
        "commutator form: kernel set was built without the operator window");
  if (op != 'P' && op != 'R')
    throw ValidationError("commutator form: op must be 'P' or 'R'");
  Real v;
  forms(x, y, op == 'P' ? &v : nullptr, op == 'R' ? &v : nullptr);
  return v;
}

Real KernelSet::quotient_num(const Real& x, const Real& y,
                             bool reduced) const {
  if (!reduced) {
    Real fp, fr;
    forms(x, y, &fp, &fr);
    return (fam_.beta() == 4 ? x : y) * fp - fr;
  }
  std::vector<Real> bx, by;
  if (fam_.beta() == 4) {
    basis(x, &bx, nullptr);
    basis(y, &by, nullptr);
  } else {
    basis(x, nullptr, &bx);
    basis(y, nullptr, &by);
  }
  const int base = 2 * N_ - 2;
  auto wf = [&](int j, int k) {
    return bx[base + j] * by[base + k] - by[base + j] * bx[base + k];
  };
  return ((fam_.beta() == 4 ? x : y) * p12_ - r12_) * wf(0, 2) +
         r02_ * wf(1, 2) - r13_ * wf(0, 3);
}

Real KernelSet::quotient(const Real& x, const Real& y, bool reduced) const {
  const Real h =
      ldexp(Real(1), -static_cast<int>(precision_bits() / 3)) * (1 + abs(x));
  if (x == y) {
    // l'Hopital via a symmetric difference of the numerator
    Real der =
        (quotient_num(x, x + h, reduced) - quotient_num(x, x - h, reduced)) /
        (2 * h);
    return fam_.beta() == 4 ? -der : der;
  }
  if (abs(x - y) <= h)
    throw ValidationError(
        "kernel quotient: points closer than the quotient resolution; "
        "evaluate with x == y exactly or use level_density");
  const Real den = fam_.beta() == 4 ? x - y : y - x;
  return quotient_num(x, y, reduced) / den;
}

Real KernelSet::kernel_S_gcd(const Real& x, const Real& y) const {
  if (method_ < KernelMethod::Gcd)
    throw ValidationError(
        "kernel quotient: kernel set was built without the operator window");
  return quotient(x, y, false);
}

Real KernelSet::kernel_S_gaussian_reduced(const Real& x, const Real& y) const {
  if (method_ != KernelMethod::GaussianReduced)
    throw ValidationError(
        "reduced kernel: kernel set was not built for the reduced method");
  return quotient(x, y, true);
}

Real KernelSet::kernel_S(const Real& x, const Real& y) const {
  switch (method_) {
    case KernelMethod::Direct:
      return kernel_S_direct(x, y);
    case KernelMethod::Gcd:
      return kernel_S_gcd(x, y);
    case KernelMethod::GaussianReduced:
      return kernel_S_gaussian_reduced(x, y);
  }
  throw ValidationError("unknown kernel method");
}

Real kernel_S_beta2_reference(const SkewProducts& sp, int N, const Real& x,
                              const Real& y) {
  if (N < 1)
    throw ValidationError("reference kernel: N must be >= 1");
  const Recurrence& rec = sp.quad2().rec;
  if (N >= rec.depth())
    throw ValidationError("reference kernel: recurrence depth too small");
  std::vector<Real> px, py;
  rec.orthonormal_values(x, N, px);
  rec.orthonormal_values(y, N, py);
  const Potential& pot = sp.potential();
  const Real w = exp(-pot.V(x) - pot.V(y));
  if (x == y) {
    Real acc(0);
    for (int k = 0; k < N; ++k) acc += px[k] * py[k];
    return acc * w;
  }
  return rec.b[N] * (px[N] * py[N - 1] - px[N - 1] * py[N]) * w / (x - y);
}

}  // namespace skewop
