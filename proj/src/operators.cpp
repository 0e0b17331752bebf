#include "skewop/operators.hpp"

#include <json.hpp>

#include "skewop/errors.hpp"

namespace skewop {

namespace {

// whether the row expansion pairs against the symmetric Gram form (beta=1
// derivative-type rows) instead of the skew product
bool row_uses_gram(int beta, char op) { return beta == 1 && op != 'Q'; }

// the polynomial whose weighted version row n expands:
//   Q: x pi_n for both beta,
//   P: (pi_n' - V' pi_n) for beta=4, pi_n itself for beta=1,
//   R: x times the P row polynomial
Polynomial row_poly(const SopFamily& fam, const SkewProducts& sp, char op,
                    int n) {
  const Polynomial& pin = fam.pi(n);
  if (op == 'Q') return pin.mul_x();
  if (fam.beta() == 4) {
    Polynomial f = pin.derivative() - sp.potential().Vprime_poly() * pin;
    return op == 'R' ? f.mul_x() : f;
  }
  return op == 'R' ? pin.mul_x() : pin;
}

// coefficient along basis index m: pair f against the partner inside pair
// m/2 and divide by the norms. The sign pattern differs between the skew
// pairing (antisymmetric canonical form) and the Gram pairing (which sees
// the canonical form from the other side).
Real extract_col(const SopFamily& fam, const SkewProducts& sp,
                 const Polynomial& f, bool use_gram, const Real& row_norm,
                 int m) {
  int j = m / 2;
  const Polynomial& partner = fam.pi(m % 2 == 0 ? 2 * j + 1 : 2 * j);
  Real v = use_gram ? sp.gram(f, partner) : sp.skew(f, partner);
  bool positive = use_gram ? (m % 2 == 1) : (m % 2 == 0);
  v /= row_norm * sqrt(fam.ghat(j));
  return positive ? v : -v;
}

void check_pairing_inputs(const SopFamily& fam, const SkewProducts& sp,
                          char op) {
  if (op != 'Q' && op != 'P' && op != 'R')
    throw ValidationError("operator name must be Q, P or R");
  if (fam.beta() != sp.beta())
    throw ValidationError("family and product context disagree on beta");
  if (fam.potential().u() != sp.potential().u())
    throw ValidationError("family and product context disagree on potential");
}

BandedOperator build_impl(const SopFamily& fam, const SkewProducts& sp, int M,
                          char op) {
  check_pairing_inputs(fam, sp, op);
  if (M < 2 || M % 2 != 0)
    throw ValidationError("truncation size must be positive and even");
  const int d = sp.potential().d();
  const int margin = 2 * (d + 2);
  if (M + margin > fam.n_max())
    throw ValidationError(
        "family too short for truncation size: need n_max >= M + 2(d+2)");

  BandedOperator A;
  A.name = op;
  A.beta = fam.beta();
  A.M = M;
  A.bw_margin = margin;
  A.upper_bandwidth = op == 'Q' ? 1 : (op == 'P' ? d : d + 1);
  A.a.assign(static_cast<size_t>(M) * M, Real(0));
  const bool use_gram = row_uses_gram(fam.beta(), op);
  for (int n = 0; n < M; ++n) {
    Polynomial f = row_poly(fam, sp, op, n);
    Real row_norm = sqrt(fam.g(n));
    for (int m = 0; m < M; ++m)
      A.at(n, m) = extract_col(fam, sp, f, use_gram, row_norm, m);
  }
  return A;
}

std::vector<Real> matmul(const std::vector<Real>& a,
                         const std::vector<Real>& b, int M) {
  std::vector<Real> c(static_cast<size_t>(M) * M, Real(0));
  for (int n = 0; n < M; ++n)
    for (int k = 0; k < M; ++k) {
      const Real& ank = a[static_cast<size_t>(n) * M + k];
      if (ank == 0) continue;
      const Real* brow = &b[static_cast<size_t>(k) * M];
      Real* crow = &c[static_cast<size_t>(n) * M];
      for (int m = 0; m < M; ++m) crow[m] += ank * brow[m];
    }
  return c;
}

Real max2(Real a, const Real& b) { return a < b ? b : a; }

Real window_max(const std::vector<Real>& a, int M, int lo, int hi) {
  Real s(0);
  for (int n = lo; n <= hi; ++n)
    for (int m = lo; m <= hi; ++m) {
      Real v = abs(a[static_cast<size_t>(n) * M + m]);
      if (v > s) s = v;
    }
  return s;
}

}  // namespace

std::string BandedOperator::serialize() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int n = 0; n < M; ++n) {
    nlohmann::json row = nlohmann::json::array();
    for (int m = 0; m < M; ++m) row.push_back(to_decimal(at(n, m)));
    rows.push_back(std::move(row));
  }
  nlohmann::json j{{"format", "skewop-operator/1"},
                   {"name", std::string(1, name)},
                   {"beta", beta},
                   {"trunc_size", M},
                   {"upper_bandwidth", upper_bandwidth},
                   {"bw_margin", bw_margin},
                   {"entries", std::move(rows)}};
  return j.dump(1);
}

Real operator_entry(const SopFamily& fam, const SkewProducts& sp, char op,
                    int n, int m) {
  check_pairing_inputs(fam, sp, op);
  if (n < 0 || m < 0 || n > fam.n_max() || m > fam.n_max())
    throw ValidationError("operator entry index out of family range");
  Polynomial f = row_poly(fam, sp, op, n);
  return extract_col(fam, sp, f, row_uses_gram(fam.beta(), op),
                     sqrt(fam.g(n)), m);
}

BandedOperator build_Q(const SopFamily& fam, const SkewProducts& sp, int M) {
  return build_impl(fam, sp, M, 'Q');
}
BandedOperator build_P(const SopFamily& fam, const SkewProducts& sp, int M) {
  return build_impl(fam, sp, M, 'P');
}
BandedOperator build_R(const SopFamily& fam, const SkewProducts& sp, int M) {
  return build_impl(fam, sp, M, 'R');
}

BandedOperator dual(const BandedOperator& A) {
  if (A.M < 2 || A.M % 2 != 0)
    throw ValidationError("duality transform needs an even truncation size");
  if (A.a.size() != static_cast<size_t>(A.M) * A.M)
    throw ValidationError("operator storage does not match its size");
  BandedOperator out = A;
  out.upper_bandwidth = -1;
  // -Z A^t Z in index form: entry (n, m) pulls A at the pair-swapped,
  // transposed position with a parity sign
  for (int n = 0; n < A.M; ++n)
    for (int m = 0; m < A.M; ++m) {
      Real v = A.at(m ^ 1, n ^ 1);
      out.at(n, m) = ((n ^ m) & 1) ? -v : v;
    }
  return out;
}

IdentityReport check_identities(const BandedOperator& Q,
                                const BandedOperator& P,
                                const BandedOperator& R,
                                const Potential& pot) {
  const int M = Q.M;
  if (P.M != M || R.M != M)
    throw ValidationError("operators must share one truncation size");
  if (Q.beta != P.beta || Q.beta != R.beta)
    throw ValidationError("operators must share one beta");
  const int d = pot.d();
  const int lo = 2 * (d + 2);
  const int hi = M - 1 - lo;
  if (lo > hi)
    throw ValidationError("truncation too small for the safety window");

  std::vector<Real> qp = matmul(Q.a, P.a, M);
  std::vector<Real> pq = matmul(P.a, Q.a, M);
  std::vector<Real> rp = matmul(R.a, P.a, M);
  std::vector<Real> pr = matmul(P.a, R.a, M);

  // matrix polynomial V'(Q) = sum_l u_l Q^{l-1}
  const std::vector<double>& u = pot.u();
  std::vector<Real> vq(static_cast<size_t>(M) * M, Real(0));
  std::vector<Real> power(static_cast<size_t>(M) * M, Real(0));
  for (int i = 0; i < M; ++i) power[static_cast<size_t>(i) * M + i] = 1;
  for (size_t l = 1; l <= u.size(); ++l) {
    if (u[l - 1] != 0.0) {
      Real c(u[l - 1]);
      for (size_t i = 0; i < vq.size(); ++i) vq[i] += c * power[i];
    }
    if (l < u.size()) power = matmul(power, Q.a, M);
  }
  std::vector<Real> qvq = matmul(Q.a, vq, M);

  BandedOperator pd = dual(P);
  BandedOperator rd = dual(R);
  BandedOperator qd = dual(Q);

  IdentityReport rep;
  auto at = [M](const std::vector<Real>& a, int n, int m) -> const Real& {
    return a[static_cast<size_t>(n) * M + m];
  };
  auto push = [&](const std::string& name, const Real& resid, Real scale,
                  double tol) {
    if (scale == 0) scale = 1;
    IdentityReport::Item item;
    item.name = name;
    item.residual = (resid / scale).convert_to<double>();
    item.tolerance = tol;
    item.pass = item.residual < tol;
    rep.items.push_back(item);
    rep.all_pass = rep.all_pass && item.pass;
  };

  {
    Real resid(0);
    for (int n = lo; n <= hi; ++n)
      for (int m = lo; m <= hi; ++m) {
        Real v = abs(at(qp, n, m) - at(pq, n, m) - (n == m ? 1 : 0));
        if (v > resid) resid = v;
      }
    Real scale = max2(Real(1), max2(window_max(qp, M, lo, hi),
                                    window_max(pq, M, lo, hi)));
    push("[Q,P] - 1", resid, scale, 1e-8);
  }
  {
    Real resid(0);
    for (int n = lo; n <= hi; ++n)
      for (int m = lo; m <= hi; ++m) {
        Real v = abs(at(rp, n, m) - at(pr, n, m) - P.at(n, m));
        if (v > resid) resid = v;
      }
    Real scale = max2(window_max(P.a, M, lo, hi),
                      max2(window_max(rp, M, lo, hi),
                           window_max(pr, M, lo, hi)));
    push("[R,P] - P", resid, scale, 1e-8);
  }
  {
    Real resid(0);
    for (int n = lo; n <= hi; ++n)
      for (int m = lo; m <= hi; ++m) {
        Real v = abs(P.at(n, m) + pd.at(n, m));
        if (v > resid) resid = v;
      }
    push("P + dual(P)", resid, window_max(P.a, M, lo, hi), 1e-8);
  }
  {
    Real resid(0);
    for (int n = lo; n <= hi; ++n)
      for (int m = lo; m <= hi; ++m) {
        Real v = abs(R.at(n, m) + rd.at(n, m));
        if (v > resid) resid = v;
      }
    push("R + dual(R)", resid, window_max(R.a, M, lo, hi), 1e-8);
  }
  {
    // P + V'(Q) must be strictly lower triangular
    Real resid(0);
    for (int n = lo; n <= hi; ++n)
      for (int m = n; m <= hi; ++m) {
        Real v = abs(P.at(n, m) + at(vq, n, m));
        if (v > resid) resid = v;
      }
    Real scale = max2(window_max(P.a, M, lo, hi), window_max(vq, M, lo, hi));
    push("P + V'(Q) upper", resid, scale, 1e-8);
  }
  {
    // R + Q V'(Q) must be lower triangular (diagonal allowed)
    Real resid(0);
    for (int n = lo; n <= hi; ++n)
      for (int m = n + 1; m <= hi; ++m) {
        Real v = abs(R.at(n, m) + at(qvq, n, m));
        if (v > resid) resid = v;
      }
    Real scale = max2(window_max(R.a, M, lo, hi),
                      window_max(qvq, M, lo, hi));
    push("R + Q V'(Q) upper", resid, scale, 1e-8);
  }
  {
    // Q - dual(Q) is the signed inverse of P: (Q - dual(Q)) P = eta with
    // eta = +1 for beta=4 (P maps the phi basis to the partner basis) and
    // eta = -1 for beta=1 (P maps the other way, flipping the commutator
    // contribution). Checked as a product so no truncated block has to be
    // inverted.
    const int eta = Q.beta == 4 ? 1 : -1;
    std::vector<Real> diff(static_cast<size_t>(M) * M);
    for (size_t i = 0; i < diff.size(); ++i) diff[i] = Q.a[i] - qd.a[i];
    std::vector<Real> qdp = matmul(diff, P.a, M);
    Real resid(0);
    for (int n = lo; n <= hi; ++n)
      for (int m = lo; m <= hi; ++m) {
        Real v = abs(at(qdp, n, m) - (n == m ? eta : 0));
        if (v > resid) resid = v;
      }
    Real scale = max2(Real(1), window_max(qdp, M, lo, hi));
    push("(Q - dual(Q)) P - sign", resid, scale, 1e-6);
  }
  // band structure above the diagonal (entries are exact, so probe all rows)
  auto band = [&](const BandedOperator& A, const std::string& name) {
    Real resid(0);
    for (int n = 0; n < M; ++n)
      for (int m = n + A.upper_bandwidth + 1; m < M; ++m) {
        Real v = abs(A.at(n, m));
        if (v > resid) resid = v;
      }
    push(name, resid, window_max(A.a, M, lo, hi), 1e-10);
  };
  band(Q, "Q band");
  band(P, "P band");
  band(R, "R band");
  return rep;
}

std::string IdentityReport::serialize() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& item : items)
    arr.push_back(nlohmann::json{{"identity", item.name},
                                 {"residual", item.residual},
                                 {"tolerance", item.tolerance},
                                 {"pass", item.pass}});
  return arr.dump(1);
}

std::vector<Real> cancel_gauge(const SopFamily& fam, const SkewProducts& sp,
                               int N) {
  if (N < 1 || 2 * N + 1 > fam.n_max())
    throw ValidationError("gauge cancellation needs pairs through index N");
  std::vector<Real> gammas(fam.pairs(), Real(0));
  if (fam.potential().is_even()) return gammas;  // exactly zero by parity
  Real r12 = operator_entry(fam, sp, 'R', 2 * N - 1, 2 * N);
  Real r02 = operator_entry(fam, sp, 'R', 2 * N - 2, 2 * N);
  if (r02 == 0)
    throw NumericalError("cannot cancel straddling entry: pivot vanishes");
  gammas[N - 1] = -r12 / r02;
  return gammas;
}

}  // namespace skewop
