#include "skewop/sopfamily.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "skewop/errors.hpp"

namespace skewop {

std::string to_string(Normalization n) {
  return n == Normalization::Monic ? "monic" : "paper-gaussian";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "monic") return Normalization::Monic;
  if (s == "paper-gaussian") return Normalization::PaperGaussian;
  throw ValidationError("unknown normalization: " + s);
}

const Polynomial& SopFamily::pi(int n) const {
  if (n < 0 || n > n_max())
    throw ValidationError("family: polynomial index out of range");
  return pi_[n];
}

const Real& SopFamily::ghat(int n) const {
  if (n < 0 || n >= pairs())
    throw ValidationError("family: pair index out of range");
  return ghat_[n];
}

const Real& SopFamily::g(int n) const { return ghat(n / 2); }

Real SopFamily::phi(int n, const Real& x) const {
  return pi(n).eval(x) * exp(-pot_.V(x)) / sqrt(g(n));
}

Real SopFamily::psi(int n, const Real& x, const SkewProducts& sp) const {
  if (sp.beta() != beta_ || sp.potential().u() != pot_.u())
    throw ValidationError("family psi: product context mismatch");
  if (beta_ == 4) {
    // (Pi_n' - V' Pi_n) e^{-V} / sqrt(g_n)
    const Polynomial& p = pi(n);
    Real v = (p.derivative().eval(x) - pot_.Vprime(x) * p.eval(x));
    return v * exp(-pot_.V(x)) / sqrt(g(n));
  }
  return sp.epsilon_transform(pi(n), x) / sqrt(g(n));
}

namespace {

// subtract the canonical skew projection onto pairs 0..upto-1:
//   p -= sum_k [ s(p, Pi_{2k+1}) Pi_{2k} - s(p, Pi_{2k}) Pi_{2k+1} ] / gh_k
// where codd[k] = s(p, Pi_{2k+1}) and ceven[k] = s(p, Pi_{2k}).
void subtract_projection(Polynomial& p, const std::vector<Polynomial>& pi,
                         const std::vector<Real>& gh_raw, int upto,
                         const std::vector<Real>& codd,
                         const std::vector<Real>& ceven) {
  for (int k = 0; k < upto; ++k) {
    if (codd[k] != 0) {
      Polynomial t = pi[2 * k];
      t *= codd[k] / gh_raw[k];
      p -= t;
    }
    if (ceven[k] != 0) {
      Polynomial t = pi[2 * k + 1];
      t *= ceven[k] / gh_raw[k];
      p += t;
    }
  }
}

}  // namespace

SopFamily build_sop(const SkewProducts& sp, int n_max, Normalization norm) {
  if (n_max < 1 || n_max % 2 == 0)
    throw ValidationError("family build: n_max must be odd and >= 1");
  if (sp.table().size < n_max)
    throw ValidationError("family build: moment table smaller than n_max");
  if (norm == Normalization::PaperGaussian) {
    const std::vector<double>& u = sp.potential().u();
    const bool gauss1 = sp.beta() == 1 && u == std::vector<double>{0.0, 1.0};
    const bool gauss4 = sp.beta() == 4 && u == std::vector<double>{0.0, 2.0};
    if (!gauss1 && !gauss4)
      throw ValidationError(
          "paper-gaussian normalization is only defined for the Gaussian "
          "weight matched to beta");
  }

  const SkewMomentTable& tab = sp.table();
  const int npairs = (n_max + 1) / 2;
  const unsigned bits = precision_bits();
  const Real ortho_gate("1e-25");
  const Real degen_gate = pow(Real(10), -static_cast<int>(bits) / 8);

  std::vector<Polynomial> pi(n_max + 1);
  std::vector<Real> gh_raw(npairs);  // signed s(Pi_{2n}, Pi_{2n+1})
  Real scale(0);                     // max |gh_raw| so far

  for (int n = 0; n < npairs; ++n) {
    for (int parity = 0; parity < 2; ++parity) {
      const int order = 2 * n + parity;
      Polynomial p = Polynomial::monomial(order);

      // classical skew Gram-Schmidt against all previous pairs; the
      // projection coefficients come from the monomial row of the table
      std::vector<Real> codd(n), ceven(n);
      for (int k = 0; k < n; ++k) {
        codd[k] = tab.bilinear(p, pi[2 * k + 1]);
        ceven[k] = tab.bilinear(p, pi[2 * k]);
      }
      subtract_projection(p, pi, gh_raw, n, codd, ceven);

      if (n > 0) {
        // re-orthogonalize once if residuals exceed the gate, then insist
        auto residuals = [&](const Polynomial& q) {
          Real worst(0);
          for (int k = 0; k < n; ++k) {
            codd[k] = tab.bilinear(q, pi[2 * k + 1]);
            ceven[k] = tab.bilinear(q, pi[2 * k]);
            Real w = abs(codd[k]);
            if (abs(ceven[k]) > w) w = abs(ceven[k]);
            if (w > worst) worst = w;
          }
          return worst;
        };
        if (residuals(p) > ortho_gate * scale) {
          subtract_projection(p, pi, gh_raw, n, codd, ceven);
          if (residuals(p) > ortho_gate * scale)
            throw NumericalError(
                "family build: skew orthogonality loss at order " +
                std::to_string(order));
        }
      }
      pi[order] = std::move(p);
    }

    // gauge convention: no x^{2n} inside Pi_{2n+1} (exact cancellation
    // because Pi_{2n} is monic at this stage)
    Real cg = pi[2 * n + 1].coeff(2 * n);
    if (cg != 0) {
      Polynomial t = pi[2 * n];
      t *= cg;
      pi[2 * n + 1] -= t;
    }

    gh_raw[n] = tab.bilinear(pi[2 * n], pi[2 * n + 1]);
    if (abs(gh_raw[n]) > scale) scale = abs(gh_raw[n]);
    if (gh_raw[n] == 0 || abs(gh_raw[n]) < degen_gate * scale)
      throw NumericalError(
          "family build: normalization underflow (precision loss) at pair " +
          std::to_string(n));
  }

  SopFamily fam;
  fam.beta_ = sp.beta();
  fam.pot_ = sp.potential();
  fam.norm_ = norm;
  fam.precision_bits_ = bits;
  fam.pi_ = std::move(pi);
  fam.ghat_.resize(npairs);
  fam.gauge_.assign(npairs, Real(0));

  if (norm == Normalization::Monic) {
    for (int n = 0; n < npairs; ++n) {
      if (gh_raw[n] < 0) {
        fam.pi_[2 * n + 1] *= Real(-1);
        fam.ghat_[n] = -gh_raw[n];
      } else {
        fam.ghat_[n] = gh_raw[n];
      }
    }
  } else {
    // rescale members to the published Gaussian leading coefficients
    const Real rt2 = sqrt(Real(2));
    for (int n = 0; n < npairs; ++n) {
      Real ce, co;
      if (fam.beta_ == 1) {
        ce = pow(Real(2), 2 * n);
        co = -ce;
      } else {
        ce = pow(rt2, 6 * n - 1);
        co = pow(rt2, 6 * n + 2);
      }
      fam.pi_[2 * n] *= ce;
      fam.pi_[2 * n + 1] *= co;
      fam.ghat_[n] = ce * co * gh_raw[n];
      if (!(fam.ghat_[n] > 0))
        throw NumericalError(
            "family build: rescaled normalization not positive at pair " +
            std::to_string(n));
    }
  }
  return fam;
}

SopFamily build_sop(const Potential& pot, int beta, int n_max,
                    Normalization norm, unsigned precision_bits) {
  PrecisionScope scope(precision_bits);
  SkewProducts sp(beta, pot, n_max);
  return build_sop(sp, n_max, norm);
}

SopFamily apply_gauge(const SopFamily& fam, const std::vector<Real>& gammas) {
  if (static_cast<int>(gammas.size()) != fam.pairs())
    throw ValidationError("apply_gauge: need one gamma per pair");
  SopFamily out = fam;
  for (int n = 0; n < fam.pairs(); ++n) {
    if (gammas[n] == 0) continue;
    Polynomial t = out.pi_[2 * n];
    t *= gammas[n];
    out.pi_[2 * n + 1] += t;
    out.gauge_[n] += gammas[n];
  }
  return out;
}

std::vector<Real> normalization_constants(const SopFamily& fam) {
  std::vector<Real> out;
  out.reserve(fam.pairs());
  for (int n = 0; n < fam.pairs(); ++n) out.push_back(fam.ghat(n));
  return out;
}

PartitionValue partition_function(const SopFamily& fam, int N) {
  if (N < 0 || 2 * N > fam.n_max() + 1)
    throw ValidationError("partition function: need 2N <= n_max + 1");
  PartitionValue z{Real(0), Real(1)};
  for (int i = 2; i <= N; ++i) z.value *= i;
  z.log_value = N > 0 ? lgamma(Real(N + 1)) : Real(0);
  for (int n = 0; n < N; ++n) {
    z.value *= fam.ghat(n) * fam.ghat(n);
    z.log_value += 2 * log(fam.ghat(n));
  }
  return z;
}

std::string SopFamily::serialize() const {
  nlohmann::json j;
  j["format"] = "skewop-family/1";
  j["beta"] = beta_;
  j["potential"] = {{"u", pot_.u()}};
  j["normalization"] = to_string(norm_);
  j["precision_bits"] = precision_bits_;
  nlohmann::json gauge = nlohmann::json::array();
  for (const Real& gm : gauge_) gauge.push_back(to_decimal(gm));
  j["gauge"] = std::move(gauge);
  nlohmann::json orders = nlohmann::json::array();
  for (int n = 0; n <= n_max(); ++n) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (int k = 0; k <= n; ++k) coeffs.push_back(to_decimal(pi_[n].coeff(k)));
    orders.push_back({{"coeffs", std::move(coeffs)},
                      {"g", to_decimal(g(n))}});
  }
  j["orders"] = std::move(orders);
  return j.dump(1);
}

SopFamily SopFamily::deserialize(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("family: malformed JSON");
  if (j.value("format", "") != "skewop-family/1")
    throw ValidationError("family: unrecognized format");

  SopFamily fam;
  fam.beta_ = j.at("beta").get<int>();
  if (fam.beta_ != 1 && fam.beta_ != 4)
    throw ValidationError("family: beta must be 1 or 4");
  fam.pot_ = Potential(j.at("potential").at("u").get<std::vector<double>>());
  fam.norm_ = normalization_from_string(j.at("normalization").get<std::string>());
  fam.precision_bits_ = j.at("precision_bits").get<unsigned>();

  // parse numeric payloads at the precision they were written with
  PrecisionScope scope(fam.precision_bits_);

  const auto& orders = j.at("orders");
  if (orders.empty() || orders.size() % 2 != 0)
    throw ValidationError("family: orders must come in even/odd pairs");
  const int count = static_cast<int>(orders.size());
  fam.pi_.resize(count);
  fam.ghat_.resize(count / 2);
  for (int n = 0; n < count; ++n) {
    const auto& coeffs = orders[n].at("coeffs");
    if (static_cast<int>(coeffs.size()) != n + 1)
      throw ValidationError("family: polynomial degree mismatch at order " +
                            std::to_string(n));
    std::vector<Real> c(n + 1);
    for (int k = 0; k <= n; ++k)
      c[k] = from_decimal(coeffs[k].get<std::string>());
    fam.pi_[n] = Polynomial(std::move(c));
    if (fam.pi_[n].degree() != n)
      throw ValidationError("family: vanishing leading coefficient at order " +
                            std::to_string(n));
    Real g = from_decimal(orders[n].at("g").get<std::string>());
    if (!(g > 0))
      throw ValidationError("family: normalizations must be positive");
    if (n % 2 == 0)
      fam.ghat_[n / 2] = g;
    else if (g != fam.ghat_[n / 2])
      throw ValidationError("family: pair members must share g");
  }

  const auto& gauge = j.at("gauge");
  if (static_cast<int>(gauge.size()) != count / 2)
    throw ValidationError("family: gauge length must match pair count");
  fam.gauge_.resize(count / 2);
  for (int n = 0; n < count / 2; ++n)
    fam.gauge_[n] = from_decimal(gauge[n].get<std::string>());
  return fam;
}

}  // namespace skewop
