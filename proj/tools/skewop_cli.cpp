// Command-line driver for the skew-orthogonal polynomial toolkit.
//
// Subcommands form a file-based pipeline:
//   build            weight + beta -> family JSON (extended precision)
//   check-operators  family JSON -> operator identity report JSON
//   kernel           family JSON -> kernel grid CSV (S, D, I, R2)
//   density          family JSON or closed form -> density CSV
//   sample           Monte Carlo spectra -> eigenvalue CSV (+ histograms)
//   compare          histogram CSV vs analytic CSV -> report JSON
//
// Every command is a pure function of (inputs, flags, seed): outputs are
// byte-reproducible. Each output file gets a JSON manifest recording the
// full parameter set. Exit codes: 0 success, 2 invalid input, 3 a check
// failed, 4 numerical failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skewop/asymptotics.hpp"
#include "skewop/errors.hpp"
#include "skewop/kernels.hpp"
#include "skewop/operators.hpp"
#include "skewop/potential.hpp"
#include "skewop/prec.hpp"
#include "skewop/rmtmc.hpp"
#include "skewop/skewproduct.hpp"
#include "skewop/sopfamily.hpp"

using nlohmann::json;
using namespace skewop;

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << text;
  if (!out) throw ValidationError("write failed: " + path);
}

struct Grid {
  double lo = 0, hi = 0;
  int n = 0;
};

// "lo:hi:count" with inclusive endpoints (count = bins for binned output)
Grid parse_grid(const std::string& spec) {
  Grid g;
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.n, &tail) !=
          3 ||
      g.n < 1)
    throw ValidationError("malformed grid spec (want lo:hi:count): " + spec);
  if (g.n > 1 && !(g.hi > g.lo))
    throw ValidationError("grid needs hi > lo: " + spec);
  return g;
}

std::vector<double> grid_points(const Grid& g) {
  std::vector<double> xs(g.n);
  for (int i = 0; i < g.n; ++i)
    xs[i] = (g.n == 1) ? g.lo : g.lo + (g.hi - g.lo) * i / (g.n - 1);
  return xs;
}

Potential parse_potential_arg(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg[0] != '{') text = read_file(arg);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("u") || !j["u"].is_array())
    throw ValidationError("potential must be JSON like {\"u\":[0,1]}");
  std::vector<double> u;
  for (const auto& v : j["u"]) {
    if (!v.is_number()) throw ValidationError("potential u entries must be numbers");
    u.push_back(v.get<double>());
  }
  return Potential(u);
}

// One manifest per command run, alongside the primary output.
class Manifest {
 public:
  Manifest(std::string command, int argc, char** argv)
      : t0_(std::chrono::steady_clock::now()) {
    j_["schema"] = 1;
    j_["tool"] = "skewop";
    j_["version"] = kToolVersion;
    j_["command"] = std::move(command);
    for (int i = 0; i < argc; ++i) j_["argv"].push_back(argv[i]);
    j_["parameters"] = json::object();
    j_["outputs"] = json::array();
  }
  json& params() { return j_["parameters"]; }
  void add_output(const std::string& path) { j_["outputs"].push_back(path); }
  void write(const std::string& explicit_path, const std::string& primary_out) {
    std::string path = explicit_path.empty()
                           ? primary_out + ".manifest.json"
                           : explicit_path;
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0_)
                  .count();
    j_["wall_ms"] = static_cast<std::int64_t>(ms);
    write_file(path, j_.dump(2) + "\n");
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point t0_;
};

// Fixed-order parallel map: results land by index, thread count does not
// affect output. Precision is a process-wide setting, so workers inherit it.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&]() {
    try {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct FamilyContext {
  SopFamily fam;
  SkewProducts sp;
  FamilyContext(SopFamily f, SkewProducts s)
      : fam(std::move(f)), sp(std::move(s)) {}
};

// Load a family file and rebuild its product context at the recorded
// precision (quadrature tables are deterministic given beta, V, depth).
FamilyContext load_family(const std::string& path) {
  SopFamily fam = SopFamily::deserialize(read_file(path));
  set_precision_bits(fam.precision_bits());
  SkewProducts sp(fam.beta(), fam.potential(), fam.n_max());
  return FamilyContext(std::move(fam), std::move(sp));
}

// ---------------------------------------------------------------- build

int run_build(int argc, char** argv, int beta, const std::string& pot_arg,
              int nmax, const std::string& norm_str, unsigned bits,
              const std::string& out, const std::string& manifest_path) {
  Manifest man("build", argc, argv);
  Potential pot = parse_potential_arg(pot_arg);
  Normalization norm = normalization_from_string(norm_str);
  PrecisionScope scope(bits);

  // insufficient working precision surfaces as a numerical failure naming
  // the failing order or moment; at the command boundary that is an input
  // problem (the precision flag was too low), hence exit 2
  SopFamily fam = [&] {
    try {
      SkewProducts sp(beta, pot, nmax + 1);
      return build_sop(sp, nmax, norm);
    } catch (const NumericalError& e) {
      throw ValidationError(std::string(e.what()) +
                            " (raise --precision and rebuild)");
    }
  }();
  write_file(out, fam.serialize());

  man.params() = {{"beta", beta},
                  {"potential", pot.to_string()},
                  {"nmax", nmax},
                  {"normalization", to_string(norm)},
                  {"precision_bits", bits}};
  man.add_output(out);
  man.write(manifest_path, out);

  std::cout << "family written to " << out << " (" << fam.pairs()
            << " pairs, beta " << beta << ", " << bits << "-bit, ghat_0 = "
            << fmt17(to_double(fam.ghat(0))) << ")\n";
  return 0;
}

// ------------------------------------------------------- check-operators

int run_check_operators(int argc, char** argv, const std::string& family_path,
                        int M, const std::string& out,
                        const std::string& manifest_path) {
  Manifest man("check-operators", argc, argv);
  FamilyContext ctx = load_family(family_path);
  PrecisionScope scope(ctx.fam.precision_bits());

  BandedOperator Q = build_Q(ctx.fam, ctx.sp, M);
  BandedOperator P = build_P(ctx.fam, ctx.sp, M);
  BandedOperator R = build_R(ctx.fam, ctx.sp, M);
  IdentityReport rep = check_identities(Q, P, R, ctx.fam.potential());

  json j;
  j["beta"] = ctx.fam.beta();
  j["potential"] = ctx.fam.potential().to_string();
  j["size"] = M;
  j["bandwidths"] = {{"Q", Q.upper_bandwidth},
                     {"P", P.upper_bandwidth},
                     {"R", R.upper_bandwidth}};
  j["identities"] = json::parse(rep.serialize());
  j["all_pass"] = rep.all_pass;
  if (!out.empty()) {
    write_file(out, j.dump(2) + "\n");
    man.add_output(out);
  }
  man.params() = {{"family", family_path}, {"size", M}};
  man.write(manifest_path, out.empty() ? family_path + ".check" : out);

  for (const auto& item : rep.items)
    std::cout << (item.pass ? "pass " : "FAIL ") << item.name
              << "  residual " << fmt17(item.residual) << " (tol "
              << fmt17(item.tolerance) << ")\n";
  if (!rep.all_pass) {
    std::string worst;
    double w = -1;
    for (const auto& item : rep.items)
      if (!item.pass && item.residual > w) w = item.residual, worst = item.name;
    throw CheckFailure("operator identity failed: " + worst +
                       " residual " + fmt17(w));
  }
  std::cout << "all operator identities pass (size " << M << ")\n";
  return 0;
}

// ---------------------------------------------------------------- kernel

int run_kernel(int argc, char** argv, const std::string& family_path,
               int beta_flag, int N, const std::string& method_str,
               const std::string& xspec, const std::string& yspec,
               const std::string& out, int threads,
               const std::string& manifest_path) {
  Manifest man("kernel", argc, argv);
  Grid gx = parse_grid(xspec);
  Grid gy = parse_grid(yspec.empty() ? xspec : yspec);
  std::vector<double> xs = grid_points(gx), ys = grid_points(gy);
  const int total = static_cast<int>(xs.size() * ys.size());
  std::ostringstream csv;

  if (method_str == "asymptotic") {
    int beta = beta_flag;
    if (!family_path.empty()) beta = load_family(family_path).fam.beta();
    if (beta == 0)
      throw ValidationError("kernel: asymptotic method needs --beta or --family");
    std::vector<double> S(total);
    parallel_for(total, threads, [&](int idx) {
      int i = idx / static_cast<int>(ys.size());
      int j = idx % static_cast<int>(ys.size());
      S[idx] = kernel_S_asymptotic(beta, N, xs[i], ys[j]);
    });
    csv << "x,y,S\n";
    for (int idx = 0; idx < total; ++idx) {
      int i = idx / static_cast<int>(ys.size());
      int j = idx % static_cast<int>(ys.size());
      csv << fmt17(xs[i]) << ',' << fmt17(ys[j]) << ',' << fmt17(S[idx])
          << '\n';
    }
  } else {
    if (family_path.empty())
      throw ValidationError("kernel: --family required for method " +
                            method_str);
    FamilyContext ctx = load_family(family_path);
    PrecisionScope scope(ctx.fam.precision_bits());
    KernelSet ks(ctx.fam, ctx.sp, N, kernel_method_from_string(method_str));
    struct Row {
      double S, D, I, R2;
    };
    std::vector<Row> rows(total);
    // touch one point on this thread first so lazy shared tables are built
    // before workers start
    (void)ks.kernel_S(Real(xs[0]), Real(ys[0]));
    parallel_for(total, threads, [&](int idx) {
      int i = idx / static_cast<int>(ys.size());
      int j = idx % static_cast<int>(ys.size());
      Real x(xs[i]), y(ys[j]);
      rows[idx].S = to_double(ks.kernel_S(x, y));
      rows[idx].D = to_double(ks.kernel_D(x, y));
      rows[idx].I = to_double(ks.kernel_I(x, y));
      rows[idx].R2 = to_double(ks.r2(x, y));
    });
    csv << "x,y,S,D,I,R2\n";
    for (int idx = 0; idx < total; ++idx) {
      int i = idx / static_cast<int>(ys.size());
      int j = idx % static_cast<int>(ys.size());
      csv << fmt17(xs[i]) << ',' << fmt17(ys[j]) << ',' << fmt17(rows[idx].S)
          << ',' << fmt17(rows[idx].D) << ',' << fmt17(rows[idx].I) << ','
          << fmt17(rows[idx].R2) << '\n';
    }
  }

  write_file(out, csv.str());
  man.params() = {{"family", family_path}, {"beta", beta_flag},
                  {"N", N},                {"method", method_str},
                  {"xgrid", xspec},        {"ygrid", yspec},
                  {"threads", threads}};
  man.add_output(out);
  man.write(manifest_path, out);
  std::cout << "kernel grid (" << total << " points) written to " << out
            << "\n";
  return 0;
}

// --------------------------------------------------------------- density

// Simpson average of f over [a, b] with four intervals.
template <class F>
double bin_average(const F& f, double a, double b) {
  double h = (b - a) / 4.0;
  return (f(a) + 4.0 * f(a + h) + 2.0 * f(a + 2.0 * h) + 4.0 * f(a + 3.0 * h) +
          f(b)) /
         12.0;
}

int run_density(int argc, char** argv, const std::string& family_path,
                int beta_flag, int N, const std::string& method_str,
                const std::string& xspec, bool bin_avg, const std::string& out,
                int threads, const std::string& manifest_path) {
  Manifest man("density", argc, argv);
  Grid g = parse_grid(xspec);
  std::ostringstream csv;

  // point evaluator for the chosen method
  std::function<double(double)> rho;
  std::unique_ptr<FamilyContext> ctx;
  std::unique_ptr<KernelSet> ks;
  std::unique_ptr<PrecisionScope> scope;
  if (method_str == "asymptotic") {
    int beta = beta_flag;
    if (!family_path.empty()) beta = load_family(family_path).fam.beta();
    if (beta == 0)
      throw ValidationError(
          "density: asymptotic method needs --beta or --family");
    rho = [beta, N](double x) { return semicircle_density(beta, N, x); };
  } else {
    if (family_path.empty())
      throw ValidationError("density: --family required for method " +
                            method_str);
    ctx = std::make_unique<FamilyContext>(load_family(family_path));
    scope = std::make_unique<PrecisionScope>(ctx->fam.precision_bits());
    ks = std::make_unique<KernelSet>(ctx->fam, ctx->sp, N,
                                     kernel_method_from_string(method_str));
    rho = [&ksr = *ks](double x) {
      return to_double(ksr.level_density(Real(x)));
    };
    (void)rho(g.lo);  // warm shared tables before threading
  }

  if (bin_avg) {
    // grid spec is lo:hi:bins; emit per-bin averages for histogram
    // comparison (a histogram estimates the cell average, and finite-size
    // densities oscillate within bins)
    const int bins = g.n;
    const double w = (g.hi - g.lo) / bins;
    if (!(w > 0)) throw ValidationError("bin-average needs hi > lo");
    std::vector<double> vals(bins);
    parallel_for(bins, threads, [&](int b) {
      vals[b] = bin_average(rho, g.lo + b * w, g.lo + (b + 1) * w);
    });
    csv << "# lo=" << fmt17(g.lo) << " hi=" << fmt17(g.hi) << " bins=" << bins
        << " kind=bin-average\n";
    csv << "bin_lo,bin_hi,rho\n";
    for (int b = 0; b < bins; ++b)
      csv << fmt17(g.lo + b * w) << ',' << fmt17(g.lo + (b + 1) * w) << ','
          << fmt17(vals[b]) << '\n';
  } else {
    std::vector<double> xs = grid_points(g);
    std::vector<double> vals(xs.size());
    parallel_for(static_cast<int>(xs.size()), threads,
                 [&](int i) { vals[i] = rho(xs[i]); });
    csv << "x,rho\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      csv << fmt17(xs[i]) << ',' << fmt17(vals[i]) << '\n';
  }

  write_file(out, csv.str());
  man.params() = {{"family", family_path}, {"beta", beta_flag},
                  {"N", N},                {"method", method_str},
                  {"xgrid", xspec},        {"bin_average", bin_avg},
                  {"threads", threads}};
  man.add_output(out);
  man.write(manifest_path, out);
  std::cout << "density written to " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------- sample

void write_histogram_csv(const std::string& path, const HistogramEstimate& h) {
  std::ostringstream csv;
  csv << "# samples=" << h.samples << " lo=" << fmt17(h.lo)
      << " hi=" << fmt17(h.hi) << " bins=" << h.bins << " dims=" << h.dims
      << "\n";
  if (h.dims == 1) {
    const double w = (h.hi - h.lo) / h.bins;
    csv << "bin_lo,bin_hi,count,density,stderr\n";
    for (int b = 0; b < h.bins; ++b)
      csv << fmt17(h.lo + b * w) << ',' << fmt17(h.lo + (b + 1) * w) << ','
          << h.counts[static_cast<std::size_t>(b)] << ',' << fmt17(h.density(b))
          << ',' << fmt17(h.stderr_at(b)) << '\n';
  } else {
    const double w = (h.hi - h.lo) / h.bins;
    csv << "xbin_lo,xbin_hi,ybin_lo,ybin_hi,count,density,stderr\n";
    for (int i = 0; i < h.bins; ++i)
      for (int j = 0; j < h.bins; ++j) {
        int flat = i * h.bins + j;
        csv << fmt17(h.lo + i * w) << ',' << fmt17(h.lo + (i + 1) * w) << ','
            << fmt17(h.lo + j * w) << ',' << fmt17(h.lo + (j + 1) * w) << ','
            << h.counts[static_cast<std::size_t>(flat)] << ','
            << fmt17(h.density(flat)) << ',' << fmt17(h.stderr_at(flat))
            << '\n';
      }
  }
  write_file(path, csv.str());
}

int run_sample(int argc, char** argv, int beta, int dim, int samples,
               std::uint64_t seed, std::uint64_t stream0,
               const std::string& method_str, int threads,
               const std::string& out, int hist_bins,
               const std::string& hist_range, const std::string& hist_out,
               int pair_bins, const std::string& pair_range,
               const std::string& pair_out, const std::string& manifest_path) {
  Manifest man("sample", argc, argv);
  SampleMethod method = sample_method_from_string(method_str);
  auto xs = sample_many(beta, dim, seed, stream0, samples, method, threads);

  if (!out.empty()) {
    std::ostringstream csv;
    csv << "sample,k,x\n";
    for (int i = 0; i < samples; ++i)
      for (int k = 0; k < dim; ++k)
        csv << i << ',' << k << ','
            << fmt17(xs[static_cast<std::size_t>(i)]
                         .eigenvalues[static_cast<std::size_t>(k)])
            << '\n';
    write_file(out, csv.str());
    man.add_output(out);
  }
  if (!hist_out.empty()) {
    Grid hg = parse_grid(hist_range + ":" + std::to_string(hist_bins));
    write_histogram_csv(hist_out, density_histogram(xs, hg.lo, hg.hi, hg.n));
    man.add_output(hist_out);
  }
  if (!pair_out.empty()) {
    Grid pg = parse_grid(pair_range + ":" + std::to_string(pair_bins));
    write_histogram_csv(pair_out, pair_histogram(xs, pg.lo, pg.hi, pg.n));
    man.add_output(pair_out);
  }

  man.params() = {{"beta", beta},       {"dim", dim},
                  {"samples", samples}, {"seed", seed},
                  {"stream0", stream0}, {"method", method_str},
                  {"threads", threads}};
  man.write(manifest_path, !out.empty() ? out
                           : !hist_out.empty() ? hist_out
                                               : pair_out);
  std::cout << samples << " spectra sampled (beta " << beta << ", " << dim
            << " levels, " << method_str << ")\n";
  return 0;
}

// --------------------------------------------------------------- compare

HistogramEstimate parse_histogram_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("# samples=", 0) != 0)
    throw ValidationError("estimate file lacks the histogram header: " + path);
  HistogramEstimate h;
  unsigned long long samples = 0;
  int dims = 0;
  if (std::sscanf(line.c_str(), "# samples=%llu lo=%lf hi=%lf bins=%d dims=%d",
                  &samples, &h.lo, &h.hi, &h.bins, &dims) != 5)
    throw ValidationError("malformed histogram header in " + path);
  h.samples = samples;
  h.dims = dims;
  if (dims != 1)
    throw ValidationError("compare handles one-dimensional histograms");
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double lo = 0, hi = 0, density = 0, se = 0;
    unsigned long long count = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%llu,%lf,%lf", &lo, &hi, &count,
                    &density, &se) != 5)
      throw ValidationError("malformed histogram row in " + path);
    h.counts.push_back(count);
  }
  if (static_cast<int>(h.counts.size()) != h.bins)
    throw ValidationError("histogram row count does not match bins in " + path);
  return h;
}

struct AnalyticGrid {
  std::vector<double> lo, hi, value;
};

AnalyticGrid parse_analytic_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  AnalyticGrid g;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double a = 0, b = 0, v = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &v) != 3)
      continue;  // header line
    g.lo.push_back(a);
    g.hi.push_back(b);
    g.value.push_back(v);
  }
  if (g.value.empty())
    throw ValidationError("no analytic rows found in " + path);
  return g;
}

int run_compare(int argc, char** argv, const std::string& estimate_path,
                const std::string& analytic_path, const std::string& out,
                const std::string& manifest_path) {
  Manifest man("compare", argc, argv);
  HistogramEstimate h = parse_histogram_csv(estimate_path);
  AnalyticGrid a = parse_analytic_csv(analytic_path);
  if (static_cast<int>(a.value.size()) != h.bins)
    throw ValidationError("grid misalignment: estimate has " +
                          std::to_string(h.bins) + " bins, analytic has " +
                          std::to_string(a.value.size()));
  const double w = (h.hi - h.lo) / h.bins;
  for (int b = 0; b < h.bins; ++b) {
    double lo = h.lo + b * w, hi = h.lo + (b + 1) * w;
    if (std::fabs(a.lo[b] - lo) > 1e-9 * (1.0 + std::fabs(lo)) ||
        std::fabs(a.hi[b] - hi) > 1e-9 * (1.0 + std::fabs(hi)))
      throw ValidationError("grid misalignment at bin " + std::to_string(b));
  }

  CompareReport rep = compare_histogram(h, a.value);
  json j;
  j["bins"] = h.bins;
  j["outliers"] = rep.outliers;
  j["allowed"] = std::max<int>(1, h.bins / 20);
  j["chi2"] = rep.chi2;
  j["pass"] = rep.pass;
  j["z"] = rep.z;
  if (!out.empty()) {
    write_file(out, j.dump(2) + "\n");
    man.add_output(out);
  }
  man.params() = {{"estimate", estimate_path}, {"analytic", analytic_path}};
  man.write(manifest_path, out.empty() ? estimate_path + ".report" : out);

  std::cout << (rep.pass ? "PASS" : "FAIL") << ": " << rep.outliers
            << " of " << h.bins << " bins outside 3 standard errors (chi2 "
            << fmt17(rep.chi2) << ")\n";
  if (!rep.pass)
    throw CheckFailure("histogram comparison failed the one-in-twenty rule");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skew-orthogonal polynomial families, operator matrices, "
               "correlation kernels and Monte Carlo spectra"};
  app.require_subcommand(1);

  // build
  auto* cb = app.add_subcommand("build", "construct a family file");
  int b_beta = 1, b_nmax = 15;
  unsigned b_bits = 256;
  std::string b_pot, b_norm = "monic", b_out = "family.json", b_man;
  cb->add_option("--beta", b_beta, "ensemble symmetry (1 or 4)")->required();
  cb->add_option("--potential", b_pot,
                 "weight JSON {\"u\":[...]} inline or a file path")
      ->required();
  cb->add_option("--nmax", b_nmax, "highest polynomial order (odd)")
      ->required();
  cb->add_option("--normalization", b_norm, "monic | paper-gaussian");
  cb->add_option("--precision", b_bits, "working precision in bits")
      ->envname("SKEWOP_PRECISION");
  cb->add_option("--out", b_out, "family output path");
  cb->add_option("--manifest", b_man, "manifest path");

  // check-operators
  auto* cc = app.add_subcommand("check-operators",
                                "operator identity suite for a family");
  std::string c_family, c_out, c_man;
  int c_M = 64;
  cc->add_option("--family", c_family, "family file")->required();
  cc->add_option("--size", c_M, "truncation size (even)");
  cc->add_option("--out", c_out, "report JSON path");
  cc->add_option("--manifest", c_man, "manifest path");

  // kernel
  auto* ck = app.add_subcommand("kernel", "kernel grid CSV");
  std::string k_family, k_method = "direct", k_x, k_y, k_out = "kernel.csv",
              k_man;
  int k_beta = 0, k_N = 0, k_threads = 1;
  ck->add_option("--family", k_family, "family file");
  ck->add_option("--beta", k_beta, "ensemble (asymptotic method only)");
  ck->add_option("--N", k_N, "pair count")->required();
  ck->add_option("--method", k_method,
                 "direct | gcd | gaussian-reduced | asymptotic");
  ck->add_option("--xgrid", k_x, "x grid lo:hi:count")->required();
  ck->add_option("--ygrid", k_y, "y grid lo:hi:count (default: xgrid)");
  ck->add_option("--threads", k_threads, "worker cap");
  ck->add_option("--out", k_out, "CSV path");
  ck->add_option("--manifest", k_man, "manifest path");

  // density
  auto* cd = app.add_subcommand("density", "one-level density CSV");
  std::string d_family, d_method = "direct", d_x, d_out = "density.csv", d_man;
  int d_beta = 0, d_N = 0, d_threads = 1;
  bool d_binavg = false;
  cd->add_option("--family", d_family, "family file");
  cd->add_option("--beta", d_beta, "ensemble (asymptotic method only)");
  cd->add_option("--N", d_N, "pair count")->required();
  cd->add_option("--method", d_method,
                 "direct | gcd | gaussian-reduced | asymptotic");
  cd->add_option("--xgrid", d_x, "grid lo:hi:count (bins with --bin-average)")
      ->required();
  cd->add_flag("--bin-average", d_binavg,
               "emit per-bin Simpson averages for histogram comparison");
  cd->add_option("--threads", d_threads, "worker cap");
  cd->add_option("--out", d_out, "CSV path");
  cd->add_option("--manifest", d_man, "manifest path");

  // sample
  auto* cs = app.add_subcommand("sample", "Monte Carlo spectra");
  int s_beta = 1, s_dim = 2, s_samples = 1000, s_threads = 1;
  std::uint64_t s_seed = 0, s_stream0 = 0;
  std::string s_method = "tridiagonal", s_out = "samples.csv", s_man;
  int s_hist_bins = 20, s_pair_bins = 20;
  std::string s_hist_range, s_hist_out, s_pair_range, s_pair_out;
  cs->add_option("--beta", s_beta, "ensemble symmetry (1 or 4)")->required();
  cs->add_option("--dim", s_dim, "levels per spectrum")->required();
  cs->add_option("--samples", s_samples, "number of spectra")->required();
  cs->add_option("--seed", s_seed, "RNG seed");
  cs->add_option("--stream0", s_stream0, "first stream index");
  cs->add_option("--method", s_method, "tridiagonal | dense");
  cs->add_option("--threads", s_threads, "worker cap");
  cs->add_option("--out", s_out, "eigenvalue CSV path (empty to skip)");
  cs->add_option("--hist-bins", s_hist_bins, "density histogram bins");
  cs->add_option("--hist-range", s_hist_range, "density histogram lo:hi");
  cs->add_option("--hist-out", s_hist_out, "density histogram CSV path");
  cs->add_option("--pair-bins", s_pair_bins, "pair histogram bins per axis");
  cs->add_option("--pair-range", s_pair_range, "pair histogram lo:hi");
  cs->add_option("--pair-out", s_pair_out, "pair histogram CSV path");
  cs->add_option("--manifest", s_man, "manifest path");

  // compare
  auto* cp = app.add_subcommand("compare",
                                "histogram vs analytic grid report");
  std::string p_est, p_ana, p_out = "report.json", p_man;
  cp->add_option("--estimate", p_est, "histogram CSV from sample")->required();
  cp->add_option("--analytic", p_ana, "analytic CSV from density")
      ->required();
  cp->add_option("--out", p_out, "report JSON path");
  cp->add_option("--manifest", p_man, "manifest path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cb->parsed())
      return run_build(argc, argv, b_beta, b_pot, b_nmax, b_norm, b_bits,
                       b_out, b_man);
    if (cc->parsed())
      return run_check_operators(argc, argv, c_family, c_M, c_out, c_man);
    if (ck->parsed())
      return run_kernel(argc, argv, k_family, k_beta, k_N, k_method, k_x, k_y,
                        k_out, k_threads, k_man);
    if (cd->parsed())
      return run_density(argc, argv, d_family, d_beta, d_N, d_method, d_x,
                         d_binavg, d_out, d_threads, d_man);
    if (cs->parsed()) {
      if (s_hist_out.empty() != s_hist_range.empty())
        throw ValidationError("sample: --hist-out needs --hist-range");
      if (s_pair_out.empty() != s_pair_range.empty())
        throw ValidationError("sample: --pair-out needs --pair-range");
      return run_sample(argc, argv, s_beta, s_dim, s_samples, s_seed,
                        s_stream0, s_method, s_threads, s_out, s_hist_bins,
                        s_hist_range, s_hist_out, s_pair_bins, s_pair_range,
                        s_pair_out, s_man);
    }
    if (cp->parsed())
      return run_compare(argc, argv, p_est, p_ana, p_out, p_man);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 4;
  }
}
