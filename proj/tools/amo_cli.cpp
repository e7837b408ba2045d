// Command-line front end: builds truncated almost Mathieu operators, runs the
// spectrum / decay-rate / resonance / verification pipelines and persists
// results as CSV tables plus JSON manifests.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "amo/arithmetic.hpp"
#include "amo/dynamics.hpp"
#include "amo/eigensolve.hpp"
#include "amo/expectation.hpp"
#include "amo/localization.hpp"
#include "amo/operator.hpp"
#include "amo/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitInvariant = 3;
constexpr const char* kVersion = "1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_alpha(const std::string& s) {
  if (s == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
  if (s == "sqrt2") return std::sqrt(2.0) - 1.0;
  try {
    const double a = std::stod(s);
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    return a;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse alpha: " + s);
  }
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) {
        out.push_back(std::stoll(cur));
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  return out;
}

amo::PhaseStrategy parse_strategy(const std::string& s) {
  if (s == "midpoint-grid") return amo::PhaseStrategy::midpoint_grid;
  if (s == "jittered-grid") return amo::PhaseStrategy::jittered_grid;
  if (s == "uniform-random") return amo::PhaseStrategy::uniform_random;
  throw ConfigError("unknown phase strategy: " + s);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << body;
  if (!f) throw IoError("write failed: " + path.string());
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    double elapsed_ms) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = config;
  m["timing_ms"] = elapsed_ms;
  write_text(dir / (command + "_manifest.json"), m.dump(2) + "\n");
}

void require_out_dir(const fs::path& dir) {
  if (dir.empty()) throw ConfigError("--out is required");
  if (!fs::exists(dir)) throw IoError("output directory does not exist: " + dir.string());
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
}

struct CommonOpts {
  double lambda = 2.0;
  std::string alpha_str = "golden";
  double theta = 0.3;
  std::vector<std::int64_t> window{-100, 100};
  std::int64_t phases = 200;
  std::uint64_t seed = 1;
  std::string strategy = "jittered-grid";
  std::string k_list = "10,15,20,25,30,35,40,45,50,55,60";
  double t_max = 100.0;
  std::int64_t t_count = 200;
  double eta = 0.5;
  double c0 = 2.0;
  std::int64_t horizon = 100;
  std::string out;
  unsigned threads = 0;
};

json spec_json(const amo::OperatorSpec& s) {
  return json{{"lambda", s.lambda}, {"alpha", s.alpha}, {"theta", s.theta},
              {"n_min", s.n_min},   {"n_max", s.n_max}};
}

int cmd_spectrum(const CommonOpts& opt, bool dump_eig) {
  const auto t0 = std::chrono::steady_clock::now();
  require_out_dir(opt.out);
  const amo::OperatorSpec spec{opt.lambda, parse_alpha(opt.alpha_str), opt.theta, opt.window[0],
                               opt.window[1]};
  spec.validate();
  const auto H = amo::build(spec);
  const auto eig = amo::eigh_tridiagonal(H);

  std::string csv = "# schema: spectrum-v1\nindex,energy\n";
  for (std::int64_t s = 0; s < eig.n; ++s)
    csv += std::to_string(s) + "," + fmt(eig.values[static_cast<std::size_t>(s)]) + "\n";
  write_text(fs::path(opt.out) / "eigenvalues.csv", csv);

  if (dump_eig) {
    std::string vcsv = "# schema: eigenvectors-v1\nsite";
    for (std::int64_t s = 0; s < eig.n; ++s) vcsv += ",phi" + std::to_string(s);
    vcsv += "\n";
    for (std::int64_t i = 0; i < eig.n; ++i) {
      vcsv += std::to_string(spec.n_min + i);
      for (std::int64_t s = 0; s < eig.n; ++s) vcsv += "," + fmt(eig.vec(i, s));
      vcsv += "\n";
    }
    write_text(fs::path(opt.out) / "eigenvectors.csv", vcsv);
  }

  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  json cfg = spec_json(spec);
  cfg["dump_eig"] = dump_eig;
  write_manifest(opt.out, "spectrum", cfg, ms);
  return kExitOk;
}

int cmd_gamma(const CommonOpts& opt, double synthetic_rate) {
  const auto t0 = std::chrono::steady_clock::now();
  require_out_dir(opt.out);
  const auto k_list = parse_int_list(opt.k_list);
  if (k_list.size() < 5) throw ConfigError("--k-list needs at least 5 distances");

  amo::DecayFit fit;
  std::string csv = "# schema: gamma-k-v1\nk,mean,std_error\n";
  json cfg;
  if (synthetic_rate > 0.0) {
    const auto pts = amo::planted_overlap_points(synthetic_rate, k_list);
    double lo = pts.front().first, hi = pts.front().first;
    for (const auto& [x, y] : pts) { lo = std::min(lo, x); hi = std::max(hi, x); }
    fit = amo::decay_fit(pts, lo, hi);
    for (const auto& [k, v] : pts)
      csv += fmt(k) + "," + fmt(v) + ",0\n";
    cfg["synthetic_rate"] = synthetic_rate;
    cfg["k_list"] = k_list;
  } else {
    const double alpha = parse_alpha(opt.alpha_str);
    const amo::OperatorTemplate tmpl{opt.lambda, alpha, opt.window[0], opt.window[1]};
    const amo::PhasePlan plan{opt.phases, parse_strategy(opt.strategy), opt.seed};
    const auto res = amo::gamma_hat(tmpl, plan, k_list, opt.threads);
    fit = res.fit;
    for (const auto& rec : res.per_k)
      csv += std::to_string(rec.b) + "," + fmt(rec.mean) + "," + fmt(rec.std_error) + "\n";
    cfg = {{"lambda", opt.lambda}, {"alpha", alpha}, {"n_min", opt.window[0]},
           {"n_max", opt.window[1]}, {"phases", opt.phases}, {"strategy", opt.strategy},
           {"seed", opt.seed}, {"k_list", k_list}};
  }
  write_text(fs::path(opt.out) / "gamma_k.csv", csv);

  json summary;
  summary["gamma_hat"] = fit.gamma_hat;
  summary["log_prefactor"] = fit.log_prefactor;
  summary["r_squared"] = fit.r_squared;
  summary["pointwise_min_rate"] = fit.pointwise_min_rate;
  summary["k_window"] = {fit.k_min, fit.k_max};
  summary["floored_values"] = fit.floored;
  summary["poor_fit"] = fit.r_squared < 0.5 || fit.gamma_hat < 0.05;
  write_text(fs::path(opt.out) / "gamma_summary.json", summary.dump(2) + "\n");

  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(opt.out, "gamma", cfg, ms);
  return kExitOk;
}

int cmd_resonances(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  require_out_dir(opt.out);
  if (opt.horizon < 1) throw ConfigError("--K must be >= 1");
  const double alpha = parse_alpha(opt.alpha_str);
  const auto rep = amo::resonances(opt.theta, alpha, opt.eta, opt.horizon, opt.c0);

  std::string csv = "# schema: resonances-v1\nk,dist,threshold\n";
  for (auto k : rep.resonant_k) {
    const double f = k == 0 ? 2.0 * opt.theta - std::nearbyint(2.0 * opt.theta)
                            : amo::fract_phase(-k, alpha, 2.0 * opt.theta);
    const double dist = k == 0 ? std::fabs(f) : std::min(f, 1.0 - f);
    csv += std::to_string(k) + "," + fmt(dist) + "," +
           fmt(std::exp(-opt.eta * static_cast<double>(std::llabs(k)))) + "\n";
  }
  write_text(fs::path(opt.out) / "resonances.csv", csv);

  std::string wcsv = "# schema: resonance-windows-v1\nlo,hi\n";
  for (const auto& w : rep.allowed_windows) wcsv += fmt(w.lo) + "," + fmt(w.hi) + "\n";
  write_text(fs::path(opt.out) / "resonance_windows.csv", wcsv);

  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(opt.out, "resonances",
                 json{{"theta", opt.theta}, {"alpha", alpha}, {"eta", opt.eta},
                      {"c0", opt.c0}, {"K", opt.horizon}},
                 ms);
  return kExitOk;
}

int cmd_verify(const CommonOpts& opt, const std::string& pairs_str, bool corrupt) {
  const auto t0 = std::chrono::steady_clock::now();
  require_out_dir(opt.out);
  const double alpha = parse_alpha(opt.alpha_str);
  const amo::OperatorSpec spec{opt.lambda, alpha, opt.theta, opt.window[0], opt.window[1]};
  spec.validate();

  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  if (pairs_str == "default") {
    std::mt19937_64 rng(opt.seed);
    const std::int64_t inner = std::max<std::int64_t>(1, spec.dim() / 4);
    std::uniform_int_distribution<std::int64_t> site(-inner, inner);
    for (int i = 0; i < 20; ++i) pairs.emplace_back(site(rng), site(rng));
  } else {
    for (auto v = parse_int_list(pairs_str); !v.empty();) {
      if (v.size() % 2 != 0) throw ConfigError("--pairs needs an even count of sites");
      for (std::size_t i = 0; i + 1 < v.size(); i += 2) pairs.emplace_back(v[i], v[i + 1]);
      break;
    }
  }
  if (pairs.empty()) throw ConfigError("empty pair list");

  const auto H = amo::build(spec);
  auto eig = amo::eigh_tridiagonal(H);
  if (corrupt) eig.vectors[static_cast<std::size_t>(eig.n)] += 0.2;  // test hook
  const auto prof = amo::center_mass_profile(eig);
  const amo::TimeGrid grid(opt.t_max, opt.t_count);

  json verdict;
  std::vector<std::string> failures;

  // Theorem A chain on every pair
  try {
    for (const auto& [k, l] : pairs) (void)amo::theoremA_pointwise(eig, prof, k, l, grid);
    verdict["theorem_a_chain"] = "pass";
  } catch (const amo::InvariantViolation& ex) {
    verdict["theorem_a_chain"] = "fail";
    failures.emplace_back(ex.what());
  }

  // completeness regrouped by center
  {
    double worst = 0.0;
    for (std::int64_t l = spec.n_min; l <= spec.n_max; ++l) {
      double acc = 0.0;
      for (std::int64_t n = spec.n_min; n <= spec.n_max; ++n) acc += prof.S(n, l);
      worst = std::max(worst, std::fabs(acc - 1.0));
    }
    verdict["completeness_defect"] = worst;
    if (worst > 1e-10) {
      verdict["completeness"] = "fail";
      failures.emplace_back("completeness defect above 1e-10");
    } else {
      verdict["completeness"] = "pass";
    }
  }

  // unitarity of the spectral propagator
  {
    std::mt19937_64 rng(opt.seed + 1);
    std::normal_distribution<double> gauss;
    std::vector<std::complex<double>> psi(static_cast<std::size_t>(eig.n));
    double nrm = 0.0;
    for (auto& z : psi) { z = {gauss(rng), gauss(rng)}; nrm += std::norm(z); }
    nrm = std::sqrt(nrm);
    double worst = 0.0;
    for (std::int64_t i = 0; i < grid.count; i += grid.count / 10) {
      const auto out = amo::evolve(eig, psi, grid.t(i));
      double n2 = 0.0;
      for (const auto& z : out) n2 += std::norm(z);
      worst = std::max(worst, std::fabs(std::sqrt(n2) - nrm) / nrm);
    }
    verdict["unitarity_defect"] = worst;
    if (worst > 1e-10) {
      verdict["unitarity"] = "fail";
      failures.emplace_back("unitarity defect above 1e-10");
    } else {
      verdict["unitarity"] = "pass";
    }
  }

  // d=1 summation lemma against the closed form
  {
    bool ok = true;
    for (double g : {0.1, 0.5, 1.0, 2.0}) {
      for (std::int64_t m = 0; m <= 100; ++m) {
        const std::int64_t reach = static_cast<std::int64_t>(std::ceil(40.0 / g)) + m + 2;
        double brute = 0.0;
        for (std::int64_t n = -reach; n <= m + reach; ++n)
          brute += std::exp(-g * static_cast<double>(std::llabs(n) + std::llabs(n - m)));
        if (brute > amo::corollaryA_bound(1.0, g, 1, m) + 1e-12) ok = false;
      }
    }
    verdict["summation_lemma"] = ok ? "pass" : "fail";
    if (!ok) failures.emplace_back("corollary A summation lemma violated");
  }

  verdict["failures"] = failures;
  verdict["ok"] = failures.empty();
  write_text(fs::path(opt.out) / "verify_verdict.json", verdict.dump(2) + "\n");

  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  json cfg = spec_json(spec);
  cfg["t_max"] = opt.t_max;
  cfg["t_count"] = opt.t_count;
  cfg["pairs"] = pairs_str;
  cfg["seed"] = opt.seed;
  cfg["corrupt"] = corrupt;
  write_manifest(opt.out, "verify", cfg, ms);
  return failures.empty() ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for dynamical localization of the almost Mathieu operator"};
  app.require_subcommand(1);

  CommonOpts opt;
  bool dump_eig = false;
  double synthetic_rate = 0.0;
  std::string pairs_str = "default";
  bool corrupt = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--lambda", opt.lambda, "coupling (> 0)");
    sub->add_option("--alpha", opt.alpha_str, "frequency: decimal in (0,1), 'golden' or 'sqrt2'");
    sub->add_option("--theta", opt.theta, "phase in [0,1)");
    sub->add_option("--window", opt.window, "truncation window n_min n_max")->expected(2);
    sub->add_option("--phases", opt.phases, "number of phase samples M");
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--strategy", opt.strategy,
                    "phase sampling: midpoint-grid | jittered-grid | uniform-random");
    sub->add_option("--k-list", opt.k_list, "comma-separated distances");
    sub->add_option("--t-max", opt.t_max, "time grid upper end");
    sub->add_option("--t-count", opt.t_count, "time grid point count");
    sub->add_option("--eta", opt.eta, "resonance strength parameter");
    sub->add_option("--c0", opt.c0, "window constant C0 (> 1)");
    sub->add_option("--K", opt.horizon, "resonance scan horizon");
    sub->add_option("--threads", opt.threads, "worker threads (0 = auto)");
    sub->add_option("--out", opt.out, "output directory")->required();
  };

  auto* sp = app.add_subcommand("spectrum", "eigenvalues of a truncated operator");
  add_common(sp);
  sp->add_flag("--dump-eig", dump_eig, "also write the eigenvector matrix");

  auto* ga = app.add_subcommand("gamma", "decay rate of the expected overlap");
  add_common(ga);
  ga->add_option("--synthetic-rate", synthetic_rate,
                 "bypass the operator pipeline with planted profiles at this rate");

  auto* re = app.add_subcommand("resonances", "eta-resonant integers of a phase");
  add_common(re);

  auto* ve = app.add_subcommand("verify", "run the invariant suite");
  add_common(ve);
  ve->add_option("--pairs", pairs_str, "site pairs k1,l1,k2,l2,... or 'default'");
  ve->add_flag("--corrupt", corrupt, "fault-injection hook: corrupt the eigensystem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sp->parsed()) return cmd_spectrum(opt, dump_eig);
    if (ga->parsed()) return cmd_gamma(opt, synthetic_rate);
    if (re->parsed()) return cmd_resonances(opt);
    if (ve->parsed()) return cmd_verify(opt, pairs_str, corrupt);
  } catch (const ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return kExitConfig;
  } catch (const IoError& ex) {
    std::fprintf(stderr, "io error: %s\n", ex.what());
    return kExitIo;
  } catch (const amo::InvariantViolation& ex) {
    std::fprintf(stderr, "invariant violation: %s\n", ex.what());
    return kExitInvariant;
  } catch (const std::invalid_argument& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return kExitConfig;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitIo;
  }
  return kExitConfig;
}
