#pragma once

// Averaging over the phase theta: expected center-mass decay, expected
// overlap decay, the decay-rate estimate gamma_hat, and the closed-form
// summation bound with its brute-force oracle counterpart in tests.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "amo/localization.hpp"

namespace amo {

enum class PhaseStrategy { midpoint_grid, jittered_grid, uniform_random };

inline const char* to_string(PhaseStrategy s) {
  switch (s) {
    case PhaseStrategy::midpoint_grid: return "midpoint-grid";
    case PhaseStrategy::jittered_grid: return "jittered-grid";
    case PhaseStrategy::uniform_random: return "uniform-random";
  }
  return "?";
}

struct PhasePlan {
  std::int64_t count = 1;
  PhaseStrategy strategy = PhaseStrategy::jittered_grid;
  std::uint64_t seed = 0;
};

inline std::vector<double> sample_phases(const PhasePlan& plan) {
  if (plan.count < 1) throw std::invalid_argument("sample_phases: count must be >= 1");
  const auto m = static_cast<std::size_t>(plan.count);
  std::vector<double> out(m);
  std::mt19937_64 rng(plan.seed);
  switch (plan.strategy) {
    case PhaseStrategy::midpoint_grid:
      for (std::size_t j = 0; j < m; ++j)
        out[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
      break;
    case PhaseStrategy::jittered_grid: {
      std::uniform_real_distribution<double> jit(-0.5, 0.5);
      for (std::size_t j = 0; j < m; ++j) {
        double t = (static_cast<double>(j) + 0.5 + jit(rng)) / static_cast<double>(m);
        t -= std::floor(t);
        out[j] = t;
      }
      break;
    }
    case PhaseStrategy::uniform_random: {
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      for (std::size_t j = 0; j < m; ++j) out[j] = uni(rng);
      break;
    }
  }
  return out;
}

// OperatorSpec without the phase
struct OperatorTemplate {
  double lambda = 0.0;
  double alpha = 0.0;
  std::int64_t n_min = 0;
  std::int64_t n_max = 0;

  [[nodiscard]] OperatorSpec at_phase(double theta) const {
    return OperatorSpec{lambda, alpha, theta, n_min, n_max};
  }
};

// Runs f(sample_index, eigensystem) for every phase. Work is distributed over
// threads but each sample lands in its own slot, so reductions done in index
// order are independent of the schedule.
template <typename F>
void for_each_phase(const OperatorTemplate& tmpl, const std::vector<double>& thetas, F&& f,
                    unsigned n_threads = 0) {
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(thetas.size()));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex err_mtx;
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= thetas.size() || failed.load()) return;
      try {
        const auto H = build(tmpl.at_phase(thetas[j]));
        const auto eig = eigh_tridiagonal(H);
        f(j, eig);
      } catch (const std::exception& ex) {
        std::lock_guard lk(err_mtx);
        error = "phase sample " + std::to_string(j) + " (theta=" + std::to_string(thetas[j]) +
                "): " + ex.what();
        failed.store(true);
        return;
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error(error);
}

struct ExpectationRecord {
  std::string quantity;
  std::int64_t a = 0, b = 0;  // (n, l) or (k, l)
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t m = 0;
  OperatorTemplate spec_template;
};

namespace detail {
inline ExpectationRecord reduce(const std::string& quantity, std::int64_t a, std::int64_t b,
                                const std::vector<double>& samples,
                                const OperatorTemplate& tmpl) {
  ExpectationRecord rec;
  rec.quantity = quantity;
  rec.a = a;
  rec.b = b;
  rec.m = static_cast<std::int64_t>(samples.size());
  rec.spec_template = tmpl;
  double sum = 0.0;
  for (double v : samples) sum += v;  // fixed-order accumulation
  rec.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - rec.mean) * (v - rec.mean);
    rec.std_error = std::sqrt(ss / static_cast<double>(samples.size() - 1)) /
                    std::sqrt(static_cast<double>(samples.size()));
  }
  return rec;
}
}  // namespace detail

inline ExpectationRecord expected_center_mass(const OperatorTemplate& tmpl, const PhasePlan& plan,
                                              std::int64_t n, std::int64_t l,
                                              unsigned n_threads = 0) {
  const auto thetas = sample_phases(plan);
  std::vector<double> vals(thetas.size(), 0.0);
  for_each_phase(tmpl, thetas, [&](std::size_t j, const EigenSystem& eig) {
    const auto prof = center_mass_profile(eig);
    vals[j] = prof.S(n, l);
  }, n_threads);
  return detail::reduce("center_mass", n, l, vals, tmpl);
}

struct ExpectedOverlap {
  ExpectationRecord record;       // mean of Q(k,l; theta)
  double regrouped_bound = 0.0;   // sum_n sqrt(mean S_n(k) mean S_n(l))
  double regrouped_se = 0.0;      // combined standard error of the bound terms
};

inline ExpectedOverlap expected_overlap_sum(const OperatorTemplate& tmpl, const PhasePlan& plan,
                                            std::int64_t k, std::int64_t l,
                                            unsigned n_threads = 0) {
  const auto thetas = sample_phases(plan);
  const auto m = thetas.size();
  const auto dim = static_cast<std::size_t>(tmpl.n_max - tmpl.n_min + 1);
  std::vector<double> q_vals(m, 0.0);
  std::vector<double> sk(m * dim, 0.0), sl(m * dim, 0.0);  // S_n(k), S_n(l) per sample
  for_each_phase(tmpl, thetas, [&](std::size_t j, const EigenSystem& eig) {
    q_vals[j] = overlap_sum(eig, k, l);
    const auto prof = center_mass_profile(eig);
    for (std::size_t c = 0; c < dim; ++c) {
      sk[j * dim + c] = prof.mass[c * dim + static_cast<std::size_t>(k - tmpl.n_min)];
      sl[j * dim + c] = prof.mass[c * dim + static_cast<std::size_t>(l - tmpl.n_min)];
    }
  }, n_threads);
  ExpectedOverlap out;
  out.record = detail::reduce("overlap_sum", k, l, q_vals, tmpl);
  double bound = 0.0, var = 0.0;
  std::vector<double> col(m);
  for (std::size_t c = 0; c < dim; ++c) {
    double mk = 0.0, ml = 0.0;
    for (std::size_t j = 0; j < m; ++j) mk += sk[j * dim + c];
    for (std::size_t j = 0; j < m; ++j) ml += sl[j * dim + c];
    mk /= static_cast<double>(m);
    ml /= static_cast<double>(m);
    bound += std::sqrt(mk * ml);
    if (m > 1) {
      double vk = 0.0, vl = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        vk += (sk[j * dim + c] - mk) * (sk[j * dim + c] - mk);
        vl += (sl[j * dim + c] - ml) * (sl[j * dim + c] - ml);
      }
      vk /= static_cast<double>(m - 1) * static_cast<double>(m);
      vl /= static_cast<double>(m - 1) * static_cast<double>(m);
      // first-order propagation through sqrt(mk * ml)
      if (mk > 0.0 && ml > 0.0)
        var += 0.25 * (ml / mk * vk + mk / ml * vl);
    }
  }
  out.regrouped_bound = bound;
  out.regrouped_se = std::sqrt(var);
  return out;
}

// E Q(0,k) for every k in k_list from a single phase sweep, then a decay fit.
struct GammaHatResult {
  std::vector<ExpectationRecord> per_k;
  DecayFit fit;
};

inline GammaHatResult gamma_hat(const OperatorTemplate& tmpl, const PhasePlan& plan,
                                const std::vector<std::int64_t>& k_list,
                                unsigned n_threads = 0) {
  if (k_list.size() < 5) throw std::invalid_argument("gamma_hat: need at least 5 distances");
  const auto thetas = sample_phases(plan);
  const auto m = thetas.size();
  std::vector<double> vals(m * k_list.size(), 0.0);
  for_each_phase(tmpl, thetas, [&](std::size_t j, const EigenSystem& eig) {
    for (std::size_t ki = 0; ki < k_list.size(); ++ki)
      vals[j * k_list.size() + ki] = overlap_sum(eig, 0, k_list[ki]);
  }, n_threads);
  GammaHatResult res;
  std::vector<std::pair<double, double>> pts;
  std::vector<double> col(m);
  for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
    for (std::size_t j = 0; j < m; ++j) col[j] = vals[j * k_list.size() + ki];
    auto rec = detail::reduce("overlap_sum", 0, k_list[ki], col, tmpl);
    pts.emplace_back(static_cast<double>(std::llabs(k_list[ki])), rec.mean);
    res.per_k.push_back(std::move(rec));
  }
  double lo = pts.front().first, hi = pts.front().first;
  for (const auto& [x, y] : pts) { lo = std::min(lo, x); hi = std::max(hi, x); }
  res.fit = decay_fit(pts, lo, hi);
  return res;
}

// Closed-form bound on the expected overlap given the center-mass decay
// hypothesis: d=1 uses C((1+g)/g + dist) e^{-g dist}; d>1 uses
// C (1 + 2/(1-e^{-g}))^d (1 + dist^{d-1}) e^{-g dist}.
inline double corollaryA_bound(double C, double gamma, int d, std::int64_t dist) {
  if (!(gamma > 0.0)) throw std::invalid_argument("corollaryA_bound: gamma must be positive");
  if (d < 1) throw std::invalid_argument("corollaryA_bound: d must be >= 1");
  if (dist < 0) throw std::invalid_argument("corollaryA_bound: dist must be >= 0");
  const double x = static_cast<double>(dist);
  if (d == 1) return C * ((1.0 + gamma) / gamma + x) * std::exp(-gamma * x);
  const double c1 = C * std::pow(1.0 + 2.0 / (1.0 - std::exp(-gamma)), d);
  return c1 * (1.0 + std::pow(x, d - 1)) * std::exp(-gamma * x);
}

// Expected certified sup bound per site pair, plus an exponential fit in the
// distance. The certified bound Q(k,l;theta) dominates sup_t at every sample,
// so the fitted curve upper-bounds the expected dynamical overlap.
struct EdlCheck {
  std::vector<ExpectationRecord> per_pair;  // quantity "sup_overlap_bound"
  DecayFit fit;                             // across distinct distances
};

inline EdlCheck edl_check(const OperatorTemplate& tmpl, const PhasePlan& plan,
                          const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
                          unsigned n_threads = 0) {
  if (pairs.empty()) throw std::invalid_argument("edl_check: empty pair list");
  const auto thetas = sample_phases(plan);
  const auto m = thetas.size();
  std::vector<double> vals(m * pairs.size(), 0.0);
  for_each_phase(tmpl, thetas, [&](std::size_t j, const EigenSystem& eig) {
    for (std::size_t pi = 0; pi < pairs.size(); ++pi)
      vals[j * pairs.size() + pi] = overlap_sum(eig, pairs[pi].first, pairs[pi].second);
  }, n_threads);
  EdlCheck res;
  std::vector<std::pair<double, double>> pts;
  std::vector<double> col(m);
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    for (std::size_t j = 0; j < m; ++j) col[j] = vals[j * pairs.size() + pi];
    auto rec = detail::reduce("sup_overlap_bound", pairs[pi].first, pairs[pi].second, col, tmpl);
    pts.emplace_back(static_cast<double>(std::llabs(pairs[pi].first - pairs[pi].second)),
                     rec.mean);
    res.per_pair.push_back(std::move(rec));
  }
  double lo = pts.front().first, hi = pts.front().first;
  for (const auto& [x, y] : pts) { lo = std::min(lo, x); hi = std::max(hi, x); }
  res.fit = decay_fit(pts, lo, hi);
  return res;
}

}  // namespace amo
