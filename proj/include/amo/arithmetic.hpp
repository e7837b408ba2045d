#pragma once

// Continued fractions, ||q*alpha|| arithmetic, Diophantine checks and
// resonance detection for phases of the almost Mathieu potential.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace amo {

// Distance of q*alpha to the nearest integer, computed with an exact
// two-product (fma) so cancellation at large q does not eat the result.
// Error stays below 1e-15 for q up to 1e6.
inline double norm_dist(std::int64_t q, double alpha) {
  if (q < 1) throw std::invalid_argument("norm_dist: q must be >= 1");
  const double qd = static_cast<double>(q);
  const double p = qd * alpha;
  const double corr = std::fma(qd, alpha, -p);  // exact residue of the product
  double r = p - std::nearbyint(p);             // exact for |p| < 2^52
  r += corr;
  r -= std::nearbyint(r);
  return std::fabs(r);
}

// Fractional part of n*alpha + theta mapped to [0,1), with the same
// compensated reduction. Used for potential phases at large |n|.
inline double fract_phase(std::int64_t n, double alpha, double theta) {
  const double nd = static_cast<double>(n);
  const double p = nd * alpha;
  const double corr = std::fma(nd, alpha, -p);
  // two-sum of p and theta
  const double s = p + theta;
  const double z = s - p;
  const double err = (p - (s - z)) + (theta - z);
  double r = s - std::nearbyint(s);
  r += err + corr;
  r -= std::floor(r);
  if (r >= 1.0) r -= 1.0;
  return r;
}

struct ContinuedFraction {
  std::vector<std::int64_t> partial_quotients;
  std::vector<std::pair<std::int64_t, std::int64_t>> convergents;  // (p, q)
  bool truncated = false;  // expansion terminated early (rational input)
};

inline ContinuedFraction continued_fraction(double alpha, int depth) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("continued_fraction: alpha must be in (0,1)");
  if (depth < 1) throw std::invalid_argument("continued_fraction: depth must be >= 1");
  depth = std::min(depth, 64);

  ContinuedFraction cf;
  long double x = alpha;
  std::int64_t p_prev = 1, p_curr = 0;  // h_{-1}, h_0 for [0; a1, a2, ...]
  std::int64_t q_prev = 0, q_curr = 1;
  for (int k = 0; k < depth; ++k) {
    if (x < 0x1p-50L) {  // remainder underflow: alpha was (numerically) rational
      cf.truncated = true;
      break;
    }
    const long double inv = 1.0L / x;
    const auto a = static_cast<std::int64_t>(inv);
    x = inv - static_cast<long double>(a);
    const std::int64_t p_next = a * p_curr + p_prev;
    const std::int64_t q_next = a * q_curr + q_prev;
    cf.partial_quotients.push_back(a);
    cf.convergents.emplace_back(p_next, q_next);
    p_prev = p_curr; p_curr = p_next;
    q_prev = q_curr; q_curr = q_next;
  }
  return cf;
}

struct BetaEstimate {
  double value = 0.0;  // finite-horizon proxy for limsup -ln||q a||/q
  std::int64_t horizon = 0;
  bool infinite = false;  // some ||q*alpha|| vanished (rational alpha)
};

// Finite-horizon proxy for limsup -ln||q alpha||/q via the continued-fraction
// characterization beta = limsup ln(a_{k+1})/q_k: the max of ln(a_{k+1})/q_k
// over convergent denominators q_k <= Q. Identically zero for the golden
// mean, spikes at a large partial quotient, monotone in the horizon.
inline BetaEstimate beta_estimate(double alpha, std::int64_t Q) {
  if (Q < 1) throw std::invalid_argument("beta_estimate: Q must be >= 1");
  BetaEstimate out;
  out.horizon = Q;
  const double frac = alpha - std::floor(alpha);
  if (!(frac > 0.0 && frac < 1.0)) {
    out.infinite = true;  // integer alpha: ||q alpha|| = 0 at q = 1
    return out;
  }
  const auto cf = continued_fraction(frac, 64);
  if (cf.truncated) {
    out.infinite = true;  // rational alpha: ||q alpha|| vanishes at the denominator
    return out;
  }
  for (std::size_t k = 0; k + 1 < cf.partial_quotients.size(); ++k) {
    const auto q = cf.convergents[k].second;
    if (q > Q) break;
    const double rate =
        std::log(static_cast<double>(cf.partial_quotients[k + 1])) / static_cast<double>(q);
    out.value = std::max(out.value, rate);
  }
  return out;
}

struct DiophantineParams {
  double kappa = 0.0;
  double tau = 0.0;
};

struct DiophantineResult {
  bool holds = false;
  std::int64_t worst_q = 0;  // minimizer of ||q alpha|| * q^tau
};

inline DiophantineResult diophantine_check(double alpha, const DiophantineParams& params,
                                           std::int64_t Q) {
  if (!(params.kappa > 0.0) || !(params.tau > 0.0))
    throw std::invalid_argument("diophantine_check: kappa, tau must be positive");
  if (Q < 1) throw std::invalid_argument("diophantine_check: Q must be >= 1");
  DiophantineResult res;
  res.holds = true;
  double worst = std::numeric_limits<double>::infinity();
  for (std::int64_t q = 1; q <= Q; ++q) {
    const double d = norm_dist(q, alpha);
    const double score = d * std::pow(static_cast<double>(q), params.tau);
    if (score < worst) {
      worst = score;
      res.worst_q = q;
    }
    if (score < params.kappa) res.holds = false;
  }
  return res;
}

struct ResonanceReport {
  double theta = 0.0;
  double eta = 0.0;
  std::int64_t horizon = 0;
  std::vector<std::int64_t> resonant_k;  // sorted ascending, |k| <= horizon
  // Site ranges [lo, hi] between consecutive resonance magnitudes where
  // eigenfunction decay is guaranteed: lo = C0(1+|k_j|), hi = |k_{j+1}|/C0.
  struct Window { double lo, hi; };
  std::vector<Window> allowed_windows;  // populated when c0 > 1 supplied
};

// ||2 theta - k alpha|| <= e^{-eta |k|} scan over |k| <= K.
inline ResonanceReport resonances(double theta, double alpha, double eta, std::int64_t K,
                                  double c0 = 0.0) {
  if (!(eta > 0.0)) throw std::invalid_argument("resonances: eta must be positive");
  if (K < 1) throw std::invalid_argument("resonances: K must be >= 1");
  ResonanceReport rep;
  rep.theta = theta;
  rep.eta = eta;
  rep.horizon = K;
  for (std::int64_t k = -K; k <= K; ++k) {
    // ||2 theta - k alpha|| via the compensated phase reduction
    double d;
    if (k == 0) {
      double r = 2.0 * theta - std::nearbyint(2.0 * theta);
      d = std::fabs(r);
    } else {
      const double f = fract_phase(-k, alpha, 2.0 * theta);  // frac(2 theta - k alpha)
      d = std::min(f, 1.0 - f);
    }
    if (d <= std::exp(-eta * static_cast<double>(std::llabs(k))))
      rep.resonant_k.push_back(k);
  }
  if (c0 > 1.0) {
    std::vector<std::int64_t> mags;
    for (auto k : rep.resonant_k) mags.push_back(std::llabs(k));
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());
    for (std::size_t j = 0; j + 1 < mags.size(); ++j) {
      const double lo = c0 * (1.0 + static_cast<double>(mags[j]));
      const double hi = static_cast<double>(mags[j + 1]) / c0;
      if (lo <= hi) rep.allowed_windows.push_back({lo, hi});
    }
    if (!mags.empty()) {
      // trailing window up to the scan horizon
      const double lo = c0 * (1.0 + static_cast<double>(mags.back()));
      const double hi = static_cast<double>(K) / c0;
      if (lo <= hi) rep.allowed_windows.push_back({lo, hi});
    }
  }
  return rep;
}

// Lebesgue measure of {theta in [0,1): ||2 theta - k alpha|| <= e^{-eta|k|}}.
// The doubling map theta -> 2 theta mod 1 covers the circle twice, so the
// measure is min(1, 2 e^{-eta|k|}).
inline double resonant_phase_measure(std::int64_t k, double eta) {
  if (k == 0) throw std::invalid_argument("resonant_phase_measure: k must be nonzero");
  if (!(eta > 0.0)) throw std::invalid_argument("resonant_phase_measure: eta must be positive");
  return std::min(1.0, 2.0 * std::exp(-eta * static_cast<double>(std::llabs(k))));
}

}  // namespace amo
