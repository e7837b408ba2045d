#pragma once

// Localization centers, per-center mass profiles S_n(l), the pointwise
// inequality chain sup_t |<d_k, e^{-itH} d_l>| <= Q(k,l) <= sum_n sqrt(S_n(k)S_n(l)),
// exponential decay fitting, and the transfer-matrix Lyapunov diagnostic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "amo/dynamics.hpp"
#include "amo/eigensolve.hpp"

namespace amo {

// argmax_n |phi_s(n)|; ties toward smallest |n|, then toward negative n
inline std::vector<std::int64_t> centers(const EigenSystem& eig) {
  const std::int64_t n = eig.n;
  std::vector<std::int64_t> out(static_cast<std::size_t>(n));
  for (std::int64_t s = 0; s < n; ++s) {
    const double* col = eig.vectors.data() + s * n;
    std::int64_t best = eig.spec.n_min;
    double best_a = -1.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t site = eig.spec.n_min + i;
      const double a = std::fabs(col[i]);
      bool better = a > best_a;
      if (a == best_a) {
        const auto abs_site = std::llabs(site), abs_best = std::llabs(best);
        better = abs_site < abs_best || (abs_site == abs_best && site < best);
      }
      if (better) { best_a = a; best = site; }
    }
    out[static_cast<std::size_t>(s)] = best;
  }
  return out;
}

struct CenterProfile {
  std::vector<std::int64_t> center_of;  // eigenindex s -> site
  std::vector<double> mass;             // dense N x N: mass[c*N + l], c,l index offsets
  std::int64_t n = 0;
  std::int64_t n_min = 0;
  std::int64_t inner_lo = 0, inner_hi = 0;  // sites trusted despite the Dirichlet cut

  [[nodiscard]] double S(std::int64_t center_site, std::int64_t site) const {
    return mass[static_cast<std::size_t>((center_site - n_min) * n + (site - n_min))];
  }
};

inline CenterProfile center_mass_profile(const EigenSystem& eig) {
  CenterProfile prof;
  prof.n = eig.n;
  prof.n_min = eig.spec.n_min;
  prof.center_of = centers(eig);
  prof.mass.assign(static_cast<std::size_t>(eig.n * eig.n), 0.0);
  for (std::int64_t s = 0; s < eig.n; ++s) {
    const double* col = eig.vectors.data() + s * eig.n;
    const std::int64_t c = prof.center_of[static_cast<std::size_t>(s)] - prof.n_min;
    double* row = prof.mass.data() + c * eig.n;
    for (std::int64_t i = 0; i < eig.n; ++i) row[i] += col[i] * col[i];
  }
  // sites within half the window radius of the origin
  const std::int64_t radius = std::max(std::llabs(eig.spec.n_min), std::llabs(eig.spec.n_max));
  prof.inner_lo = std::max(eig.spec.n_min, -radius / 2);
  prof.inner_hi = std::min(eig.spec.n_max, radius / 2);
  return prof;
}

// Q(k,l) = sum_s |phi_s(k)| |phi_s(l)|
inline double overlap_sum(const EigenSystem& eig, std::int64_t k, std::int64_t l) {
  if (k < eig.spec.n_min || k > eig.spec.n_max || l < eig.spec.n_min || l > eig.spec.n_max)
    throw std::invalid_argument("overlap_sum: site outside window");
  const std::int64_t ik = k - eig.spec.n_min;
  const std::int64_t il = l - eig.spec.n_min;
  double q = 0.0;
  for (std::int64_t s = 0; s < eig.n; ++s) {
    const double* col = eig.vectors.data() + s * eig.n;
    q += std::fabs(col[ik]) * std::fabs(col[il]);
  }
  return q;
}

struct TheoremAReport {
  std::int64_t k = 0, l = 0;
  double lhs_sup = 0.0;  // max over sampled t of |<d_k, e^{-itH} d_l>|
  double middle = 0.0;   // sum_s |phi_s(k)||phi_s(l)|
  double rhs = 0.0;      // sum_n sqrt(S_n(k) S_n(l))
};

struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline TheoremAReport theoremA_pointwise(const EigenSystem& eig, const CenterProfile& prof,
                                         std::int64_t k, std::int64_t l, const TimeGrid& grid) {
  TheoremAReport rep;
  rep.k = k;
  rep.l = l;
  const auto so = sup_overlap(eig, k, l, grid);
  rep.lhs_sup = so.grid_max;
  rep.middle = so.certified_bound;
  double rhs = 0.0;
  for (std::int64_t c = 0; c < eig.n; ++c) {
    const double* row = prof.mass.data() + c * eig.n;
    rhs += std::sqrt(row[k - eig.spec.n_min] * row[l - eig.spec.n_min]);
  }
  rep.rhs = rhs;
  constexpr double slack = 1e-10;
  if (rep.lhs_sup > rep.middle + slack || rep.middle > rep.rhs + slack)
    throw InvariantViolation("theoremA_pointwise: inequality chain violated");
  return rep;
}

struct DecayFit {
  double gamma_hat = 0.0;       // slope of -ln(value) against distance
  double log_prefactor = 0.0;   // intercept, with sign so value ~ e^{log_prefactor - gamma_hat k}
  double r_squared = 0.0;
  double k_min = 0.0, k_max = 0.0;
  double pointwise_min_rate = 0.0;  // min over k>0 of -ln(value)/k
  std::int64_t points_used = 0;
  bool floored = false;  // some values were clipped at 1e-15
};

inline DecayFit decay_fit(const std::vector<std::pair<double, double>>& points, double k_min,
                          double k_max) {
  DecayFit fit;
  fit.k_min = k_min;
  fit.k_max = k_max;
  std::vector<std::pair<double, double>> xy;  // (k, -ln v)
  double min_rate = std::numeric_limits<double>::infinity();
  for (const auto& [k, v] : points) {
    if (k < k_min || k > k_max) continue;
    if (!(v > 0.0)) throw std::invalid_argument("decay_fit: values must be positive");
    // below the double-precision scale of squared eigenvector entries the
    // point is unreliable; keep it but flag the fit
    if (v < 1e-15) fit.floored = true;
    const double y = -std::log(std::max(v, 1e-300));
    xy.emplace_back(k, y);
    if (k > 0.0) min_rate = std::min(min_rate, y / k);
  }
  if (xy.size() < 5) throw std::invalid_argument("decay_fit: fewer than 5 usable points");
  fit.points_used = static_cast<std::int64_t>(xy.size());
  fit.pointwise_min_rate = min_rate;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : xy) {
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double m = static_cast<double>(xy.size());
  const double vxx = sxx - sx * sx / m;
  const double vxy = sxy - sx * sy / m;
  const double vyy = syy - sy * sy / m;
  fit.gamma_hat = vxy / vxx;
  fit.log_prefactor = -(sy / m - fit.gamma_hat * sx / m);
  fit.r_squared = vyy > 0.0 ? std::clamp(vxy * vxy / (vxx * vyy), 0.0, 1.0) : 1.0;
  return fit;
}

// (1/M) ln || prod_{n=M..1} A_n || with A_n = [[E - 2 lambda cos(2 pi(n a + t)), -1], [1, 0]];
// the running product is renormalized every 10 steps, accumulating log norms.
inline double lyapunov_transfer(double lambda, double alpha, double theta, double E,
                                std::int64_t steps) {
  if (steps < 1000) throw std::invalid_argument("lyapunov_transfer: need at least 1e3 steps");
  std::array<double, 4> b{1.0, 0.0, 0.0, 1.0};  // row-major 2x2
  double log_sum = 0.0;
  for (std::int64_t n = 1; n <= steps; ++n) {
    const double phase = fract_phase(n, alpha, theta);
    const double a = E - 2.0 * lambda * std::cos(2.0 * std::numbers::pi * phase);
    const std::array<double, 4> nb{a * b[0] - b[2], a * b[1] - b[3], b[0], b[1]};
    b = nb;
    if (n % 10 == 0) {
      const double nrm = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2] + b[3] * b[3]);
      if (!(nrm > 0.0) || !std::isfinite(nrm))
        throw std::runtime_error("lyapunov_transfer: overflow despite renormalization");
      log_sum += std::log(nrm);
      for (auto& x : b) x /= nrm;
    }
  }
  const double nrm = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2] + b[3] * b[3]);
  return (log_sum + std::log(nrm)) / static_cast<double>(steps);
}

}  // namespace amo
