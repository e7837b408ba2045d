#pragma once

// Planted-decay generator: overlap means produced by a family of unit
// profiles p_c(n) = A e^{-rate |n - c|}, one centered at every site of Z.
// Used to exercise the fitting pipeline against a known rate.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace amo {

// Q(0,k) = sum_c p_c(0) p_c(k) = tanh(rate) e^{-rate k}(k + 1 + 2e^{-2r}/(1-e^{-2r}))
inline double planted_overlap_mean(double rate, std::int64_t k) {
  if (!(rate > 0.0)) throw std::invalid_argument("planted_overlap_mean: rate must be positive");
  const double kk = static_cast<double>(std::llabs(k));
  const double e2 = std::exp(-2.0 * rate);
  return std::tanh(rate) * std::exp(-rate * kk) * (kk + 1.0 + 2.0 * e2 / (1.0 - e2));
}

inline std::vector<std::pair<double, double>> planted_overlap_points(
    double rate, const std::vector<std::int64_t>& k_list) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(k_list.size());
  for (auto k : k_list)
    pts.emplace_back(static_cast<double>(std::llabs(k)), planted_overlap_mean(rate, k));
  return pts;
}

}  // namespace amo
