#pragma once

// Time evolution e^{-itH} through the spectral decomposition, and the
// overlap amplitudes <delta_k, e^{-itH} delta_l>.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "amo/eigensolve.hpp"

namespace amo {

struct TimeGrid {
  double t_max = 0.0;
  std::int64_t count = 0;

  TimeGrid(double tmax, std::int64_t n) : t_max(tmax), count(n) {
    if (n < 2) throw std::invalid_argument("TimeGrid: count must be >= 2");
    if (!(tmax > 0.0)) throw std::invalid_argument("TimeGrid: t_max must be positive");
  }
  [[nodiscard]] double t(std::int64_t i) const {
    return t_max * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

// V e^{-it Lambda} V^T psi0
inline std::vector<std::complex<double>> evolve(const EigenSystem& eig,
                                                const std::vector<std::complex<double>>& psi0,
                                                double t) {
  const std::int64_t n = eig.n;
  if (static_cast<std::int64_t>(psi0.size()) != n)
    throw std::invalid_argument("evolve: length mismatch");
  std::vector<std::complex<double>> coeff(static_cast<std::size_t>(n));
  for (std::int64_t s = 0; s < n; ++s) {
    const double* col = eig.vectors.data() + s * n;
    std::complex<double> c{0.0, 0.0};
    for (std::int64_t i = 0; i < n; ++i) c += col[i] * psi0[static_cast<std::size_t>(i)];
    coeff[static_cast<std::size_t>(s)] =
        c * std::polar(1.0, -t * eig.values[static_cast<std::size_t>(s)]);
  }
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n), {0.0, 0.0});
  for (std::int64_t s = 0; s < n; ++s) {
    const double* col = eig.vectors.data() + s * n;
    const std::complex<double> c = coeff[static_cast<std::size_t>(s)];
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] += c * col[i];
  }
  return out;
}

// sum_s phi_s(k) phi_s(l) e^{-it E_s}
inline std::complex<double> overlap(const EigenSystem& eig, std::int64_t k, std::int64_t l,
                                    double t) {
  if (k < eig.spec.n_min || k > eig.spec.n_max || l < eig.spec.n_min || l > eig.spec.n_max)
    throw std::invalid_argument("overlap: site outside window");
  const std::int64_t n = eig.n;
  const std::int64_t ik = k - eig.spec.n_min;
  const std::int64_t il = l - eig.spec.n_min;
  std::complex<double> acc{0.0, 0.0};
  for (std::int64_t s = 0; s < n; ++s) {
    const double* col = eig.vectors.data() + s * n;
    acc += col[ik] * col[il] * std::polar(1.0, -t * eig.values[static_cast<std::size_t>(s)]);
  }
  return acc;
}

struct SupOverlap {
  double grid_max = 0.0;        // max over the grid of |overlap|
  double certified_bound = 0.0; // sum_s |phi_s(k)||phi_s(l)|, valid for all t
};

inline SupOverlap sup_overlap(const EigenSystem& eig, std::int64_t k, std::int64_t l,
                              const TimeGrid& grid) {
  SupOverlap res;
  for (std::int64_t i = 0; i < grid.count; ++i)
    res.grid_max = std::max(res.grid_max, std::abs(overlap(eig, k, l, grid.t(i))));
  const std::int64_t n = eig.n;
  const std::int64_t ik = k - eig.spec.n_min;
  const std::int64_t il = l - eig.spec.n_min;
  double q = 0.0;
  for (std::int64_t s = 0; s < n; ++s) {
    const double* col = eig.vectors.data() + s * n;
    q += std::fabs(col[ik]) * std::fabs(col[il]);
  }
  res.certified_bound = q;
  return res;
}

}  // namespace amo
