#pragma once

// Full eigendecomposition of a symmetric tridiagonal matrix by implicit-shift
// QL iteration with Wilkinson shifts, accumulating the orthogonal transform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "amo/operator.hpp"

namespace amo {

struct ConvergenceError : std::runtime_error {
  std::int64_t index;
  explicit ConvergenceError(std::int64_t idx)
      : std::runtime_error("eigh_tridiagonal: QL iteration failed to converge at index " +
                           std::to_string(idx)),
        index(idx) {}
};

struct EigenSystem {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column-major N x N, column s is eigenvector s
  std::int64_t n = 0;
  OperatorSpec spec;

  // entry of eigenvector s at matrix index i
  [[nodiscard]] double vec(std::int64_t i, std::int64_t s) const {
    return vectors[static_cast<std::size_t>(s * n + i)];
  }
  // entry of eigenvector s at lattice site
  [[nodiscard]] double at_site(std::int64_t site, std::int64_t s) const {
    return vec(site - spec.n_min, s);
  }
};

namespace detail {

inline double hypot2(double a, double b) { return std::hypot(a, b); }

// Implicit QL with Wilkinson shifts on (d, e); V column-major n x n,
// accumulated in place. Total sweep budget 30*n.
inline void tql2(std::vector<double>& d, std::vector<double>& e, std::vector<double>& v,
                 std::int64_t n) {
  if (n == 1) return;
  std::int64_t total_sweeps = 0;
  const std::int64_t sweep_cap = 30 * n;
  for (std::int64_t l = 0; l < n; ++l) {
    for (;;) {
      std::int64_t m = l;
      for (; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++total_sweeps > sweep_cap) throw ConvergenceError(l);
      // Wilkinson shift from the leading 2x2
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = hypot2(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::int64_t i = m - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = hypot2(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        // rotate eigenvector columns i and i+1
        double* vi = v.data() + i * n;
        double* vj = v.data() + (i + 1) * n;
        for (std::int64_t k = 0; k < n; ++k) {
          f = vj[k];
          vj[k] = s * vi[k] + c * f;
          vi[k] = c * vi[k] - s * f;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

}  // namespace detail

inline EigenSystem eigh_tridiagonal(const TridiagonalOperator& H) {
  const std::int64_t n = H.dim();
  EigenSystem eig;
  eig.n = n;
  eig.spec = H.spec();
  std::vector<double> d = H.diagonal();
  std::vector<double> e(static_cast<std::size_t>(n), 1.0);  // off-diagonals; e[n-1] unused
  if (n >= 1) e[static_cast<std::size_t>(n - 1)] = 0.0;
  std::vector<double> v(static_cast<std::size_t>(n * n), 0.0);
  for (std::int64_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i * n + i)] = 1.0;

  detail::tql2(d, e, v, n);

  // sort eigenpairs ascending
  std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), std::int64_t{0});
  std::sort(perm.begin(), perm.end(),
            [&](std::int64_t a, std::int64_t b) { return d[a] < d[b]; });
  eig.values.resize(static_cast<std::size_t>(n));
  eig.vectors.resize(static_cast<std::size_t>(n * n));
  for (std::int64_t s = 0; s < n; ++s) {
    const std::int64_t src = perm[static_cast<std::size_t>(s)];
    eig.values[static_cast<std::size_t>(s)] = d[static_cast<std::size_t>(src)];
    const double* col = v.data() + src * n;
    // sign convention: entry of largest magnitude (first on ties) positive
    std::int64_t imax = 0;
    double amax = -1.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double a = std::fabs(col[i]);
      if (a > amax) { amax = a; imax = i; }
    }
    const double sign = col[imax] < 0.0 ? -1.0 : 1.0;
    double* dst = eig.vectors.data() + s * n;
    for (std::int64_t i = 0; i < n; ++i) dst[i] = sign * col[i];
  }
  return eig;
}

struct ResidualReport {
  double max_residual = 0.0;             // max_s ||H phi_s - E_s phi_s||_2
  double max_orthogonality_defect = 0.0; // max |<phi_s, phi_t> - delta_st|
};

inline ResidualReport residual_report(const TridiagonalOperator& H, const EigenSystem& eig) {
  const std::int64_t n = eig.n;
  if (H.dim() != n) throw std::invalid_argument("residual_report: shape mismatch");
  ResidualReport rep;
  for (std::int64_t s = 0; s < n; ++s) {
    const double* phi = eig.vectors.data() + s * n;
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      double r = H.diagonal()[static_cast<std::size_t>(i)] * phi[i] - eig.values[static_cast<std::size_t>(s)] * phi[i];
      if (i > 0) r += phi[i - 1];
      if (i + 1 < n) r += phi[i + 1];
      acc += r * r;
    }
    rep.max_residual = std::max(rep.max_residual, std::sqrt(acc));
  }
  for (std::int64_t s = 0; s < n; ++s) {
    const double* ps = eig.vectors.data() + s * n;
    for (std::int64_t t = s; t < n; ++t) {
      const double* pt = eig.vectors.data() + t * n;
      double dot = 0.0;
      for (std::int64_t i = 0; i < n; ++i) dot += ps[i] * pt[i];
      const double defect = std::fabs(dot - (s == t ? 1.0 : 0.0));
      rep.max_orthogonality_defect = std::max(rep.max_orthogonality_defect, defect);
    }
  }
  return rep;
}

}  // namespace amo
