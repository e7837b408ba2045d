#pragma once

// Truncated almost Mathieu operator on a finite window of Z with Dirichlet
// boundary conditions, stored as a symmetric tridiagonal matrix with
// off-diagonal entries identically 1.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "amo/arithmetic.hpp"

namespace amo {

struct OperatorSpec {
  double lambda = 0.0;   // coupling, > 0
  double alpha = 0.0;    // frequency in (0,1)
  double theta = 0.0;    // phase, stored reduced mod 1
  std::int64_t n_min = 0;
  std::int64_t n_max = 0;

  [[nodiscard]] std::int64_t dim() const { return n_max - n_min + 1; }

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("OperatorSpec: lambda must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("OperatorSpec: alpha must be in (0,1)");
    if (n_min > n_max) throw std::invalid_argument("OperatorSpec: empty window");
    if (n_min > 0 || n_max < 0)
      throw std::invalid_argument("OperatorSpec: window must contain 0");
    if (std::llabs(n_min) > (std::int64_t{1} << 40) || std::llabs(n_max) > (std::int64_t{1} << 40))
      throw std::invalid_argument("OperatorSpec: window overflows site arithmetic");
  }
};

class TridiagonalOperator {
 public:
  explicit TridiagonalOperator(const OperatorSpec& spec) : spec_(spec) {
    spec.validate();
    spec_.theta = spec.theta - std::floor(spec.theta);  // reduce mod 1
    const auto n = spec.dim();
    diag_.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      const double phase = fract_phase(spec.n_min + i, spec_.alpha, spec_.theta);
      diag_[static_cast<std::size_t>(i)] =
          2.0 * spec_.lambda * std::cos(2.0 * std::numbers::pi * phase);
    }
  }

  [[nodiscard]] const OperatorSpec& spec() const { return spec_; }
  [[nodiscard]] std::int64_t dim() const { return static_cast<std::int64_t>(diag_.size()); }
  [[nodiscard]] const std::vector<double>& diagonal() const { return diag_; }
  [[nodiscard]] std::int64_t site_of_index(std::int64_t i) const { return spec_.n_min + i; }
  [[nodiscard]] std::int64_t index_of_site(std::int64_t n) const { return n - spec_.n_min; }
  [[nodiscard]] double norm_bound() const { return 2.0 + 2.0 * spec_.lambda; }

  // (Hv)[i] = v[i-1] + v[i+1] + d[i] v[i], out-of-window terms are zero.
  template <typename Scalar>
  [[nodiscard]] std::vector<Scalar> apply(const std::vector<Scalar>& v) const {
    const auto n = diag_.size();
    if (v.size() != n) throw std::invalid_argument("apply: length mismatch");
    std::vector<Scalar> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      Scalar acc = diag_[i] * v[i];
      if (i > 0) acc += v[i - 1];
      if (i + 1 < n) acc += v[i + 1];
      out[i] = acc;
    }
    return out;
  }

 private:
  OperatorSpec spec_;
  std::vector<double> diag_;
};

inline TridiagonalOperator build(const OperatorSpec& spec) { return TridiagonalOperator(spec); }

}  // namespace amo
