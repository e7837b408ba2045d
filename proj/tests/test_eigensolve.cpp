#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "amo/eigensolve.hpp"
#include "oracles.hpp"

namespace {
const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
}

TEST_CASE("one-dimensional system") {
  const auto H = amo::build(amo::OperatorSpec{2.0, golden, 0.0, 0, 0});
  const auto eig = amo::eigh_tridiagonal(H);
  CHECK(eig.values[0] == doctest::Approx(4.0));
  CHECK(eig.vec(0, 0) == doctest::Approx(1.0));
  const auto rep = amo::residual_report(H, eig);
  CHECK(rep.max_residual < 1e-14);
  CHECK(rep.max_orthogonality_defect < 1e-14);
}

TEST_CASE("two-by-two closed form") {
  const auto H = amo::build(amo::OperatorSpec{1.3, golden, 0.12, 0, 1});
  const double a = H.diagonal()[0], b = H.diagonal()[1];
  const auto eig = amo::eigh_tridiagonal(H);
  const double mid = 0.5 * (a + b);
  const double rad = std::sqrt(0.25 * (a - b) * (a - b) + 1.0);
  CHECK(eig.values[0] == doctest::Approx(mid - rad).epsilon(1e-13));
  CHECK(eig.values[1] == doctest::Approx(mid + rad).epsilon(1e-13));
}

TEST_CASE("eigenvalues agree with the Sturm bisection oracle at N=50") {
  const auto H = amo::build(amo::OperatorSpec{2.0, golden, 0.3, -25, 24});
  const auto eig = amo::eigh_tridiagonal(H);
  const auto want = oracle::sturm_eigenvalues(H.diagonal(), -H.norm_bound(), H.norm_bound());
  REQUIRE(want.size() == 50);
  for (std::size_t s = 0; s < 50; ++s)
    CHECK(std::fabs(eig.values[s] - want[s]) < 1e-9);
}

TEST_CASE("residuals and orthogonality at N=200 supercritical") {
  const auto H = amo::build(amo::OperatorSpec{2.0, golden, 0.3, -100, 99});
  const auto eig = amo::eigh_tridiagonal(H);
  const auto rep = amo::residual_report(H, eig);
  CHECK(rep.max_residual <= 1e-10 * H.norm_bound());
  CHECK(rep.max_orthogonality_defect <= 1e-10);
}

TEST_CASE("residual report detects a corrupted eigenvector") {
  const auto H = amo::build(amo::OperatorSpec{2.0, golden, 0.3, -20, 20});
  auto eig = amo::eigh_tridiagonal(H);
  eig.vectors[3] += 0.05;
  const auto rep = amo::residual_report(H, eig);
  CHECK(rep.max_residual > 1e-6);
}

TEST_CASE("completeness: squared entries sum to one at every site") {
  const auto H = amo::build(amo::OperatorSpec{3.0, golden, 0.7, -40, 40});
  const auto eig = amo::eigh_tridiagonal(H);
  for (std::int64_t i = 0; i < eig.n; ++i) {
    double acc = 0.0;
    for (std::int64_t s = 0; s < eig.n; ++s) acc += eig.vec(i, s) * eig.vec(i, s);
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("trace identity and spectral range") {
  const auto H = amo::build(amo::OperatorSpec{2.0, golden, 0.9, -60, 60});
  const auto eig = amo::eigh_tridiagonal(H);
  const double tr_d = std::accumulate(H.diagonal().begin(), H.diagonal().end(), 0.0);
  const double tr_e = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
  CHECK(tr_e == doctest::Approx(tr_d).epsilon(1e-9));
  for (double E : eig.values) {
    CHECK(E >= -H.norm_bound() - 1e-12);
    CHECK(E <= H.norm_bound() + 1e-12);
  }
  // ascending order
  for (std::size_t s = 1; s < eig.values.size(); ++s) CHECK(eig.values[s] >= eig.values[s - 1]);
}

TEST_CASE("deterministic sign convention") {
  const amo::OperatorSpec spec{2.0, golden, 0.4, -30, 30};
  const auto a = amo::eigh_tridiagonal(amo::build(spec));
  const auto b = amo::eigh_tridiagonal(amo::build(spec));
  CHECK(a.vectors == b.vectors);
  CHECK(a.values == b.values);
  // largest-magnitude entry of every column is positive
  for (std::int64_t s = 0; s < a.n; ++s) {
    double best = 0.0;
    for (std::int64_t i = 0; i < a.n; ++i)
      if (std::fabs(a.vec(i, s)) > std::fabs(best)) best = a.vec(i, s);
    CHECK(best > 0.0);
  }
}
