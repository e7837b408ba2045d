#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "amo/expectation.hpp"
#include "amo/synthetic.hpp"
#include "oracles.hpp"

namespace {
const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
const amo::OperatorTemplate small_tmpl{2.0, golden, -40, 40};
}

TEST_CASE("midpoint phase grid") {
  const auto ph = amo::sample_phases({4, amo::PhaseStrategy::midpoint_grid, 0});
  REQUIRE(ph.size() == 4);
  CHECK(ph[0] == doctest::Approx(0.125));
  CHECK(ph[1] == doctest::Approx(0.375));
  CHECK(ph[2] == doctest::Approx(0.625));
  CHECK(ph[3] == doctest::Approx(0.875));
}

TEST_CASE("phase sampling is deterministic in (strategy, seed, M)") {
  const amo::PhasePlan plan{1000, amo::PhaseStrategy::jittered_grid, 42};
  CHECK(amo::sample_phases(plan) == amo::sample_phases(plan));
  const amo::PhasePlan rnd{1000, amo::PhaseStrategy::uniform_random, 42};
  CHECK(amo::sample_phases(rnd) == amo::sample_phases(rnd));
}

TEST_CASE("jittered grid mean is near one half") {
  const auto ph = amo::sample_phases({1000, amo::PhaseStrategy::jittered_grid, 7});
  double mean = 0.0;
  for (double t : ph) {
    CHECK(t >= 0.0);
    CHECK(t < 1.0);
    mean += t;
  }
  mean /= static_cast<double>(ph.size());
  // stratified: each sample uniform in its own cell, var of the mean = 1/(12 M^3)
  const double sigma = std::sqrt(1.0 / (12.0 * 1000.0 * 1000.0 * 1000.0));
  CHECK(std::fabs(mean - 0.5) <= 3.0 * sigma);
}

TEST_CASE("expected center mass at the center site") {
  const amo::PhasePlan plan{8, amo::PhaseStrategy::midpoint_grid, 0};
  const auto rec = amo::expected_center_mass(small_tmpl, plan, 0, 0);
  CHECK(rec.mean <= 1.0 + 1e-12);
  CHECK(rec.mean > 0.1);  // localized states carry most of the on-site mass
  CHECK(rec.m == 8);
}

TEST_CASE("single-phase plan degenerates to the pointwise value") {
  const amo::PhasePlan plan{1, amo::PhaseStrategy::midpoint_grid, 0};
  const auto rec = amo::expected_center_mass(small_tmpl, plan, 0, 3);
  const auto eig = amo::eigh_tridiagonal(amo::build(small_tmpl.at_phase(0.5)));
  const auto prof = amo::center_mass_profile(eig);
  CHECK(rec.mean == doctest::Approx(prof.S(0, 3)).epsilon(1e-14));
  CHECK(rec.std_error == 0.0);
}

TEST_CASE("expected overlap at zero distance is exactly one") {
  const amo::PhasePlan plan{6, amo::PhaseStrategy::jittered_grid, 3};
  const auto rec = amo::expected_overlap_sum(small_tmpl, plan, 4, 4);
  CHECK(rec.record.mean == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("averaged theorem A inequality holds on sample means") {
  const amo::PhasePlan plan{20, amo::PhaseStrategy::jittered_grid, 5};
  for (auto [k, l] : std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 5}, {-3, 9}, {0, 14}}) {
    const auto rec = amo::expected_overlap_sum(small_tmpl, plan, k, l);
    CHECK(rec.record.mean <=
          rec.regrouped_bound + 3.0 * (rec.record.std_error + rec.regrouped_se) + 1e-12);
  }
}

TEST_CASE("gamma_hat on planted profiles recovers the planted rate") {
  std::vector<std::int64_t> k_list;
  for (std::int64_t k = 40; k <= 150; k += 5) k_list.push_back(k);
  const auto pts = amo::planted_overlap_points(0.7, k_list);
  const auto fit = amo::decay_fit(pts, 40, 150);
  CHECK(fit.gamma_hat == doctest::Approx(0.7).epsilon(0.03));  // |error| <= 0.02 absolute
  CHECK(std::fabs(fit.gamma_hat - 0.7) <= 0.02);
  CHECK(fit.r_squared > 0.999);
}

TEST_CASE("gamma_hat end to end on a small supercritical window") {
  const amo::OperatorTemplate tmpl{2.5, golden, -60, 60};
  const amo::PhasePlan plan{24, amo::PhaseStrategy::jittered_grid, 9};
  const auto res = amo::gamma_hat(tmpl, plan, {6, 9, 12, 15, 18, 21, 24});
  CHECK(res.fit.gamma_hat > 0.3);
  CHECK(res.fit.r_squared > 0.8);
  CHECK(res.per_k.size() == 7);
  CHECK_THROWS_AS(amo::gamma_hat(tmpl, plan, {6, 9, 12}), std::invalid_argument);
}

TEST_CASE("gamma_hat is invariant under positive scaling of the means") {
  std::vector<std::pair<double, double>> pts, scaled;
  for (int k = 5; k <= 40; ++k) {
    const double v = 2.3 * std::exp(-0.5 * k) * (1.0 + 0.1 * std::sin(k));
    pts.emplace_back(k, v);
    scaled.emplace_back(k, 17.0 * v);
  }
  const auto a = amo::decay_fit(pts, 5, 40);
  const auto b = amo::decay_fit(scaled, 5, 40);
  CHECK(a.gamma_hat == doctest::Approx(b.gamma_hat).epsilon(1e-12));
}

TEST_CASE("corollary A closed forms") {
  CHECK(amo::corollaryA_bound(1.0, 1.0, 1, 0) == doctest::Approx(2.0));
  CHECK(amo::corollaryA_bound(2.0, 0.5, 1, 10) == doctest::Approx(26.0 * std::exp(-5.0)));
  CHECK_THROWS_AS(amo::corollaryA_bound(1.0, 0.0, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(amo::corollaryA_bound(1.0, 1.0, 0, 5), std::invalid_argument);
}

TEST_CASE("d=1 summation lemma: closed form dominates the brute-force sum") {
  for (double g : {0.1, 0.5, 1.0, 2.0}) {
    for (std::int64_t m : {0L, 1L, 5L, 20L, 50L, 100L}) {
      const double brute = oracle::sum_double_exp_1d(g, 0, m);
      const double closed =
          std::exp(-g * m) * (m + 1 + 2.0 * std::exp(-2.0 * g) / (1.0 - std::exp(-2.0 * g)));
      CHECK(brute == doctest::Approx(closed).epsilon(1e-10));
      CHECK(brute <= amo::corollaryA_bound(1.0, g, 1, m) + 1e-12);
    }
  }
}

TEST_CASE("d>1 committed constant dominates the lattice sum") {
  for (int d : {2, 3}) {
    for (double g : {0.5, 1.0}) {
      for (std::int64_t m : {0L, 5L, 15L, 30L}) {
        const double brute = oracle::sum_double_exp_lattice(g, d, m);
        CHECK(brute <= amo::corollaryA_bound(1.0, g, d, m) + 1e-12);
      }
    }
  }
}

TEST_CASE("edl_check fits a positive rate on a supercritical window") {
  const amo::OperatorTemplate tmpl{2.5, golden, -60, 60};
  const amo::PhasePlan plan{16, amo::PhaseStrategy::jittered_grid, 13};
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (std::int64_t m = 5; m <= 25; m += 4) pairs.emplace_back(0, m);
  const auto res = amo::edl_check(tmpl, plan, pairs);
  CHECK(res.fit.gamma_hat > 0.0);
  CHECK(res.per_pair.front().mean > res.per_pair.back().mean);
  CHECK_THROWS_AS(amo::edl_check(tmpl, plan, {}), std::invalid_argument);
}

TEST_CASE("results are bit-identical across worker counts") {
  const amo::PhasePlan plan{10, amo::PhaseStrategy::jittered_grid, 21};
  const auto a = amo::expected_overlap_sum(small_tmpl, plan, 0, 11, 1);
  const auto b = amo::expected_overlap_sum(small_tmpl, plan, 0, 11, 3);
  CHECK(a.record.mean == b.record.mean);
  CHECK(a.record.std_error == b.record.std_error);
  CHECK(a.regrouped_bound == b.regrouped_bound);
}
