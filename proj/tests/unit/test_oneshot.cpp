#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "eesched/analysis.hpp"
#include "eesched/channel.hpp"
#include "eesched/dp_solver.hpp"
#include "eesched/errors.hpp"
#include "eesched/oneshot.hpp"
#include "eesched/policy.hpp"
#include "eesched/simulator.hpp"
#include "oracles/special_functions.hpp"

using namespace eesched;

namespace {
const ChannelModel kTruncExp = ChannelModel::truncated_exponential(1.0, 0.001);
}

TEST_CASE("first finite threshold is the mean inverse gain") {
  const OneShotThresholds th = compute_thresholds(kTruncExp, 12);
  CHECK(std::isinf(th.omega(1)));
  CHECK(th.threshold(1) == 0.0);
  CHECK(th.omega(2) == doctest::Approx(oracle::truncexp_nu(1, 1.0, 0.001)).epsilon(1e-10));
  CHECK(th.omega(3) == doctest::Approx(small_packet_factor(kTruncExp, th.omega(2))).epsilon(1e-12));
  CHECK_THROWS_AS(th.omega(13), OutOfTable);
  CHECK_THROWS_AS(th.omega(0), OutOfTable);
}

TEST_CASE("thresholds shrink with more slots left") {
  for (const auto& model : {kTruncExp, ChannelModel::gamma_diversity(2.0), ChannelModel::gamma_diversity(4.0)}) {
    const OneShotThresholds th = compute_thresholds(model, 50);
    for (int t = 2; t < 50; ++t) {
      CHECK(th.omega(t + 1) < th.omega(t));
      CHECK(th.threshold(t + 1) > th.threshold(t));
      CHECK(th.omega(t) > 0.0);
    }
  }
}

TEST_CASE("conditional form of the recursion") {
  for (const auto& model : {kTruncExp, ChannelModel::gamma_diversity(3.0, 0.5)}) {
    const OneShotThresholds th = compute_thresholds(model, 8);
    for (int t = 2; t < 8; ++t)
      CHECK(next_omega_conditional(model, th.omega(t)) == doctest::Approx(th.omega(t + 1)).epsilon(1e-10));
  }
}

TEST_CASE("constant channel never waits for better") {
  const OneShotThresholds th = compute_thresholds(ChannelModel::degenerate(4.0), 6);
  for (int t = 2; t <= 6; ++t) CHECK(th.omega(t) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(oneshot_expected_energy(th, 3.0, 6) == doctest::Approx(7.0 / 4.0).epsilon(1e-14));
}

TEST_CASE("decision rule") {
  const OneShotThresholds th = compute_thresholds(kTruncExp, 5);
  const double cut = th.threshold(4);
  CHECK(oneshot_decide(th, {4, 3.0}, cut * 1.01, false) == 3.0);
  CHECK(oneshot_decide(th, {4, 3.0}, cut * 0.99, false) == 0.0);
  CHECK(oneshot_decide(th, {4, 3.0}, 1e6, true) == 0.0);
  CHECK(oneshot_decide(th, {1, 3.0}, 1e-9, false) == 3.0);
  CHECK(oneshot_decide(th, {1, 0.0}, 1e-9, true) == 0.0);
  CHECK_THROWS_AS(oneshot_decide(th, {0, 1.0}, 1.0, false), std::invalid_argument);
}

TEST_CASE("expected energy") {
  const OneShotThresholds th = compute_thresholds(kTruncExp, 10);
  CHECK(oneshot_expected_energy(th, 0.0, 10) == 0.0);
  CHECK(oneshot_expected_energy(th, 2.0, 1) == doctest::Approx(3.0 * oracle::truncexp_nu(1, 1.0, 0.001)).epsilon(1e-8));
  CHECK_THROWS_AS(oneshot_expected_energy(th, -1.0, 10), std::invalid_argument);

  // Energy grows like 2^B: doubling ratio tends to 2 per extra bit.
  const double e20 = oneshot_expected_energy(th, 20.0, 10);
  const double e21 = oneshot_expected_energy(th, 21.0, 10);
  CHECK(e21 / e20 == doctest::Approx(2.0).epsilon(1e-6));

  SUBCASE("Monte Carlo at T=10, B=1") {
    auto shared = std::make_shared<const OneShotThresholds>(th);
    const std::vector<Policy> policies{Policy::oneshot(shared)};
    SimulationConfig c;
    c.bits = 1.0;
    c.horizon = 10;
    c.episodes = 1'000'000;
    c.seed = 77;
    const SimulationResult r = run(policies, kTruncExp, c);
    const double closed = oneshot_expected_energy(th, 1.0, 10);
    CHECK(std::abs(r.stats[0].mean_energy - closed) <= 4.0 * r.stats[0].std_error);
  }
}

TEST_CASE("fires on a gain above the threshold") {
  const OneShotThresholds th = compute_thresholds(kTruncExp, 5);
  CHECK(oneshot_decide(th, {5, 2.5}, 2.0 / th.omega(5), false) == 2.5);
}

TEST_CASE("restricted to one slot costs more, least for small packets") {
  DpConfig c;
  c.max_bits = 5.0;
  c.grid_points = 513;
  const CostToGoTable table = solve(kTruncExp, c, 10);
  const OneShotThresholds th = compute_thresholds(kTruncExp, 10);
  double gap_db[2];
  int k = 0;
  for (double bits : {0.5, 5.0}) {
    const double shot = oneshot_expected_energy(th, bits, 10);
    const double dp = table.interpolate(10, bits);
    CHECK(shot >= dp);
    gap_db[k++] = 10.0 * std::log10(shot / dp);
  }
  CHECK(gap_db[0] < gap_db[1]);
}
