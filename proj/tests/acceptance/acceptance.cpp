// Acceptance checks. Each criterion prints one PASS/FAIL line.
// Usage: eesched_acceptance [--criterion N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eesched/analysis.hpp"
#include "eesched/channel.hpp"
#include "eesched/dp_solver.hpp"
#include "eesched/oneshot.hpp"
#include "eesched/policies.hpp"
#include "eesched/policy.hpp"
#include "eesched/simulator.hpp"
#include "oracles/special_functions.hpp"

using namespace eesched;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

const ChannelModel kTruncExp = ChannelModel::truncated_exponential(1.0, 0.001);

std::shared_ptr<const CostToGoTable> dp_table(const ChannelModel& model, double max_bits, int horizon) {
  DpConfig c;
  c.max_bits = max_bits;
  return std::make_shared<const CostToGoTable>(solve(model, c, horizon));
}

// Adjacent policies must never be inverted at 4 sigma of the paired difference.
void require_ordering(Outcome& out, const SimulationResult& r, const std::string& where) {
  for (std::size_t i = 0; i + 1 < r.stats.size(); ++i) {
    const PairedDifference d = r.difference(i, i + 1);
    if (d.mean > 4.0 * d.std_error)
      out.require(false, where + " " + r.stats[i].policy + " > " + r.stats[i + 1].policy +
                             fmt(" by %.4g (se %.2g)", d.mean, d.std_error));
  }
}

Outcome table2_offsets() {
  Outcome out;
  const auto start = Clock::now();
  double worst = 0.0;
  for (const ReferenceOffset& row : reference_offsets()) {
    const OffsetReport r = offset_ratios(row.channel);
    const double ds = std::abs(r.small_bits_db() - row.small_bits_db);
    const double dl = std::abs(r.large_bits_db() - row.large_bits_db);
    worst = std::max({worst, ds, dl});
    out.require(ds <= 0.05, row.label + fmt(" small-B %.4f dB vs %.2f", r.small_bits_db(), row.small_bits_db));
    out.require(dl <= 0.05, row.label + fmt(" large-B %.4f dB vs %.2f", r.large_bits_db(), row.large_bits_db));
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < 5.0, fmt("runtime %.2f s", elapsed));
  if (out.pass) out.detail = fmt("six rows, worst deviation %.4f dB, %.2f s", worst, elapsed);
  return out;
}

Outcome two_slot_exactness() {
  Outcome out;
  const auto start = Clock::now();
  const auto table = dp_table(kTruncExp, 30.0, 2);
  const MomentTable m = moments(kTruncExp, 1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> beta(0.0, 30.0);
  double worst_steps = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double b = beta(rng);
    const double g = kTruncExp.sample(rng);
    const double steps = std::abs(dp_decide(*table, {2, b}, g) - optimal_T2(b, g, m)) / table->step();
    worst_steps = std::max(worst_steps, steps);
  }
  out.require(worst_steps <= 2.0, fmt("decision off by %.2f grid steps", worst_steps));
  double worst_rel = 0.0;
  for (double bits : {1.0, 5.0, 10.0, 30.0}) {
    const double rel = std::abs(table->interpolate(2, bits) / optimal_T2_cost(bits, kTruncExp) - 1.0);
    worst_rel = std::max(worst_rel, rel);
    out.require(rel < 0.005, fmt("J2(%g) off by %.3f%%", bits, 100.0 * rel));
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < 30.0, fmt("runtime %.1f s", elapsed));
  if (out.pass)
    out.detail = fmt("decisions within %.2f steps, J2 within %.3f%%, %.1f s", worst_steps, 100.0 * worst_rel, elapsed);
  return out;
}

Outcome gap_curve_shape() {
  Outcome out;
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.01 * std::pow(3000.0, i / 100.0));
  grid.back() = 30.0;
  const std::vector<GapPoint> curve = gap_curve(kTruncExp, grid);
  for (std::size_t i = 1; i < curve.size(); ++i)
    out.require(curve[i].gap_db <= curve[i - 1].gap_db, fmt("gap rises at B=%g", curve[i].bits));
  out.require(std::abs(curve.front().gap_db - 4.32) <= 0.05, fmt("B=0.01 gap %.4f dB", curve.front().gap_db));
  out.require(std::abs(curve.back().gap_db - 1.68) <= 0.05, fmt("B=30 gap %.4f dB", curve.back().gap_db));
  if (out.pass) out.detail = fmt("nonincreasing, %.4f dB at B=0.01, %.4f dB at B=30", curve.front().gap_db, curve.back().gap_db);
  return out;
}

Outcome five_slot_ordering() {
  Outcome out;
  const auto start = Clock::now();
  auto m = std::make_shared<const MomentTable>(moments(kTruncExp, 8));
  const std::vector<Policy> policies{Policy::iwf(), Policy::dp(dp_table(kTruncExp, 10.0, 5)),
                                     Policy::suboptimal_II(m), Policy::suboptimal_I(m), Policy::equal_bit()};
  SimulationConfig c;
  c.bits = 10.0;
  c.horizon = 5;
  c.episodes = 100'000;
  c.seed = 5;
  const SimulationResult r = run(policies, kTruncExp, c);
  require_ordering(out, r, "T=5 B=10");
  const double elapsed = seconds_since(start);
  out.require(elapsed < 120.0, fmt("runtime %.1f s", elapsed));
  if (out.pass) {
    std::ostringstream s;
    for (const auto& st : r.stats) s << st.policy << "=" << st.mean_energy << " ";
    out.detail = s.str() + fmt("(%.1f s)", elapsed);
  }
  return out;
}

Outcome fractional_moments() {
  Outcome out;
  for (const auto& model : {kTruncExp, ChannelModel::gamma_diversity(2.0)}) {
    const std::string name = model.spec();
    const MomentTable m = moments(model, 64);
    for (std::size_t k = 1; k < 16; ++k) {
      out.require(m.nu(k + 1) < m.nu(k), name + " nu not decreasing at m=" + std::to_string(k + 1));
      out.require(m.gmean(k + 1) < m.gmean(k), name + " geometric mean not decreasing at m=" + std::to_string(k + 1));
    }
    const double nu_gap = m.nu(64) / m.nu_inf() - 1.0;
    const double g_gap = m.gmean(64) / m.nu_inf() - 1.0;
    out.require(std::abs(nu_gap) <= 0.05, name + fmt(" nu_64 is %.2f%% from the limit", 100.0 * nu_gap));
    out.require(std::abs(g_gap) <= 0.05, name + fmt(" G_64 is %.2f%% from the limit", 100.0 * g_gap));
    if (out.pass) out.detail += name + fmt(" nu_64 %.2f%%, G_64 %.2f%%; ", 100.0 * nu_gap, 100.0 * g_gap);
  }
  return out;
}

Outcome one_shot() {
  Outcome out;
  const int horizon = 10;
  auto th = std::make_shared<const OneShotThresholds>(compute_thresholds(kTruncExp, horizon));
  const double nu1 = oracle::truncexp_nu(1, 1.0, 0.001);
  out.require(std::abs(th->omega(2) - nu1) <= 1e-10 * nu1, fmt("omega_2 %.15g vs %.15g", th->omega(2), nu1));
  // Per-unit threshold cost relaxes as the deadline approaches (t counts down).
  for (int t = 2; t < horizon; ++t)
    out.require(th->omega(t) >= th->omega(t + 1), "omega not monotone at t=" + std::to_string(t));

  const std::vector<Policy> shot{Policy::oneshot(th)};
  SimulationConfig c;
  c.bits = 1.0;
  c.horizon = horizon;
  c.episodes = 1'000'000;
  c.seed = 6;
  const AggregateStats mc = run(shot, kTruncExp, c).stats[0];
  const double closed = oneshot_expected_energy(*th, 1.0, horizon);
  out.require(std::abs(mc.mean_energy - closed) <= 4.0 * mc.std_error,
              fmt("closed form %.6g vs MC %.6g (se %.2g)", closed, mc.mean_energy, mc.std_error));

  const auto table = dp_table(kTruncExp, 10.0, horizon);
  double gap_db[2];
  int k = 0;
  for (double bits : {1.0, 10.0}) {
    const double shot_energy = oneshot_expected_energy(*th, bits, horizon);
    const double dp_energy = table->interpolate(horizon, bits);
    out.require(shot_energy >= dp_energy, fmt("B=%g one-shot %.4g below DP %.4g", bits, shot_energy, dp_energy));
    gap_db[k++] = 10.0 * std::log10(shot_energy / dp_energy);
  }
  out.require(gap_db[0] < gap_db[1], fmt("B=1 gap %.3f dB not below B=10 gap %.3f dB", gap_db[0], gap_db[1]));
  if (out.pass) out.detail = fmt("MC within 4 sigma; gap to DP %.3f dB at B=1, %.3f dB at B=10", gap_db[0], gap_db[1]);
  return out;
}

Outcome feasibility_fuzz() {
  Outcome out;
  constexpr int kMaxHorizon = 10;
  constexpr double kMaxBits = 40.0;
  auto m = std::make_shared<const MomentTable>(moments(kTruncExp, kMaxHorizon));
  auto th = std::make_shared<const OneShotThresholds>(compute_thresholds(kTruncExp, kMaxHorizon));
  DpConfig dc;
  dc.max_bits = kMaxBits;
  dc.grid_points = 513;
  dc.quadrature_nodes = 128;
  auto table = std::make_shared<const CostToGoTable>(solve(kTruncExp, dc, kMaxHorizon));

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> horizon(1, kMaxHorizon);
  std::uniform_real_distribution<double> bits(0.0, kMaxBits);
  std::uint64_t episodes = 0;
  std::uint64_t violations = 0;
  for (int trial = 0; trial < 40; ++trial) {
    SimulationConfig c;
    c.horizon = horizon(rng);
    c.bits = bits(rng);
    c.episodes = 250;
    c.seed = 700 + static_cast<std::uint64_t>(trial);
    c.check_constraints = true;
    std::vector<Policy> policies{Policy::iwf(),           Policy::equal_bit(), Policy::suboptimal_I(m),
                                 Policy::suboptimal_II(m), Policy::oneshot(th), Policy::dp(table)};
    if (c.horizon <= 2) policies.push_back(Policy::optimal_T2(m));
    const SimulationResult r = run(policies, kTruncExp, c);
    episodes += c.episodes;
    violations += r.violations;
    for (const auto& s : r.violation_samples) out.require(false, s);
  }
  out.require(violations == 0, std::to_string(violations) + " violations");
  if (out.pass) out.detail = std::to_string(episodes) + " episodes, zero violations";
  return out;
}

Outcome bias() {
  Outcome out;
  for (const auto& model : {kTruncExp, ChannelModel::gamma_diversity(2.0)}) {
    const std::string name = model.spec();
    const MomentTable m = moments(model, 64);
    const double nu1 = m.nu(1);
    const double first = expect(model, [&](double g) { return std::log2(g * nu1); });
    out.require(first > 0.0, name + fmt(" suboptimal I bias %.4g", first));

    std::vector<double> biases;
    for (int t = 2; t <= 64; ++t) {
      const double eta = threshold_II(t, m);
      biases.push_back(expect(model, [&](double g) { return std::log2(g / eta); }));
    }
    for (std::size_t i = 1; i < biases.size(); ++i)
      out.require(biases[i] < biases[i - 1], name + " bias not decreasing at t=" + std::to_string(i + 2));
    const double ratio = biases.back() / biases.front();
    out.require(std::abs(ratio) < 1e-3, name + fmt(" bias at t=64 is %.4g of its t=2 level", ratio));
    if (out.pass) out.detail += name + fmt(" ratio %.3g; ", ratio);
  }
  return out;
}

Outcome fifty_slots() {
  Outcome out;
  const auto start = Clock::now();
  auto m = std::make_shared<const MomentTable>(moments(kTruncExp, 50));
  const Policy dp = Policy::dp(dp_table(kTruncExp, 50.0, 50));
  const std::vector<Policy> policies{Policy::iwf(), dp, Policy::suboptimal_II(m), Policy::suboptimal_I(m),
                                     Policy::equal_bit()};
  double sub2_excess = 0.0;
  for (double bits : {5.0, 10.0, 20.0, 35.0, 50.0}) {
    SimulationConfig c;
    c.bits = bits;
    c.horizon = 50;
    c.episodes = 20'000;
    c.seed = 9;
    const SimulationResult r = run(policies, kTruncExp, c);
    require_ordering(out, r, fmt("T=50 B=%g", bits));
    if (bits == 50.0) {
      sub2_excess = r.stats[2].mean_energy / r.stats[1].mean_energy - 1.0;
      out.require(std::abs(sub2_excess) <= 0.03,
                  fmt("B=50 suboptimal II %.4g vs DP %.4g (%+.1f%%)", r.stats[2].mean_energy, r.stats[1].mean_energy,
                      100.0 * sub2_excess));
    }
  }
  const double elapsed = seconds_since(start);
  if (out.pass) out.detail = fmt("ordering holds; suboptimal II %+.2f%% vs DP at B=50; %.1f s", 100.0 * sub2_excess, elapsed);
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

const std::vector<Criterion> kCriteria{
    {1, "two-slot offsets table", table2_offsets},
    {2, "two-slot DP exactness", two_slot_exactness},
    {3, "gap curve shape", gap_curve_shape},
    {4, "policy ordering T=5", five_slot_ordering},
    {5, "fractional moment convergence", fractional_moments},
    {6, "one-shot thresholds", one_shot},
    {7, "feasibility fuzz", feasibility_fuzz},
    {8, "threshold bias", bias},
    {9, "policy ordering T=50", fifty_slots},
};

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(kCriteria.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }

  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s c%d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
