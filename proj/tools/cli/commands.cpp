#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "eesched/analysis.hpp"
#include "eesched/channel.hpp"
#include "eesched/dp_solver.hpp"
#include "eesched/errors.hpp"
#include "eesched/oneshot.hpp"
#include "eesched/policy.hpp"
#include "eesched/simulator.hpp"

namespace eesched::cli {
namespace {

std::string num(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Collects check failures; throws once at the end so all of them get printed.
class Checker {
 public:
  explicit Checker(std::ostream& err) : err_(err) {}
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      err_ << "check failed: " << what << '\n';
      ++failures_;
    }
  }
  void finish() const {
    if (failures_) throw CheckFailed(std::to_string(failures_) + " check(s) failed");
  }

 private:
  std::ostream& err_;
  int failures_ = 0;
};

// Options bound to temporaries; only the ones given on the command line
// override the config file.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON config file; command-line flags take precedence");
  }

  template <class T>
  Flags& add(const std::string& name, T ExperimentConfig::*field, const std::string& help) {
    auto value = std::make_shared<T>(ExperimentConfig{}.*field);
    CLI::Option* opt = app_->add_option(name, *value, help)->capture_default_str();
    binds_.push_back({opt, [value, field](ExperimentConfig& c) { c.*field = *value; }});
    return *this;
  }

  Flags& policies() {
    auto value = std::make_shared<std::vector<std::string>>(ExperimentConfig{}.policies);
    CLI::Option* opt = app_->add_option("--policies", *value, "Comma-separated: eq,sub1,sub2,opt2,dp,oneshot,iwf")
                           ->delimiter(',')
                           ->default_str("eq,sub1,sub2,dp");
    binds_.push_back({opt, [value](ExperimentConfig& c) { c.policies = *value; }});
    return *this;
  }

  Flags& check() {
    CLI::Option* opt = app_->add_flag("--check", "Verify invariants; exit 3 on failure");
    binds_.push_back({opt, [](ExperimentConfig& c) { c.check = true; }});
    return *this;
  }

  Flags& independent() {
    CLI::Option* opt = app_->add_flag("--independent", "Independent channel draws per policy instead of common random numbers");
    binds_.push_back({opt, [](ExperimentConfig& c) { c.common_random_numbers = false; }});
    return *this;
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config_path_.empty()) c = load_config_file(config_path_);
    for (const auto& [opt, apply] : binds_)
      if (opt->count() > 0) apply(c);
    validate(c);
    return c;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> binds_;
};

// Opens --out (under $EESCHED_OUTPUT_DIR when relative) or falls back to `fallback`.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    path_ = resolve_output_path(path);
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    file_.open(path_);
    if (!file_) throw std::runtime_error("cannot open '" + path_.string() + "' for writing");
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream file_;
  std::ostream* stream_;
};

double dp_bmax(const ExperimentConfig& c) {
  if (c.bmax > 0.0) return c.bmax;
  return c.bits > 0.0 ? c.bits : 1.0;
}

DpConfig dp_config(const ExperimentConfig& c) {
  DpConfig d;
  d.max_bits = dp_bmax(c);
  d.grid_points = c.grid_points;
  d.quadrature_nodes = c.quadrature_nodes;
  d.workers = c.workers;
  return d;
}

int cmd_moments(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const ChannelModel model = ChannelModel::parse(c.channel);
  const MomentTable m = moments(model, static_cast<std::size_t>(c.moments));
  Output o(c.out, out);
  o.stream() << "m,nu,gmean\n";
  for (std::size_t k = 1; k <= m.size(); ++k) o.stream() << k << ',' << num(m.nu(k)) << ',' << num(m.gmean(k)) << '\n';
  o.stream() << "inf," << num(m.nu_inf()) << ',' << num(m.nu_inf()) << '\n';
  if (c.check) {
    Checker check(err);
    for (std::size_t k = 1; k < m.size(); ++k) {
      check.expect(m.nu(k + 1) <= m.nu(k), "nu not decreasing at m=" + std::to_string(k + 1));
      check.expect(m.gmean(k + 1) <= m.gmean(k), "gmean not decreasing at m=" + std::to_string(k + 1));
    }
    check.expect(m.nu(m.size()) >= m.nu_inf(), "nu below its limit");
    check.finish();
  }
  return kOk;
}

void check_table(const CostToGoTable& table, const ChannelModel& model, Checker& check) {
  for (int t = 1; t <= table.horizon(); ++t) {
    const auto& v = table.layer(t);
    check.expect(v[0] == 0.0, "J_" + std::to_string(t) + "(0) != 0");
    for (std::size_t i = 1; i < v.size(); ++i) {
      check.expect(v[i] >= v[i - 1], "J_" + std::to_string(t) + " decreasing at beta=" + num(table.grid(i)));
      if (i + 1 < v.size())
        check.expect(v[i + 1] - 2.0 * v[i] + v[i - 1] >= -1e-7,
                     "J_" + std::to_string(t) + " not convex at beta=" + num(table.grid(i)));
      if (t > 1)
        check.expect(v[i] <= table.value(t - 1, i), "J_" + std::to_string(t) + " > J_" + std::to_string(t - 1));
    }
  }
  if (table.horizon() < 2) return;

  const MomentTable m = moments(model, 1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> beta(0.0, table.max_bits());
  for (int i = 0; i < 100; ++i) {
    const double b = beta(rng);
    const double g = model.sample(rng);
    const double gap = std::abs(dp_decide(table, {2, b}, g) - optimal_T2(b, g, m));
    check.expect(gap <= 2.0 * table.step(), "two-slot decision off by " + num(gap) + " bits at beta=" + num(b));
  }
  for (double bits : {1.0, 5.0, 10.0, 30.0}) {
    if (bits > table.max_bits()) continue;
    const double exact = optimal_T2_cost(bits, model, m.nu(1));
    const double rel = table.interpolate(2, bits) / exact - 1.0;
    check.expect(std::abs(rel) < 0.005, "J_2(" + num(bits) + ") off the closed form by " + num(100.0 * rel) + "%");
  }
}

int cmd_dp_solve(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const ChannelModel model = ChannelModel::parse(c.channel);
  const CostToGoTable table = solve(model, dp_config(c), c.horizon);
  for (const auto& w : table.warnings) err << "warning: " << w << '\n';
  Output o(c.out, out);
  write_table(o.stream(), table);
  if (!o.path().empty()) err << "wrote " << o.path().string() << '\n';
  if (c.check) {
    Checker check(err);
    check_table(table, model, check);
    check.finish();
  }
  return kOk;
}

std::shared_ptr<const CostToGoTable> obtain_table(const ExperimentConfig& c, const ChannelModel& model,
                                                   std::ostream& err) {
  if (c.dp_table.empty()) {
    err << "solving DP table in-process (T=" << c.horizon << ", bmax=" << num(dp_bmax(c)) << ")\n";
    auto table = std::make_shared<const CostToGoTable>(solve(model, dp_config(c), c.horizon));
    for (const auto& w : table->warnings) err << "warning: " << w << '\n';
    return table;
  }
  const std::filesystem::path path = resolve_output_path(c.dp_table);
  if (!std::filesystem::exists(path))
    throw std::runtime_error("DP table '" + path.string() + "' not found; create it first with: eesched dp-solve --channel " +
                             c.channel + " --T " + std::to_string(c.horizon) + " --bmax " + num(dp_bmax(c)) +
                             " --out " + c.dp_table);
  auto table = std::make_shared<const CostToGoTable>(load_table(path.string()));
  if (ChannelModel::parse(table->channel_spec()) != model)
    throw std::runtime_error("DP table was solved for channel '" + table->channel_spec() + "', not '" + c.channel + "'");
  if (table->horizon() < c.horizon)
    throw std::runtime_error("DP table horizon " + std::to_string(table->horizon()) + " is shorter than T=" +
                             std::to_string(c.horizon));
  if (table->max_bits() < c.bits)
    throw std::runtime_error("DP table covers up to " + num(table->max_bits()) + " bits, below B=" + num(c.bits));
  return table;
}

std::vector<Policy> build_policies(const ExperimentConfig& c, const ChannelModel& model, std::ostream& err) {
  std::shared_ptr<const MomentTable> m;
  std::shared_ptr<const CostToGoTable> table;
  std::shared_ptr<const OneShotThresholds> thresholds;
  std::vector<Policy> out;
  for (const auto& name : c.policies) {
    const PolicyKind kind = parse_policy_kind(name);
    const bool needs_moments =
        kind == PolicyKind::SuboptimalI || kind == PolicyKind::SuboptimalII || kind == PolicyKind::OptimalT2;
    if (needs_moments && !m)
      m = std::make_shared<const MomentTable>(moments(model, static_cast<std::size_t>(std::max(1, c.horizon - 1))));
    switch (kind) {
      case PolicyKind::EqualBit: out.push_back(Policy::equal_bit()); break;
      case PolicyKind::SuboptimalI: out.push_back(Policy::suboptimal_I(m)); break;
      case PolicyKind::SuboptimalII: out.push_back(Policy::suboptimal_II(m)); break;
      case PolicyKind::OptimalT2: out.push_back(Policy::optimal_T2(m)); break;
      case PolicyKind::Dp:
        if (!table) table = obtain_table(c, model, err);
        out.push_back(Policy::dp(table));
        break;
      case PolicyKind::OneShot:
        if (!thresholds) thresholds = std::make_shared<const OneShotThresholds>(compute_thresholds(model, c.horizon));
        out.push_back(Policy::oneshot(thresholds));
        break;
      case PolicyKind::Iwf: out.push_back(Policy::iwf()); break;
    }
  }
  return out;
}

SimulationResult simulate(const ExperimentConfig& c, std::ostream& err) {
  const ChannelModel model = ChannelModel::parse(c.channel);
  const std::vector<Policy> policies = build_policies(c, model, err);
  SimulationConfig sc;
  sc.bits = c.bits;
  sc.horizon = c.horizon;
  sc.episodes = c.episodes;
  sc.seed = c.seed;
  sc.workers = c.workers;
  sc.common_random_numbers = c.common_random_numbers;
  sc.check_constraints = c.check;
  return run(policies, model, sc);
}

void report_violations(const SimulationResult& r, Checker& check) {
  check.expect(r.violations == 0, std::to_string(r.violations) + " per-episode constraint violation(s)");
  for (const auto& s : r.violation_samples) check.expect(false, s);
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const SimulationResult r = simulate(c, err);
  Output o(c.out, out);
  o.stream() << "policy,causal,B,T,episodes,seed,mean_energy,stderr,mean_energy_db\n";
  for (const auto& s : r.stats)
    o.stream() << s.policy << ',' << (s.causal ? "true" : "false") << ',' << num(s.bits) << ',' << s.horizon << ','
               << s.episodes << ',' << s.seed << ',' << num(s.mean_energy) << ',' << num(s.std_error) << ','
               << num(s.mean_energy_db()) << '\n';
  if (c.check) {
    Checker check(err);
    report_violations(r, check);
    check.finish();
  }
  return kOk;
}

int cmd_profile(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const SimulationResult r = simulate(c, err);
  Output o(c.out, out);
  o.stream() << "policy,slot_index_t,mean_bits\n";
  for (const auto& s : r.stats)
    for (std::size_t k = 0; k < s.mean_bits_per_slot.size(); ++k)
      o.stream() << s.policy << ',' << (s.horizon - static_cast<int>(k)) << ',' << num(s.mean_bits_per_slot[k]) << '\n';
  if (c.check) {
    Checker check(err);
    report_violations(r, check);
    for (const auto& s : r.stats) {
      double total = 0.0;
      for (double b : s.mean_bits_per_slot) total += b;
      check.expect(std::abs(total - c.bits) <= 1e-6 * std::max(1.0, c.bits), s.policy + " profile does not sum to B");
    }
    check.finish();
  }
  return kOk;
}

int cmd_oneshot_thresholds(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const ChannelModel model = ChannelModel::parse(c.channel);
  const OneShotThresholds th = compute_thresholds(model, c.horizon);
  Output o(c.out, out);
  o.stream() << "t,omega,threshold\n";
  for (int t = 2; t <= th.horizon(); ++t) o.stream() << t << ',' << num(th.omega(t)) << ',' << num(th.threshold(t)) << '\n';
  if (c.check) {
    Checker check(err);
    if (th.horizon() >= 2) {
      const double nu1 = moments(model, 1).nu(1);
      check.expect(std::abs(th.omega(2) / nu1 - 1.0) <= 1e-10, "omega_2 differs from nu_1");
    }
    for (int t = 2; t < th.horizon(); ++t) {
      check.expect(th.omega(t + 1) <= th.omega(t), "omega grows with remaining slots at t=" + std::to_string(t + 1));
      const double alt = next_omega_conditional(model, th.omega(t));
      check.expect(std::abs(alt / th.omega(t + 1) - 1.0) <= 1e-10,
                   "conditional form disagrees at t=" + std::to_string(t + 1));
    }
    check.finish();
  }
  return kOk;
}

int cmd_oneshot_energy(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const ChannelModel model = ChannelModel::parse(c.channel);
  auto th = std::make_shared<const OneShotThresholds>(compute_thresholds(model, c.horizon));
  const double energy = oneshot_expected_energy(*th, c.bits, c.horizon);
  nlohmann::json report{{"channel", model.spec()}, {"B", c.bits}, {"T", c.horizon}, {"energy", energy}};
  Checker check(err);
  if (c.check) {
    SimulationConfig sc;
    sc.bits = c.bits;
    sc.horizon = c.horizon;
    sc.episodes = c.episodes;
    sc.seed = c.seed;
    sc.workers = c.workers;
    sc.check_constraints = true;
    const std::vector<Policy> shot{Policy::oneshot(th)};
    const SimulationResult r = run(shot, model, sc);
    const AggregateStats& s = r.stats[0];
    report["mc_energy"] = s.mean_energy;
    report["mc_stderr"] = s.std_error;
    report_violations(r, check);
    check.expect(std::abs(s.mean_energy - energy) <= 4.0 * s.std_error,
                 "closed form " + num(energy) + " vs simulation " + num(s.mean_energy) + " (stderr " +
                     num(s.std_error) + ")");
  }
  Output o(c.out, out);
  o.stream() << report.dump(2) << '\n';
  check.finish();
  return kOk;
}

int cmd_table2(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  Output o(c.out, out);
  o.stream() << "label,channel,small_B_dB,large_B_dB,reference_small_B_dB,reference_large_B_dB,pass\n";
  Checker check(err);
  for (const ReferenceOffset& row : reference_offsets()) {
    const OffsetReport r = offset_ratios(row.channel);
    const bool pass = std::abs(r.small_bits_db() - row.small_bits_db) <= 0.05 &&
                      std::abs(r.large_bits_db() - row.large_bits_db) <= 0.05;
    o.stream() << row.label << ',' << row.channel.spec() << ',' << num(r.small_bits_db()) << ','
               << num(r.large_bits_db()) << ',' << num(row.small_bits_db) << ',' << num(row.large_bits_db) << ','
               << (pass ? "true" : "false") << '\n';
    if (c.check) check.expect(pass, row.label + " offsets outside 0.05 dB of the reference");
  }
  check.finish();
  return kOk;
}

int cmd_gap_curve(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const ChannelModel model = ChannelModel::parse(c.channel);
  const double hi = c.bmax > 0.0 ? c.bmax : 30.0;
  if (!(c.bmin > 0.0) || !(hi >= c.bmin)) throw std::invalid_argument("gap-curve needs 0 < bmin <= bmax");
  if (c.points < 1) throw std::invalid_argument("gap-curve needs points >= 1");
  std::vector<double> grid;
  for (std::size_t i = 0; i < c.points; ++i) {
    const double f = c.points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(c.points - 1);
    grid.push_back(c.bmin * std::pow(hi / c.bmin, f));
  }
  grid.back() = hi;
  const std::vector<GapPoint> curve = gap_curve(model, grid);
  Output o(c.out, out);
  o.stream() << "B,equal_bit,optimal,gap_db\n";
  for (const GapPoint& p : curve)
    o.stream() << num(p.bits) << ',' << num(p.equal_bit) << ',' << num(p.optimal) << ',' << num(p.gap_db) << '\n';
  if (c.check) {
    Checker check(err);
    for (std::size_t i = 1; i < curve.size(); ++i)
      check.expect(curve[i].gap_db <= curve[i - 1].gap_db, "gap increases at B=" + num(curve[i].bits));
    check.finish();
  }
  return kOk;
}

using Command = int (*)(const ExperimentConfig&, std::ostream&, std::ostream&);

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-efficient scheduling of delay-constrained traffic over fading channels"};
  app.name("eesched");
  app.require_subcommand(1);
  app.set_version_flag("--version", "eesched 0.1.0");

  struct Entry {
    CLI::App* sub;
    std::unique_ptr<Flags> flags;
    Command fn;
  };
  std::vector<Entry> commands;
  auto add = [&](const char* name, const char* help, Command fn) -> Flags& {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.push_back({sub, std::make_unique<Flags>(sub), fn});
    return *commands.back().flags;
  };
  using C = ExperimentConfig;
  const std::string channel_help = "truncexp:lambda=L,gamma0=G | gamma:k=K,theta=S | degenerate:g0=G";
  const std::string out_help = "Output file (stdout if omitted; relative paths go under $EESCHED_OUTPUT_DIR)";

  add("moments", "Fractional moments nu_m, their running geometric means and the limit", cmd_moments)
      .add("--channel", &C::channel, channel_help)
      .add("--M", &C::moments, "Number of moments")
      .add("--out", &C::out, out_help)
      .check();
  add("dp-solve", "Solve the optimal cost-to-go table by backward induction", cmd_dp_solve)
      .add("--channel", &C::channel, channel_help)
      .add("--T", &C::horizon, "Horizon (slots)")
      .add("--bmax", &C::bmax, "Largest packet size on the grid, bits (0: use --B)")
      .add("--B", &C::bits, "Packet size, bits; the grid default when --bmax is 0")
      .add("--grid-points", &C::grid_points, "Grid points on [0, bmax]")
      .add("--nodes", &C::quadrature_nodes, "Quadrature nodes over the channel")
      .add("--workers", &C::workers, "Threads per layer")
      .add("--out", &C::out, out_help)
      .check();
  for (const auto& [name, help, fn] :
       {std::tuple{"simulate", "Monte Carlo expected energy per policy", &cmd_simulate},
        std::tuple{"profile", "Mean bits per slot per policy", &cmd_profile}}) {
    add(name, help, fn)
        .add("--channel", &C::channel, channel_help)
        .add("--B", &C::bits, "Packet size, bits")
        .add("--T", &C::horizon, "Deadline, slots")
        .policies()
        .add("--episodes", &C::episodes, "Monte Carlo episodes")
        .add("--seed", &C::seed, "Random seed")
        .add("--workers", &C::workers, "Worker threads (results do not depend on it)")
        .add("--dp-table", &C::dp_table, "Table from dp-solve; solved in-process when omitted")
        .add("--bmax", &C::bmax, "Grid upper end for an in-process DP solve (0: use --B)")
        .add("--grid-points", &C::grid_points, "Grid points for an in-process DP solve")
        .add("--nodes", &C::quadrature_nodes, "Quadrature nodes for an in-process DP solve")
        .add("--out", &C::out, out_help)
        .independent()
        .check();
  }
  add("oneshot-thresholds", "Optimal stopping thresholds for one-shot transmission", cmd_oneshot_thresholds)
      .add("--channel", &C::channel, channel_help)
      .add("--T", &C::horizon, "Horizon (slots)")
      .add("--out", &C::out, out_help)
      .check();
  add("oneshot-energy", "Expected energy of the optimal one-shot policy", cmd_oneshot_energy)
      .add("--channel", &C::channel, channel_help)
      .add("--B", &C::bits, "Packet size, bits")
      .add("--T", &C::horizon, "Deadline, slots")
      .add("--episodes", &C::episodes, "Episodes for the --check simulation")
      .add("--seed", &C::seed, "Seed for the --check simulation")
      .add("--workers", &C::workers, "Worker threads for the --check simulation")
      .add("--out", &C::out, out_help)
      .check();
  add("table2", "Two-slot energy offsets of optimal over equal-bit scheduling for six channels", cmd_table2)
      .add("--out", &C::out, out_help)
      .check();
  add("gap-curve", "Two-slot equal-bit vs optimal gap in dB over packet sizes", cmd_gap_curve)
      .add("--channel", &C::channel, channel_help)
      .add("--bmin", &C::bmin, "Smallest packet size, bits")
      .add("--bmax", &C::bmax, "Largest packet size, bits (0: 30)")
      .add("--points", &C::points, "Log-spaced packet sizes")
      .add("--out", &C::out, out_help)
      .check();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  }

  for (const Entry& command : commands) {
    if (!command.sub->parsed()) continue;
    try {
      const ExperimentConfig config = command.flags->resolve();
      return command.fn(config, out, err);
    } catch (const CheckFailed& e) {
      err << "error: " << e.what() << '\n';
      return kCheckFailed;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kUsageError;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kRuntimeError;
    }
  }
  return kUsageError;
}

}  // namespace eesched::cli
