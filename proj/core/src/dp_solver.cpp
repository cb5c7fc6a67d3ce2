#include "eesched/dp_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace eesched {
namespace {

// Piecewise-linear view of one cost-to-go layer.
struct LayerView {
  const std::vector<double>& v;
  double step;

  double operator()(double x) const {
    const double s = std::max(0.0, x / step);
    const std::size_t k = std::min(static_cast<std::size_t>(s), v.size() - 2);
    const double frac = s - static_cast<double>(k);
    return v[k] + frac * (v[k + 1] - v[k]);
  }

  // Slope of the segment ending at x (left derivative).
  double left_slope(double x) const {
    const double s = x / step;
    std::size_t k = static_cast<std::size_t>(std::ceil(s - 1e-9));
    k = std::clamp<std::size_t>(k, 1, v.size() - 1);
    return (v[k] - v[k - 1]) / step;
  }

  double right_slope_at_zero() const { return (v[1] - v[0]) / step; }
};

// min over b in [0, beta] of (2^b - 1)/g + prev(beta - b).
ScalarMinimum minimize_stage(const LayerView& prev, double beta, double gain, double tol) {
  if (beta <= 0.0) return {0.0, 0.0};
  constexpr double ln2 = std::numbers::ln2;
  // Convexity makes the one-sided derivatives at the ends decisive for the
  // two boundary branches.
  if (ln2 / gain - prev.left_slope(beta) >= 0.0) return {0.0, prev(beta)};
  if (ln2 * std::exp2(beta) / gain - prev.right_slope_at_zero() <= 0.0)
    return {beta, energy_cost(beta, gain)};
  auto objective = [&](double b) { return energy_cost(b, gain) + prev(beta - b); };
  return golden_section_minimize(objective, 0.0, beta, tol);
}

}  // namespace

QuadratureNodes equiprobable_nodes(const ChannelModel& model, std::size_t count) {
  if (count == 0) throw std::invalid_argument("equiprobable_nodes: count must be >= 1");
  const double n = static_cast<double>(count);
  QuadratureNodes nodes;
  nodes.weights.assign(count, 1.0 / n);
  if (model.is_degenerate()) {
    nodes.gains.assign(count, model.quantile(0.5));
    return nodes;
  }
  // Each node sits at the bin's conditional mean of 1/g. The stage cost is
  // concave in 1/g, so this keeps every layer an upper bound.
  nodes.gains.reserve(count);
  double lo = model.support_min();
  for (std::size_t j = 0; j < count; ++j) {
    const double hi = j + 1 == count ? model.support_max() : model.quantile(static_cast<double>(j + 1) / n);
    const std::array<double, 2> edges{lo, hi};
    const double mass_over_g =
        expect(model, [lo, hi](double g) { return g > lo && g <= hi ? 1.0 / g : 0.0; }, edges);
    nodes.gains.push_back(1.0 / (n * mass_over_g));
    lo = hi;
  }
  return nodes;
}

CostToGoTable::CostToGoTable(std::string channel_spec, double nu1, double max_bits,
                             std::size_t quadrature_nodes, double inner_tol,
                             std::vector<std::vector<double>> values)
    : channel_spec_(std::move(channel_spec)),
      nu1_(nu1),
      max_bits_(max_bits),
      quadrature_nodes_(quadrature_nodes),
      inner_tol_(inner_tol),
      values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("CostToGoTable: horizon must be >= 1");
  const std::size_t n = values_.front().size();
  if (n < 3) throw std::invalid_argument("CostToGoTable: need at least 3 grid points");
  for (const auto& layer : values_)
    if (layer.size() != n) throw std::invalid_argument("CostToGoTable: ragged value grid");
  if (!(max_bits_ > 0.0)) throw std::invalid_argument("CostToGoTable: max_bits must be > 0");
  step_ = max_bits_ / static_cast<double>(n - 1);
}

const std::vector<double>& CostToGoTable::layer(int t) const {
  if (t < 1 || t > horizon())
    throw OutOfTable("cost-to-go layer t=" + std::to_string(t) + " outside table horizon " +
                     std::to_string(horizon()));
  return values_[static_cast<std::size_t>(t - 1)];
}

double CostToGoTable::value(int t, std::size_t i) const { return layer(t).at(i); }

double CostToGoTable::interpolate(int t, double beta) const {
  if (beta < 0.0 || beta > max_bits_ * (1.0 + 1e-12))
    throw OutOfTable("beta=" + std::to_string(beta) + " outside table range [0, " +
                     std::to_string(max_bits_) + "]");
  return LayerView{layer(t), step_}(beta);
}

CostToGoTable solve(const ChannelModel& model, const DpConfig& config, int horizon) {
  if (horizon < 1) throw std::invalid_argument("solve: horizon must be >= 1");
  if (config.grid_points < 3) throw std::invalid_argument("solve: grid_points must be >= 3");
  if (!(config.inner_tol > 0.0)) throw std::invalid_argument("solve: inner_tol must be > 0");
  if (!(config.max_bits > 0.0)) throw std::invalid_argument("solve: max_bits must be > 0");

  const double nu1 = moments(model, 1).nu(1);
  const QuadratureNodes nodes = equiprobable_nodes(model, config.quadrature_nodes);
  const std::size_t n = config.grid_points;
  const double step = config.max_bits / static_cast<double>(n - 1);

  std::vector<std::vector<double>> values;
  values.reserve(static_cast<std::size_t>(horizon));
  std::vector<double> last(n);
  for (std::size_t i = 0; i < n; ++i)
    last[i] = std::expm1(static_cast<double>(i) * step * std::numbers::ln2) * nu1;
  values.push_back(std::move(last));

  std::vector<std::string> warnings;
  unsigned workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : config.workers;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  for (int t = 2; t <= horizon; ++t) {
    const LayerView prev{values.back(), step};
    std::vector<double> next(n, 0.0);
    auto fill = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = std::max<std::size_t>(begin, 1); i < end; ++i) {
        const double beta = static_cast<double>(i) * step;
        double acc = 0.0;
        for (std::size_t j = 0; j < nodes.gains.size(); ++j)
          acc += nodes.weights[j] * minimize_stage(prev, beta, nodes.gains[j], config.inner_tol).value;
        next[i] = acc;
      }
    };
    if (workers <= 1) {
      fill(0, n);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (n + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(fill, w * chunk, std::min(n, (w + 1) * chunk));
    }

    // Linear interpolation error of a convex layer is about |second difference| / 8.
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
      if (next[i] > 0.0)
        worst = std::max(worst, std::abs(next[i + 1] - 2.0 * next[i] + next[i - 1]) / (8.0 * next[i]));
    if (worst > 0.01)
      warnings.push_back("GridTooCoarse: layer t=" + std::to_string(t) +
                         " interpolation error estimate " + std::to_string(100.0 * worst) +
                         "% exceeds 1%");
    values.push_back(std::move(next));
  }

  CostToGoTable table(model.spec(), nu1, config.max_bits, config.quadrature_nodes, config.inner_tol,
                      std::move(values));
  table.warnings = std::move(warnings);
  return table;
}

double dp_decide(const CostToGoTable& table, SchedulerState state, double gain) {
  if (state.t < 1) throw std::invalid_argument("dp_decide: t must be >= 1");
  if (!(state.beta >= 0.0)) throw std::invalid_argument("dp_decide: beta must be >= 0");
  if (state.t > table.horizon())
    throw OutOfTable("t=" + std::to_string(state.t) + " exceeds table horizon " +
                     std::to_string(table.horizon()));
  if (state.beta > table.max_bits() * (1.0 + 1e-12))
    throw OutOfTable("beta=" + std::to_string(state.beta) + " exceeds table max_bits " +
                     std::to_string(table.max_bits()));
  if (state.t == 1) return state.beta;
  const LayerView prev{table.layer(state.t - 1), table.step()};
  const double bits = minimize_stage(prev, state.beta, gain, table.inner_tol()).x;
  return std::clamp(bits, 0.0, state.beta);
}

}  // namespace eesched
