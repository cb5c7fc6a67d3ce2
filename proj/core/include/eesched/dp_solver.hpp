#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "eesched/channel.hpp"
#include "eesched/policies.hpp"

namespace eesched {

struct DpConfig {
  double max_bits = 10.0;
  std::size_t grid_points = 1025;
  /// Golden-section stopping width, in bits.
  double inner_tol = 1e-9;
  std::size_t quadrature_nodes = 256;
  /// Threads per backward-induction layer; 0 picks hardware concurrency.
  unsigned workers = 1;
};

/// Probability-weighted nodes for E_g[.]: n equiprobable bins of the channel
/// CDF, each with weight 1/n and node 1/E[1/g | bin].
struct QuadratureNodes {
  std::vector<double> gains;
  std::vector<double> weights;
};

QuadratureNodes equiprobable_nodes(const ChannelModel& model, std::size_t count);

/// Discretized optimal cost-to-go J_t(beta) on a uniform beta grid, for
/// t = 1..horizon. Immutable after `solve`.
class CostToGoTable {
 public:
  CostToGoTable(std::string channel_spec, double nu1, double max_bits, std::size_t quadrature_nodes,
                double inner_tol, std::vector<std::vector<double>> values);

  int horizon() const noexcept { return static_cast<int>(values_.size()); }
  std::size_t grid_points() const noexcept { return values_.front().size(); }
  double max_bits() const noexcept { return max_bits_; }
  double step() const noexcept { return step_; }
  double grid(std::size_t i) const noexcept { return static_cast<double>(i) * step_; }
  const std::string& channel_spec() const noexcept { return channel_spec_; }
  double nu1() const noexcept { return nu1_; }
  std::size_t quadrature_nodes() const noexcept { return quadrature_nodes_; }
  double inner_tol() const noexcept { return inner_tol_; }

  /// Grid value J_t(beta_i), 1 <= t <= horizon.
  double value(int t, std::size_t i) const;
  const std::vector<double>& layer(int t) const;

  /// Piecewise-linear interpolation of layer t; beta within [0, max_bits].
  double interpolate(int t, double beta) const;

  /// Diagnostics from `solve`, e.g. grid-too-coarse warnings.
  std::vector<std::string> warnings;

 private:
  std::string channel_spec_;
  double nu1_;
  double max_bits_;
  double step_;
  std::size_t quadrature_nodes_;
  double inner_tol_;
  std::vector<std::vector<double>> values_;
};

/// Backward induction: J_1(beta) = (2^beta - 1) nu_1, and for t >= 2
/// J_t(beta) = E_g[ min_{0<=b<=beta} (2^b - 1)/g + J_{t-1}(beta - b) ].
CostToGoTable solve(const ChannelModel& model, const DpConfig& config, int horizon);

/// Optimal bits to send now: argmin over b in [0, beta] of
/// (2^b - 1)/g + J_{t-1}(beta - b). Throws OutOfTable outside the table.
double dp_decide(const CostToGoTable& table, SchedulerState state, double gain);

struct ScalarMinimum {
  double x;
  double value;
};

/// Golden-section search for the minimum of a convex `f` on [lo, hi]. The
/// endpoints are kept as candidates, so boundary minima are returned exactly.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  ScalarMinimum best = fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
  if (f_lo <= best.value) best = {lo, f_lo};
  if (f_hi < best.value) best = {hi, f_hi};
  return best;
}

void write_table(std::ostream& out, const CostToGoTable& table);
CostToGoTable read_table(std::istream& in);
void save_table(const std::string& path, const CostToGoTable& table);
CostToGoTable load_table(const std::string& path);

}  // namespace eesched
