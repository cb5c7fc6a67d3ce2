#pragma once

#include <span>
#include <vector>

#include "eesched/channel.hpp"

namespace eesched {

/// Scheduler state: `t` remaining slots (t = 1 is the deadline slot) and
/// `beta` remaining bits.
struct SchedulerState {
  int t = 1;
  double beta = 0.0;
};

/// Energy to send `bits` over a slot with gain `gain` at capacity: (2^b - 1)/g.
double energy_cost(double bits, double gain);

/// Channel-blind baseline: beta / t.
double equal_bit(SchedulerState state, double gain);

/// The linear-combination rule shared by every threshold scheduler:
/// clamp(beta/t + (t-1)/t * log2(g / eta), 0, beta).
double threshold_rule(SchedulerState state, double gain, double eta);

/// Constant threshold 1/nu_1.
double threshold_I(const MomentTable& moments);

/// Threshold 1/G(nu_{t-1}, ..., nu_1) for t >= 2. Needs t-1 moments.
double threshold_II(int t, const MomentTable& moments);

double suboptimal_I(SchedulerState state, double gain, const MomentTable& moments);
double suboptimal_II(SchedulerState state, double gain, const MomentTable& moments);

/// Exact optimum for two slots: clamp(B/2 + log2(g2 * nu_1)/2, 0, B).
double optimal_T2(double bits, double gain, const MomentTable& moments);

/// Non-causal inverse waterfilling over a full realization.
struct IwfResult {
  std::vector<double> bits;
  double water_level = 0.0;
  std::vector<bool> utilized;
  double energy = 0.0;
};

/// Minimizes sum (2^b_t - 1)/g_t subject to sum b_t = bits, b_t >= 0.
/// `gains` are in slot order; the result follows the same order.
IwfResult iwf_allocate(double bits, std::span<const double> gains);

}  // namespace eesched
