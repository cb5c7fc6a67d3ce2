#pragma once

#include <vector>

#include "eesched/channel.hpp"
#include "eesched/policies.hpp"

namespace eesched {

/// Optimal-stopping thresholds for sending the whole packet in one slot.
/// omega(t) is the expected per-unit cost of waiting from slot t; the
/// policy fires at the first slot with 1/g < omega(t).
class OneShotThresholds {
 public:
  OneShotThresholds(ChannelModel channel, std::vector<double> omega);

  int horizon() const noexcept { return static_cast<int>(omega_.size()); }
  /// omega_t for 1 <= t <= horizon; omega_1 is +infinity.
  double omega(int t) const;
  /// Channel threshold 1/omega_t (0 at t = 1).
  double threshold(int t) const;
  const ChannelModel& channel() const noexcept { return channel_; }

 private:
  ChannelModel channel_;
  std::vector<double> omega_;
};

/// omega_2 = nu_1 and omega_t = E[min(1/g, omega_{t-1})] for t = 3..horizon.
OneShotThresholds compute_thresholds(const ChannelModel& model, int horizon);

/// The recursion step in its conditional two-term form:
/// E[1/g | 1/g < w] P(1/g < w) + w P(1/g >= w).
double next_omega_conditional(const ChannelModel& model, double omega);

/// Bits sent in slot `state.t`: all remaining bits on the first slot whose
/// gain beats the threshold (or at the deadline), zero afterwards.
double oneshot_decide(const OneShotThresholds& thresholds, SchedulerState state, double gain,
                      bool already_fired);

/// Expected energy of the optimal one-shot policy over `horizon` slots:
/// (2^bits - 1) E[min(1/g, omega_horizon)].
double oneshot_expected_energy(const OneShotThresholds& thresholds, double bits, int horizon);

}  // namespace eesched
