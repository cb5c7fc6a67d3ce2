#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "eesched/channel.hpp"
#include "eesched/policies.hpp"

namespace eesched {

class CostToGoTable;
class OneShotThresholds;

enum class PolicyKind { EqualBit, SuboptimalI, SuboptimalII, OptimalT2, Dp, OneShot, Iwf };

/// CLI names: eq | sub1 | sub2 | opt2 | dp | oneshot | iwf.
std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);

/// A scheduling rule bound to the statistics it needs. Cheap to copy; the
/// referenced tables are shared and immutable.
class Policy {
 public:
  static Policy equal_bit();
  static Policy suboptimal_I(std::shared_ptr<const MomentTable> moments);
  static Policy suboptimal_II(std::shared_ptr<const MomentTable> moments);
  static Policy optimal_T2(std::shared_ptr<const MomentTable> moments);
  static Policy dp(std::shared_ptr<const CostToGoTable> table);
  static Policy oneshot(std::shared_ptr<const OneShotThresholds> thresholds);
  /// Non-causal; run by the simulator over whole realizations.
  static Policy iwf();

  PolicyKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }
  bool causal() const noexcept { return kind_ != PolicyKind::Iwf; }

  /// Bits to send in slot `state.t` given its gain. `already_fired` only
  /// matters for the one-shot policy. Result lies in [0, state.beta] and
  /// equals state.beta at t = 1.
  double decide(SchedulerState state, double gain, bool already_fired = false) const;

  /// Longest horizon the policy can schedule (DP/one-shot tables and the
  /// moment table bound it; opt2 is limited to two slots).
  int max_horizon() const noexcept;

 private:
  explicit Policy(PolicyKind kind) : kind_(kind) {}

  PolicyKind kind_;
  std::shared_ptr<const MomentTable> moments_;
  std::shared_ptr<const CostToGoTable> table_;
  std::shared_ptr<const OneShotThresholds> thresholds_;
};

}  // namespace eesched
