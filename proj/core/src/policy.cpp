#include "eesched/policy.hpp"

#include <climits>
#include <stdexcept>
#include <string>

#include "eesched/dp_solver.hpp"
#include "eesched/oneshot.hpp"

namespace eesched {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::EqualBit: return "eq";
    case PolicyKind::SuboptimalI: return "sub1";
    case PolicyKind::SuboptimalII: return "sub2";
    case PolicyKind::OptimalT2: return "opt2";
    case PolicyKind::Dp: return "dp";
    case PolicyKind::OneShot: return "oneshot";
    case PolicyKind::Iwf: return "iwf";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (auto kind : {PolicyKind::EqualBit, PolicyKind::SuboptimalI, PolicyKind::SuboptimalII,
                    PolicyKind::OptimalT2, PolicyKind::Dp, PolicyKind::OneShot, PolicyKind::Iwf})
    if (to_string(kind) == name) return kind;
  throw std::invalid_argument("unknown policy '" + std::string(name) +
                              "' (expected eq, sub1, sub2, opt2, dp, oneshot or iwf)");
}

namespace {

template <class T>
std::shared_ptr<const T> require(std::shared_ptr<const T> p, const char* what) {
  if (!p) throw std::invalid_argument(std::string("policy needs a ") + what);
  return p;
}

}  // namespace

Policy Policy::equal_bit() { return Policy(PolicyKind::EqualBit); }

Policy Policy::suboptimal_I(std::shared_ptr<const MomentTable> moments) {
  Policy p(PolicyKind::SuboptimalI);
  p.moments_ = require(std::move(moments), "moment table");
  return p;
}

Policy Policy::suboptimal_II(std::shared_ptr<const MomentTable> moments) {
  Policy p(PolicyKind::SuboptimalII);
  p.moments_ = require(std::move(moments), "moment table");
  return p;
}

Policy Policy::optimal_T2(std::shared_ptr<const MomentTable> moments) {
  Policy p(PolicyKind::OptimalT2);
  p.moments_ = require(std::move(moments), "moment table");
  return p;
}

Policy Policy::dp(std::shared_ptr<const CostToGoTable> table) {
  Policy p(PolicyKind::Dp);
  p.table_ = require(std::move(table), "cost-to-go table");
  return p;
}

Policy Policy::oneshot(std::shared_ptr<const OneShotThresholds> thresholds) {
  Policy p(PolicyKind::OneShot);
  p.thresholds_ = require(std::move(thresholds), "one-shot threshold table");
  return p;
}

Policy Policy::iwf() { return Policy(PolicyKind::Iwf); }

int Policy::max_horizon() const noexcept {
  switch (kind_) {
    case PolicyKind::SuboptimalII: return static_cast<int>(moments_->size()) + 1;
    case PolicyKind::OptimalT2: return 2;
    case PolicyKind::Dp: return table_->horizon();
    case PolicyKind::OneShot: return thresholds_->horizon();
    default: return INT_MAX;
  }
}

double Policy::decide(SchedulerState state, double gain, bool already_fired) const {
  switch (kind_) {
    case PolicyKind::EqualBit: return eesched::equal_bit(state, gain);
    case PolicyKind::SuboptimalI: return eesched::suboptimal_I(state, gain, *moments_);
    case PolicyKind::SuboptimalII: return eesched::suboptimal_II(state, gain, *moments_);
    case PolicyKind::OptimalT2:
      if (state.t > 2) throw std::invalid_argument("opt2 is defined only for t <= 2");
      return state.t == 1 ? state.beta : eesched::optimal_T2(state.beta, gain, *moments_);
    case PolicyKind::Dp: return dp_decide(*table_, state, gain);
    case PolicyKind::OneShot: return oneshot_decide(*thresholds_, state, gain, already_fired);
    case PolicyKind::Iwf: break;
  }
  throw std::logic_error("iwf is non-causal and has no per-slot decision rule");
}

}  // namespace eesched
