#include "eesched/oneshot.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eesched {

OneShotThresholds::OneShotThresholds(ChannelModel channel, std::vector<double> omega)
    : channel_(std::move(channel)), omega_(std::move(omega)) {
  if (omega_.empty()) throw std::invalid_argument("OneShotThresholds: horizon must be >= 1");
}

double OneShotThresholds::omega(int t) const {
  if (t < 1 || t > horizon())
    throw OutOfTable("omega_" + std::to_string(t) + " outside horizon " + std::to_string(horizon()));
  return omega_[static_cast<std::size_t>(t - 1)];
}

double OneShotThresholds::threshold(int t) const { return 1.0 / omega(t); }

namespace {

// E[min(1/g, w)]; the kink sits at g = 1/w.
double expected_capped_inverse(const ChannelModel& model, double w) {
  if (std::isinf(w)) return expect(model, [](double g) { return 1.0 / g; });
  const std::array<double, 1> kink{1.0 / w};
  return expect(model, [w](double g) { return std::min(1.0 / g, w); }, kink);
}

}  // namespace

OneShotThresholds compute_thresholds(const ChannelModel& model, int horizon) {
  if (horizon < 1) throw std::invalid_argument("compute_thresholds: horizon must be >= 1");
  std::vector<double> omega{std::numeric_limits<double>::infinity()};
  for (int t = 2; t <= horizon; ++t) omega.push_back(expected_capped_inverse(model, omega.back()));
  return OneShotThresholds(model, std::move(omega));
}

double next_omega_conditional(const ChannelModel& model, double omega) {
  const double cut = 1.0 / omega;  // 1/g < omega  <=>  g > cut
  const std::array<double, 1> kink{cut};
  const double p_fire = 1.0 - model.cdf(cut);
  const double partial = expect(model, [cut](double g) { return g > cut ? 1.0 / g : 0.0; }, kink);
  // partial == E[1/g | fire] * P(fire)
  return partial + omega * (1.0 - p_fire);
}

double oneshot_decide(const OneShotThresholds& thresholds, SchedulerState state, double gain,
                      bool already_fired) {
  if (state.t < 1) throw std::invalid_argument("oneshot_decide: t must be >= 1");
  if (already_fired) return 0.0;
  if (state.t == 1) return state.beta;
  return gain > thresholds.threshold(state.t) ? state.beta : 0.0;
}

double oneshot_expected_energy(const OneShotThresholds& thresholds, double bits, int horizon) {
  if (!(bits >= 0.0)) throw std::invalid_argument("oneshot_expected_energy: bits must be >= 0");
  if (bits == 0.0) return 0.0;
  const double factor = expected_capped_inverse(thresholds.channel(), thresholds.omega(horizon));
  return std::expm1(bits * std::log(2.0)) * factor;
}

}  // namespace eesched
