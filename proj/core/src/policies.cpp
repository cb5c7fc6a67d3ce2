#include "eesched/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eesched {
namespace {

void check_state(SchedulerState state) {
  if (state.t < 1) throw std::invalid_argument("scheduler state: t must be >= 1");
  if (!(state.beta >= 0.0)) throw std::invalid_argument("scheduler state: beta must be >= 0");
}

}  // namespace

double energy_cost(double bits, double gain) {
  return std::expm1(bits * std::numbers::ln2) / gain;
}

double equal_bit(SchedulerState state, double /*gain*/) {
  check_state(state);
  return state.beta / static_cast<double>(state.t);
}

double threshold_rule(SchedulerState state, double gain, double eta) {
  check_state(state);
  if (state.t == 1 || state.beta == 0.0) return state.beta;
  const double t = static_cast<double>(state.t);
  const double bits = state.beta / t + (t - 1.0) / t * std::log2(gain / eta);
  return std::clamp(bits, 0.0, state.beta);
}

double threshold_I(const MomentTable& moments) { return 1.0 / moments.nu(1); }

double threshold_II(int t, const MomentTable& moments) {
  if (t < 2) throw std::invalid_argument("threshold_II: t must be >= 2");
  return 1.0 / moments.gmean(static_cast<std::size_t>(t - 1));
}

double suboptimal_I(SchedulerState state, double gain, const MomentTable& moments) {
  return threshold_rule(state, gain, threshold_I(moments));
}

double suboptimal_II(SchedulerState state, double gain, const MomentTable& moments) {
  if (state.t <= 1) return threshold_rule(state, gain, 1.0);
  return threshold_rule(state, gain, threshold_II(state.t, moments));
}

double optimal_T2(double bits, double gain, const MomentTable& moments) {
  if (!(bits >= 0.0)) throw std::invalid_argument("optimal_T2: bits must be >= 0");
  return std::clamp(0.5 * bits + 0.5 * std::log2(gain * moments.nu(1)), 0.0, bits);
}

IwfResult iwf_allocate(double bits, std::span<const double> gains) {
  if (gains.empty()) throw std::invalid_argument("iwf_allocate: no slots");
  if (!(bits >= 0.0)) throw std::invalid_argument("iwf_allocate: bits must be >= 0");
  for (double g : gains)
    if (!(g > 0.0) || !std::isfinite(g))
      throw std::invalid_argument("iwf_allocate: gains must be positive and finite");

  std::vector<double> log_gain(gains.size());
  std::transform(gains.begin(), gains.end(), log_gain.begin(), [](double g) { return std::log2(g); });
  const auto [min_it, max_it] = std::minmax_element(log_gain.begin(), log_gain.end());

  // Bits served as a function of the log2 water level; continuous and
  // nonincreasing, equal to 0 at the strongest slot.
  auto served = [&](double level) {
    double sum = 0.0;
    for (double lg : log_gain) sum += std::max(0.0, lg - level);
    return sum;
  };

  double lo = *min_it - bits;  // served(lo) >= bits
  double hi = *max_it;         // served(hi) == 0
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (served(mid) >= bits) lo = mid;
    else hi = mid;
    if (std::abs(served(lo) - bits) < 1e-12) break;
  }

  // Refine in closed form on the active set found by bisection.
  double level = lo;
  {
    double sum_active = 0.0;
    int active = 0;
    for (double lg : log_gain)
      if (lg > level) {
        sum_active += lg;
        ++active;
      }
    if (active > 0) {
      const double exact = (sum_active - bits) / active;
      bool consistent = true;
      for (double lg : log_gain)
        if ((lg > exact) != (lg > level)) consistent = false;
      if (consistent) level = exact;
    }
  }

  IwfResult result;
  result.water_level = std::exp2(level);
  result.bits.resize(gains.size());
  result.utilized.resize(gains.size());
  double total = 0.0;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    result.bits[i] = std::max(0.0, log_gain[i] - level);
    result.utilized[i] = result.bits[i] > 0.0;
    total += result.bits[i];
    if (result.bits[i] > result.bits[largest]) largest = i;
  }
  if (bits == 0.0) {
    result.water_level = gains[static_cast<std::size_t>(max_it - log_gain.begin())];
    std::fill(result.bits.begin(), result.bits.end(), 0.0);
    std::fill(result.utilized.begin(), result.utilized.end(), false);
  } else {
    // Absorb the rounding residual so the allocation sums to `bits` exactly.
    result.bits[largest] = std::max(0.0, result.bits[largest] + (bits - total));
  }
  for (std::size_t i = 0; i < gains.size(); ++i) result.energy += energy_cost(result.bits[i], gains[i]);
  return result;
}

}  // namespace eesched
