#include "eesched/analysis.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eesched {

double equal_bit_cost(double beta, int t, const MomentTable& moments) {
  if (t < 1) throw std::invalid_argument("equal_bit_cost: t must be >= 1");
  if (!(beta >= 0.0)) throw std::invalid_argument("equal_bit_cost: beta must be >= 0");
  const double slots = static_cast<double>(t);
  return slots * std::expm1(beta / slots * std::numbers::ln2) * moments.nu(1);
}

double optimal_T2_cost(double bits, const ChannelModel& channel, double nu1) {
  if (!(bits >= 0.0)) throw std::invalid_argument("optimal_T2_cost: bits must be >= 0");
  if (bits == 0.0) return 0.0;
  const double grow = std::exp2(bits);
  const double low = 1.0 / (grow * nu1);   // below: defer everything
  const double high = grow / nu1;          // above: send everything now
  const double half = std::exp2(0.5 * bits);
  const double full = std::expm1(bits * std::numbers::ln2);
  const std::array<double, 2> kinks{low, high};
  return expect(
      channel,
      [=](double g) {
        if (g <= low) return full * nu1;
        if (g >= high) return full / g;
        return 2.0 * half * std::sqrt(nu1 / g) - 1.0 / g - nu1;
      },
      kinks);
}

double optimal_T2_cost(double bits, const ChannelModel& channel) {
  return optimal_T2_cost(bits, channel, moments(channel, 1).nu(1));
}

double small_packet_factor(const ChannelModel& channel, double nu1) {
  const std::array<double, 1> kink{1.0 / nu1};
  return expect(channel, [nu1](double g) { return std::min(1.0 / g, nu1); }, kink);
}

double OffsetReport::small_bits_db() const { return 10.0 * std::log10(ratio_small_bits); }
double OffsetReport::large_bits_db() const { return 10.0 * std::log10(ratio_large_bits); }

OffsetReport offset_ratios(const ChannelModel& channel) {
  const MomentTable m = moments(channel, 2);
  OffsetReport report;
  report.channel = channel.spec();
  report.ratio_small_bits = m.nu(1) / small_packet_factor(channel, m.nu(1));
  report.ratio_large_bits = std::sqrt(m.nu(1) / m.nu(2));
  return report;
}

double relaxed_cost(double beta, int t, const MomentTable& moments) {
  if (t < 1) throw std::invalid_argument("relaxed_cost: t must be >= 1");
  const double slots = static_cast<double>(t);
  return slots * std::exp2(beta / slots) * moments.gmean(static_cast<std::size_t>(t)) -
         slots * moments.nu(1);
}

std::vector<GapPoint> gap_curve(const ChannelModel& channel, std::span<const double> bit_grid) {
  const MomentTable m = moments(channel, 1);
  std::vector<GapPoint> curve;
  curve.reserve(bit_grid.size());
  for (double bits : bit_grid) {
    if (!(bits > 0.0)) throw std::invalid_argument("gap_curve: packet sizes must be > 0");
    GapPoint p;
    p.bits = bits;
    p.equal_bit = equal_bit_cost(bits, 2, m);
    p.optimal = optimal_T2_cost(bits, channel, m.nu(1));
    p.gap_db = 10.0 * std::log10(p.equal_bit / p.optimal);
    curve.push_back(p);
  }
  return curve;
}

std::vector<ReferenceOffset> reference_offsets() {
  return {
      {"truncated exponential gamma0=0.1", ChannelModel::truncated_exponential(1.0, 0.1), 1.96, 0.44},
      {"truncated exponential gamma0=0.01", ChannelModel::truncated_exponential(1.0, 0.01), 3.26, 1.04},
      {"truncated exponential gamma0=0.001", ChannelModel::truncated_exponential(1.0, 0.001), 4.32, 1.68},
      {"1x2 Rayleigh", ChannelModel::gamma_diversity(2.0, 1.0), 1.99, 0.52},
      {"1x3 Rayleigh", ChannelModel::gamma_diversity(3.0, 1.0), 1.37, 0.27},
      {"1x4 Rayleigh", ChannelModel::gamma_diversity(4.0, 1.0), 1.10, 0.18},
  };
}

}  // namespace eesched
