#pragma once

#include <span>
#include <string>
#include <vector>

#include "eesched/channel.hpp"

namespace eesched {

/// Expected energy of the equal-bit policy: t (2^(beta/t) - 1) nu_1.
double equal_bit_cost(double beta, int t, const MomentTable& moments);

/// Expected energy of the optimal two-slot policy for a packet of `bits`,
/// integrating its three-branch per-realization cost over g.
double optimal_T2_cost(double bits, const ChannelModel& channel, double nu1);
double optimal_T2_cost(double bits, const ChannelModel& channel);

/// E[min(1/g, nu_1)], the effective inverse gain of the two-slot optimum
/// as the packet shrinks.
double small_packet_factor(const ChannelModel& channel, double nu1);

/// Energy ratio of equal-bit to optimal scheduling over two slots, in both
/// packet-size limits.
struct OffsetReport {
  std::string channel;
  double ratio_small_bits = 1.0;  // nu_1 / E[min(1/g, nu_1)]
  double ratio_large_bits = 1.0;  // sqrt(nu_1 / nu_2)
  double small_bits_db() const;
  double large_bits_db() const;
};

OffsetReport offset_ratios(const ChannelModel& channel);

/// Cost-to-go of the problem without per-slot bounds on b:
/// t 2^(beta/t) G(nu_t, ..., nu_1) - t nu_1. A lower bound on the true cost.
double relaxed_cost(double beta, int t, const MomentTable& moments);

struct GapPoint {
  double bits = 0.0;
  double equal_bit = 0.0;
  double optimal = 0.0;
  double gap_db = 0.0;
};

/// 10 log10(equal-bit / optimal) for T = 2 over a grid of packet sizes.
std::vector<GapPoint> gap_curve(const ChannelModel& channel, std::span<const double> bit_grid);

/// A fading model with published two-slot offsets.
struct ReferenceOffset {
  std::string label;
  ChannelModel channel;
  double small_bits_db;
  double large_bits_db;
};

/// Truncated exponential (lambda = 1; gamma0 = 0.1, 0.01, 0.001) and 1xN
/// Rayleigh diversity (Gamma shape N = 2, 3, 4) with their reference values.
std::vector<ReferenceOffset> reference_offsets();

}  // namespace eesched
