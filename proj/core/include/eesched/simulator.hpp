#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eesched/channel.hpp"
#include "eesched/policy.hpp"

namespace eesched {

/// Mergeable mean/variance accumulator (Welford, Chan et al. merge), kept
/// in extended precision.
class RunningStats {
 public:
  void add(long double x) noexcept;
  void merge(const RunningStats& other) noexcept;

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return static_cast<double>(mean_); }
  /// Unbiased sample variance; 0 with fewer than two samples.
  double variance() const noexcept;
  /// sample std / sqrt(N).
  double std_error() const noexcept;

 private:
  std::uint64_t count_ = 0;
  long double mean_ = 0.0L;
  long double m2_ = 0.0L;
};

/// One policy run over one channel realization, in schedule order
/// (index 0 is slot t = T, the last index is the deadline slot t = 1).
struct EpisodeRecord {
  std::vector<double> gains;
  std::vector<double> bits;
  std::vector<double> energies;
  double total_energy = 0.0;
};

/// Runs a causal policy (or iwf) over `gains` for a packet of `bits`.
EpisodeRecord run_episode(const Policy& policy, std::span<const double> gains, double bits);

struct AggregateStats {
  std::string policy;
  bool causal = true;
  double bits = 0.0;
  int horizon = 0;
  std::uint64_t episodes = 0;
  std::uint64_t seed = 0;
  double mean_energy = 0.0;
  double std_error = 0.0;
  /// E[b] per slot in schedule order (entry k is slot t = horizon - k).
  std::vector<double> mean_bits_per_slot;

  double mean_energy_db() const;
};

/// Mean and standard error of E_a - E_b over paired episodes.
struct PairedDifference {
  double mean = 0.0;
  double std_error = 0.0;
};

struct SimulationConfig {
  double bits = 1.0;
  int horizon = 1;
  std::uint64_t episodes = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Every policy sees the same gain vector per episode. When false each
  /// policy draws its own independent realization.
  bool common_random_numbers = true;
  /// Verify per-episode feasibility and iwf dominance; failures are counted.
  bool check_constraints = false;
};

struct SimulationResult {
  std::vector<AggregateStats> stats;
  std::uint64_t violations = 0;
  std::vector<std::string> violation_samples;

  /// Paired statistics of E[policy a] - E[policy b] (indices into `stats`).
  PairedDifference difference(std::size_t a, std::size_t b) const;

  std::vector<RunningStats> paired;  // row-major [a * n + b]
};

/// Monte Carlo over `config.episodes` realizations. Episodes are processed
/// in fixed blocks with per-block seeds, so results are bitwise identical for
/// any worker count.
SimulationResult run(std::span<const Policy> policies, const ChannelModel& channel,
                     const SimulationConfig& config);

/// E[b_t] per slot (schedule order) for a single policy.
std::vector<double> profile(const Policy& policy, const ChannelModel& channel,
                            const SimulationConfig& config);

}  // namespace eesched
