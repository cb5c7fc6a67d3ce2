#include "eesched/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "eesched/dp_solver.hpp"

namespace eesched {

void RunningStats::add(long double x) noexcept {
  ++count_;
  const long double delta = x - mean_;
  mean_ += delta / static_cast<long double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const long double n_a = static_cast<long double>(count_);
  const long double n_b = static_cast<long double>(other.count_);
  const long double n = n_a + n_b;
  const long double delta = other.mean_ - mean_;
  mean_ += delta * n_b / n;
  m2_ += other.m2_ + delta * delta * n_a * n_b / n;
  count_ += other.count_;
}

double RunningStats::variance() const noexcept {
  return count_ < 2 ? 0.0 : static_cast<double>(m2_ / static_cast<long double>(count_ - 1));
}

double RunningStats::std_error() const noexcept {
  return count_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

double AggregateStats::mean_energy_db() const { return 10.0 * std::log10(mean_energy); }

PairedDifference SimulationResult::difference(std::size_t a, std::size_t b) const {
  const std::size_t n = stats.size();
  if (a >= n || b >= n) throw std::out_of_range("difference: policy index out of range");
  const RunningStats& s = paired[a * n + b];
  return {s.mean(), s.std_error()};
}

EpisodeRecord run_episode(const Policy& policy, std::span<const double> gains, double bits) {
  if (gains.empty()) throw std::invalid_argument("run_episode: no slots");
  EpisodeRecord record;
  record.gains.assign(gains.begin(), gains.end());
  const std::size_t horizon = gains.size();

  if (!policy.causal()) {
    IwfResult iwf = iwf_allocate(bits, gains);
    record.bits = std::move(iwf.bits);
  } else {
    record.bits.resize(horizon);
    double beta = bits;
    bool fired = false;
    for (std::size_t k = 0; k < horizon; ++k) {
      const int t = static_cast<int>(horizon - k);
      double b = t == 1 ? beta : policy.decide({t, beta}, gains[k], fired);
      b = std::clamp(b, 0.0, beta);
      if (b > 0.0) fired = true;
      record.bits[k] = b;
      beta = t == 1 ? 0.0 : beta - b;
    }
  }

  record.energies.resize(horizon);
  long double total = 0.0L;
  for (std::size_t k = 0; k < horizon; ++k) {
    record.energies[k] = energy_cost(record.bits[k], gains[k]);
    total += record.energies[k];
  }
  record.total_energy = static_cast<double>(total);
  return record;
}

namespace {

constexpr std::uint64_t kBlockSize = 1024;

struct BlockResult {
  std::vector<RunningStats> energy;
  std::vector<std::vector<long double>> bit_sums;
  std::vector<RunningStats> paired;
  std::uint64_t violations = 0;
  std::vector<std::string> samples;
};

void record_violation(BlockResult& out, std::string message) {
  ++out.violations;
  if (out.samples.size() < 5) out.samples.push_back(std::move(message));
}

void check_episode(const EpisodeRecord& rec, const Policy& policy, double bits, std::uint64_t episode,
                   BlockResult& out) {
  const std::string tag = std::string(policy.name()) + " episode " + std::to_string(episode);
  long double sum = 0.0L;
  double beta = bits;
  for (std::size_t k = 0; k < rec.bits.size(); ++k) {
    const double b = rec.bits[k];
    if (policy.causal() && (b < 0.0 || b > beta * (1.0 + 1e-12) + 1e-12))
      record_violation(out, tag + ": b outside [0, beta]");
    if (!policy.causal() && b < 0.0) record_violation(out, tag + ": negative iwf allocation");
    if (policy.causal() && k + 1 == rec.bits.size() && std::abs(b - beta) > 1e-12)
      record_violation(out, tag + ": deadline slot did not flush the queue");
    sum += b;
    beta -= b;
  }
  if (std::abs(static_cast<double>(sum) - bits) > 1e-9 * std::max(1.0, bits))
    record_violation(out, tag + ": bits do not sum to B");
}

BlockResult run_block(std::span<const Policy> policies, const ChannelModel& channel,
                      const SimulationConfig& config, std::uint64_t block) {
  const std::size_t n = policies.size();
  const auto horizon = static_cast<std::size_t>(config.horizon);
  BlockResult out;
  out.energy.resize(n);
  out.bit_sums.assign(n, std::vector<long double>(horizon, 0.0L));
  out.paired.resize(n * n);

  const std::uint64_t first = block * kBlockSize;
  const std::uint64_t last = std::min(config.episodes, first + kBlockSize);
  const std::uint64_t block_seed = derive_seed(config.seed, block);
  Rng shared(block_seed);
  std::vector<Rng> own;
  if (!config.common_random_numbers)
    for (std::size_t i = 0; i < n; ++i) own.emplace_back(derive_seed(block_seed, 1000 + i));

  std::vector<double> gains(horizon);
  std::vector<double> totals(n);
  for (std::uint64_t e = first; e < last; ++e) {
    if (config.common_random_numbers)
      for (auto& g : gains) g = channel.sample(shared);
    for (std::size_t i = 0; i < n; ++i) {
      if (!config.common_random_numbers)
        for (auto& g : gains) g = channel.sample(own[i]);
      const EpisodeRecord rec = run_episode(policies[i], gains, config.bits);
      totals[i] = rec.total_energy;
      out.energy[i].add(rec.total_energy);
      for (std::size_t k = 0; k < horizon; ++k) out.bit_sums[i][k] += rec.bits[k];
      if (config.check_constraints) check_episode(rec, policies[i], config.bits, e, out);
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b) out.paired[a * n + b].add(static_cast<long double>(totals[a]) - totals[b]);
    if (config.check_constraints && config.common_random_numbers) {
      for (std::size_t a = 0; a < n; ++a) {
        if (policies[a].causal()) continue;
        for (std::size_t b = 0; b < n; ++b)
          if (policies[b].causal() && totals[a] > totals[b] * (1.0 + 1e-12) + 1e-12)
            record_violation(out, "iwf energy exceeds " + std::string(policies[b].name()) +
                                      " in episode " + std::to_string(e));
      }
    }
  }
  return out;
}

void validate(std::span<const Policy> policies, const SimulationConfig& config) {
  if (policies.empty()) throw std::invalid_argument("simulate: no policies");
  if (config.episodes == 0) throw std::invalid_argument("simulate: episodes must be >= 1");
  if (config.horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
  if (!(config.bits >= 0.0) || !std::isfinite(config.bits))
    throw std::invalid_argument("simulate: bits must be finite and >= 0");
  for (const Policy& p : policies)
    if (p.max_horizon() < config.horizon)
      throw std::invalid_argument("policy " + std::string(p.name()) + " supports at most " +
                                  std::to_string(p.max_horizon()) + " slots, asked for " +
                                  std::to_string(config.horizon));
}

}  // namespace

SimulationResult run(std::span<const Policy> policies, const ChannelModel& channel,
                     const SimulationConfig& config) {
  validate(policies, config);
  const std::size_t n = policies.size();
  const auto horizon = static_cast<std::size_t>(config.horizon);
  const std::uint64_t blocks = (config.episodes + kBlockSize - 1) / kBlockSize;

  std::vector<BlockResult> results(blocks);
  unsigned workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : config.workers;
  if (workers <= 1 || blocks == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) results[b] = run_block(policies, channel, config, b);
  } else {
    std::mutex error_mutex;
    std::exception_ptr error;
    std::atomic<std::uint64_t> next{0};
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::uint64_t b = next++; b < blocks; b = next++) {
            try {
              results[b] = run_block(policies, channel, config, b);
            } catch (...) {
              std::lock_guard lock(error_mutex);
              if (!error) error = std::current_exception();
              return;
            }
          }
        });
      }
    }
    if (error) std::rethrow_exception(error);
  }

  // Merge in block order; the result is independent of scheduling.
  std::vector<RunningStats> energy(n);
  std::vector<std::vector<long double>> bit_sums(n, std::vector<long double>(horizon, 0.0L));
  SimulationResult result;
  result.paired.resize(n * n);
  for (const BlockResult& br : results) {
    for (std::size_t i = 0; i < n; ++i) {
      energy[i].merge(br.energy[i]);
      for (std::size_t k = 0; k < horizon; ++k) bit_sums[i][k] += br.bit_sums[i][k];
    }
    for (std::size_t j = 0; j < n * n; ++j) result.paired[j].merge(br.paired[j]);
    result.violations += br.violations;
    for (const auto& s : br.samples)
      if (result.violation_samples.size() < 10) result.violation_samples.push_back(s);
  }

  for (std::size_t i = 0; i < n; ++i) {
    AggregateStats s;
    s.policy = std::string(policies[i].name());
    s.causal = policies[i].causal();
    s.bits = config.bits;
    s.horizon = config.horizon;
    s.episodes = config.episodes;
    s.seed = config.seed;
    s.mean_energy = energy[i].mean();
    s.std_error = energy[i].std_error();
    s.mean_bits_per_slot.resize(horizon);
    for (std::size_t k = 0; k < horizon; ++k)
      s.mean_bits_per_slot[k] =
          static_cast<double>(bit_sums[i][k] / static_cast<long double>(config.episodes));
    result.stats.push_back(std::move(s));
  }
  return result;
}

std::vector<double> profile(const Policy& policy, const ChannelModel& channel,
                            const SimulationConfig& config) {
  const Policy single[] = {policy};
  return run(single, channel, config).stats.front().mean_bits_per_slot;
}

}  // namespace eesched
