#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace eesched::cli {

/// Everything an invocation needs. The default channel is the truncated
/// exponential with gamma0 = 0.001.
struct ExperimentConfig {
  std::string channel = "truncexp:lambda=1,gamma0=0.001";
  double bits = 10.0;
  int horizon = 5;
  std::vector<std::string> policies{"eq", "sub1", "sub2", "dp"};
  std::uint64_t episodes = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  int moments = 8;
  // DP grid. bmax = 0 means "use the packet size".
  double bmax = 0.0;
  std::size_t grid_points = 1025;
  std::size_t quadrature_nodes = 256;
  std::string dp_table;
  // gap-curve packet sizes: `points` log-spaced values in [bmin, bmax].
  double bmin = 0.01;
  std::size_t points = 60;
  bool common_random_numbers = true;
  bool check = false;
  std::string out;
};

nlohmann::json to_json(const ExperimentConfig& config);

/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// Sorted-key compact JSON; from_json(parse(canonical(c))) reproduces c.
std::string canonical(const ExperimentConfig& config);

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {});

/// Rejects values no command can use (unknown policy names, T < 1, ...).
void validate(const ExperimentConfig& config);

/// Relative paths are placed under $EESCHED_OUTPUT_DIR when it is set.
std::filesystem::path resolve_output_path(const std::string& path);

}  // namespace eesched::cli
