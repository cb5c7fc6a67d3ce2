#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

#include "eesched/channel.hpp"
#include "eesched/policy.hpp"

namespace eesched::cli {

using nlohmann::json;

json to_json(const ExperimentConfig& c) {
  return json{{"channel", c.channel},
              {"B", c.bits},
              {"T", c.horizon},
              {"policies", c.policies},
              {"episodes", c.episodes},
              {"seed", c.seed},
              {"workers", c.workers},
              {"M", c.moments},
              {"bmax", c.bmax},
              {"grid_points", c.grid_points},
              {"quadrature_nodes", c.quadrature_nodes},
              {"dp_table", c.dp_table},
              {"bmin", c.bmin},
              {"points", c.points},
              {"common_random_numbers", c.common_random_numbers},
              {"check", c.check},
              {"out", c.out}};
}

ExperimentConfig from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  static const std::set<std::string> known{
      "channel", "B",    "T",        "policies", "episodes", "seed",   "workers",
      "M",       "bmax", "grid_points", "quadrature_nodes", "dp_table", "bmin", "points",
      "common_random_numbers", "check", "out"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");

  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  try {
    get("channel", c.channel);
    get("B", c.bits);
    get("T", c.horizon);
    get("policies", c.policies);
    get("episodes", c.episodes);
    get("seed", c.seed);
    get("workers", c.workers);
    get("M", c.moments);
    get("bmax", c.bmax);
    get("grid_points", c.grid_points);
    get("quadrature_nodes", c.quadrature_nodes);
    get("dp_table", c.dp_table);
    get("bmin", c.bmin);
    get("points", c.points);
    get("common_random_numbers", c.common_random_numbers);
    get("check", c.check);
    get("out", c.out);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

std::string canonical(const ExperimentConfig& config) { return to_json(config).dump(); }

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file '" + path.string() + "': " + e.what());
  }
  return from_json(j, std::move(base));
}

void validate(const ExperimentConfig& c) {
  ChannelModel::parse(c.channel);
  if (c.horizon < 1) throw std::invalid_argument("T must be >= 1");
  if (!(c.bits >= 0.0)) throw std::invalid_argument("B must be >= 0");
  if (c.moments < 1) throw std::invalid_argument("M must be >= 1");
  if (c.episodes == 0) throw std::invalid_argument("episodes must be >= 1");
  if (c.grid_points < 3) throw std::invalid_argument("grid-points must be >= 3");
  if (c.quadrature_nodes < 1) throw std::invalid_argument("nodes must be >= 1");
  if (c.bmax < 0.0) throw std::invalid_argument("bmax must be >= 0");
  if (c.policies.empty()) throw std::invalid_argument("at least one policy is required");
  for (const auto& p : c.policies) parse_policy_kind(p);
}

std::filesystem::path resolve_output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("EESCHED_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
  }
  return p;
}

}  // namespace eesched::cli
