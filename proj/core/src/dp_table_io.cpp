#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "eesched/dp_solver.hpp"

namespace eesched {
namespace {

constexpr std::string_view kMagic = "# eesched-dp-table v1";

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double to_double(std::string_view text, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error("dp table: bad number '" + std::string(text) + "' in " + context);
  return v;
}

}  // namespace

// Layout:
//   # eesched-dp-table v1
//   # horizon=T
//   # grid=0:max_bits:points
//   # channel=<canonical channel spec>
//   # nu1=..., # quadrature_nodes=..., # inner_tol=...
//   then one CSV row per t = 1..T: t,J_t(beta_0),...,J_t(beta_{n-1})
void write_table(std::ostream& out, const CostToGoTable& table) {
  out << kMagic << '\n';
  out << "# horizon=" << table.horizon() << '\n';
  out << "# grid=0:" << shortest(table.max_bits()) << ':' << table.grid_points() << '\n';
  out << "# channel=" << table.channel_spec() << '\n';
  out << "# nu1=" << shortest(table.nu1()) << '\n';
  out << "# quadrature_nodes=" << table.quadrature_nodes() << '\n';
  out << "# inner_tol=" << shortest(table.inner_tol()) << '\n';
  for (int t = 1; t <= table.horizon(); ++t) {
    out << t;
    for (double v : table.layer(t)) out << ',' << shortest(v);
    out << '\n';
  }
}

CostToGoTable read_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw std::runtime_error("dp table: missing header '" + std::string(kMagic) + "'");

  std::map<std::string, std::string> header;
  std::vector<std::vector<double>> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.starts_with("# ")) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      header[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    std::vector<double> row;
    std::string_view rest(line);
    const auto comma = rest.find(',');
    const int t = static_cast<int>(to_double(rest.substr(0, comma), "row index"));
    if (t != static_cast<int>(values.size()) + 1)
      throw std::runtime_error("dp table: rows out of order at t=" + std::to_string(t));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    while (!rest.empty()) {
      const auto c = rest.find(',');
      row.push_back(to_double(rest.substr(0, c), "row t=" + std::to_string(t)));
      rest = c == std::string_view::npos ? std::string_view{} : rest.substr(c + 1);
    }
    values.push_back(std::move(row));
  }

  for (const char* key : {"horizon", "grid", "channel", "nu1", "quadrature_nodes", "inner_tol"})
    if (!header.count(key)) throw std::runtime_error(std::string("dp table: missing header ") + key);

  const std::string& grid = header["grid"];
  const auto first = grid.find(':');
  const auto second = grid.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw std::runtime_error("dp table: malformed grid '" + grid + "'");
  const double max_bits = to_double(std::string_view(grid).substr(first + 1, second - first - 1), "grid");
  const auto points = static_cast<std::size_t>(to_double(std::string_view(grid).substr(second + 1), "grid"));
  const int horizon = static_cast<int>(to_double(header["horizon"], "horizon"));
  if (static_cast<int>(values.size()) != horizon)
    throw std::runtime_error("dp table: expected " + std::to_string(horizon) + " rows, found " +
                             std::to_string(values.size()));
  for (const auto& row : values)
    if (row.size() != points) throw std::runtime_error("dp table: row length does not match grid");

  return CostToGoTable(header["channel"], to_double(header["nu1"], "nu1"), max_bits,
                       static_cast<std::size_t>(to_double(header["quadrature_nodes"], "quadrature_nodes")),
                       to_double(header["inner_tol"], "inner_tol"), std::move(values));
}

void save_table(const std::string& path, const CostToGoTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_table(out, table);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

CostToGoTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dp table '" + path + "'");
  return read_table(in);
}

}  // namespace eesched
