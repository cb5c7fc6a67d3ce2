#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "eesched/channel.hpp"

namespace eesched {

MomentTable::MomentTable(std::vector<double> nu, double nu_inf)
    : nu_(std::move(nu)), nu_inf_(nu_inf) {
  if (nu_.empty()) throw std::invalid_argument("MomentTable: need at least one moment");
  gmean_.reserve(nu_.size());
  double log_sum = 0.0;
  for (std::size_t m = 0; m < nu_.size(); ++m) {
    if (!(nu_[m] > 0.0) || !std::isfinite(nu_[m]))
      throw std::invalid_argument("MomentTable: moments must be positive and finite");
    log_sum += std::log(nu_[m]);
    gmean_.push_back(std::exp(log_sum / static_cast<double>(m + 1)));
  }
}

double MomentTable::nu(std::size_t m) const {
  if (m < 1 || m > nu_.size())
    throw std::out_of_range("MomentTable: nu_" + std::to_string(m) + " not computed (have " +
                            std::to_string(nu_.size()) + ")");
  return nu_[m - 1];
}

double MomentTable::gmean(std::size_t m) const {
  if (m < 1 || m > gmean_.size())
    throw std::out_of_range("MomentTable: gmean_" + std::to_string(m) + " not computed (have " +
                            std::to_string(gmean_.size()) + ")");
  return gmean_[m - 1];
}

MomentTable moments(const ChannelModel& model, std::size_t count) {
  if (count < 1) throw std::invalid_argument("moments: count must be >= 1");
  std::vector<double> nu;
  nu.reserve(count);
  for (std::size_t m = 1; m <= count; ++m) {
    const double power = 1.0 / static_cast<double>(m);
    const double mean = expect(model, [power](double g) { return std::pow(g, -power); });
    nu.push_back(std::pow(mean, static_cast<double>(m)));
  }
  const double log_mean = expect(model, [](double g) { return -std::log(g); });
  return MomentTable(std::move(nu), std::exp(log_mean));
}

}  // namespace eesched
