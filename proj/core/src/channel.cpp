#include "eesched/channel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace eesched {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double parse_number(std::string_view text, std::string_view spec) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw InvalidChannel("bad number '" + std::string(text) + "' in channel spec '" +
                         std::string(spec) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void validate(const ChannelModel::Params& params) {
  std::visit(overloaded{
                 [](const TruncatedExponential& p) {
                   if (!(p.rate > 0.0) || !std::isfinite(p.rate))
                     throw InvalidChannel("truncexp: lambda must be > 0");
                   if (!(p.floor > 0.0) || !std::isfinite(p.floor))
                     throw InvalidChannel("truncexp: gamma0 must be > 0");
                 },
                 [](const GammaDiversity& p) {
                   if (!(p.shape > 0.0) || !std::isfinite(p.shape))
                     throw InvalidChannel("gamma: k must be > 0");
                   if (!(p.scale > 0.0) || !std::isfinite(p.scale))
                     throw InvalidChannel("gamma: theta must be > 0");
                 },
                 [](const DegenerateTest& p) {
                   if (!(p.value > 0.0) || !std::isfinite(p.value))
                     throw InvalidChannel("degenerate: g0 must be > 0");
                 },
             },
             params);
}

}  // namespace

ChannelModel::ChannelModel(Params params) : params_(params) { validate(params_); }

ChannelModel ChannelModel::truncated_exponential(double rate, double floor) {
  return ChannelModel(TruncatedExponential{rate, floor});
}

ChannelModel ChannelModel::gamma_diversity(double shape, double scale) {
  return ChannelModel(GammaDiversity{shape, scale});
}

ChannelModel ChannelModel::degenerate(double value) { return ChannelModel(DegenerateTest{value}); }

ChannelModel ChannelModel::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = trim(spec.substr(0, colon));
  std::map<std::string, double, std::less<>> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos)
        throw InvalidChannel("expected key=value in channel spec '" + std::string(spec) + "'");
      const std::string key(trim(item.substr(0, eq)));
      if (kv.count(key)) throw InvalidChannel("duplicate key '" + key + "' in channel spec");
      kv[key] = parse_number(trim(item.substr(eq + 1)), spec);
    }
  }

  auto take = [&](std::string_view key, std::optional<double> fallback) -> double {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (!fallback)
        throw InvalidChannel("channel spec '" + std::string(spec) + "' is missing '" +
                             std::string(key) + "'");
      return *fallback;
    }
    const double v = it->second;
    kv.erase(it);
    return v;
  };

  std::optional<ChannelModel> model;
  if (kind == "truncexp") {
    const double rate = take("lambda", 1.0);
    const double floor = take("gamma0", std::nullopt);
    model.emplace(TruncatedExponential{rate, floor});
  } else if (kind == "gamma") {
    const double shape = take("k", std::nullopt);
    const double scale = take("theta", 1.0);
    model.emplace(GammaDiversity{shape, scale});
  } else if (kind == "degenerate") {
    model.emplace(DegenerateTest{take("g0", std::nullopt)});
  } else {
    throw InvalidChannel("unknown channel kind '" + std::string(kind) +
                         "' (expected truncexp, gamma or degenerate)");
  }
  if (!kv.empty())
    throw InvalidChannel("unknown key '" + kv.begin()->first + "' in channel spec '" +
                         std::string(spec) + "'");
  return *model;
}

std::string ChannelModel::spec() const {
  return std::visit(
      overloaded{
          [](const TruncatedExponential& p) {
            return "truncexp:lambda=" + format_number(p.rate) + ",gamma0=" + format_number(p.floor);
          },
          [](const GammaDiversity& p) {
            return "gamma:k=" + format_number(p.shape) + ",theta=" + format_number(p.scale);
          },
          [](const DegenerateTest& p) { return "degenerate:g0=" + format_number(p.value); },
      },
      params_);
}

bool ChannelModel::is_degenerate() const noexcept {
  return std::holds_alternative<DegenerateTest>(params_);
}

double ChannelModel::pdf(double g) const {
  return std::visit(overloaded{
                        [g](const TruncatedExponential& p) {
                          return g < p.floor ? 0.0 : p.rate * std::exp(-p.rate * (g - p.floor));
                        },
                        [g](const GammaDiversity& p) {
                          if (g <= 0.0) return 0.0;
                          return boost::math::gamma_p_derivative(p.shape, g / p.scale) / p.scale;
                        },
                        [g](const DegenerateTest& p) {
                          return g == p.value ? std::numeric_limits<double>::infinity() : 0.0;
                        },
                    },
                    params_);
}

double ChannelModel::cdf(double g) const {
  return std::visit(overloaded{
                        [g](const TruncatedExponential& p) {
                          return g < p.floor ? 0.0 : -std::expm1(-p.rate * (g - p.floor));
                        },
                        [g](const GammaDiversity& p) {
                          return g <= 0.0 ? 0.0 : boost::math::gamma_p(p.shape, g / p.scale);
                        },
                        [g](const DegenerateTest& p) { return g < p.value ? 0.0 : 1.0; },
                    },
                    params_);
}

double ChannelModel::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in [0, 1)");
  return std::visit(overloaded{
                        [u](const TruncatedExponential& p) {
                          return p.floor - std::log1p(-u) / p.rate;
                        },
                        [u](const GammaDiversity& p) {
                          if (u == 0.0) return 0.0;
                          return p.scale * (u < 0.5 ? boost::math::gamma_p_inv(p.shape, u)
                                                    : boost::math::gamma_q_inv(p.shape, 1.0 - u));
                        },
                        [](const DegenerateTest& p) { return p.value; },
                    },
                    params_);
}

double ChannelModel::support_min() const {
  return std::visit(overloaded{
                        [](const TruncatedExponential& p) { return p.floor; },
                        [](const GammaDiversity&) { return 0.0; },
                        [](const DegenerateTest& p) { return p.value; },
                    },
                    params_);
}

double ChannelModel::support_max() const {
  return std::visit(overloaded{
                        [](const TruncatedExponential& p) {
                          return p.floor - std::log(kTailMass) / p.rate;
                        },
                        [](const GammaDiversity& p) {
                          return p.scale * boost::math::gamma_q_inv(p.shape, kTailMass);
                        },
                        [](const DegenerateTest& p) { return p.value; },
                    },
                    params_);
}

ChannelModel ChannelModel::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
  return std::visit(overloaded{
                        [c](const TruncatedExponential& p) {
                          return ChannelModel(TruncatedExponential{p.rate / c, p.floor * c});
                        },
                        [c](const GammaDiversity& p) {
                          return ChannelModel(GammaDiversity{p.shape, p.scale * c});
                        },
                        [c](const DegenerateTest& p) {
                          return ChannelModel(DegenerateTest{p.value * c});
                        },
                    },
                    params_);
}

double ChannelModel::sample(Rng& rng) const {
  return std::visit(overloaded{
                        [&rng](const TruncatedExponential& p) {
                          return p.floor + std::exponential_distribution<double>(p.rate)(rng);
                        },
                        [&rng](const GammaDiversity& p) {
                          return std::gamma_distribution<double>(p.shape, p.scale)(rng);
                        },
                        [](const DegenerateTest& p) { return p.value; },
                    },
                    params_);
}

double expect(const ChannelModel& model, const std::function<double(double)>& f,
              std::span<const double> breakpoints) {
  if (const auto* point = std::get_if<DegenerateTest>(&model.params())) return f(point->value);

  constexpr double kTolerance = 1e-10;
  // Accepted error relative to the L1 norm. Convergent integrands land far
  // below this; divergent ones (e.g. 1/g against Gamma(1)) land far above.
  constexpr double kConvergence = 1e-6;

  const double lo = model.support_min();
  const double hi = model.support_max();

  // The first panel hugs the lower support edge, where 1/g-type integrands
  // are steep or singular; tanh-sinh clusters nodes there. Remaining panels
  // use adaptive Gauss-Kronrod.
  double first = std::visit(overloaded{
                                [](const TruncatedExponential& p) { return p.floor + 1.0 / p.rate; },
                                [](const GammaDiversity& p) { return p.scale; },
                                [](const DegenerateTest& p) { return p.value; },
                            },
                            model.params());
  first = std::min(first, 0.5 * (lo + hi));

  std::vector<double> edges{lo, first, hi};
  for (double b : breakpoints)
    if (b > lo && b < hi && std::isfinite(b)) edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  // Slivers between nearly coincident edges only feed roundoff to the
  // adaptive error estimate.
  const double min_width = 1e-9 * (hi - lo);
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [min_width](double a, double b) { return b - a < min_width; }),
              edges.end());
  edges.back() = hi;

  auto integrand = [&](double g) {
    const double density = model.pdf(g);
    return density == 0.0 ? 0.0 : f(g) * density;
  };

  thread_local boost::math::quadrature::tanh_sinh<double> tanh_sinh(15);
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i];
    const double b = edges[i + 1];
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    try {
      if (i == 0) {
        value = tanh_sinh.integrate(integrand, a, b, kTolerance, &error, &l1);
      } else {
        value = Kronrod::integrate(integrand, a, b, 20, kTolerance, &error, &l1);
      }
    } catch (const std::exception& e) {
      throw NonIntegrable("quadrature failed on [" + std::to_string(a) + ", " + std::to_string(b) +
                          "] for channel " + model.spec() + ": " + e.what());
    }
    if (!std::isfinite(value) || !(error <= kConvergence * l1 + 1e-300)) {
      throw NonIntegrable("quadrature did not converge on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "] for channel " + model.spec());
    }
    total += value;
  }
  return total;
}

}  // namespace eesched
