#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eesched/errors.hpp"
#include "eesched/rng.hpp"

namespace eesched {

/// Exponential(rate) conditioned on g >= floor.
struct TruncatedExponential {
  double rate = 1.0;
  double floor = 1e-3;
};

/// Gamma(shape, scale); shape N models 1xN Rayleigh diversity combining.
struct GammaDiversity {
  double shape = 2.0;
  double scale = 1.0;
};

/// Point mass. Violates the non-degeneracy assumption; test use only.
struct DegenerateTest {
  double value = 1.0;
};

/// Fading distribution of the per-slot channel gain g (power units).
///
/// Immutable once constructed. Parameters are validated in the constructor;
/// whether E[1/g] is finite is left to `expect`, which reports divergence as
/// NonIntegrable.
class ChannelModel {
 public:
  using Params = std::variant<TruncatedExponential, GammaDiversity, DegenerateTest>;

  /// Upper tail mass discarded by quadrature.
  static constexpr double kTailMass = 1e-12;

  explicit ChannelModel(Params params);

  static ChannelModel truncated_exponential(double rate, double floor);
  static ChannelModel gamma_diversity(double shape, double scale = 1.0);
  static ChannelModel degenerate(double value);

  /// Parses `truncexp:lambda=1,gamma0=0.001`, `gamma:k=2,theta=1` or `degenerate:g0=2`.
  static ChannelModel parse(std::string_view spec);

  /// Canonical spec string; `parse(m.spec())` reproduces `m` exactly.
  std::string spec() const;

  const Params& params() const noexcept { return params_; }
  bool is_degenerate() const noexcept;

  double pdf(double g) const;
  double cdf(double g) const;
  double quantile(double u) const;

  double support_min() const;
  /// The 1 - kTailMass quantile; quadrature never looks beyond it.
  double support_max() const;

  /// The distribution of c*g.
  ChannelModel scaled(double c) const;

  double sample(Rng& rng) const;

  friend bool operator==(const ChannelModel& a, const ChannelModel& b) { return a.spec() == b.spec(); }

 private:
  Params params_;
};

/// E[f(g)] by adaptive quadrature against the channel density (relative
/// tolerance 1e-10, upper tail truncated at ChannelModel::kTailMass).
/// `breakpoints` are interior points where f has kinks; they become panel
/// edges. Throws NonIntegrable when the quadrature fails to converge.
double expect(const ChannelModel& model, const std::function<double(double)>& f,
              std::span<const double> breakpoints = {});

/// Fractional moments of the inverse gain, nu_m = (E[(1/g)^(1/m)])^m.
class MomentTable {
 public:
  MomentTable(std::vector<double> nu, double nu_inf);

  /// Number of computed moments M.
  std::size_t size() const noexcept { return nu_.size(); }

  /// nu_m for 1 <= m <= size().
  double nu(std::size_t m) const;
  double nu_inf() const noexcept { return nu_inf_; }

  /// Geometric mean G(nu_m, ..., nu_1), 1 <= m <= size().
  double gmean(std::size_t m) const;

  std::span<const double> nu_values() const noexcept { return nu_; }

 private:
  std::vector<double> nu_;
  std::vector<double> gmean_;
  double nu_inf_;
};

MomentTable moments(const ChannelModel& model, std::size_t count);

}  // namespace eesched
