#pragma once

// Rate-distortion model for intra-refreshed video over a lossy link:
// source distortion as a function of the intra refreshing rate beta, channel
// distortion as a function of packet loss p and beta, and the beta that
// minimizes their sum over a quantized beta set.

#include <cmath>
#include <string>
#include <vector>

#include "crqos/errors.hpp"
#include "crqos/extended_real.hpp"

namespace crqos {

/// Constants of the source/channel distortion model.
struct RdParams {
  double target_rate = 0.0;  ///< informational only
  double ds0 = 74.0;         ///< source distortion with all-inter coding
  double ds1 = 124.0;        ///< source distortion with all-intra coding
  double eta = 1.4;          ///< sequence constant
  double a = 0.01;           ///< energy-loss ratio of the encoder filter
  double b = 1.0;            ///< motion-randomness constant
  double efd = 100.0;        ///< mean frame difference

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(target_rate) || !finite(ds0) || !finite(ds1) || !finite(eta) || !finite(a) ||
        !finite(b) || !finite(efd))
      throw ConfigError(ConfigError::Kind::Validation, "rd", "rd: all constants must be finite");
    if (ds0 < 0.0) throw ConfigError(ConfigError::Kind::Validation, "rd.ds0", "rd.ds0 must be >= 0");
    if (ds1 < ds0) throw ConfigError(ConfigError::Kind::Validation, "rd.ds1", "rd.ds1 must be >= rd.ds0");
    if (eta <= 0.0) throw ConfigError(ConfigError::Kind::Validation, "rd.eta", "rd.eta must be > 0");
    if (a <= 0.0 || a > 1.0) throw ConfigError(ConfigError::Kind::Validation, "rd.a", "rd.a must be in (0,1]");
    if (b < 0.0 || b > 1.0) throw ConfigError(ConfigError::Kind::Validation, "rd.b", "rd.b must be in [0,1]");
    if (efd < 0.0) throw ConfigError(ConfigError::Kind::Validation, "rd.efd", "rd.efd must be >= 0");
  }

  friend bool operator==(const RdParams&, const RdParams&) = default;
};

/// Quantized set of admissible intra refreshing rates, strictly increasing in (0,1].
class BetaGrid {
 public:
  BetaGrid() : BetaGrid(uniform(0.01)) {}

  explicit BetaGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ConfigError(ConfigError::Kind::Validation, "beta_grid", "beta grid is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      if (!(v > 0.0 && v <= 1.0))
        throw ConfigError(ConfigError::Kind::Validation, "beta_grid", "beta grid values must lie in (0,1]");
      if (i > 0 && !(v > values_[i - 1]))
        throw ConfigError(ConfigError::Kind::Validation, "beta_grid", "beta grid must be strictly increasing");
    }
  }

  /// {step, 2*step, ..., 1}; step must divide 1 into an integer number of parts.
  static BetaGrid uniform(double step) {
    if (!(step > 0.0 && step <= 1.0))
      throw ConfigError(ConfigError::Kind::Validation, "beta_grid.step", "beta grid step must lie in (0,1]");
    const double parts = 1.0 / step;
    const auto n = static_cast<long>(std::llround(parts));
    if (n < 1 || std::abs(parts - static_cast<double>(n)) > 1e-9)
      throw ConfigError(ConfigError::Kind::Validation, "beta_grid.step", "beta grid step must divide 1");
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    for (long k = 1; k <= n; ++k) v.push_back(static_cast<double>(k) / static_cast<double>(n));
    return BetaGrid(std::move(v));
  }

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double front() const { return values_.front(); }
  bool contains(double beta) const {
    for (double v : values_)
      if (std::abs(v - beta) < 1e-12) return true;
    return false;
  }

  friend bool operator==(const BetaGrid&, const BetaGrid&) = default;

 private:
  std::vector<double> values_;
};

struct DistortionBreakdown {
  double source = 0.0;
  ExtendedReal channel;
  ExtendedReal total;
};

struct OptimalBeta {
  double beta = 0.0;
  ExtendedReal distortion;
  bool degenerate = false;  ///< p == 1: every beta is equally (infinitely) bad
};

namespace detail {
inline void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("intra refreshing rate must lie in [0,1], got " + std::to_string(beta));
}
inline void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("packet loss must lie in [0,1], got " + std::to_string(p));
}
}  // namespace detail

inline double source_distortion(const RdParams& rd, double beta) {
  detail::check_beta(beta);
  return rd.ds0 + beta * (1.0 - rd.eta + rd.eta * beta) * (rd.ds1 - rd.ds0);
}

inline ExtendedReal channel_distortion(const RdParams& rd, double p, double beta) {
  detail::check_probability(p);
  detail::check_beta(beta);
  const double denom = 1.0 - rd.b + rd.b * beta;
  if (!(denom > 0.0))
    throw SingularityError("channel distortion is singular: 1 - b + b*beta = " + std::to_string(denom));
  if (p == 1.0) return ExtendedReal::infinity();
  return ExtendedReal((rd.a / denom) * (p / (1.0 - p)) * rd.efd);
}

inline DistortionBreakdown distortion_breakdown(const RdParams& rd, double p, double beta) {
  DistortionBreakdown out;
  out.source = source_distortion(rd, beta);
  out.channel = channel_distortion(rd, p, beta);
  out.total = ExtendedReal(out.source) + out.channel;
  return out;
}

inline ExtendedReal total_distortion(const RdParams& rd, double p, double beta) {
  return distortion_breakdown(rd, p, beta).total;
}

/// Exhaustive search over the grid; ties go to the smaller beta.
inline OptimalBeta optimal_beta(const RdParams& rd, double p, const BetaGrid& grid) {
  detail::check_probability(p);
  if (p == 1.0) return {grid.front(), ExtendedReal::infinity(), true};
  OptimalBeta best{grid.front(), ExtendedReal::infinity(), false};
  for (double beta : grid.values()) {
    const ExtendedReal d = total_distortion(rd, p, beta);
    if (d < best.distortion) {
      best.beta = beta;
      best.distortion = d;
    }
  }
  return best;
}

}  // namespace crqos
