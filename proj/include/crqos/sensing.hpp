#pragma once

// Spectrum sensor, receiver gain-estimation quantization, and the end-of-slot
// observation kernel. Observations are columns 0..S-2 (acknowledged gain level)
// and column S-1 (busy seen: no acknowledgment came back).

#include <cmath>
#include <string>

#include "crqos/errors.hpp"
#include "crqos/markov_channel.hpp"
#include "crqos/rng.hpp"

namespace crqos {

/// Sensor operating point: epsilon = false alarm on an idle channel,
/// delta = miss detection of a busy channel.
struct SensorDesign {
  double epsilon = 0.6;
  double delta = 0.064;

  void validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
      throw ConfigError(ConfigError::Kind::Validation, "epsilon", "epsilon must lie in [0,1]");
    if (!(delta >= 0.0 && delta <= 1.0))
      throw ConfigError(ConfigError::Kind::Validation, "delta", "delta must lie in [0,1]");
  }
  friend bool operator==(const SensorDesign&, const SensorDesign&) = default;
};

/// ROC family delta = (1 - epsilon)^kappa.
struct RocModel {
  double kappa = 3.0;

  void validate() const {
    if (!(kappa >= 1.0) || !std::isfinite(kappa))
      throw ConfigError(ConfigError::Kind::Validation, "kappa", "kappa must be >= 1");
  }
  friend bool operator==(const RocModel&, const RocModel&) = default;
};

inline double roc_delta_for_epsilon(const RocModel& roc, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0,1]");
  return std::pow(1.0 - epsilon, roc.kappa);
}

/// Operating point meeting the collision bound with equality (delta = zeta).
inline SensorDesign operating_point_for_collision(const RocModel& roc, double zeta) {
  if (!(zeta > 0.0 && zeta <= 1.0)) throw DomainError("collision bound zeta must lie in (0,1]");
  return {1.0 - std::pow(zeta, 1.0 / roc.kappa), zeta};
}

/// Observation column index. value == S-1 means "busy seen".
struct Observation {
  int value = 0;
  bool is_busy_seen(int states) const { return value == states - 1; }
  friend bool operator==(Observation, Observation) = default;
};

inline Observation gain_level(int j) { return {j}; }
inline Observation busy_seen(int states) { return {states - 1}; }

/// Probability that the receiver quantizes a noisy estimate of gain level i to
/// level j (nearest gain), for Gaussian estimation error with std dev sigma.
inline Matrix gain_quantization_matrix(const std::vector<double>& gains, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be finite and >= 0");
  const int n = static_cast<int>(gains.size());
  if (n < 1) throw DomainError("need at least one gain level");
  for (int i = 1; i < n; ++i)
    if (!(gains[static_cast<std::size_t>(i)] > gains[static_cast<std::size_t>(i - 1)]))
      throw DomainError("gains must be strictly increasing");

  Matrix pce = Matrix::Zero(n, n);
  if (n == 1 || sigma == 0.0) {
    pce.setIdentity();
    return pce;
  }
  const double scale = 2.0 * std::sqrt(2.0) * sigma;
  auto g = [&](int k) { return gains[static_cast<std::size_t>(k)]; };
  for (int i = 0; i < n; ++i) {
    const double twice = 2.0 * g(i);
    for (int j = 0; j < n; ++j) {
      if (j == 0) {
        pce(i, j) = 0.5 * (1.0 + std::erf((g(0) + g(1) - twice) / scale));
      } else if (j == n - 1) {
        pce(i, j) = 0.5 * (1.0 - std::erf((g(n - 2) + g(n - 1) - twice) / scale));
      } else {
        pce(i, j) = 0.5 * (std::erf((g(j) + g(j + 1) - twice) / scale) - std::erf((g(j) + g(j - 1) - twice) / scale));
      }
    }
  }
  return pce;
}

/// B(y | x): rows are true states, columns observations.
class ObservationKernel {
 public:
  ObservationKernel(const ChannelModel& model, const SensorDesign& sensor, double sigma)
      : sensor_(sensor), sigma_(sigma), pce_(gain_quantization_matrix(model.gains(), sigma)) {
    sensor.validate();
    const int s = model.states();
    const int busy = s - 1;
    b_ = Matrix::Zero(s, s);
    for (int i = 0; i < busy; ++i) {
      for (int j = 0; j < busy; ++j) b_(i, j) = pce_(i, j) * (1.0 - sensor.epsilon);
      b_(i, busy) = sensor.epsilon;
    }
    b_(busy, busy) = 1.0;
  }

  int states() const { return static_cast<int>(b_.rows()); }
  double operator()(Observation y, StateIndex x) const { return b_(x.value, y.value); }
  const Matrix& matrix() const { return b_; }
  const Matrix& quantization() const { return pce_; }
  const SensorDesign& sensor() const { return sensor_; }
  double sigma() const { return sigma_; }

 private:
  SensorDesign sensor_;
  double sigma_;
  Matrix pce_;
  Matrix b_;
};

inline ObservationKernel observation_kernel(const ChannelModel& model, const SensorDesign& sensor, double sigma) {
  return ObservationKernel(model, sensor, sigma);
}

struct SensingOutcome {
  bool sensor_says_idle = false;
  bool access = false;
};

/// One uniform draw. Access happens exactly when the sensor reports idle.
inline SensingOutcome sense_and_access(bool channel_busy, const SensorDesign& sensor, RandomStream& rng) {
  const double p_idle = channel_busy ? sensor.delta : 1.0 - sensor.epsilon;
  const bool idle = rng.uniform() < p_idle;
  return {idle, idle};
}

/// Acknowledgment seen at the end of the slot. Draws from the stream only when
/// the slot was accessed on an available channel.
inline Observation sample_observation(StateIndex true_state, bool accessed, const ObservationKernel& kernel,
                                      RandomStream& rng) {
  const int s = kernel.states();
  if (!accessed || true_state.value == s - 1) return busy_seen(s);
  const auto row = kernel.quantization().row(true_state.value);
  return gain_level(sample_row(row, s - 1, rng.uniform()));
}

}  // namespace crqos
