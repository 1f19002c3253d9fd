#pragma once

// Information-state (belief) tracking for one channel: HMM predict/correct.

#include <sstream>
#include <string>

#include "crqos/errors.hpp"
#include "crqos/markov_channel.hpp"
#include "crqos/sensing.hpp"

namespace crqos {

/// Probability vector over channel states, held before the slot's transition.
class InformationState {
 public:
  static constexpr double kSumTolerance = 1e-9;

  InformationState() = default;
  explicit InformationState(Vector lambda) : lambda_(std::move(lambda)) {
    if (lambda_.size() < 1) throw DomainError("belief must be nonempty");
    for (Eigen::Index i = 0; i < lambda_.size(); ++i)
      if (!(lambda_(i) >= 0.0 && lambda_(i) <= 1.0 + kSumTolerance)) throw DomainError("belief entries must lie in [0,1]");
    if (std::abs(lambda_.sum() - 1.0) > kSumTolerance) throw DomainError("belief must sum to 1");
  }

  static InformationState certain(int states, StateIndex x) {
    Vector v = Vector::Zero(states);
    v(x.value) = 1.0;
    return InformationState(std::move(v));
  }

  int size() const { return static_cast<int>(lambda_.size()); }
  double operator[](int i) const { return lambda_(i); }
  const Vector& vector() const { return lambda_; }

 private:
  Vector lambda_;
};

/// Distribution of the state after this slot's transition: pi^T A.
inline Vector predict(const Vector& pi, const TransitionMatrix& a) {
  Vector out = a.matrix().transpose() * pi;
  return out;
}

inline Vector predict(const InformationState& pi, const TransitionMatrix& a) { return predict(pi.vector(), a); }

/// Raised when an observation has zero probability under the current belief.
class ImpossibleObservation : public DomainError {
 public:
  ImpossibleObservation(Vector belief, Observation y, const std::string& what)
      : DomainError(what), belief_(std::move(belief)), y_(y) {}
  const Vector& belief() const { return belief_; }
  Observation observation() const { return y_; }

 private:
  Vector belief_;
  Observation y_;
};

/// Correct an already-predicted distribution with observation y.
inline Vector correct(const Vector& predicted, const ObservationKernel& b, Observation y) {
  Vector post = predicted.cwiseProduct(b.matrix().col(y.value));
  const double z = post.sum();
  if (!(z > 0.0)) {
    std::ostringstream os;
    os << "observation " << y.value << " has zero probability under belief [" << predicted.transpose() << "]";
    throw ImpossibleObservation(predicted, y, os.str());
  }
  return post / z;
}

/// Bayes filter step: predict through A, then weight by B(y | x) and normalize.
inline InformationState update(const InformationState& pi, const TransitionMatrix& a, const ObservationKernel& b,
                               Observation y) {
  const Vector predicted = predict(pi, a);
  try {
    return InformationState(correct(predicted, b, y));
  } catch (const ImpossibleObservation& e) {
    std::ostringstream os;
    os << "observation " << y.value << " impossible from belief [" << pi.vector().transpose() << "]";
    throw ImpossibleObservation(pi.vector(), y, os.str());
  }
}

struct MapState {
  StateIndex state;
  bool degenerate = false;  ///< no probability mass on any available state
};

/// Probabilities closer than this are treated as tied by map_available_state.
inline constexpr double kMapTieTolerance = 1e-12;

/// Most likely available state (busy excluded); ties to the lowest index.
inline MapState map_available_state(const Vector& predicted) {
  const int n = static_cast<int>(predicted.size());
  int best = 0;
  for (int i = 1; i < n - 1; ++i)
    if (predicted(i) > predicted(best) + kMapTieTolerance) best = i;
  return {{best}, !(predicted(best) > 0.0)};
}

}  // namespace crqos
