#pragma once

// S-state Markov channel: states 0..S-2 are available with quantized fading
// gains gamma_0 < ... < gamma_{S-2}; state S-1 means the primary user occupies
// the channel.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "crqos/errors.hpp"
#include "crqos/rng.hpp"

namespace crqos {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Channel state, 0-based. The busy state of an S-state chain is S-1.
struct StateIndex {
  int value = 0;
  friend bool operator==(StateIndex, StateIndex) = default;
};

/// Row-stochastic S x S matrix.
class TransitionMatrix {
 public:
  static constexpr double kRowTolerance = 1e-12;

  TransitionMatrix() = default;
  explicit TransitionMatrix(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) throw ConfigError("transition matrix must be square and nonempty");
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < m_.cols(); ++j) {
        if (!(m_(i, j) >= 0.0) || !std::isfinite(m_(i, j)))
          throw ConfigError("transition matrix entries must be finite and >= 0");
        sum += m_(i, j);
      }
      if (std::abs(sum - 1.0) > kRowTolerance)
        throw ConfigError("transition matrix row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }

  int size() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// Available rows: stay with p_stay, go busy with p_avail_to_busy, the rest split
/// uniformly over the other available states. Busy row: stay with p_busy_stay,
/// the rest split uniformly over the available states.
inline TransitionMatrix build_transition(int states, double p_stay, double p_avail_to_busy, double p_busy_stay) {
  auto prob = [](double v, const char* key) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(ConfigError::Kind::Validation, key, std::string(key) + " must lie in [0,1]");
  };
  if (states < 2) throw ConfigError(ConfigError::Kind::Validation, "states", "a channel needs at least 2 states");
  prob(p_stay, "p_stay");
  prob(p_avail_to_busy, "p_avail_to_busy");
  prob(p_busy_stay, "p_busy_stay");
  const double leftover = 1.0 - p_stay - p_avail_to_busy;
  if (leftover < -1e-12)
    throw ConfigError(ConfigError::Kind::Validation, "p_stay", "p_stay + p_avail_to_busy exceeds 1");
  if (states == 2 && std::abs(leftover) > 1e-12)
    throw ConfigError(ConfigError::Kind::Validation, "p_stay",
                      "with 2 states p_stay + p_avail_to_busy must equal 1");

  const int busy = states - 1;
  Matrix a = Matrix::Zero(states, states);
  for (int i = 0; i < busy; ++i) {
    for (int j = 0; j < busy; ++j)
      a(i, j) = (i == j) ? p_stay : std::max(leftover, 0.0) / static_cast<double>(states - 2);
    a(i, busy) = p_avail_to_busy;
  }
  for (int j = 0; j < busy; ++j) a(busy, j) = (1.0 - p_busy_stay) / static_cast<double>(busy);
  a(busy, busy) = p_busy_stay;
  return TransitionMatrix(std::move(a));
}

namespace detail {
inline std::vector<bool> reachable_from(const TransitionMatrix& a, int start, bool reverse) {
  const int n = a.size();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      const double w = reverse ? a(j, i) : a(i, j);
      if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}
}  // namespace detail

/// Solves pi A = pi, sum(pi) = 1 for an irreducible chain.
inline Vector stationary_distribution(const TransitionMatrix& a) {
  const int n = a.size();
  const auto fwd = detail::reachable_from(a, 0, false);
  const auto bwd = detail::reachable_from(a, 0, true);
  std::vector<int> bad;
  for (int i = 0; i < n; ++i)
    if (!fwd[static_cast<std::size_t>(i)] || !bwd[static_cast<std::size_t>(i)]) bad.push_back(i);
  if (!bad.empty()) {
    std::ostringstream os;
    os << "transition matrix is reducible; states not mutually reachable with state 0:";
    for (int i : bad) os << ' ' << i;
    throw NumericalError(os.str());
  }

  // (A^T - I) pi = 0 with the last equation replaced by the normalization.
  Matrix lhs = a.matrix().transpose() - Matrix::Identity(n, n);
  lhs.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Vector pi = lhs.fullPivLu().solve(rhs);
  for (int i = 0; i < n; ++i) pi(i) = std::max(pi(i), 0.0);
  pi /= pi.sum();

  const double residual = (a.matrix().transpose() * pi - pi).cwiseAbs().maxCoeff();
  if (!(residual < 1e-10)) throw NumericalError("stationary distribution residual too large: " + std::to_string(residual));
  return pi;
}

/// Inverse-CDF pick from a probability row given one uniform draw u in [0,1).
template <typename Row>
int sample_row(const Row& row, int n, double u) {
  double cum = 0.0;
  for (int j = 0; j < n; ++j) {
    cum += row(j);
    if (u < cum) return j;
  }
  // u landed in the rounding slack above the cumulative sum: last positive entry.
  for (int j = n - 1; j >= 0; --j)
    if (row(j) > 0.0) return j;
  return n - 1;
}

inline StateIndex step_with_draw(StateIndex current, const TransitionMatrix& a, double u) {
  const auto row = a.matrix().row(current.value);
  return {sample_row(row, a.size(), u)};
}

inline StateIndex step(StateIndex current, const TransitionMatrix& a, RandomStream& rng) {
  return step_with_draw(current, a, rng.uniform());
}

/// Gaussian tail Q(x) = P(Z > x).
inline double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// BPSK-over-AWGN loss generator: BER = Q(sqrt(2 gamma)), p = 1 - (1-BER)^L, capped at 0.999.
inline double loss_from_gain(double gamma, int packet_bits) {
  if (!(gamma >= 0.0)) throw DomainError("gain must be >= 0");
  if (packet_bits < 1) throw DomainError("packet length must be >= 1 bit");
  const double ber = gaussian_tail(std::sqrt(2.0 * gamma));
  const double p = -std::expm1(static_cast<double>(packet_bits) * std::log1p(-ber));
  return std::clamp(p, 0.0, 0.999);
}

/// Equally spaced gains on [0.5, 4.0], one per available state.
inline std::vector<double> default_gains(int states) {
  const int n = states - 1;
  if (n == 1) return {0.5};
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = 0.5 + 3.5 * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

/// p_i = 0.2 * 2^-i for available state i (0-based).
inline std::vector<double> default_loss(int states) {
  std::vector<double> p(static_cast<std::size_t>(states - 1));
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = 0.2 * std::ldexp(1.0, -static_cast<int>(i));
  return p;
}

/// One channel's Markov model. Immutable after construction.
class ChannelModel {
 public:
  ChannelModel(std::vector<double> gains, std::vector<double> loss, TransitionMatrix a, double bandwidth = 1.0,
               double slot = 1.0)
      : gains_(std::move(gains)), loss_(std::move(loss)), a_(std::move(a)), bandwidth_(bandwidth), slot_(slot) {
    const int s = a_.size();
    if (s < 2) throw ConfigError(ConfigError::Kind::Validation, "states", "a channel needs at least 2 states");
    if (static_cast<int>(gains_.size()) != s - 1)
      throw ConfigError(ConfigError::Kind::Validation, "gains", "need one gain per available state");
    if (static_cast<int>(loss_.size()) != s - 1)
      throw ConfigError(ConfigError::Kind::Validation, "loss", "need one loss probability per available state");
    for (std::size_t i = 0; i < gains_.size(); ++i) {
      if (!(gains_[i] > 0.0) || !std::isfinite(gains_[i]))
        throw ConfigError(ConfigError::Kind::Validation, "gains", "gains must be positive and finite");
      if (i > 0 && !(gains_[i] > gains_[i - 1]))
        throw ConfigError(ConfigError::Kind::Validation, "gains", "gains must be strictly increasing");
    }
    for (double p : loss_)
      if (!(p >= 0.0 && p < 1.0)) throw ConfigError(ConfigError::Kind::Validation, "loss", "loss entries must lie in [0,1)");
    if (!(bandwidth_ > 0.0)) throw ConfigError(ConfigError::Kind::Validation, "bandwidth", "bandwidth must be > 0");
    if (!(slot_ > 0.0)) throw ConfigError(ConfigError::Kind::Validation, "slot", "slot length must be > 0");
  }

  /// Default gains and loss table for the given chain.
  static ChannelModel with_defaults(const TransitionMatrix& a) {
    return ChannelModel(default_gains(a.size()), default_loss(a.size()), a);
  }

  int states() const { return a_.size(); }
  StateIndex busy() const { return {a_.size() - 1}; }
  bool is_busy(StateIndex x) const { return x.value == a_.size() - 1; }
  const std::vector<double>& gains() const { return gains_; }
  const std::vector<double>& loss() const { return loss_; }
  double loss_of(StateIndex x) const { return is_busy(x) ? 1.0 : loss_[static_cast<std::size_t>(x.value)]; }
  const TransitionMatrix& transition() const { return a_; }
  double bandwidth() const { return bandwidth_; }
  double slot() const { return slot_; }

 private:
  std::vector<double> gains_;
  std::vector<double> loss_;
  TransitionMatrix a_;
  double bandwidth_;
  double slot_;
};

}  // namespace crqos
