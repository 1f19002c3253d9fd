#pragma once

// Finite-horizon sensing-policy computation on a belief grid.
//
// The composite per-slot action is factorized: the sensor operating point is
// fixed by the collision bound, access follows the sensor report, and beta is
// picked from the belief by a beta rule. Backward induction minimizes over the
// remaining choice, which channel to sense (plus "don't sense" for a single
// channel). Beliefs of independent channels are kept factorized; the value
// table lives on the product of per-channel grids and successor beliefs are
// snapped to the nearest grid point.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "crqos/belief.hpp"
#include "crqos/belief_grid.hpp"
#include "crqos/errors.hpp"
#include "crqos/markov_channel.hpp"
#include "crqos/parallel.hpp"
#include "crqos/rd_model.hpp"
#include "crqos/sensing.hpp"

namespace crqos {

inline constexpr double kDefaultPenalty = 500.0;

/// Everything the planner needs to know about the system.
struct PomdpProblem {
  std::vector<ChannelModel> channels;
  std::vector<ObservationKernel> kernels;  ///< one per channel
  RdParams rd;
  BetaGrid beta_grid;
  double penalty = kDefaultPenalty;  ///< cost of a slot without a successful transmission

  int channel_count() const { return static_cast<int>(channels.size()); }

  void validate() const {
    if (channels.empty()) throw ConfigError(ConfigError::Kind::Validation, "channels", "need at least one channel");
    if (kernels.size() != channels.size())
      throw ConfigError(ConfigError::Kind::Validation, "channels", "need one observation kernel per channel");
    for (std::size_t c = 0; c < channels.size(); ++c)
      if (kernels[c].states() != channels[c].states())
        throw ConfigError(ConfigError::Kind::Validation, "channels", "kernel size does not match channel");
    if (!(penalty >= 0.0) || !std::isfinite(penalty))
      throw ConfigError(ConfigError::Kind::Validation, "penalty", "penalty must be finite and >= 0");
  }
};

/// Sensing decision. channel < 0 means "don't sense" (single-channel only).
struct SenseAction {
  int channel = 0;
  bool senses() const { return channel >= 0; }
  friend bool operator==(SenseAction, SenseAction) = default;
};

inline constexpr SenseAction kNoSense{-1};

/// Per-channel table of the loss-optimal beta of every available state.
class BetaTable {
 public:
  BetaTable() = default;
  explicit BetaTable(const PomdpProblem& problem) {
    per_channel_.reserve(problem.channels.size());
    for (const auto& ch : problem.channels) {
      std::vector<double> betas;
      for (double p : ch.loss()) betas.push_back(optimal_beta(problem.rd, p, problem.beta_grid).beta);
      per_channel_.push_back(std::move(betas));
    }
  }
  double beta(int channel, StateIndex available_state) const {
    return per_channel_[static_cast<std::size_t>(channel)][static_cast<std::size_t>(available_state.value)];
  }

 private:
  std::vector<std::vector<double>> per_channel_;
};

/// Default beta rule: the optimal beta of the most likely available state of
/// the predicted belief.
class BeliefMapBetaRule {
 public:
  explicit BeliefMapBetaRule(const PomdpProblem& problem) : table_(problem) {}
  double operator()(int channel, const Vector& predicted) const {
    return table_.beta(channel, map_available_state(predicted).state);
  }

 private:
  BetaTable table_;
};

/// Expected cost of sensing `channel` this slot from pre-transition belief pi:
/// distortion when the channel turns out available and the sensor reports idle,
/// the penalty on a false alarm, a busy channel, or a collision.
template <typename BetaRule>
double expected_immediate_cost(const Vector& pi, int channel, const PomdpProblem& problem, const BetaRule& beta_rule) {
  const ChannelModel& model = problem.channels[static_cast<std::size_t>(channel)];
  const SensorDesign& sensor = problem.kernels[static_cast<std::size_t>(channel)].sensor();
  const Vector pred = predict(pi, model.transition());
  const double beta = beta_rule(channel, pred);
  const int busy = model.states() - 1;
  double cost = 0.0;
  for (int x = 0; x < busy; ++x) {
    const double d = total_distortion(problem.rd, model.loss()[static_cast<std::size_t>(x)], beta).value();
    cost += pred(x) * ((1.0 - sensor.epsilon) * d + sensor.epsilon * problem.penalty);
  }
  cost += pred(busy) * problem.penalty;
  return cost;
}

inline double expected_immediate_cost(const Vector& pi, int channel, const PomdpProblem& problem) {
  return expected_immediate_cost(pi, channel, problem, BeliefMapBetaRule(problem));
}

struct SolveOptions {
  std::size_t max_joint_points = 5'000'000;
  unsigned threads = default_thread_count();
};

/// J_k and the minimizing action for every stage k = 1..K and joint grid point.
struct PomdpSolution {
  int horizon = 0;
  int resolution = 0;
  std::vector<int> channel_states;            ///< S of each channel
  std::vector<std::vector<double>> values;    ///< [stage-1][joint index]
  std::vector<std::vector<std::int8_t>> actions;  ///< [stage-1][joint index], -1 = no sense

  int channel_count() const { return static_cast<int>(channel_states.size()); }
};

/// Product of per-channel simplex grids with mixed-radix indexing
/// (channel 0 most significant).
class JointGrid {
 public:
  JointGrid(const std::vector<int>& channel_states, int resolution) {
    for (int s : channel_states) grids_.emplace_back(s, resolution);
    strides_.assign(grids_.size(), 1);
    for (int c = static_cast<int>(grids_.size()) - 2; c >= 0; --c)
      strides_[static_cast<std::size_t>(c)] = strides_[static_cast<std::size_t>(c) + 1] * grids_[static_cast<std::size_t>(c) + 1].size();
    size_ = 1;
    for (const auto& g : grids_) size_ *= g.size();
  }

  static std::size_t count(const std::vector<int>& channel_states, int resolution) {
    std::size_t n = 1;
    for (int s : channel_states) n *= static_cast<std::size_t>(composition_count(resolution, s));
    return n;
  }

  std::size_t size() const { return size_; }
  int channels() const { return static_cast<int>(grids_.size()); }
  const BeliefGrid& grid(int c) const { return grids_[static_cast<std::size_t>(c)]; }
  std::size_t stride(int c) const { return strides_[static_cast<std::size_t>(c)]; }
  std::size_t component(std::size_t joint, int c) const {
    return (joint / strides_[static_cast<std::size_t>(c)]) % grids_[static_cast<std::size_t>(c)].size();
  }

  std::size_t nearest(const std::vector<Vector>& beliefs) const {
    std::size_t j = 0;
    for (int c = 0; c < channels(); ++c) j += grid(c).nearest(beliefs[static_cast<std::size_t>(c)]) * stride(c);
    return j;
  }

 private:
  std::vector<BeliefGrid> grids_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

namespace detail {

/// Stage-independent one-step quantities for every grid point of one channel.
struct ChannelTables {
  std::vector<double> immediate;         ///< expected cost of sensing this channel
  std::vector<std::size_t> predicted;    ///< nearest grid point of pi^T A
  std::vector<double> obs_prob;          ///< [g * S + y]
  std::vector<std::size_t> posterior;    ///< [g * S + y]
};

template <typename BetaRule>
ChannelTables build_channel_tables(const PomdpProblem& problem, int c, const BeliefGrid& grid,
                                   const BetaRule& beta_rule, unsigned threads) {
  const ChannelModel& model = problem.channels[static_cast<std::size_t>(c)];
  const ObservationKernel& kernel = problem.kernels[static_cast<std::size_t>(c)];
  const int s = model.states();
  const std::size_t n = grid.size();
  ChannelTables t;
  t.immediate.resize(n);
  t.predicted.resize(n);
  t.obs_prob.assign(n * static_cast<std::size_t>(s), 0.0);
  t.posterior.assign(n * static_cast<std::size_t>(s), 0);
  parallel_for(
      n,
      [&](std::size_t g) {
        const Vector pi = grid.point(g);
        const Vector pred = predict(pi, model.transition());
        t.immediate[g] = expected_immediate_cost(pi, c, problem, beta_rule);
        t.predicted[g] = grid.nearest(pred);
        for (int y = 0; y < s; ++y) {
          const std::size_t at = g * static_cast<std::size_t>(s) + static_cast<std::size_t>(y);
          const double p = pred.dot(kernel.matrix().col(y));
          t.obs_prob[at] = p;
          if (p > 0.0) t.posterior[at] = grid.nearest(correct(pred, kernel, Observation{y}));
        }
      },
      threads);
  return t;
}

}  // namespace detail

/// One-step lookahead on a joint grid: Q(a, j) = immediate cost of action a at
/// joint point j plus the expected next-stage value at the snapped successor.
class BackupOperator {
 public:
  template <typename BetaRule>
  BackupOperator(const PomdpProblem& problem, const JointGrid& joint, const BetaRule& beta_rule,
                 unsigned threads = default_thread_count())
      : joint_(joint), penalty_(problem.penalty) {
    for (int c = 0; c < joint.channels(); ++c) {
      states_.push_back(problem.channels[static_cast<std::size_t>(c)].states());
      tables_.push_back(detail::build_channel_tables(problem, c, joint.grid(c), beta_rule, threads));
    }
    for (int c = 0; c < joint.channels(); ++c) actions_.push_back({c});
    if (joint.channels() == 1) actions_.push_back(kNoSense);
  }

  /// Action order used for tie-breaking: sense channel 0, 1, ..., then no-sense.
  const std::vector<SenseAction>& actions() const { return actions_; }
  const JointGrid& joint() const { return joint_; }

  /// `next` is the stage k+1 value table, or null at the last stage.
  double q(SenseAction a, std::size_t j, const std::vector<double>* next) const {
    const int n_ch = joint_.channels();
    std::size_t predicted_base = 0;
    for (int c = 0; c < n_ch; ++c)
      predicted_base += tables_[static_cast<std::size_t>(c)].predicted[joint_.component(j, c)] * joint_.stride(c);
    if (!a.senses()) return next ? penalty_ + (*next)[predicted_base] : penalty_;

    const auto& t = tables_[static_cast<std::size_t>(a.channel)];
    const std::size_t g = joint_.component(j, a.channel);
    double q = t.immediate[g];
    if (next) {
      const std::size_t s = static_cast<std::size_t>(states_[static_cast<std::size_t>(a.channel)]);
      const std::size_t stride = joint_.stride(a.channel);
      const std::size_t base = predicted_base - t.predicted[g] * stride;
      for (std::size_t y = 0; y < s; ++y) {
        const double p = t.obs_prob[g * s + y];
        if (p > 0.0) q += p * (*next)[base + t.posterior[g * s + y] * stride];
      }
    }
    return q;
  }

 private:
  const JointGrid& joint_;
  double penalty_;
  std::vector<int> states_;
  std::vector<detail::ChannelTables> tables_;
  std::vector<SenseAction> actions_;
};

/// Backward induction over K stages. Stage K uses the immediate cost only;
/// earlier stages add the expected cost-to-go at the snapped successor belief.
/// Ties between actions go to the earliest action in BackupOperator::actions().
template <typename BetaRule>
PomdpSolution solve_finite_horizon(const PomdpProblem& problem, int horizon, int resolution, const BetaRule& beta_rule,
                                   const SolveOptions& options = {}) {
  problem.validate();
  if (horizon < 1) throw ConfigError(ConfigError::Kind::Validation, "horizon", "horizon must be >= 1");
  if (resolution < 1) throw ConfigError(ConfigError::Kind::Validation, "grid_resolution", "grid resolution must be >= 1");

  PomdpSolution sol;
  sol.horizon = horizon;
  sol.resolution = resolution;
  for (const auto& ch : problem.channels) sol.channel_states.push_back(ch.states());

  const std::size_t points = JointGrid::count(sol.channel_states, resolution);
  if (points > options.max_joint_points)
    throw ConfigError(ConfigError::Kind::Validation, "max_joint_grid_points",
                      "joint belief grid has " + std::to_string(points) + " points, above the cap of " +
                          std::to_string(options.max_joint_points));
  const JointGrid joint(sol.channel_states, resolution);
  const BackupOperator backup(problem, joint, beta_rule, options.threads);

  sol.values.assign(static_cast<std::size_t>(horizon), std::vector<double>(points));
  sol.actions.assign(static_cast<std::size_t>(horizon), std::vector<std::int8_t>(points));

  for (int k = horizon; k >= 1; --k) {
    std::vector<double>& value = sol.values[static_cast<std::size_t>(k - 1)];
    std::vector<std::int8_t>& policy = sol.actions[static_cast<std::size_t>(k - 1)];
    const std::vector<double>* next = (k < horizon) ? &sol.values[static_cast<std::size_t>(k)] : nullptr;
    parallel_for(
        points,
        [&](std::size_t j) {
          double best = std::numeric_limits<double>::infinity();
          SenseAction best_action = backup.actions().front();
          for (const SenseAction a : backup.actions()) {
            const double q = backup.q(a, j, next);
            if (q < best) {
              best = q;
              best_action = a;
            }
          }
          value[j] = best;
          policy[j] = static_cast<std::int8_t>(best_action.channel);
        },
        options.threads);
  }
  return sol;
}

inline PomdpSolution solve_finite_horizon(const PomdpProblem& problem, int horizon, int resolution,
                                          const SolveOptions& options = {}) {
  return solve_finite_horizon(problem, horizon, resolution, BeliefMapBetaRule(problem), options);
}

struct PolicyLookup {
  SenseAction action;
  bool clamped = false;  ///< stage was past the horizon and was clamped to K
};

/// Stored action at the nearest joint grid point. `stage` is 1-based.
inline PolicyLookup policy_action(const PomdpSolution& sol, const JointGrid& joint, int stage,
                                  const std::vector<Vector>& beliefs) {
  if (stage < 1) throw DomainError("policy stage must be >= 1");
  if (static_cast<int>(beliefs.size()) != sol.channel_count()) throw DomainError("one belief per channel required");
  PolicyLookup out;
  if (stage > sol.horizon) {
    stage = sol.horizon;
    out.clamped = true;
  }
  const std::size_t j = joint.nearest(beliefs);
  out.action = {sol.actions[static_cast<std::size_t>(stage - 1)][j]};
  return out;
}

inline PolicyLookup policy_action(const PomdpSolution& sol, int stage, const std::vector<Vector>& beliefs) {
  return policy_action(sol, JointGrid(sol.channel_states, sol.resolution), stage, beliefs);
}

}  // namespace crqos
