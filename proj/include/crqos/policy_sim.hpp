#pragma once

// Slot-by-slot simulation of the comparison methods, metrics and confidence
// intervals.

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crqos/belief.hpp"
#include "crqos/errors.hpp"
#include "crqos/extended_real.hpp"
#include "crqos/markov_channel.hpp"
#include "crqos/pomdp.hpp"
#include "crqos/rd_model.hpp"
#include "crqos/rng.hpp"
#include "crqos/sensing.hpp"

namespace crqos {

enum class MethodKind { Oracle, BeliefMap, LastAck, ConstantBeta, PomdpChannel, RandomChannelConstBeta, OracleChannel };

inline constexpr double kDefaultConstantBeta = 0.1;

struct MethodId {
  MethodKind kind = MethodKind::BeliefMap;
  double beta0 = kDefaultConstantBeta;  ///< used by ConstantBeta and RandomChannelConstBeta

  /// Methods that always sense channel 0 and only differ in beta.
  bool single_channel() const {
    return kind == MethodKind::Oracle || kind == MethodKind::BeliefMap || kind == MethodKind::LastAck ||
           kind == MethodKind::ConstantBeta;
  }
  bool needs_policy() const { return kind == MethodKind::PomdpChannel; }

  std::string name() const {
    switch (kind) {
      case MethodKind::Oracle: return "Oracle";
      case MethodKind::BeliefMap: return "BeliefMap";
      case MethodKind::LastAck: return "LastAck";
      case MethodKind::ConstantBeta: return "ConstantBeta";
      case MethodKind::PomdpChannel: return "PomdpChannel";
      case MethodKind::RandomChannelConstBeta: return "RandomChannelConstBeta";
      case MethodKind::OracleChannel: return "OracleChannel";
    }
    return "?";
  }

  static std::optional<MethodKind> parse_kind(const std::string& s) {
    for (MethodKind k : {MethodKind::Oracle, MethodKind::BeliefMap, MethodKind::LastAck, MethodKind::ConstantBeta,
                         MethodKind::PomdpChannel, MethodKind::RandomChannelConstBeta, MethodKind::OracleChannel})
      if (MethodId{k}.name() == s) return k;
    return std::nullopt;
  }

  friend bool operator==(const MethodId&, const MethodId&) = default;
};

/// The four-part per-slot decision: which channel to sense, sensor operating
/// point, whether to access, and the intra refresh rate.
struct CompositeAction {
  std::optional<int> sense_channel;
  SensorDesign sensor;
  bool access = false;
  double beta = 0.0;
};

struct SlotRecord {
  int slot = 0;  ///< 1-based
  std::vector<StateIndex> true_states;
  int sensed_channel = -1;  ///< -1 = nothing sensed
  bool sensor_says_idle = false;
  bool accessed = false;
  std::optional<Observation> observation;
  double beta = 0.0;
  ExtendedReal distortion = ExtendedReal::infinity();  ///< infinite on penalty slots
  double cost = 0.0;                                   ///< distortion or the penalty
  bool collided = false;
  bool sensed_available = false;
};

struct BetaChoice {
  double beta = 0.0;
  bool dont_care = false;  ///< busy state: beta has no effect
};

inline BetaChoice beta_oracle(StateIndex true_state, const ChannelModel& channel, const RdParams& rd,
                              const BetaGrid& grid) {
  if (channel.is_busy(true_state)) return {grid.front(), true};
  return {optimal_beta(rd, channel.loss_of(true_state), grid).beta, false};
}

inline double beta_belief_map(const Vector& predicted, const ChannelModel& channel, const RdParams& rd,
                              const BetaGrid& grid) {
  return optimal_beta(rd, channel.loss_of(map_available_state(predicted).state), grid).beta;
}

/// beta* of the most likely available state under the stationary distribution.
inline double stationary_fallback_beta(const ChannelModel& channel, const RdParams& rd, const BetaGrid& grid) {
  return beta_belief_map(stationary_distribution(channel.transition()), channel, rd, grid);
}

inline double beta_last_ack(const std::optional<Observation>& last, const ChannelModel& channel, const RdParams& rd,
                            const BetaGrid& grid, double fallback) {
  if (!last || last->is_busy_seen(channel.states())) return fallback;
  return optimal_beta(rd, channel.loss()[static_cast<std::size_t>(last->value)], grid).beta;
}

/// Everything an episode needs. `policy` is required for PomdpChannel and
/// must have been solved for the same horizon. `initial` overrides the
/// stationary distributions as the law of the first state and the first
/// belief; it is needed for reducible chains.
struct SimulationModel {
  PomdpProblem problem;
  int horizon = 200;
  std::shared_ptr<const PomdpSolution> policy;
  std::vector<Vector> initial;
};

/// Precomputed per-model tables; const and shareable across threads.
class EpisodeRunner {
 public:
  explicit EpisodeRunner(SimulationModel model) : model_(std::move(model)), table_(model_.problem) {
    model_.problem.validate();
    if (model_.horizon < 1) throw ConfigError(ConfigError::Kind::Validation, "horizon", "horizon must be >= 1");
    const auto& channels = model_.problem.channels;
    if (!model_.initial.empty() && model_.initial.size() != channels.size())
      throw ConfigError(ConfigError::Kind::Validation, "initial", "need one initial distribution per channel");
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const ChannelModel& ch = channels[c];
      if (model_.initial.empty()) {
        initial_.push_back(stationary_distribution(ch.transition()));
      } else {
        if (model_.initial[c].size() != ch.states())
          throw ConfigError(ConfigError::Kind::Validation, "initial", "initial distribution size mismatch");
        initial_.push_back(InformationState(model_.initial[c]).vector());
      }
      fallback_.push_back(beta_belief_map(initial_.back(), ch, model_.problem.rd, model_.problem.beta_grid));
    }
    if (model_.policy) {
      const auto& pol = *model_.policy;
      std::vector<int> states;
      for (const auto& ch : model_.problem.channels) states.push_back(ch.states());
      if (pol.channel_states != states) throw ArtifactError("policy was solved for different channel sizes");
      if (pol.horizon != model_.horizon)
        throw ArtifactError("policy horizon " + std::to_string(pol.horizon) + " does not match horizon " +
                            std::to_string(model_.horizon));
      joint_.emplace(pol.channel_states, pol.resolution);
    }
  }

  const SimulationModel& model() const { return model_; }

  void check_method(const MethodId& method) const {
    if (method.single_channel() && model_.problem.channel_count() != 1)
      throw ConfigError(ConfigError::Kind::Validation, "methods",
                        method.name() + " needs exactly one channel");
    if (method.needs_policy() && !model_.policy) throw ArtifactError("PomdpChannel needs a solved policy");
    if ((method.kind == MethodKind::ConstantBeta || method.kind == MethodKind::RandomChannelConstBeta) &&
        !model_.problem.beta_grid.contains(method.beta0))
      throw ConfigError(ConfigError::Kind::Validation, "constant_beta", "constant beta must lie on the beta grid");
  }

  /// Simulates one episode and hands every slot to `sink` in order.
  /// Per slot the stream is consumed as: channel transitions in index order,
  /// then the random channel pick (RandomChannelConstBeta only), then the
  /// sensor draw, then the ACK draw if the slot was accessed on an available
  /// channel. Initial states are drawn from the initial distributions first.
  template <typename Sink>
  void run(const MethodId& method, std::uint64_t seed, Sink&& sink) const {
    check_method(method);
    const auto& prob = model_.problem;
    const int n = prob.channel_count();
    RandomStream rng(seed);

    std::vector<StateIndex> x(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c)
      x[idx(c)] = {sample_row(initial_[idx(c)], channel(c).states(), rng.uniform())};
    std::vector<Vector> pi = initial_;
    std::vector<Vector> pred(static_cast<std::size_t>(n));
    std::optional<Observation> last_ack;

    SlotRecord rec;
    for (int k = 1; k <= model_.horizon; ++k) {
      for (int c = 0; c < n; ++c) x[idx(c)] = step(x[idx(c)], channel(c).transition(), rng);
      for (int c = 0; c < n; ++c) pred[idx(c)] = predict(pi[idx(c)], channel(c).transition());

      int sensed = 0;
      if (method.kind == MethodKind::PomdpChannel) {
        sensed = policy_action(*model_.policy, *joint_, k, pi).action.channel;
      } else if (method.kind == MethodKind::RandomChannelConstBeta) {
        sensed = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
      } else if (method.kind == MethodKind::OracleChannel) {
        sensed = best_available_channel(x);
      }

      rec.slot = k;
      rec.true_states = x;
      rec.sensed_channel = sensed;
      rec.sensor_says_idle = false;
      rec.accessed = false;
      rec.observation.reset();
      rec.collided = false;
      rec.sensed_available = false;
      rec.distortion = ExtendedReal::infinity();
      rec.cost = prob.penalty;

      if (sensed < 0) {
        rec.beta = table_.beta(0, map_available_state(pred[0]).state);
        for (int c = 0; c < n; ++c) pi[idx(c)] = pred[idx(c)];
        sink(static_cast<const SlotRecord&>(rec));
        continue;
      }

      const ChannelModel& ch = channel(sensed);
      const ObservationKernel& kernel = prob.kernels[idx(sensed)];
      const StateIndex xs = x[idx(sensed)];
      rec.beta = choose_beta(method, sensed, xs, pred[idx(sensed)], last_ack);

      const bool busy = ch.is_busy(xs);
      const SensingOutcome sa = sense_and_access(busy, kernel.sensor(), rng);
      const Observation y = sample_observation(xs, sa.access, kernel, rng);
      rec.sensor_says_idle = sa.sensor_says_idle;
      rec.accessed = sa.access;
      rec.observation = y;
      rec.sensed_available = !busy;
      rec.collided = sa.access && busy;
      if (sa.access && !busy) {
        rec.distortion = total_distortion(prob.rd, ch.loss_of(xs), rec.beta);
        rec.cost = rec.distortion.value();
      }

      for (int c = 0; c < n; ++c)
        pi[idx(c)] = (c == sensed) ? correct(pred[idx(c)], kernel, y) : pred[idx(c)];
      if (n == 1 || sensed == 0) last_ack = y;
      sink(static_cast<const SlotRecord&>(rec));
    }
  }

  std::vector<SlotRecord> run(const MethodId& method, std::uint64_t seed) const {
    std::vector<SlotRecord> out;
    out.reserve(static_cast<std::size_t>(model_.horizon));
    run(method, seed, [&](const SlotRecord& r) { out.push_back(r); });
    return out;
  }

 private:
  static std::size_t idx(int c) { return static_cast<std::size_t>(c); }
  const ChannelModel& channel(int c) const { return model_.problem.channels[idx(c)]; }

  int best_available_channel(const std::vector<StateIndex>& x) const {
    int best = -1;
    for (int c = 0; c < model_.problem.channel_count(); ++c) {
      const ChannelModel& ch = channel(c);
      if (ch.is_busy(x[idx(c)])) continue;
      if (best < 0 || ch.gains()[idx(x[idx(c)].value)] > channel(best).gains()[idx(x[idx(best)].value)]) best = c;
    }
    return best < 0 ? 0 : best;
  }

  double choose_beta(const MethodId& method, int sensed, StateIndex xs, const Vector& predicted,
                     const std::optional<Observation>& last_ack) const {
    switch (method.kind) {
      case MethodKind::Oracle:
      case MethodKind::OracleChannel:
        return channel(sensed).is_busy(xs) ? model_.problem.beta_grid.front() : table_.beta(sensed, xs);
      case MethodKind::BeliefMap:
      case MethodKind::PomdpChannel:
        return table_.beta(sensed, map_available_state(predicted).state);
      case MethodKind::LastAck:
        if (!last_ack || last_ack->is_busy_seen(channel(sensed).states())) return fallback_[idx(sensed)];
        return table_.beta(sensed, {last_ack->value});
      case MethodKind::ConstantBeta:
      case MethodKind::RandomChannelConstBeta:
        return method.beta0;
    }
    return method.beta0;
  }

  SimulationModel model_;
  BetaTable table_;
  std::vector<Vector> initial_;
  std::vector<double> fallback_;
  std::optional<JointGrid> joint_;
};

inline std::vector<SlotRecord> run_episode(const SimulationModel& model, const MethodId& method, std::uint64_t seed) {
  return EpisodeRunner(model).run(method, seed);
}

struct Metrics {
  double avg_distortion = std::numeric_limits<double>::quiet_NaN();  ///< NaN when no slot qualifies
  double spectrum_utilization = 0.0;
  double collision_rate = 0.0;
  double total_cost = 0.0;
  std::int64_t slots = 0;
  std::int64_t accessed_available = 0;  ///< slots averaged into avg_distortion
  std::int64_t sensed_available = 0;
  std::int64_t sensed_busy = 0;
  std::int64_t collisions = 0;
};

/// Streaming form of compute_metrics, for runs too long to keep in memory.
class MetricsAccumulator {
 public:
  void operator()(const SlotRecord& r) {
    ++m_.slots;
    m_.total_cost += r.cost;
    if (r.sensed_channel < 0) return;
    if (r.sensed_available) {
      ++m_.sensed_available;
      if (r.accessed) {
        ++m_.accessed_available;
        distortion_sum_ += r.distortion.value();
      }
    } else {
      ++m_.sensed_busy;
      if (r.collided) ++m_.collisions;
    }
  }

  Metrics metrics() const {
    Metrics out = m_;
    if (out.accessed_available > 0) out.avg_distortion = distortion_sum_ / static_cast<double>(out.accessed_available);
    if (out.slots > 0) out.spectrum_utilization = static_cast<double>(out.sensed_available) / static_cast<double>(out.slots);
    if (out.sensed_busy > 0) out.collision_rate = static_cast<double>(out.collisions) / static_cast<double>(out.sensed_busy);
    return out;
  }

 private:
  Metrics m_;
  double distortion_sum_ = 0.0;
};

inline Metrics compute_metrics(const std::vector<SlotRecord>& records) {
  if (records.empty()) throw DomainError("compute_metrics needs at least one record");
  MetricsAccumulator acc;
  for (const auto& r : records) acc(r);
  return acc.metrics();
}

inline Metrics run_metrics(const EpisodeRunner& runner, const MethodId& method, std::uint64_t seed) {
  MetricsAccumulator acc;
  runner.run(method, seed, [&](const SlotRecord& r) { acc(r); });
  return acc.metrics();
}

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

/// mean +- t_{0.975,n-1} s / sqrt(n).
inline ConfidenceInterval aggregate_ci(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw DomainError("confidence interval needs at least two samples");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(dist, 0.975);
  return {mean, t * sd / std::sqrt(static_cast<double>(n)), n};
}

}  // namespace crqos
