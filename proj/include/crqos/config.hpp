#pragma once

// Experiment configuration: YAML loading and serialization, validation,
// sweep application and the figure presets.

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crqos/errors.hpp"
#include "crqos/markov_channel.hpp"
#include "crqos/policy_sim.hpp"
#include "crqos/pomdp.hpp"
#include "crqos/rd_model.hpp"
#include "crqos/sensing.hpp"

namespace crqos {

struct ChannelSpec {
  int states = 5;
  double p_stay = 0.85;
  double p_avail_to_busy = 0.05;
  double p_busy_stay = 0.1;
  std::vector<double> gains;  ///< empty = default ladder
  std::vector<double> loss;   ///< empty = default table
  double bandwidth = 1.0;
  double slot = 1.0;

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

struct SensorSpec {
  double epsilon = 0.6;
  std::optional<double> zeta;  ///< when set, overrides epsilon via the ROC
  double kappa = 3.0;
  double sigma = 0.1;

  SensorDesign design() const {
    const RocModel roc{kappa};
    if (zeta) return operating_point_for_collision(roc, *zeta);
    return {epsilon, roc_delta_for_epsilon(roc, epsilon)};
  }
  friend bool operator==(const SensorSpec&, const SensorSpec&) = default;
};

struct SweepSpec {
  std::string param;
  std::vector<double> values;
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ExperimentConfig {
  std::string experiment = "default";
  int horizon = 200;
  int seeds = 50;
  int grid_resolution = 10;
  double penalty = kDefaultPenalty;
  std::int64_t max_joint_grid_points = 5'000'000;
  RdParams rd;
  double beta_step = 0.01;
  SensorSpec sensor;
  std::vector<ChannelSpec> channels{ChannelSpec{}};
  std::vector<MethodKind> methods{MethodKind::Oracle, MethodKind::BeliefMap, MethodKind::LastAck,
                                  MethodKind::ConstantBeta};
  double constant_beta = kDefaultConstantBeta;
  std::optional<SweepSpec> sweep;
  std::string output_dir = "out";

  bool needs_policy() const {
    for (MethodKind m : methods)
      if (m == MethodKind::PomdpChannel) return true;
    return false;
  }
  MethodId method_id(MethodKind k) const { return {k, constant_beta}; }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline ConfigError invalid(const std::string& key, const std::string& msg) {
  return ConfigError(ConfigError::Kind::Validation, key, key + ": " + msg);
}

inline bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

inline const std::set<std::string>& channel_sweep_keys() {
  static const std::set<std::string> keys{"states", "p_stay", "p_avail_to_busy", "p_busy_stay"};
  return keys;
}

inline const std::set<std::string>& global_sweep_keys() {
  static const std::set<std::string> keys{"sigma", "epsilon", "zeta", "kappa", "penalty"};
  return keys;
}

/// Splits "channel2.p_stay" into (1, "p_stay"); unscoped names give (-1, name).
inline std::pair<int, std::string> split_sweep_param(const std::string& param) {
  const std::string prefix = "channel";
  const auto dot = param.find('.');
  if (param.rfind(prefix, 0) == 0 && dot != std::string::npos) {
    const std::string num = param.substr(prefix.size(), dot - prefix.size());
    int c = 0;
    try {
      std::size_t used = 0;
      c = std::stoi(num, &used);
      if (used != num.size()) c = 0;
    } catch (const std::exception&) {
      c = 0;
    }
    if (c < 1) throw invalid("sweep.param", "bad channel index in '" + param + "'");
    return {c - 1, param.substr(dot + 1)};
  }
  return {-1, param};
}

}  // namespace detail

/// Checks every field; errors name the offending key.
inline void validate(const ExperimentConfig& cfg) {
  using detail::invalid;
  if (cfg.horizon < 1) throw invalid("horizon", "must be >= 1");
  if (cfg.seeds < 1) throw invalid("seeds", "must be >= 1");
  if (cfg.grid_resolution < 1) throw invalid("grid_resolution", "must be >= 1");
  if (!(cfg.penalty >= 0.0) || !std::isfinite(cfg.penalty)) throw invalid("penalty", "must be finite and >= 0");
  if (cfg.max_joint_grid_points < 1) throw invalid("max_joint_grid_points", "must be >= 1");
  cfg.rd.validate();
  const BetaGrid grid = BetaGrid::uniform(cfg.beta_step);
  if (!grid.contains(cfg.constant_beta)) throw invalid("constant_beta", "must lie on the beta grid");

  const auto& s = cfg.sensor;
  if (!(s.kappa >= 1.0) || !std::isfinite(s.kappa)) throw invalid("kappa", "must be >= 1");
  if (!(s.sigma >= 0.0) || !std::isfinite(s.sigma)) throw invalid("sigma", "must be >= 0");
  if (!detail::in_unit(s.epsilon)) throw invalid("epsilon", "must lie in [0,1]");
  if (s.zeta && !(*s.zeta > 0.0 && *s.zeta <= 1.0)) throw invalid("zeta", "must lie in (0,1]");

  if (cfg.channels.empty() || cfg.channels.size() > 2) throw invalid("channels", "need one or two channels");
  for (std::size_t c = 0; c < cfg.channels.size(); ++c) {
    const auto& ch = cfg.channels[c];
    const std::string base = "channels[" + std::to_string(c) + "].";
    if (ch.states < 2) throw invalid(base + "states", "must be >= 2");
    if (!detail::in_unit(ch.p_stay)) throw invalid(base + "p_stay", "must lie in [0,1]");
    if (!detail::in_unit(ch.p_avail_to_busy)) throw invalid(base + "p_avail_to_busy", "must lie in [0,1]");
    if (!detail::in_unit(ch.p_busy_stay)) throw invalid(base + "p_busy_stay", "must lie in [0,1]");
    if (ch.p_stay + ch.p_avail_to_busy > 1.0 + 1e-12)
      throw invalid(base + "p_stay", "p_stay + p_avail_to_busy must not exceed 1");
    if (ch.states == 2 && std::abs(ch.p_stay + ch.p_avail_to_busy - 1.0) > 1e-12)
      throw invalid(base + "p_stay", "with 2 states p_stay + p_avail_to_busy must equal 1");
    if (!ch.gains.empty() && static_cast<int>(ch.gains.size()) != ch.states - 1)
      throw invalid(base + "gains", "need states - 1 entries");
    if (!ch.loss.empty() && static_cast<int>(ch.loss.size()) != ch.states - 1)
      throw invalid(base + "loss", "need states - 1 entries");
    for (double p : ch.loss)
      if (!(p >= 0.0 && p < 1.0)) throw invalid(base + "loss", "entries must lie in [0,1)");
    for (double g : ch.gains)
      if (!(g >= 0.0) || !std::isfinite(g)) throw invalid(base + "gains", "entries must be finite and >= 0");
    if (!(ch.bandwidth > 0.0) || !(ch.slot > 0.0)) throw invalid(base + "bandwidth", "bandwidth and slot must be > 0");
  }

  if (cfg.methods.empty()) throw invalid("methods", "need at least one method");
  for (MethodKind m : cfg.methods)
    if (MethodId{m}.single_channel() && cfg.channels.size() != 1)
      throw invalid("methods", MethodId{m}.name() + " needs exactly one channel");

  if (cfg.sweep) {
    const auto& sw = *cfg.sweep;
    if (sw.values.empty()) throw invalid("sweep.values", "must not be empty");
    const auto [c, key] = detail::split_sweep_param(sw.param);
    const bool per_channel = detail::channel_sweep_keys().count(key) > 0;
    if (c >= 0 && !per_channel) throw invalid("sweep.param", "'" + key + "' is not a channel parameter");
    if (!per_channel && !detail::global_sweep_keys().count(key))
      throw invalid("sweep.param", "unknown sweep parameter '" + sw.param + "'");
    if (c >= static_cast<int>(cfg.channels.size())) throw invalid("sweep.param", "no such channel in '" + sw.param + "'");
    for (double v : sw.values) {
      if (!std::isfinite(v)) throw invalid(key, "sweep value must be finite");
      if (key == "states" && (v != std::floor(v) || v < 2)) throw invalid(key, "sweep value must be an integer >= 2");
    }
  }
}

/// Copy of `cfg` with the sweep parameter set to `value` (sweep removed).
inline ExperimentConfig apply_sweep(const ExperimentConfig& cfg, double value) {
  if (!cfg.sweep) return cfg;
  ExperimentConfig out = cfg;
  out.sweep.reset();
  const auto [c, key] = detail::split_sweep_param(cfg.sweep->param);
  auto set_channel = [&](ChannelSpec& ch) {
    if (key == "states") ch.states = static_cast<int>(value);
    else if (key == "p_stay") ch.p_stay = value;
    else if (key == "p_avail_to_busy") ch.p_avail_to_busy = value;
    else if (key == "p_busy_stay") ch.p_busy_stay = value;
  };
  if (detail::channel_sweep_keys().count(key)) {
    if (c >= 0) set_channel(out.channels.at(static_cast<std::size_t>(c)));
    else for (auto& ch : out.channels) set_channel(ch);
  } else if (key == "sigma") {
    out.sensor.sigma = value;
  } else if (key == "epsilon") {
    out.sensor.epsilon = value;
    out.sensor.zeta.reset();
  } else if (key == "zeta") {
    out.sensor.zeta = value;
  } else if (key == "kappa") {
    out.sensor.kappa = value;
  } else if (key == "penalty") {
    out.penalty = value;
  }
  return out;
}

/// Validates the base config and every sweep point. Errors raised at a sweep
/// point are reported under the swept key.
inline void validate_all(const ExperimentConfig& cfg) {
  validate(cfg);
  if (!cfg.sweep) return;
  const std::string key = detail::split_sweep_param(cfg.sweep->param).second;
  for (double v : cfg.sweep->values) {
    try {
      validate(apply_sweep(cfg, v));
    } catch (const ConfigError& e) {
      std::ostringstream os;
      os << key << ": sweep value " << v << " is invalid (" << e.what() << ")";
      throw ConfigError(ConfigError::Kind::Validation, key, os.str());
    }
  }
}

inline ChannelModel build_channel(const ChannelSpec& spec) {
  const auto a = build_transition(spec.states, spec.p_stay, spec.p_avail_to_busy, spec.p_busy_stay);
  return ChannelModel(spec.gains.empty() ? default_gains(spec.states) : spec.gains,
                      spec.loss.empty() ? default_loss(spec.states) : spec.loss, a, spec.bandwidth, spec.slot);
}

/// Planner/simulator model of a sweep-free config.
inline PomdpProblem build_problem(const ExperimentConfig& cfg) {
  PomdpProblem prob;
  prob.rd = cfg.rd;
  prob.beta_grid = BetaGrid::uniform(cfg.beta_step);
  prob.penalty = cfg.penalty;
  const SensorDesign sensor = cfg.sensor.design();
  for (const auto& spec : cfg.channels) {
    prob.channels.push_back(build_channel(spec));
    prob.kernels.push_back(observation_kernel(prob.channels.back(), sensor, cfg.sensor.sigma));
  }
  return prob;
}

// ---------------------------------------------------------------- YAML

namespace detail {

inline ConfigError parse_error(const std::string& key, const std::string& msg) {
  return ConfigError(ConfigError::Kind::Parse, key, key + ": " + msg);
}

template <typename T>
T read_scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw parse_error(key, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw parse_error(key, "cannot convert '" + node.Scalar() + "'");
  }
}

template <typename T>
void read_opt(const YAML::Node& map, const std::string& name, const std::string& key, T& out) {
  if (const auto n = map[name]) out = read_scalar<T>(n, key);
}

inline std::vector<double> read_doubles(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw parse_error(key, "expected a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(read_scalar<double>(node[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

inline void reject_unknown(const YAML::Node& map, const std::string& prefix, const std::set<std::string>& known) {
  if (!map.IsMap()) throw parse_error(prefix.empty() ? "<root>" : prefix, "expected a mapping");
  for (const auto& kv : map) {
    const std::string k = kv.first.as<std::string>();
    if (!known.count(k))
      throw ConfigError(ConfigError::Kind::Validation, prefix + k, "unknown key '" + prefix + k + "'");
  }
}

}  // namespace detail

/// Parses YAML text. Absent keys keep their defaults; an empty document gives
/// the default single-channel experiment.
inline ExperimentConfig parse_config(const std::string& text) {
  using namespace detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(ConfigError::Kind::Parse, "", std::string("YAML parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  if (root.IsNull()) return cfg;
  reject_unknown(root, "",
                 {"experiment", "horizon", "seeds", "grid_resolution", "penalty", "max_joint_grid_points", "rd",
                  "beta_grid", "sensor", "channels", "methods", "constant_beta", "sweep", "output"});

  read_opt(root, "experiment", "experiment", cfg.experiment);
  read_opt(root, "horizon", "horizon", cfg.horizon);
  read_opt(root, "seeds", "seeds", cfg.seeds);
  read_opt(root, "penalty", "penalty", cfg.penalty);
  read_opt(root, "max_joint_grid_points", "max_joint_grid_points", cfg.max_joint_grid_points);
  read_opt(root, "constant_beta", "constant_beta", cfg.constant_beta);

  if (const auto rd = root["rd"]) {
    reject_unknown(rd, "rd.", {"target_rate", "ds0", "ds1", "eta", "a", "b", "efd"});
    read_opt(rd, "target_rate", "rd.target_rate", cfg.rd.target_rate);
    read_opt(rd, "ds0", "rd.ds0", cfg.rd.ds0);
    read_opt(rd, "ds1", "rd.ds1", cfg.rd.ds1);
    read_opt(rd, "eta", "rd.eta", cfg.rd.eta);
    read_opt(rd, "a", "rd.a", cfg.rd.a);
    read_opt(rd, "b", "rd.b", cfg.rd.b);
    read_opt(rd, "efd", "rd.efd", cfg.rd.efd);
  }
  if (const auto bg = root["beta_grid"]) {
    reject_unknown(bg, "beta_grid.", {"step"});
    read_opt(bg, "step", "beta_grid.step", cfg.beta_step);
  }
  if (const auto s = root["sensor"]) {
    reject_unknown(s, "sensor.", {"epsilon", "zeta", "kappa", "sigma"});
    if (s["epsilon"] && s["zeta"]) throw ConfigError(ConfigError::Kind::Validation, "zeta", "zeta: give epsilon or zeta, not both");
    read_opt(s, "epsilon", "epsilon", cfg.sensor.epsilon);
    if (const auto z = s["zeta"]) cfg.sensor.zeta = read_scalar<double>(z, "zeta");
    read_opt(s, "kappa", "kappa", cfg.sensor.kappa);
    read_opt(s, "sigma", "sigma", cfg.sensor.sigma);
  }
  if (const auto chs = root["channels"]) {
    if (!chs.IsSequence()) throw parse_error("channels", "expected a list");
    cfg.channels.clear();
    for (std::size_t i = 0; i < chs.size(); ++i) {
      const std::string base = "channels[" + std::to_string(i) + "].";
      const auto n = chs[i];
      ChannelSpec spec;
      if (!n.IsNull()) {
        reject_unknown(n, base,
                       {"states", "p_stay", "p_avail_to_busy", "p_busy_stay", "gains", "loss", "bandwidth", "slot"});
        read_opt(n, "states", base + "states", spec.states);
        read_opt(n, "p_stay", base + "p_stay", spec.p_stay);
        read_opt(n, "p_avail_to_busy", base + "p_avail_to_busy", spec.p_avail_to_busy);
        read_opt(n, "p_busy_stay", base + "p_busy_stay", spec.p_busy_stay);
        if (n["gains"]) spec.gains = read_doubles(n["gains"], base + "gains");
        if (n["loss"]) spec.loss = read_doubles(n["loss"], base + "loss");
        read_opt(n, "bandwidth", base + "bandwidth", spec.bandwidth);
        read_opt(n, "slot", base + "slot", spec.slot);
      }
      cfg.channels.push_back(spec);
    }
  }
  // Defaults that depend on the channel count.
  const bool two = cfg.channels.size() == 2;
  cfg.grid_resolution = two ? 8 : 10;
  if (two)
    cfg.methods = {MethodKind::PomdpChannel, MethodKind::RandomChannelConstBeta, MethodKind::OracleChannel};
  read_opt(root, "grid_resolution", "grid_resolution", cfg.grid_resolution);

  if (const auto ms = root["methods"]) {
    if (!ms.IsSequence()) throw parse_error("methods", "expected a list");
    cfg.methods.clear();
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string name = read_scalar<std::string>(ms[i], "methods");
      const auto kind = MethodId::parse_kind(name);
      if (!kind) throw ConfigError(ConfigError::Kind::Validation, "methods", "methods: unknown method '" + name + "'");
      cfg.methods.push_back(*kind);
    }
  }
  if (const auto sw = root["sweep"]) {
    reject_unknown(sw, "sweep.", {"param", "values"});
    if (!sw["param"] || !sw["values"])
      throw ConfigError(ConfigError::Kind::Validation, "sweep", "sweep: needs both param and values");
    cfg.sweep = SweepSpec{read_scalar<std::string>(sw["param"], "sweep.param"), read_doubles(sw["values"], "sweep.values")};
  }
  if (const auto out = root["output"]) {
    reject_unknown(out, "output.", {"dir"});
    read_opt(out, "dir", "output.dir", cfg.output_dir);
  }
  validate_all(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigError::Kind::MissingFile, "", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.kind(), e.key(), path.string() + ": " + e.what());
  }
}

/// YAML text that parse_config maps back to an equal config.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "experiment" << YAML::Value << cfg.experiment;
  e << YAML::Key << "horizon" << YAML::Value << cfg.horizon;
  e << YAML::Key << "seeds" << YAML::Value << cfg.seeds;
  e << YAML::Key << "grid_resolution" << YAML::Value << cfg.grid_resolution;
  e << YAML::Key << "penalty" << YAML::Value << cfg.penalty;
  e << YAML::Key << "max_joint_grid_points" << YAML::Value << cfg.max_joint_grid_points;
  e << YAML::Key << "rd" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "target_rate" << YAML::Value << cfg.rd.target_rate;
  e << YAML::Key << "ds0" << YAML::Value << cfg.rd.ds0;
  e << YAML::Key << "ds1" << YAML::Value << cfg.rd.ds1;
  e << YAML::Key << "eta" << YAML::Value << cfg.rd.eta;
  e << YAML::Key << "a" << YAML::Value << cfg.rd.a;
  e << YAML::Key << "b" << YAML::Value << cfg.rd.b;
  e << YAML::Key << "efd" << YAML::Value << cfg.rd.efd;
  e << YAML::EndMap;
  e << YAML::Key << "beta_grid" << YAML::Value << YAML::BeginMap << YAML::Key << "step" << YAML::Value
    << cfg.beta_step << YAML::EndMap;
  e << YAML::Key << "sensor" << YAML::Value << YAML::BeginMap;
  if (cfg.sensor.zeta) e << YAML::Key << "zeta" << YAML::Value << *cfg.sensor.zeta;
  else e << YAML::Key << "epsilon" << YAML::Value << cfg.sensor.epsilon;
  e << YAML::Key << "kappa" << YAML::Value << cfg.sensor.kappa;
  e << YAML::Key << "sigma" << YAML::Value << cfg.sensor.sigma;
  e << YAML::EndMap;
  e << YAML::Key << "channels" << YAML::Value << YAML::BeginSeq;
  for (const auto& ch : cfg.channels) {
    e << YAML::BeginMap;
    e << YAML::Key << "states" << YAML::Value << ch.states;
    e << YAML::Key << "p_stay" << YAML::Value << ch.p_stay;
    e << YAML::Key << "p_avail_to_busy" << YAML::Value << ch.p_avail_to_busy;
    e << YAML::Key << "p_busy_stay" << YAML::Value << ch.p_busy_stay;
    if (!ch.gains.empty()) e << YAML::Key << "gains" << YAML::Value << YAML::Flow << ch.gains;
    if (!ch.loss.empty()) e << YAML::Key << "loss" << YAML::Value << YAML::Flow << ch.loss;
    e << YAML::Key << "bandwidth" << YAML::Value << ch.bandwidth;
    e << YAML::Key << "slot" << YAML::Value << ch.slot;
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "methods" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (MethodKind m : cfg.methods) e << MethodId{m}.name();
  e << YAML::EndSeq;
  e << YAML::Key << "constant_beta" << YAML::Value << cfg.constant_beta;
  if (cfg.sweep) {
    e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "param" << YAML::Value << cfg.sweep->param;
    e << YAML::Key << "values" << YAML::Value << YAML::Flow << cfg.sweep->values;
    e << YAML::EndMap;
  }
  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "dir" << YAML::Value
    << cfg.output_dir << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

// ------------------------------------------------------------- presets

namespace detail {

/// {first, first+step, ..., last} computed from integer hundredths.
inline std::vector<double> ladder(int first, int last, int step) {
  std::vector<double> v;
  for (int k = first; k <= last; k += step) v.push_back(k / 100.0);
  return v;
}

inline ExperimentConfig single_channel_preset(const std::string& name, int states, double p_stay, double p_vb) {
  ExperimentConfig cfg;
  cfg.experiment = name;
  cfg.channels = {ChannelSpec{}};
  cfg.channels[0].states = states;
  cfg.channels[0].p_stay = p_stay;
  cfg.channels[0].p_avail_to_busy = p_vb;
  cfg.channels[0].p_busy_stay = 0.1;
  cfg.grid_resolution = 10;
  cfg.output_dir = "out/" + name;
  return cfg;
}

/// Two 3-state channels (two gain levels plus busy), epsilon 0.62, sigma 0.1.
inline ExperimentConfig two_channel_preset(const std::string& name, double zz1, double vz1, double zz2, double vz2) {
  ExperimentConfig cfg;
  cfg.experiment = name;
  cfg.channels.assign(2, ChannelSpec{});
  const double zz[2] = {zz1, zz2};
  const double vz[2] = {vz1, vz2};
  for (int c = 0; c < 2; ++c) {
    auto& ch = cfg.channels[static_cast<std::size_t>(c)];
    ch.states = 3;
    ch.p_stay = 0.35;
    ch.p_avail_to_busy = vz[c];
    ch.p_busy_stay = zz[c];
  }
  cfg.sensor.epsilon = 0.62;
  cfg.sensor.sigma = 0.1;
  cfg.grid_resolution = 8;
  cfg.methods = {MethodKind::PomdpChannel, MethodKind::RandomChannelConstBeta, MethodKind::OracleChannel};
  cfg.output_dir = "out/" + name;
  return cfg;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12"};
}

inline std::string preset_description(const std::string& name) {
  if (name == "fig3") return "average distortion vs number of channel states";
  if (name == "fig4") return "average distortion vs probability of staying in the same state";
  if (name == "fig5") return "average distortion vs probability of moving to the busy state";
  if (name == "fig6") return "average distortion vs gain-estimation noise sigma";
  if (name == "fig7") return "average distortion vs sensor false-alarm probability epsilon";
  if (name == "fig8") return "two channels: spectrum utilization vs channel 1 busy-stay probability";
  if (name == "fig9") return "two channels: spectrum utilization vs channel 1 available-to-busy probability";
  if (name == "fig10") return "two channels: average distortion vs channel 1 busy-stay probability";
  if (name == "fig11") return "two channels: spectrum utilization vs epsilon";
  if (name == "fig12") return "two channels: average distortion vs epsilon";
  return "";
}

inline ExperimentConfig preset(const std::string& name) {
  using detail::ladder;
  ExperimentConfig cfg;
  if (name == "fig3") {
    cfg = detail::single_channel_preset(name, 5, 0.85, 0.05);
    cfg.sweep = SweepSpec{"states", {3, 4, 5, 6, 7, 8}};
  } else if (name == "fig4") {
    cfg = detail::single_channel_preset(name, 5, 0.85, 0.05);
    cfg.sweep = SweepSpec{"p_stay", ladder(50, 95, 5)};
  } else if (name == "fig5") {
    cfg = detail::single_channel_preset(name, 5, 0.50, 0.05);
    cfg.sweep = SweepSpec{"p_avail_to_busy", ladder(1, 15, 2)};
  } else if (name == "fig6") {
    cfg = detail::single_channel_preset(name, 5, 0.85, 0.05);
    cfg.sweep = SweepSpec{"sigma", {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5}};
  } else if (name == "fig7") {
    cfg = detail::single_channel_preset(name, 5, 0.85, 0.05);
    cfg.sweep = SweepSpec{"epsilon", ladder(10, 90, 10)};
  } else if (name == "fig8" || name == "fig10") {
    cfg = detail::two_channel_preset(name, 0.5, 0.2, 0.8, 0.6);
    cfg.sweep = SweepSpec{"channel1.p_busy_stay", ladder(10, 90, 10)};
  } else if (name == "fig9") {
    cfg = detail::two_channel_preset(name, 0.4, 0.2, 0.8, 0.6);
    cfg.sweep = SweepSpec{"channel1.p_avail_to_busy", {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}};
  } else if (name == "fig11" || name == "fig12") {
    cfg = detail::two_channel_preset(name, 0.4, 0.15, 0.6, 0.2);
    cfg.sweep = SweepSpec{"epsilon", ladder(10, 90, 10)};
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += " " + n;
    throw ConfigError(ConfigError::Kind::Validation, "preset", "unknown preset '" + name + "'; known:" + known);
  }
  validate_all(cfg);
  return cfg;
}

}  // namespace crqos
