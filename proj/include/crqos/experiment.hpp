#pragma once

// Experiment driver: offline solving, seeds x sweep x methods episode runs,
// aggregation and the CSV / SVG writers.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "crqos/config.hpp"
#include "crqos/errors.hpp"
#include "crqos/parallel.hpp"
#include "crqos/policy_io.hpp"
#include "crqos/policy_sim.hpp"
#include "crqos/pomdp.hpp"

namespace crqos {

inline constexpr const char* kRawCsvHeader =
    "experiment,sweep_param,sweep_value,method,seed,avg_distortion,spectrum_utilization,collision_rate,"
    "accessed_slots,available_slots";
inline constexpr const char* kAggregateCsvHeader =
    "experiment,sweep_param,sweep_value,method,metric,n,mean,ci_half_width";

struct SweepPoint {
  std::string param;  ///< "none" without a sweep
  double value = 0.0;
  ExperimentConfig config;  ///< sweep applied
};

/// One point per sweep value, or a single "none" point.
inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  if (!cfg.sweep) return {{"none", 0.0, cfg}};
  std::vector<SweepPoint> out;
  for (double v : cfg.sweep->values) out.push_back({cfg.sweep->param, v, apply_sweep(cfg, v)});
  return out;
}

/// Solves the policy of every distinct sweep-point model.
inline std::vector<StoredPolicy> solve_policies(const ExperimentConfig& cfg, unsigned threads = default_thread_count()) {
  std::vector<StoredPolicy> out;
  SolveOptions opt;
  opt.threads = threads;
  opt.max_joint_points = static_cast<std::size_t>(cfg.max_joint_grid_points);
  for (const auto& pt : sweep_points(cfg)) {
    const PomdpProblem prob = build_problem(pt.config);
    const std::uint64_t h = model_hash(prob);
    if (std::any_of(out.begin(), out.end(), [&](const StoredPolicy& p) { return p.hash == h; })) continue;
    out.push_back({h, solve_finite_horizon(prob, cfg.horizon, cfg.grid_resolution, opt)});
  }
  return out;
}

inline std::vector<StoredPolicy> solve_and_store(const ExperimentConfig& cfg, const std::filesystem::path& out_path,
                                                 unsigned threads = default_thread_count()) {
  auto policies = solve_policies(cfg, threads);
  write_policies(out_path, policies);
  return policies;
}

struct ResultRow {
  std::string experiment;
  std::string sweep_param;
  double sweep_value = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  Metrics metrics;
};

struct AggregateRow {
  std::string experiment;
  std::string sweep_param;
  double sweep_value = 0.0;
  std::string method;
  std::string metric;
  ConfidenceInterval ci;  ///< half_width NaN when fewer than two samples
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;
};

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"avg_distortion", "spectrum_utilization", "collision_rate"};
  return names;
}

inline double metric_value(const Metrics& m, const std::string& name) {
  if (name == "avg_distortion") return m.avg_distortion;
  if (name == "spectrum_utilization") return m.spectrum_utilization;
  return m.collision_rate;
}

/// Mean and CI over seeds per (sweep value, method, metric). NaN samples
/// (no qualifying slot in that episode) are skipped.
inline std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  // Groups keep the order in which (sweep value, method) first appears.
  std::map<std::pair<double, std::string>, std::size_t> group_of;
  std::vector<std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    const auto [it, fresh] = group_of.emplace(std::make_pair(r.sweep_value, r.method), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(&r);
  }
  std::vector<AggregateRow> out;
  for (auto& g : groups) {
    std::stable_sort(g.begin(), g.end(), [](const ResultRow* a, const ResultRow* b) { return a->seed < b->seed; });
    for (const auto& metric : metric_names()) {
      std::vector<double> xs;
      for (const auto* r : g) {
        const double v = metric_value(r->metrics, metric);
        if (!std::isnan(v)) xs.push_back(v);
      }
      AggregateRow a{g.front()->experiment, g.front()->sweep_param, g.front()->sweep_value, g.front()->method, metric, {}};
      if (xs.size() >= 2) {
        a.ci = aggregate_ci(xs);
      } else {
        a.ci.n = xs.size();
        a.ci.mean = xs.empty() ? std::numeric_limits<double>::quiet_NaN() : xs.front();
        a.ci.half_width = std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(a);
    }
  }
  return out;
}

struct RunOptions {
  unsigned threads = default_thread_count();
  bool use_sweep = true;  ///< false runs the base config only
};

/// Episodes for every (sweep point, method, seed); seeds are 1..cfg.seeds.
/// Rows come out ordered by sweep point, method (config order), then seed,
/// whatever the thread count.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<StoredPolicy>* policies,
                                       const RunOptions& options = {}) {
  ExperimentConfig base = cfg;
  if (!options.use_sweep) base.sweep.reset();
  validate_all(base);
  ExperimentResult res;
  for (const auto& pt : sweep_points(base)) {
    SimulationModel model;
    model.problem = build_problem(pt.config);
    model.horizon = pt.config.horizon;
    if (pt.config.needs_policy()) {
      if (!policies) throw ArtifactError("PomdpChannel needs a stored policy; run `solve` first");
      model.policy = std::make_shared<PomdpSolution>(
          find_policy(*policies, model.problem, pt.config.horizon, pt.config.grid_resolution));
    }
    const EpisodeRunner runner(std::move(model));
    const std::size_t n_methods = pt.config.methods.size();
    const auto n_seeds = static_cast<std::size_t>(pt.config.seeds);
    for (MethodKind m : pt.config.methods) runner.check_method(pt.config.method_id(m));
    std::vector<Metrics> metrics(n_methods * n_seeds);
    parallel_for(
        metrics.size(),
        [&](std::size_t i) {
          const MethodId method = pt.config.method_id(pt.config.methods[i / n_seeds]);
          metrics[i] = run_metrics(runner, method, static_cast<std::uint64_t>(i % n_seeds) + 1);
        },
        options.threads);
    for (std::size_t i = 0; i < metrics.size(); ++i)
      res.rows.push_back({cfg.experiment, pt.param, pt.value, MethodId{pt.config.methods[i / n_seeds]}.name(),
                          static_cast<std::uint64_t>(i % n_seeds) + 1, metrics[i]});
  }
  res.aggregates = aggregate(res.rows);
  return res;
}

// ------------------------------------------------------------------ CSV

/// Up to 9 significant digits, '.' separator; NaN prints as "NaN".
inline std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  std::string s(buf);
  std::replace(s.begin(), s.end(), ',', '.');  // guard against a non-C numeric locale
  return s;
}

inline void write_raw_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw DomainError("no rows to write");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(ConfigError::Kind::Validation, "output.dir", "cannot write " + path.string());
  out << kRawCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.sweep_param << ',' << format_number(r.sweep_value) << ',' << r.method << ','
        << r.seed << ',' << format_number(r.metrics.avg_distortion) << ','
        << format_number(r.metrics.spectrum_utilization) << ',' << format_number(r.metrics.collision_rate) << ','
        << r.metrics.accessed_available << ',' << r.metrics.sensed_available << '\n';
  }
  if (!out) throw ConfigError(ConfigError::Kind::Validation, "output.dir", "failed writing " + path.string());
}

inline void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw DomainError("no rows to write");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(ConfigError::Kind::Validation, "output.dir", "cannot write " + path.string());
  out << kAggregateCsvHeader << '\n';
  for (const auto& a : rows)
    out << a.experiment << ',' << a.sweep_param << ',' << format_number(a.sweep_value) << ',' << a.method << ','
        << a.metric << ',' << a.ci.n << ',' << format_number(a.ci.mean) << ',' << format_number(a.ci.half_width)
        << '\n';
  if (!out) throw ConfigError(ConfigError::Kind::Validation, "output.dir", "failed writing " + path.string());
}

// ------------------------------------------------------------------ SVG

/// Line chart of one metric: x = sweep value, one series per method with CI
/// error bars.
inline std::string render_chart(const std::vector<AggregateRow>& rows, const std::string& metric,
                                const std::string& title) {
  struct Point {
    double x, y, h;
  };
  std::vector<std::string> methods;
  std::map<std::string, std::vector<Point>> series;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  std::string xlabel = "sweep value";
  for (const auto& a : rows) {
    if (a.metric != metric || std::isnan(a.ci.mean)) continue;
    if (!series.count(a.method)) methods.push_back(a.method);
    const double h = std::isnan(a.ci.half_width) ? 0.0 : a.ci.half_width;
    series[a.method].push_back({a.sweep_value, a.ci.mean, h});
    xmin = std::min(xmin, a.sweep_value);
    xmax = std::max(xmax, a.sweep_value);
    ymin = std::min(ymin, a.ci.mean - h);
    ymax = std::max(ymax, a.ci.mean + h);
    xlabel = a.sweep_param;
  }
  const double W = 640, H = 420, L = 70, R = 170, T = 40, B = 50;
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    const double pad = std::isfinite(ymin) ? std::max(std::abs(ymin) * 0.05, 1e-3) : 1.0;
    if (!std::isfinite(ymin)) ymin = ymax = 0.0;
    ymin -= pad;
    ymax += pad;
  }
  auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::string s;
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
  s += "<line x1=\"" + num(L) + "\" y1=\"" + num(H - B) + "\" x2=\"" + num(W - R) + "\" y2=\"" + num(H - B) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(L) + "\" y1=\"" + num(T) + "\" x2=\"" + num(L) + "\" y2=\"" + num(H - B) +
       "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    s += "<text x=\"" + num(L - 6) + "\" y=\"" + num(sy(yv) + 4) + "\" text-anchor=\"end\">" + format_number(yv) +
         "</text>\n";
    s += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(H - B + 16) + "\" text-anchor=\"middle\">" +
         format_number(xv) + "</text>\n";
  }
  s += "<text x=\"" + num((L + W - R) / 2) + "\" y=\"" + num(H - 10) + "\" text-anchor=\"middle\">" + xlabel +
       "</text>\n";
  s += "<text x=\"16\" y=\"" + num((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num((T + H - B) / 2) + ")\">" + metric + "</text>\n";

  for (std::size_t m = 0; m < methods.size(); ++m) {
    const std::string color = colors[m % 7];
    auto pts = series[methods[m]];
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    s += "<g class=\"series\" data-method=\"" + methods[m] + "\">\n<polyline fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : pts) s += num(sx(p.x)) + "," + num(sy(p.y)) + " ";
    s += "\"/>\n";
    for (const auto& p : pts) {
      s += "<line class=\"errorbar\" x1=\"" + num(sx(p.x)) + "\" y1=\"" + num(sy(p.y - p.h)) + "\" x2=\"" +
           num(sx(p.x)) + "\" y2=\"" + num(sy(p.y + p.h)) + "\" stroke=\"" + color + "\"/>\n";
      s += "<circle cx=\"" + num(sx(p.x)) + "\" cy=\"" + num(sy(p.y)) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    s += "</g>\n";
    const double ly = T + 16.0 * static_cast<double>(m);
    s += "<line x1=\"" + num(W - R + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(W - R + 32) + "\" y2=\"" +
         num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(W - R + 36) + "\" y=\"" + num(ly + 4) + "\">" + methods[m] + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

inline void write_chart(const std::vector<AggregateRow>& rows, const std::string& metric, const std::string& title,
                        const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(ConfigError::Kind::Validation, "output.dir", "cannot write " + path.string());
  out << render_chart(rows, metric, title);
}

/// raw.csv, aggregate.csv, one SVG per metric and the resolved config.
inline void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res, const std::filesystem::path& dir) {
  write_raw_csv(res.rows, dir / "raw.csv");
  write_aggregate_csv(res.aggregates, dir / "aggregate.csv");
  for (const auto& m : metric_names()) write_chart(res.aggregates, m, cfg.experiment + ": " + m, dir / (m + ".svg"));
  std::ofstream(dir / "config.yaml", std::ios::binary | std::ios::trunc) << serialize_config(cfg);
}

}  // namespace crqos
