#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crqos/sensing.hpp"

using namespace crqos;

namespace {

// P(nearest level of gamma_i + w is level j) by Simpson integration of the
// Gaussian density over the decision interval of level j.
double quantization_by_quadrature(const std::vector<double>& g, double sigma, int i, int j) {
  const int n = static_cast<int>(g.size());
  const double lo = (j == 0) ? g[static_cast<std::size_t>(i)] - 12 * sigma : 0.5 * (g[static_cast<std::size_t>(j - 1)] + g[static_cast<std::size_t>(j)]);
  const double hi = (j == n - 1) ? g[static_cast<std::size_t>(i)] + 12 * sigma : 0.5 * (g[static_cast<std::size_t>(j)] + g[static_cast<std::size_t>(j + 1)]);
  if (hi <= lo) return 0.0;
  const int steps = 4000;
  const double h = (hi - lo) / steps;
  const double mu = g[static_cast<std::size_t>(i)];
  auto f = [&](double t) { return std::exp(-0.5 * std::pow((t - mu) / sigma, 2)) / (sigma * std::sqrt(2 * M_PI)); };
  double s = f(lo) + f(hi);
  for (int k = 1; k < steps; ++k) s += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
  return s * h / 3.0;
}

ChannelModel two_state_channel() {
  Matrix m(2, 2);
  m << 0.9, 0.1, 0.5, 0.5;
  return ChannelModel::with_defaults(TransitionMatrix(m));
}

}  // namespace

TEST(Roc, Endpoints) {
  const RocModel roc{3.0};
  EXPECT_DOUBLE_EQ(roc_delta_for_epsilon(roc, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(roc_delta_for_epsilon(roc, 0.0), 1.0);
  EXPECT_NEAR(roc_delta_for_epsilon(roc, 0.6), 0.064, 1e-15);
  EXPECT_THROW(roc_delta_for_epsilon(roc, 1.5), DomainError);
}

TEST(Roc, MonotoneDecreasing) {
  const RocModel roc{2.5};
  double prev = 2.0;
  for (double e = 0.0; e <= 1.0; e += 0.01) {
    const double d = roc_delta_for_epsilon(roc, e);
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(OperatingPoint, SeparationDesign) {
  const auto d = operating_point_for_collision({3.0}, 0.064);
  EXPECT_NEAR(d.epsilon, 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(d.delta, 0.064);
  const auto lin = operating_point_for_collision({1.0}, 0.3);
  EXPECT_NEAR(lin.epsilon, 0.7, 1e-15);
  EXPECT_DOUBLE_EQ(lin.delta, 0.3);
  const auto full = operating_point_for_collision({3.0}, 1.0);
  EXPECT_DOUBLE_EQ(full.epsilon, 0.0);
  EXPECT_DOUBLE_EQ(full.delta, 1.0);
  EXPECT_THROW(operating_point_for_collision({3.0}, 0.0), DomainError);
}

TEST(GainQuantization, NoiselessIsIdentity) {
  const Matrix p = gain_quantization_matrix({0.5, 1.5}, 0.0);
  EXPECT_TRUE(p.isIdentity());
  const Matrix tiny = gain_quantization_matrix({0.5, 1.5}, 1e-6);
  EXPECT_TRUE(tiny.isIdentity(1e-12));
}

TEST(GainQuantization, TwoLevelMatchesMidpointCdf) {
  const Matrix p = gain_quantization_matrix({0.5, 1.5}, 0.5);
  const double phi1 = 1.0 - quantization_by_quadrature({0.5, 1.5}, 0.5, 0, 1);
  EXPECT_NEAR(phi1, 0.841345, 1e-6);
  EXPECT_NEAR(p(0, 0), 0.841345, 1e-6);
  EXPECT_NEAR(p(0, 1), 0.158655, 1e-6);
  EXPECT_NEAR(p(1, 0), 0.158655, 1e-6);
  EXPECT_NEAR(p(1, 1), 0.841345, 1e-6);
}

TEST(GainQuantization, MatchesQuadratureOracle) {
  const std::vector<double> g = default_gains(6);
  for (double sigma : {0.1, 0.4, 1.0}) {
    const Matrix p = gain_quantization_matrix(g, sigma);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        EXPECT_NEAR(p(i, j), quantization_by_quadrature(g, sigma, i, j), 1e-8) << sigma << " " << i << " " << j;
  }
}

TEST(GainQuantization, RowsSumToOne) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 8;
    std::vector<double> g;
    double v = 0.1;
    for (int i = 0; i < n; ++i) g.push_back(v += 0.01 + 2 * u(gen));
    const Matrix p = gain_quantization_matrix(g, 3 * u(gen));
    for (int i = 0; i < n; ++i) EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-9);
  }
}

TEST(ObservationKernel, TwoStateExample) {
  const auto k = observation_kernel(two_state_channel(), {0.4, 0.064}, 0.1);
  EXPECT_NEAR(k.matrix()(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(k.matrix()(0, 1), 0.4, 1e-15);
  EXPECT_EQ(k.matrix()(1, 0), 0.0);
  EXPECT_EQ(k.matrix()(1, 1), 1.0);
}

TEST(ObservationKernel, NoFalseAlarmPadsQuantization) {
  const auto ch = ChannelModel::with_defaults(build_transition(5, 0.85, 0.05, 0.1));
  const auto k = observation_kernel(ch, {0.0, 1.0}, 0.7);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(k.matrix()(i, j), k.quantization()(i, j));
    EXPECT_EQ(k.matrix()(i, 4), 0.0);
  }
  for (int j = 0; j < 4; ++j) EXPECT_EQ(k.matrix()(4, j), 0.0);
  EXPECT_EQ(k.matrix()(4, 4), 1.0);
}

TEST(ObservationKernel, RowsSumToOne) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const int s = 2 + t % 7;
    const double stay = s == 2 ? 0.9 : 0.5;
    const auto ch = ChannelModel::with_defaults(build_transition(s, stay, 0.1, 0.3));
    const auto k = observation_kernel(ch, {u(gen), u(gen)}, u(gen));
    for (int i = 0; i < s; ++i) EXPECT_NEAR(k.matrix().row(i).sum(), 1.0, 1e-9);
  }
}

TEST(SenseAndAccess, PerfectDetectorNeverAccessesBusy) {
  RandomStream rng(1);
  for (int i = 0; i < 10000; ++i) EXPECT_FALSE(sense_and_access(true, {0.3, 0.0}, rng).access);
  for (int i = 0; i < 10000; ++i) EXPECT_TRUE(sense_and_access(false, {0.0, 0.2}, rng).access);
}

TEST(SenseAndAccess, BusyAccessRateIsDelta) {
  RandomStream rng(77);
  const int n = 1'000'000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += sense_and_access(true, {0.6, 0.064}, rng).access;
  const double se = std::sqrt(0.064 * 0.936 / n);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.064, 3 * se);
}

TEST(SampleObservation, NoAckPaths) {
  const auto ch = ChannelModel::with_defaults(build_transition(4, 0.8, 0.1, 0.2));
  const auto k = observation_kernel(ch, {0.2, 0.1}, 0.0);
  RandomStream rng(3);
  EXPECT_TRUE(sample_observation({3}, true, k, rng).is_busy_seen(4));
  EXPECT_TRUE(sample_observation({1}, false, k, rng).is_busy_seen(4));
  EXPECT_EQ(sample_observation({0}, true, k, rng), gain_level(0));
}

TEST(SampleObservation, PipelineMarginalizesToKernel) {
  const auto ch = ChannelModel::with_defaults(build_transition(4, 0.8, 0.1, 0.2));
  const SensorDesign sensor{0.35, 0.1};
  const auto k = observation_kernel(ch, sensor, 0.9);
  RandomStream rng(99);
  const int n = 400'000;
  for (int x = 0; x < 3; ++x) {
    std::vector<int> counts(4, 0);
    for (int t = 0; t < n; ++t) {
      const auto sa = sense_and_access(false, sensor, rng);
      ++counts[static_cast<std::size_t>(sample_observation({x}, sa.access, k, rng).value)];
    }
    for (int y = 0; y < 4; ++y) {
      const double p = k.matrix()(x, y);
      EXPECT_NEAR(static_cast<double>(counts[static_cast<std::size_t>(y)]) / n, p, 4 * std::sqrt(p * (1 - p) / n) + 1e-12)
          << "x=" << x << " y=" << y;
    }
  }
}
