#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "crqos/belief.hpp"
#include "oracles.hpp"

using namespace crqos;
using oracle::smoothing_by_paths;

namespace {

TransitionMatrix two_state() {
  Matrix m(2, 2);
  m << 0.9, 0.1, 0.5, 0.5;
  return TransitionMatrix(m);
}

ObservationKernel two_state_kernel(double epsilon) {
  return observation_kernel(ChannelModel::with_defaults(two_state()), {epsilon, 0.1}, 0.1);
}

}  // namespace

TEST(Predict, Examples) {
  const auto a = two_state();
  Vector e0(2);
  e0 << 1, 0;
  const Vector p = predict(e0, a);
  EXPECT_DOUBLE_EQ(p(0), 0.9);
  EXPECT_DOUBLE_EQ(p(1), 0.1);

  Vector half(2);
  half << 0.5, 0.5;
  const Vector q = predict(half, a);
  EXPECT_NEAR(q(0), 0.7, 1e-15);
  EXPECT_NEAR(q(1), 0.3, 1e-15);

  Matrix ds(3, 3);
  ds << 0.2, 0.3, 0.5, 0.5, 0.2, 0.3, 0.3, 0.5, 0.2;
  const Vector u = predict(Vector::Constant(3, 1.0 / 3), TransitionMatrix(ds));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(u(i), 1.0 / 3, 1e-15);
}

TEST(Update, HandExamples) {
  const auto a = two_state();
  const auto b = two_state_kernel(0.4);
  const auto start = InformationState::certain(2, {0});

  const auto after_ack = update(start, a, b, gain_level(0));
  EXPECT_DOUBLE_EQ(after_ack[0], 1.0);
  EXPECT_DOUBLE_EQ(after_ack[1], 0.0);

  const auto after_busy = update(start, a, b, busy_seen(2));
  EXPECT_NEAR(after_busy[0], 0.36 / 0.46, 1e-15);
  EXPECT_NEAR(after_busy[0], 0.782609, 1e-6);
  EXPECT_NEAR(after_busy[1], 0.217391, 1e-6);
}

TEST(Update, ImpossibleObservationCarriesContext) {
  Matrix m(2, 2);
  m << 0.5, 0.5, 0.0, 1.0;
  const TransitionMatrix a(m);
  const auto b = observation_kernel(ChannelModel::with_defaults(a), {0.4, 0.1}, 0.1);
  const auto busy = InformationState::certain(2, {1});
  try {
    update(busy, a, b, gain_level(0));
    FAIL() << "expected ImpossibleObservation";
  } catch (const ImpossibleObservation& e) {
    EXPECT_EQ(e.observation(), gain_level(0));
    EXPECT_DOUBLE_EQ(e.belief()(1), 1.0);
  }
}

TEST(Update, MatchesPathEnumeration) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int compared = 0;
  for (int s = 2; s <= 3; ++s) {
    const double stay = s == 2 ? 0.7 : 0.5;
    const auto a = build_transition(s, stay, 1.0 - stay - (s == 2 ? 0.0 : 0.2), 0.35);
    const auto ch = ChannelModel::with_defaults(a);
    const auto b = observation_kernel(ch, {0.45, 0.1}, 0.9);
    std::vector<double> prior(static_cast<std::size_t>(s));
    double z = 0;
    for (auto& p : prior) z += (p = 0.1 + u(gen));
    for (auto& p : prior) p /= z;

    for (int k = 1; k <= 6; ++k) {
      std::vector<int> ys(static_cast<std::size_t>(k), 0);
      const int total = static_cast<int>(std::pow(s, k));
      for (int code = 0; code < total; ++code) {
        int c = code;
        for (int t = 0; t < k; ++t, c /= s) ys[static_cast<std::size_t>(t)] = c % s;
        const auto oracle = smoothing_by_paths(prior, a.matrix(), b.matrix(), ys);
        Vector pv(s);
        for (int i = 0; i < s; ++i) pv(i) = prior[static_cast<std::size_t>(i)];
        InformationState pi(pv);
        bool impossible = false;
        try {
          for (int y : ys) pi = update(pi, a, b, Observation{y});
        } catch (const ImpossibleObservation&) {
          impossible = true;
        }
        if (oracle.empty()) {
          EXPECT_TRUE(impossible);
          continue;
        }
        ASSERT_FALSE(impossible);
        for (int i = 0; i < s; ++i) EXPECT_NEAR(pi[i], oracle[static_cast<std::size_t>(i)], 1e-9);
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 500);
}

TEST(Update, StaysOnSimplexOverLongSequences) {
  const auto a = build_transition(5, 0.6, 0.15, 0.4);
  const auto ch = ChannelModel::with_defaults(a);
  const auto b = observation_kernel(ch, {0.6, 0.064}, 0.5);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomStream rng(seed);
    StateIndex x{0};
    InformationState pi = InformationState::certain(5, x);
    for (int t = 0; t < 1000; ++t) {
      x = step(x, a, rng);
      const auto sa = sense_and_access(ch.is_busy(x), b.sensor(), rng);
      const auto y = sample_observation(x, sa.access, b, rng);
      pi = update(pi, a, b, y);
      ASSERT_NEAR(pi.vector().sum(), 1.0, 1e-9);
      for (int i = 0; i < 5; ++i) ASSERT_GE(pi[i], 0.0);
    }
  }
}

TEST(MapAvailableState, Examples) {
  Vector v(3);
  v << 0.3, 0.3, 0.4;
  EXPECT_EQ(map_available_state(v).state.value, 0);
  v << 0.1, 0.2, 0.7;
  const auto m = map_available_state(v);
  EXPECT_EQ(m.state.value, 1);
  EXPECT_FALSE(m.degenerate);
  v << 0.0, 0.0, 1.0;
  const auto d = map_available_state(v);
  EXPECT_EQ(d.state.value, 0);
  EXPECT_TRUE(d.degenerate);
}

TEST(InformationState, Validation) {
  Vector v(2);
  v << 0.7, 0.2;
  EXPECT_THROW(InformationState{v}, DomainError);
  v << -0.1, 1.1;
  EXPECT_THROW(InformationState{v}, DomainError);
}
