#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rebal/envs.hpp"

using namespace rebal;

namespace {

// Independent finite-horizon evaluation by explicit recursion over steps.
double oracle_optimal_value(const TabularModel& m, int H, int start) {
  std::vector<double> v(static_cast<std::size_t>(m.num_states), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    std::vector<double> next(v.size());
    for (int s = 0; s < m.num_states; ++s) {
      double best = -1e300;
      for (int a = 0; a < m.num_actions; ++a) {
        double q = m.r(s, a);
        for (int s2 = 0; s2 < m.num_states; ++s2) q += m.p(s, a, s2) * v[static_cast<std::size_t>(s2)];
        best = std::max(best, q);
      }
      next[static_cast<std::size_t>(s)] = best;
    }
    v = next;
  }
  return v[static_cast<std::size_t>(start)];
}

double oracle_fixed_action_value(const TabularModel& m, int H, int start, int action) {
  std::vector<double> v(static_cast<std::size_t>(m.num_states), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    std::vector<double> next(v.size());
    for (int s = 0; s < m.num_states; ++s) {
      double q = m.r(s, action);
      for (int s2 = 0; s2 < m.num_states; ++s2) q += m.p(s, action, s2) * v[static_cast<std::size_t>(s2)];
      next[static_cast<std::size_t>(s)] = q;
    }
    v = next;
  }
  return v[static_cast<std::size_t>(start)];
}

}  // namespace

TEST_CASE("Bernoulli pulls") {
  RandomStream rng(1);
  MabEnv sure({1.0}, NoiseModel::bernoulli());
  for (int i = 0; i < 100; ++i) CHECK(sure.pull(0, rng) == 1.0);

  MabEnv env({0.1, 0.2, 0.3, 0.4}, NoiseModel::bernoulli());
  CHECK(env.optimal_mean() == 0.4);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double r = env.pull(3, rng);
    REQUIRE((r == 0.0 || r == 1.0));
    sum += r;
  }
  CHECK(std::abs(sum / 100000 - 0.4) < 0.01);
  CHECK_THROWS(env.pull(4, rng));
  CHECK_THROWS_AS(MabEnv({1.2}, NoiseModel::bernoulli()), std::invalid_argument);
  CHECK_THROWS_AS(MabEnv({}, NoiseModel::bernoulli()), std::invalid_argument);
}

TEST_CASE("Gaussian pulls") {
  RandomStream rng(2);
  MabEnv exact({0.5}, NoiseModel::gaussian(0.0));
  for (int i = 0; i < 10; ++i) CHECK(exact.pull(0, rng) == 0.5);

  const double sigma = 0.7;
  MabEnv env({0.2, -0.1}, NoiseModel::gaussian(sigma));
  double s = 0.0, s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double r = env.pull(1, rng);
    s += r;
    s2 += r * r;
  }
  const double mean = s / n;
  const double var = (s2 - n * mean * mean) / (n - 1);
  CHECK(std::abs(var / (sigma * sigma) - 1.0) < 0.05);
}

TEST_CASE("linear contextual rounds") {
  RandomStream rng(3);
  Vector t1(3), t2(3);
  t1 << 0.2, 0.5, 0.1;
  t2 << 0.4, 0.1, 0.3;
  const auto env = LinCtxEnv::linear({t1, t2}, ContextDist::kUniformCube, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto r = env.step(rng);
    REQUIRE(r.context[0] == 1.0);
    for (int k = 1; k < 3; ++k) REQUIRE((r.context[k] >= 0.0 && r.context[k] < 1.0));
    CHECK(r.means[0] == doctest::Approx(t1.dot(r.context)));
    CHECK(r.optimal_mean == std::max(r.means[0], r.means[1]));
  }
  const auto normal = LinCtxEnv::linear({t1, t1}, ContextDist::kStandardNormal, 0.1);
  bool negative_seen = false;
  for (int i = 0; i < 1000; ++i) {
    const auto r = normal.step(rng);
    REQUIRE(r.context[0] == 1.0);
    CHECK(r.means[0] == r.means[1]);
    CHECK(r.optimal_mean == r.means[0]);
    negative_seen = negative_seen || r.context[1] < 0.0;
  }
  CHECK(negative_seen);
}

TEST_CASE("constant-mean contextual rounds ignore the context") {
  RandomStream rng(4);
  const auto env = LinCtxEnv::constant_mean(10, {0.3, 0.9}, ContextDist::kStandardNormal, 0.0);
  for (int i = 0; i < 100; ++i) {
    const auto r = env.step(rng);
    CHECK(r.context.size() == 10);
    CHECK(r.means[0] == 0.3);
    CHECK(r.means[1] == 0.9);
    CHECK(r.optimal_mean == 0.9);
    CHECK(r.reward(1, rng) == 0.9);
  }
}

TEST_CASE("per-round optimal value of IID contexts settles to a constant") {
  RandomStream rng(5);
  Vector t1(3), t2(3);
  t1 << 0.9, 0.1, 0.4;
  t2 << 0.2, 0.8, 0.5;
  const auto env = LinCtxEnv::linear({t1, t2}, ContextDist::kUniformCube, 1.0);
  const int n = 100000;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = env.step(rng).optimal_mean;
  auto mean_sd = [&](int lo, int hi) {
    double s = 0.0, s2 = 0.0;
    for (int i = lo; i < hi; ++i) {
      s += v[static_cast<std::size_t>(i)];
      s2 += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    const double m = s / (hi - lo);
    return std::pair{m, std::sqrt(s2 / (hi - lo) - m * m)};
  };
  const auto [m1, sd1] = mean_sd(0, n / 2);
  const auto [m2, sd2] = mean_sd(n / 2, n);
  const double se = std::sqrt(sd1 * sd1 / (n / 2) + sd2 * sd2 / (n / 2));
  CHECK(std::abs(m1 - m2) < 4.0 * se);
}

TEST_CASE("single-step episode") {
  TabularModel m{1, 1, {1.0}, {0.7}};
  EpisodicMdp mdp(m, 1, 0);
  RandomStream rng(6);
  const auto ep = mdp.run_episode([](int, int) { return 0; }, rng);
  CHECK(ep.steps.size() == 1);
  CHECK(ep.total_reward == doctest::Approx(0.7));
  CHECK(mdp.optimal_value() == doctest::Approx(0.7));
}

TEST_CASE("RiverSwim structure and values") {
  const auto rs = EpisodicMdp::river_swim(20);
  const auto& m = rs.model();
  CHECK(rs.num_states() == 6);
  CHECK(rs.num_actions() == 2);
  CHECK(rs.start_state() == 1);
  for (int s = 0; s < 6; ++s) {
    for (int a = 0; a < 2; ++a) {
      double sum = 0.0;
      for (int s2 = 0; s2 < 6; ++s2) sum += m.p(s, a, s2);
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  CHECK(m.r(0, 0) == 0.005);
  CHECK(m.r(5, 1) == 1.0);
  CHECK(m.p(2, 1, 3) == 0.35);
  CHECK(m.p(2, 1, 2) == 0.6);
  CHECK(m.p(2, 1, 1) == 0.05);
  CHECK(std::abs(rs.optimal_value() - oracle_optimal_value(m, 20, 1)) <= 1e-10);

  const EpisodePolicy left = [](int, int) { return 0; };
  const double exact = oracle_fixed_action_value(m, 20, 1, 0);
  CHECK(exact == doctest::Approx(19 * 0.005));
  CHECK(rs.policy_value(left) == doctest::Approx(exact).epsilon(1e-12));
  RandomStream rng(7);
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto ep = rs.run_episode(left, rng);
    REQUIRE(ep.steps.size() == 20);
    REQUIRE(ep.steps.front().state == 1);
    total += ep.total_reward;
  }
  CHECK(std::abs(total / 10000 - exact) <= 0.01);

  const EpisodePolicy right = [](int, int) { return 1; };
  const double right_exact = oracle_fixed_action_value(m, 20, 1, 1);
  double rtotal = 0.0;
  for (int i = 0; i < 10000; ++i) rtotal += rs.run_episode(right, rng).total_reward;
  CHECK(std::abs(rtotal / 10000 - right_exact) < 0.15);
  CHECK(rs.policy_value(right) == doctest::Approx(right_exact).epsilon(1e-12));
}

TEST_CASE("MDP validation") {
  CHECK_THROWS_AS(EpisodicMdp(TabularModel{1, 1, {0.9}, {0.5}}, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(EpisodicMdp(TabularModel{1, 1, {1.0}, {1.5}}, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(EpisodicMdp(TabularModel{1, 1, {1.0}, {0.5}}, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(EpisodicMdp(TabularModel{1, 1, {1.0}, {0.5}}, 3, 1), std::invalid_argument);
}

TEST_CASE("backward induction breaks ties toward the lowest action") {
  TabularModel m{1, 3, {1.0, 1.0, 1.0}, {0.5, 0.5, 0.2}};
  const auto plan = backward_induction(m, 4);
  for (int h = 0; h < 4; ++h) CHECK(plan.policy[static_cast<std::size_t>(h)][0] == 0);
  CHECK(plan.value[0][0] == doctest::Approx(2.0));
  CHECK(plan.value[4][0] == 0.0);
}

TEST_CASE("lower-bound worlds") {
  const LowerBoundWorld e1(LowerBoundVariant::kE1, 10000, 0.4, 0.8);
  CHECK(e1.reward(2) == 0.0);
  CHECK(e1.regret(2) == 1.0);
  CHECK(e1.reward(0) == 1.0);
  CHECK(e1.reward(1) == 1.0);
  CHECK(e1.regret(0) == 0.0);
  CHECK(e1.regret(1) == 0.0);
  const LowerBoundWorld e2(LowerBoundVariant::kE2, 10000, 0.4, 0.8);
  CHECK(e2.delta_gap() == doctest::Approx(std::pow(10.0, -1.6)).epsilon(1e-14));
  CHECK(e2.reward(0) == doctest::Approx(1.02512).epsilon(1e-5));
  CHECK(e2.regret(1) == doctest::Approx(e2.delta_gap()).epsilon(1e-14));
  CHECK_THROWS(e1.reward(3));
  CHECK_THROWS_AS(LowerBoundWorld(LowerBoundVariant::kE1, 100, 0.8, 0.4), std::invalid_argument);

  // Deterministic: no randomness is consumed by rewards.
  BanditEnv env = e2;
  RandomStream a(1), b(99);
  for (std::size_t arm = 0; arm < 3; ++arm) {
    const auto ra = begin_round(env, a);
    const auto rb = begin_round(env, b);
    CHECK(sample_reward(env, ra, arm, a) == sample_reward(env, rb, arm, b));
  }
}

TEST_CASE("bandit environment view") {
  BanditEnv mab = MabEnv({0.2, 0.6}, NoiseModel::bernoulli());
  CHECK(num_arms(mab) == 2);
  CHECK(has_direct_arm_access(mab));
  RandomStream rng(8);
  const auto r = begin_round(mab, rng);
  CHECK_FALSE(r.context.has_value());
  CHECK(r.optimal_mean == 0.6);
  Vector t(2);
  t << 0.1, 0.2;
  BanditEnv lin = LinCtxEnv::linear({t, t, t}, ContextDist::kUniformCube, 0.0);
  CHECK(num_arms(lin) == 3);
  CHECK_FALSE(has_direct_arm_access(lin));
  CHECK(begin_round(lin, rng).context.has_value());
}
