#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rebal/bases.hpp"

using namespace rebal;

namespace {

double run_alone(BaseLearner& base, const MabEnv& env, RandomStream& base_rng, RandomStream& env_rng,
                 long rounds) {
  double regret = 0.0;
  for (long t = 0; t < rounds; ++t) {
    const std::size_t a = base.act(std::nullopt, base_rng);
    base.update(std::nullopt, a, env.pull(a, env_rng));
    regret += env.optimal_mean() - env.mean(a);
  }
  return regret;
}

TabularModel two_state_model() {
  // action 0 stays with reward 0.3; action 1 moves to state 1 w.p. 0.7,
  // where every action pays 0.9.
  TabularModel m{2, 2, {}, {0.3, 0.0, 0.9, 0.9}};
  m.transitions = {1.0, 0.0, 0.3, 0.7, 0.0, 1.0, 0.0, 1.0};
  return m;
}

}  // namespace

TEST_CASE("fixed arm") {
  FixedArm base(2);
  RandomStream rng(1);
  for (int i = 0; i < 20; ++i) {
    CHECK(base.act(std::nullopt, rng) == 2);
    base.update(std::nullopt, 2, 0.5);
  }
  CHECK(base.internal_time() == 20);
  CHECK(rng.draws() == 0);
}

TEST_CASE("UCB1 initial round-robin and index") {
  Ucb1 ucb(3);
  RandomStream rng(2);
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(ucb.act(std::nullopt, rng) == a);
    ucb.update(std::nullopt, a, a == 0 ? 1.0 : 0.0);
  }
  ucb.update(std::nullopt, 0, 0.0);
  CHECK(ucb.mean(0) == 0.5);
  CHECK(ucb.pulls(0) == 2);
  // Independent index evaluation at t = 4.
  const double l = std::log(4.0);
  const double idx0 = 0.5 + std::sqrt(2.0 * l / 2.0);
  const double idx1 = std::sqrt(2.0 * l);
  CHECK(ucb.act(std::nullopt, rng) == (idx1 > idx0 ? 1u : 0u));
  ucb.update(std::nullopt, 0, 0.0);
  // Now arm 0 has mean 1/3 over 3 pulls at t = 5.
  const double l5 = std::log(5.0);
  CHECK(1.0 / 3.0 + std::sqrt(2.0 * l5 / 3.0) < std::sqrt(2.0 * l5));
  CHECK(ucb.act(std::nullopt, rng) == 1);
  CHECK_THROWS_AS(ucb.update(std::nullopt, 3, 0.0), std::out_of_range);
}

TEST_CASE("UCB1 regret grows sublinearly") {
  const MabEnv env({0.5, 0.4, 0.3}, NoiseModel::bernoulli());
  double r[3] = {0.0, 0.0, 0.0};
  const long horizons[3] = {2000, 4000, 8000};
  for (int seed = 0; seed < 50; ++seed) {
    for (int k = 0; k < 3; ++k) {
      Ucb1 ucb(3);
      RandomStream brng(seed), erng(10000 + seed);
      r[k] += run_alone(ucb, env, brng, erng, horizons[k]);
    }
  }
  CHECK(r[1] / r[0] < 1.8);
  CHECK(r[2] / r[1] < 1.8);
}

TEST_CASE("epsilon-greedy exploration probability") {
  EpsGreedy eps(4, 3.0);
  CHECK(eps.exploration_probability(1) == 1.0);
  CHECK(eps.exploration_probability(3) == 1.0);
  CHECK(eps.exploration_probability(4) == 0.75);
  CHECK(eps.exploration_probability(300) == 0.01);
  CHECK_THROWS_AS(eps.exploration_probability(0), std::invalid_argument);
  CHECK_THROWS_AS(EpsGreedy(2, 0.0), std::invalid_argument);
}

TEST_CASE("epsilon-greedy exploits once exploration stops") {
  EpsGreedy eps(3, 1e-9);
  RandomStream rng(3);
  // Unplayed arms are preferred, lowest first.
  CHECK(eps.greedy_arm() == 0);
  eps.update(std::nullopt, 0, 0.2);
  CHECK(eps.greedy_arm() == 1);
  eps.update(std::nullopt, 1, 0.7);
  eps.update(std::nullopt, 2, 0.1);
  CHECK(eps.greedy_arm() == 1);
  for (int i = 0; i < 50; ++i) CHECK(eps.act(std::nullopt, rng) == 1);
}

TEST_CASE("epsilon-greedy explores at the stated rate") {
  // With c = 50 and a constant greedy arm, the explored fraction over
  // invocations 1..n has a closed-form expectation.
  const MabEnv env({0.9, 0.0}, NoiseModel::gaussian(0.0));
  const long n = 2000;
  double expected_off = 0.0;
  for (long tau = 1; tau <= n; ++tau) expected_off += std::min(1.0, 50.0 / tau) * 0.5;
  double off = 0.0;
  const int seeds = 200;
  for (int seed = 0; seed < seeds; ++seed) {
    EpsGreedy eps(2, 50.0);
    RandomStream brng(seed), erng(seed);
    eps.update(std::nullopt, 0, 0.9);
    eps.update(std::nullopt, 1, 0.0);
    for (long t = 0; t < n; ++t) {
      const auto a = eps.act(std::nullopt, brng);
      off += a == 1 ? 1.0 : 0.0;
      eps.update(std::nullopt, a, env.pull(a, erng));
    }
  }
  // The two seeding updates shift tau by 2.
  double shifted = 0.0;
  for (long tau = 3; tau <= n + 2; ++tau) shifted += std::min(1.0, 50.0 / tau) * 0.5;
  CHECK(std::abs(off / seeds - shifted) < 0.05 * shifted);
  CHECK(shifted < expected_off);
}

TEST_CASE("OFUL plays the argmax of its optimistic index") {
  std::vector<Vector> actions;
  for (int i = 0; i < 4; ++i) actions.push_back(Vector::Unit(4, i));
  Oful oful(FeatureMap::fixed(actions), {1.0, 0.1, 0.5, 2.0});
  RandomStream rng(4);
  const double means[4] = {0.1, 0.6, 0.3, 0.2};
  RidgeState shadow(4, 1.0);
  for (int t = 0; t < 300; ++t) {
    const auto a = oful.act(std::nullopt, rng);
    const double beta = shadow.beta_radius(0.1, 0.5, 2.0);
    double best = -1e300;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double v = actions[i].dot(shadow.theta_hat()) + beta * shadow.weighted_norm(actions[i]);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    REQUIRE(a == arg);
    const double y = means[a] + 0.5 * rng.normal();
    oful.update(std::nullopt, a, y);
    shadow.update(actions[a], y);
  }
  CHECK(oful.internal_time() == 300);
  CHECK(oful.logdet().value() == doctest::Approx(shadow.logdet()));
  CHECK(oful.ridge().count() == 300);
}

TEST_CASE("contextual bases need a context") {
  Oful oful(FeatureMap::disjoint(3, 2), {});
  LinearBalancingBase lrb(FeatureMap::disjoint(3, 2, 0.5), {});
  RandomStream rng(5);
  CHECK(oful.contextual());
  CHECK_THROWS_AS(oful.act(std::nullopt, rng), std::invalid_argument);
  CHECK_THROWS_AS(lrb.act(std::nullopt, rng), std::invalid_argument);
  Vector s(3);
  s << 1.0, 0.2, 0.3;
  const auto a = lrb.act(s, rng);
  CHECK(a < 2);
  lrb.update(s, a, 0.4);
  CHECK(lrb.internal_time() == 1);
}

TEST_CASE("disjoint features place the scaled context in the arm's block") {
  const auto f = FeatureMap::disjoint(2, 3, 0.5);
  Vector s(2);
  s << 1.0, -2.0;
  const Vector x = f.features(s, 1);
  Vector expect(6);
  expect << 0, 0, 0.5, -1.0, 0, 0;
  CHECK(x == expect);
  CHECK(f.action_set(s).size() == 3);
  const auto oh = FeatureMap::one_hot(3);
  CHECK(oh.features(std::nullopt, 2) == Vector::Unit(3, 2));
  CHECK_FALSE(oh.contextual());
}

TEST_CASE("bandit and episodic interfaces are exclusive") {
  Psrl psrl(1, 1, 3);
  RandomStream rng(6);
  CHECK_THROWS_AS(psrl.act(std::nullopt, rng), std::logic_error);
  CHECK_THROWS_AS(psrl.update(std::nullopt, 0, 0.0), std::logic_error);
  Ucb1 ucb(2);
  const EpisodicMdp mdp(TabularModel{1, 1, {1.0}, {1.0}}, 3, 0);
  CHECK_THROWS_AS(ucb.run_episode(mdp, rng), std::logic_error);
}

TEST_CASE("synthetic bases") {
  SyntheticRegretBase b1(0.4, 10000);
  CHECK(b1.exploration_probability() == doctest::Approx(std::pow(10.0, -2.4)).epsilon(1e-14));
  CHECK(b1.exploration_probability() == doctest::Approx(0.00398).epsilon(1e-3));
  CHECK(b1.kind() == "synthetic_const_regret");
  SyntheticRegretBase all(1.0, 100);
  RandomStream rng(7);
  for (int i = 0; i < 20; ++i) CHECK(all.act(std::nullopt, rng) == 2);

  SyntheticRegretBase b2(0.8, 10000);
  SyntheticRegretBase b2p(0.8, 10000, 5);
  CHECK(b2p.kind() == "synthetic_switching");
  RandomStream r1(8), r2(8);
  for (int t = 0; t < 20; ++t) {
    const auto plain = b2.act(std::nullopt, r1);
    const auto sw = b2p.act(std::nullopt, r2);
    if (t < 5) {
      CHECK(sw == plain);
    } else {
      CHECK(sw == 0);
    }
    b2.update(std::nullopt, plain, 0.0);
    b2p.update(std::nullopt, sw, 0.0);
  }
  const LowerBoundWorld e2(LowerBoundVariant::kE2, 10000, 0.4, 0.8);
  const double gap = e2.delta_gap();
  CHECK(b2p.expected_regret_alone(e2, 10000) ==
        doctest::Approx((gap + std::pow(10000.0, -0.2)) * 5 + 0.0).epsilon(1e-12));
  const LowerBoundWorld e1(LowerBoundVariant::kE1, 10000, 0.4, 0.8);
  CHECK(b1.expected_regret_alone(e1, 10000) == doctest::Approx(std::pow(10000.0, 0.4)).epsilon(1e-12));
  CHECK_THROWS_AS(SyntheticRegretBase(1.5, 10), std::invalid_argument);
}

TEST_CASE("bases are isolated from one another") {
  const MabEnv env({0.2, 0.5, 0.4}, NoiseModel::bernoulli());
  // A alone.
  EpsGreedy a_alone(3, 5.0);
  RandomStream a_rng(100), env_rng(200);
  std::vector<std::size_t> solo;
  std::vector<double> rewards;
  for (int t = 0; t < 200; ++t) {
    const auto a = a_alone.act(std::nullopt, a_rng);
    const double r = env.pull(a, env_rng);
    solo.push_back(a);
    rewards.push_back(r);
    a_alone.update(std::nullopt, a, r);
  }
  // A interleaved with B, fed the same rewards on its own rounds.
  EpsGreedy a(3, 5.0);
  Ucb1 b(3);
  RandomStream a_rng2(100), b_rng(300), other(400);
  for (int t = 0; t < 200; ++t) {
    const auto x = a.act(std::nullopt, a_rng2);
    REQUIRE(x == solo[static_cast<std::size_t>(t)]);
    a.update(std::nullopt, x, rewards[static_cast<std::size_t>(t)]);
    for (int k = 0; k < 3; ++k) {
      const auto y = b.act(std::nullopt, b_rng);
      b.update(std::nullopt, y, env.pull(y, other));
    }
  }
  CHECK(a.greedy_arm() == a_alone.greedy_arm());
}

TEST_CASE("PSRL on a single-state MDP collects the full return") {
  const EpisodicMdp mdp(TabularModel{1, 2, {1.0, 1.0}, {1.0, 1.0}}, 7, 0);
  Psrl psrl(1, 2, 7);
  RandomStream rng(9);
  for (int e = 0; e < 10; ++e) CHECK(psrl.run_episode(mdp, rng).total_reward == 7.0);
  CHECK(psrl.internal_time() == 10);
  const auto m = psrl.sample_model(rng);
  CHECK(m.p(0, 0, 0) == 1.0);
}

TEST_CASE("PSRL posterior transition rows are distributions") {
  const auto rs = EpisodicMdp::river_swim(20);
  Psrl psrl(6, 2, 20);
  RandomStream rng(10);
  for (int e = 0; e < 20; ++e) psrl.run_episode(rs, rng);
  const auto m = psrl.sample_model(rng);
  for (int s = 0; s < 6; ++s) {
    for (int a = 0; a < 2; ++a) {
      double sum = 0.0;
      for (int s2 = 0; s2 < 6; ++s2) sum += m.p(s, a, s2);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((m.r(s, a) >= 0.0 && m.r(s, a) <= 1.0));
    }
  }
}

TEST_CASE("UCRL2 stays optimistic with high probability") {
  const EpisodicMdp mdp(two_state_model(), 5, 0);
  const double v_star = mdp.optimal_value();
  const double delta = 0.1;
  int optimistic_runs = 0;
  for (int run = 0; run < 200; ++run) {
    Ucrl2 ucrl(2, 2, 5, delta);
    RandomStream rng(500 + run);
    bool ok = true;
    for (int e = 0; e < 50; ++e) {
      ucrl.run_episode(mdp, rng);
      ok = ok && ucrl.plan(0) >= v_star - 1e-12;
    }
    optimistic_runs += ok ? 1 : 0;
  }
  CHECK(optimistic_runs >= static_cast<int>(std::ceil((1.0 - delta) * 200)));
}

TEST_CASE("UCRL2 rejects a mismatched environment") {
  Ucrl2 ucrl(3, 2, 5, 0.1);
  RandomStream rng(11);
  CHECK_THROWS_AS(ucrl.run_episode(EpisodicMdp(two_state_model(), 5, 0), rng), std::invalid_argument);
  CHECK_THROWS_AS(Ucrl2(2, 2, 5, 1.0), std::invalid_argument);
}

TEST_CASE("Q-learning") {
  const EpisodicMdp mdp(two_state_model(), 5, 0);
  QLearnEps q(2, 2, 5, 0.0);
  RandomStream rng(12);
  CHECK(q.q(0, 0, 0) == 5.0);
  const auto ep = q.run_episode(mdp, rng);
  CHECK(ep.steps.size() == 5);
  // Greedy with optimistic ties: the first step takes action 0 and learns
  // its one-step target.
  CHECK(ep.steps[0].action == 0);
  CHECK(q.q(0, 0, 0) == doctest::Approx(0.3 + 5.0));
  CHECK(q.epsilon() == 0.0);

  // A fully random learner picks each action about half the time.
  QLearnEps wild(2, 2, 5, 1.0);
  long ones = 0, steps = 0;
  for (int e = 0; e < 2000; ++e) {
    for (const auto& st : wild.run_episode(mdp, rng).steps) {
      ones += st.action;
      ++steps;
    }
  }
  CHECK(std::abs(static_cast<double>(ones) / steps - 0.5) < 0.02);
}
