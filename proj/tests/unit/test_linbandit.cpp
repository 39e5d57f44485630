#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rebal/linbandit.hpp"
#include "rebal/rng.hpp"

using namespace rebal;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<int>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

// Straight-line re-evaluation from an explicit inverse.
struct Brute {
  std::size_t chosen, optimistic;
  double b_t;
  std::vector<double> g;
};

Brute brute(const RidgeState& r, const std::vector<Vector>& actions, double beta) {
  const Matrix inv = r.cov().dense().inverse();
  const Vector theta = inv * r.bvec();
  Brute out{0, 0, -1e300, {}};
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const double w = std::sqrt(actions[i].dot(inv * actions[i]));
    const double idx = actions[i].dot(theta) + beta * w;
    if (idx > out.b_t) {
      out.b_t = idx;
      out.optimistic = i;
    }
  }
  double best = 1e300;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const double w2 = actions[i].dot(inv * actions[i]);
    const double g = (out.b_t - actions[i].dot(theta)) / w2;
    out.g.push_back(g);
    if (g < best) {
      best = g;
      out.chosen = i;
    }
  }
  return out;
}

Vector random_ball(RandomStream& rng, int d) {
  Vector x(d);
  for (int k = 0; k < d; ++k) x[k] = rng.normal();
  const double n = x.norm();
  return x * (rng.uniform() * 0.95 + 0.05) / n;
}

}  // namespace

TEST_CASE("one-dimensional selection against the brute-force oracle") {
  LinearRegretBalancer lrb(1, 1.0, 0.1, 1.0, 1.0);
  lrb.update(vec({1.0}), 1.0);
  const std::vector<Vector> actions{vec({1.0}), vec({0.5})};
  const auto sel = lrb.select(actions);
  const auto ref = brute(lrb.ridge(), actions, sel.beta);
  CHECK(sel.beta == doctest::Approx(lrb.ridge().beta_radius(0.1, 1.0, 1.0)));
  CHECK(sel.optimistic == 0);
  CHECK(sel.chosen == 0);
  CHECK(sel.b_t == doctest::Approx(0.5 + sel.beta / std::sqrt(2.0)));
  CHECK(sel.g_hat[0] == doctest::Approx(std::sqrt(2.0) * sel.beta));
  CHECK(sel.g_hat[1] == doctest::Approx(ref.g[1]));
  CHECK(lrb.last_b_t() == sel.b_t);
}

TEST_CASE("singleton and tied action sets") {
  LinearRegretBalancer lrb(2, 1.0, 0.1, 1.0, 1.0);
  const std::vector<Vector> one{vec({0.6, 0.8})};
  const auto s1 = lrb.select(one);
  CHECK(s1.chosen == 0);
  CHECK(s1.optimistic == 0);
  const std::vector<Vector> tied{vec({0.0, 1.0}), vec({0.0, 1.0}), vec({0.0, 1.0})};
  const auto s2 = lrb.select(tied);
  CHECK(s2.chosen == 0);
  CHECK(s2.optimistic == 0);
  const std::vector<Vector> basis{vec({1.0, 0.0}), vec({0.0, 1.0})};
  CHECK(lrb.select(basis).chosen == 0);
}

TEST_CASE("invalid inputs") {
  LinearRegretBalancer lrb(2, 1.0, 0.1, 1.0, 1.0);
  CHECK_THROWS_AS(lrb.select(std::vector<Vector>{}), std::invalid_argument);
  CHECK_THROWS_AS(lrb.select(std::vector<Vector>{vec({0.0, 0.0})}), std::invalid_argument);
  CHECK_THROWS_AS(lrb.select(std::vector<Vector>{vec({1.0, 1.0})}), std::invalid_argument);
  CHECK_THROWS_AS(lrb.select(std::vector<Vector>{vec({1.0})}), std::invalid_argument);
  CHECK_NOTHROW(lrb.select(std::vector<Vector>{vec({1.0 + 5e-10, 0.0})}));
  CHECK_THROWS_AS(lrb.update(vec({1.0, 0.0}), std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(LinearRegretBalancer(2, 1.0, 0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LinearRegretBalancer(2, 1.0, 0.1, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ucb_argmax(RidgeState(2, 1.0), std::vector<Vector>{}, 1.0), std::invalid_argument);
}

TEST_CASE("selection matches the oracle on random states") {
  RandomStream rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_index(5));
    LinearRegretBalancer lrb(d, 1.0, 0.1, 0.5, 1.0);
    const int steps = static_cast<int>(rng.uniform_index(60));
    for (int s = 0; s < steps; ++s) lrb.update(random_ball(rng, d), rng.normal());
    std::vector<Vector> actions;
    const int k = 1 + static_cast<int>(rng.uniform_index(8));
    for (int i = 0; i < k; ++i) actions.push_back(random_ball(rng, d));
    const auto sel = lrb.select(actions);
    const auto ref = brute(lrb.ridge(), actions, sel.beta);
    CHECK(sel.optimistic == ref.optimistic);
    CHECK(sel.chosen == ref.chosen);
    CHECK(sel.b_t == doctest::Approx(ref.b_t).epsilon(1e-9));
    for (const auto& x : actions) CHECK(sel.b_t >= ucb_index(lrb.ridge(), x, sel.beta) - 1e-12);
    CHECK(ucb_argmax(lrb.ridge(), actions, sel.beta) == sel.optimistic);
    // y_t has zero slack against its own index, so its empirical regret is beta / ||y||.
    const double wy = lrb.ridge().weighted_norm(actions[sel.optimistic]);
    CHECK(sel.g_hat[sel.optimistic] == doctest::Approx(sel.beta / wy).epsilon(1e-9));
  }
}

TEST_CASE("instantaneous regret obeys the surrogate bound on confident rounds") {
  const Vector theta = vec({0.5, -0.3, 0.4});
  const std::vector<Vector> actions{vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1}),
                                    vec({0.6, 0.0, 0.8}), vec({0.0, 0.6, -0.8})};
  double best = -1e300;
  for (const auto& x : actions) best = std::max(best, x.dot(theta));
  long checked = 0;
  for (int seed = 0; seed < 20; ++seed) {
    RandomStream rng(1000 + seed);
    LinearRegretBalancer lrb(3, 1.0, 0.1, 0.5, 1.0);
    for (int t = 0; t < 400; ++t) {
      const auto sel = lrb.select(actions);
      bool confident = true;
      for (const auto& x : actions) {
        confident = confident && std::abs(x.dot(lrb.ridge().theta_hat() - theta)) <=
                                     sel.beta * lrb.ridge().weighted_norm(x);
      }
      const Vector& x = actions[sel.chosen];
      if (confident) {
        const double wx = lrb.ridge().weighted_norm(x);
        const double wy = lrb.ridge().weighted_norm(actions[sel.optimistic]);
        CHECK(best - x.dot(theta) <= sel.beta * wx + sel.beta * wx * wx / wy + 1e-12);
        ++checked;
      }
      lrb.update(x, x.dot(theta) + 0.5 * rng.normal());
    }
  }
  CHECK(checked > 4000);
}
