#include "rebal/linbandit.hpp"

#include <cmath>
#include <stdexcept>

namespace rebal {

double ucb_index(const RidgeState& ridge, const Vector& x, double beta) {
  return x.dot(ridge.theta_hat()) + beta * ridge.weighted_norm(x);
}

std::size_t ucb_argmax(const RidgeState& ridge, std::span<const Vector> actions, double beta) {
  if (actions.empty()) throw std::invalid_argument("ucb_argmax: empty action set");
  std::size_t best = 0;
  double best_val = ucb_index(ridge, actions[0], beta);
  for (std::size_t i = 1; i < actions.size(); ++i) {
    const double v = ucb_index(ridge, actions[i], beta);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

void validate_action_set(std::span<const Vector> actions, int dim) {
  if (actions.empty()) throw std::invalid_argument("linear bandit: empty action set");
  for (const auto& x : actions) {
    if (x.size() != dim) throw std::invalid_argument("linear bandit: action dimension mismatch");
    if (!x.allFinite()) throw std::invalid_argument("linear bandit: non-finite action");
    const double n = x.norm();
    if (n == 0.0) throw std::invalid_argument("linear bandit: zero-norm action");
    if (n > 1.0 + 1e-9) throw std::invalid_argument("linear bandit: action norm exceeds 1");
  }
}

LinearRegretBalancer::LinearRegretBalancer(int dim, double lambda, double delta,
                                           double sigma, double s_bound)
    : ridge_(dim, lambda), delta_(delta), sigma_(sigma), s_bound_(s_bound) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("linear bandit: delta must lie in (0, 1)");
  if (!(sigma >= 0.0)) throw std::invalid_argument("linear bandit: sigma must be >= 0");
  if (!(s_bound >= 0.0)) throw std::invalid_argument("linear bandit: s_bound must be >= 0");
}

LinSelection LinearRegretBalancer::select(std::span<const Vector> actions) {
  validate_action_set(actions, ridge_.dim());
  LinSelection sel;
  sel.beta = ridge_.beta_radius(delta_, sigma_, s_bound_);
  sel.optimistic = ucb_argmax(ridge_, actions, sel.beta);
  sel.b_t = ucb_index(ridge_, actions[sel.optimistic], sel.beta);
  sel.g_hat.resize(actions.size());
  const Vector& theta = ridge_.theta_hat();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const double w = ridge_.weighted_norm(actions[i]);
    sel.g_hat[i] = (sel.b_t - actions[i].dot(theta)) / (w * w);
    if (sel.g_hat[i] < sel.g_hat[sel.chosen]) sel.chosen = i;
  }
  last_b_t_ = sel.b_t;
  last_y_ = actions[sel.optimistic];
  return sel;
}

void LinearRegretBalancer::update(const Vector& x, double reward) {
  if (!std::isfinite(reward)) throw std::invalid_argument("linear bandit: non-finite reward");
  ridge_.update(x, reward);
}

}  // namespace rebal
