#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rebal/numerics.hpp"

namespace rebal {

// x^T theta_hat + beta * ||x||_{V^{-1}}
double ucb_index(const RidgeState& ridge, const Vector& x, double beta);

// Lowest-index argmax of ucb_index over a finite action set.
std::size_t ucb_argmax(const RidgeState& ridge, std::span<const Vector> actions, double beta);

struct LinSelection {
  std::size_t chosen = 0;      // x_t
  std::size_t optimistic = 0;  // y_t
  double b_t = 0.0;
  double beta = 0.0;
  std::vector<double> g_hat;   // empirical regret of every action
};

// Regret balancing over the actions of a linear bandit. The optimistic
// action y_t fixes b_t; the played action minimizes
//   (b_t - x^T theta_hat) / ||x||^2_{V^{-1}}.
class LinearRegretBalancer {
 public:
  LinearRegretBalancer(int dim, double lambda, double delta, double sigma, double s_bound);

  // Actions must be nonzero with Euclidean norm <= 1 (+1e-9).
  LinSelection select(std::span<const Vector> actions);
  void update(const Vector& x, double reward);

  const RidgeState& ridge() const { return ridge_; }
  double delta() const { return delta_; }
  double sigma() const { return sigma_; }
  double s_bound() const { return s_bound_; }
  double last_b_t() const { return last_b_t_; }
  const Vector& last_y() const { return last_y_; }

 private:
  RidgeState ridge_;
  double delta_;
  double sigma_;
  double s_bound_;
  double last_b_t_ = 0.0;
  Vector last_y_;
};

void validate_action_set(std::span<const Vector> actions, int dim);

}  // namespace rebal
