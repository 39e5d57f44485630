#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rebal/envs.hpp"
#include "rebal/linbandit.hpp"
#include "rebal/numerics.hpp"
#include "rebal/rng.hpp"

namespace rebal {

using Context = std::optional<Vector>;

// A black-box learner driven by a master. Only the invoked base sees the
// round's data; its state changes nowhere else.
class BaseLearner {
 public:
  virtual ~BaseLearner() = default;

  virtual std::string kind() const = 0;
  virtual bool contextual() const { return false; }
  virtual bool episodic() const { return false; }

  // Bandit interface.
  virtual std::size_t act(const Context& context, RandomStream& rng);
  virtual void update(const Context& context, std::size_t action, double reward);

  // Episodic interface: run one full episode and learn from it.
  virtual Episode run_episode(const EpisodicMdp& env, RandomStream& rng);

  // log det V_t for bases that keep a ridge state.
  virtual std::optional<double> logdet() const { return std::nullopt; }

  // Number of rounds (or episodes) this base has been invoked.
  virtual long internal_time() const = 0;

  virtual std::unique_ptr<BaseLearner> clone() const = 0;
};

using BasePtr = std::unique_ptr<BaseLearner>;

class FixedArm final : public BaseLearner {
 public:
  explicit FixedArm(std::size_t arm) : arm_(arm) {}
  std::string kind() const override { return "fixed_arm"; }
  std::size_t act(const Context&, RandomStream&) override { return arm_; }
  void update(const Context&, std::size_t, double) override { ++time_; }
  long internal_time() const override { return time_; }
  BasePtr clone() const override { return std::make_unique<FixedArm>(*this); }

 private:
  std::size_t arm_;
  long time_ = 0;
};

// UCB1: round-robin over unplayed arms, then mean + sqrt(2 log t / N).
class Ucb1 final : public BaseLearner {
 public:
  explicit Ucb1(std::size_t num_arms);
  std::string kind() const override { return "ucb1"; }
  std::size_t act(const Context&, RandomStream&) override;
  void update(const Context&, std::size_t action, double reward) override;
  long internal_time() const override { return time_; }
  BasePtr clone() const override { return std::make_unique<Ucb1>(*this); }

  double mean(std::size_t arm) const;
  long pulls(std::size_t arm) const { return counts_.at(arm); }

 private:
  std::vector<long> counts_;
  std::vector<double> sums_;
  long time_ = 0;
};

// epsilon-greedy with rate min{1, c / tau}, tau counting this base's own
// invocations from 1. Unplayed arms are greedy-preferred; ties go low.
class EpsGreedy final : public BaseLearner {
 public:
  EpsGreedy(std::size_t num_arms, double c);
  std::string kind() const override { return "eps_greedy"; }
  std::size_t act(const Context&, RandomStream& rng) override;
  void update(const Context&, std::size_t action, double reward) override;
  long internal_time() const override { return time_; }
  BasePtr clone() const override { return std::make_unique<EpsGreedy>(*this); }

  double exploration_probability(long tau) const;
  double c() const { return c_; }
  std::size_t greedy_arm() const;

 private:
  double c_;
  std::vector<long> counts_;
  std::vector<double> sums_;
  long time_ = 0;
};

// Maps (context, arm) to a feature vector.
class FeatureMap {
 public:
  // Context placed in the arm's block of a (num_arms * context_dim) vector.
  static FeatureMap disjoint(int context_dim, std::size_t num_arms, double scale = 1.0);
  // Context-free: arm a -> e_a.
  static FeatureMap one_hot(std::size_t num_arms);
  // Context-free: arm a -> actions[a].
  static FeatureMap fixed(std::vector<Vector> actions);

  Vector features(const Context& context, std::size_t arm) const;
  std::vector<Vector> action_set(const Context& context) const;

  int dim() const { return dim_; }
  std::size_t num_arms() const { return num_arms_; }
  bool contextual() const { return kind_ == Kind::kDisjoint; }
  double scale() const { return scale_; }

 private:
  enum class Kind { kDisjoint, kFixed };
  Kind kind_ = Kind::kFixed;
  int context_dim_ = 0;
  int dim_ = 0;
  std::size_t num_arms_ = 0;
  double scale_ = 1.0;
  std::vector<Vector> actions_;
};

struct LinearParams {
  double lambda = 1.0;
  double delta = 0.1;
  double sigma = 1.0;
  double s_bound = 1.0;
};

// OFUL: plays argmax x^T theta_hat + beta_t ||x||_{V^{-1}}.
class Oful final : public BaseLearner {
 public:
  Oful(FeatureMap features, LinearParams params);
  std::string kind() const override { return "oful"; }
  bool contextual() const override { return features_.contextual(); }
  std::size_t act(const Context& context, RandomStream&) override;
  void update(const Context& context, std::size_t action, double reward) override;
  std::optional<double> logdet() const override { return ridge_.logdet(); }
  long internal_time() const override { return ridge_.count(); }
  BasePtr clone() const override { return std::make_unique<Oful>(*this); }

  const RidgeState& ridge() const { return ridge_; }
  const FeatureMap& features() const { return features_; }

 private:
  FeatureMap features_;
  LinearParams params_;
  RidgeState ridge_;
};

// The linear regret-balancing bandit exposed as a base.
class LinearBalancingBase final : public BaseLearner {
 public:
  LinearBalancingBase(FeatureMap features, LinearParams params);
  std::string kind() const override { return "linear_rb"; }
  bool contextual() const override { return features_.contextual(); }
  std::size_t act(const Context& context, RandomStream&) override;
  void update(const Context& context, std::size_t action, double reward) override;
  std::optional<double> logdet() const override { return algo_.ridge().logdet(); }
  long internal_time() const override { return algo_.ridge().count(); }
  BasePtr clone() const override { return std::make_unique<LinearBalancingBase>(*this); }

  const LinearRegretBalancer& algorithm() const { return algo_; }

 private:
  FeatureMap features_;
  LinearRegretBalancer algo_;
};

// Lower-bound construction bases for the three-armed world. Plays a3
// (arm 2) with probability T^(rate - 1) and a2 (arm 1) otherwise. With a
// switch time t0, plays a1 (arm 0) once its internal time exceeds t0.
class SyntheticRegretBase final : public BaseLearner {
 public:
  SyntheticRegretBase(double rate, long horizon, std::optional<long> switch_time = std::nullopt);
  std::string kind() const override {
    return switch_time_ ? "synthetic_switching" : "synthetic_const_regret";
  }
  std::size_t act(const Context&, RandomStream& rng) override;
  void update(const Context&, std::size_t, double) override { ++time_; }
  long internal_time() const override { return time_; }
  BasePtr clone() const override { return std::make_unique<SyntheticRegretBase>(*this); }

  double exploration_probability() const { return explore_p_; }
  double rate() const { return rate_; }
  long horizon() const { return horizon_; }
  std::optional<long> switch_time() const { return switch_time_; }

  // Exact expected regret of running this base alone for `rounds` rounds.
  double expected_regret_alone(const LowerBoundWorld& world, long rounds) const;

 private:
  double rate_;
  long horizon_;
  std::optional<long> switch_time_;
  double explore_p_;
  long time_ = 0;
};

// Episodic UCRL2: optimistic planning by extended value iteration over
// L1 transition balls of radius sqrt(14 S log(2 A t / delta) / max(1, n)).
class Ucrl2 final : public BaseLearner {
 public:
  Ucrl2(int num_states, int num_actions, int horizon, double delta);
  std::string kind() const override { return "ucrl2"; }
  bool episodic() const override { return true; }
  Episode run_episode(const EpisodicMdp& env, RandomStream& rng) override;
  long internal_time() const override { return episodes_; }
  BasePtr clone() const override { return std::make_unique<Ucrl2>(*this); }

  // Plans with the current statistics; returns the optimistic value of
  // the start state and fills the greedy policy.
  double plan(int start_state);
  double last_optimistic_value() const { return last_optimistic_value_; }

 private:
  std::size_t sa(int s, int a) const { return static_cast<std::size_t>(s) * A_ + a; }

  int S_, A_, H_;
  double delta_;
  std::vector<long> visits_;
  std::vector<long> transition_counts_;
  std::vector<double> reward_sums_;
  long steps_ = 0;
  long episodes_ = 0;
  std::vector<std::vector<int>> policy_;
  double last_optimistic_value_ = 0.0;
};

// Posterior sampling: Dirichlet(1, ..., 1) transitions, Beta(1, 1) rewards
// with fractional Bernoulli updates, one sample per episode.
class Psrl final : public BaseLearner {
 public:
  Psrl(int num_states, int num_actions, int horizon);
  std::string kind() const override { return "psrl"; }
  bool episodic() const override { return true; }
  Episode run_episode(const EpisodicMdp& env, RandomStream& rng) override;
  long internal_time() const override { return episodes_; }
  BasePtr clone() const override { return std::make_unique<Psrl>(*this); }

  TabularModel sample_model(RandomStream& rng) const;

 private:
  std::size_t sa(int s, int a) const { return static_cast<std::size_t>(s) * A_ + a; }

  int S_, A_, H_;
  std::vector<double> dirichlet_;  // (s*A + a)*S + s'
  std::vector<double> beta_alpha_;
  std::vector<double> beta_beta_;
  long episodes_ = 0;
};

// Step-indexed tabular Q-learning with epsilon-greedy exploration,
// step size 1/visits and optimistic initialization Q = H.
class QLearnEps final : public BaseLearner {
 public:
  QLearnEps(int num_states, int num_actions, int horizon, double epsilon);
  std::string kind() const override { return "qlearn_eps"; }
  bool episodic() const override { return true; }
  Episode run_episode(const EpisodicMdp& env, RandomStream& rng) override;
  long internal_time() const override { return episodes_; }
  BasePtr clone() const override { return std::make_unique<QLearnEps>(*this); }

  double q(int h, int s, int a) const { return q_[idx(h, s, a)]; }
  double epsilon() const { return epsilon_; }

 private:
  std::size_t idx(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * S_ + s) * A_ + a;
  }
  int greedy(int h, int s) const;

  int S_, A_, H_;
  double epsilon_;
  std::vector<double> q_;
  std::vector<long> visits_;
  long episodes_ = 0;
};

}  // namespace rebal
