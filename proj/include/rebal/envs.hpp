#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "rebal/numerics.hpp"
#include "rebal/rng.hpp"

namespace rebal {

enum class NoiseKind { kBernoulli, kGaussian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kBernoulli;
  double sigma = 0.0;

  static NoiseModel bernoulli() { return {NoiseKind::kBernoulli, 0.0}; }
  static NoiseModel gaussian(double sigma) { return {NoiseKind::kGaussian, sigma}; }
};

// K-armed stochastic bandit.
class MabEnv {
 public:
  MabEnv(std::vector<double> means, NoiseModel noise);

  double pull(std::size_t arm, RandomStream& rng) const;

  std::size_t num_arms() const { return means_.size(); }
  double mean(std::size_t arm) const;
  double optimal_mean() const { return optimal_; }
  const std::vector<double>& means() const { return means_; }
  const NoiseModel& noise() const { return noise_; }

 private:
  std::vector<double> means_;
  NoiseModel noise_;
  double optimal_;
};

// Context distributions always force the first coordinate to 1.
enum class ContextDist { kUniformCube, kStandardNormal };
enum class RewardMode { kLinear, kConstantMean };

// One round of a contextual environment: the context and the noiseless mean
// of every arm under it.
struct ContextRound {
  Vector context;
  std::vector<double> means;
  double optimal_mean = 0.0;
  double noise_sigma = 0.0;

  double reward(std::size_t arm, RandomStream& rng) const;
};

// Linear contextual bandit with one parameter vector per arm, or a
// context-independent mean per arm (contexts are still drawn and shown).
class LinCtxEnv {
 public:
  static LinCtxEnv linear(std::vector<Vector> arm_params, ContextDist dist,
                          double noise_sigma);
  static LinCtxEnv constant_mean(int dim, std::vector<double> means,
                                 ContextDist dist, double noise_sigma);

  ContextRound step(RandomStream& rng) const;

  int dim() const { return dim_; }
  std::size_t num_arms() const { return num_arms_; }
  ContextDist context_dist() const { return dist_; }
  RewardMode reward_mode() const { return mode_; }
  double noise_sigma() const { return noise_sigma_; }
  const std::vector<Vector>& arm_params() const { return arm_params_; }
  const std::vector<double>& constant_means() const { return means_; }

 private:
  LinCtxEnv() = default;
  Vector sample_context(RandomStream& rng) const;

  int dim_ = 0;
  std::size_t num_arms_ = 0;
  ContextDist dist_ = ContextDist::kUniformCube;
  RewardMode mode_ = RewardMode::kLinear;
  double noise_sigma_ = 0.0;
  std::vector<Vector> arm_params_;
  std::vector<double> means_;
};

// Tabular model with dense transition rows P[(s*A + a)*S + s'] and
// deterministic rewards r[s*A + a].
struct TabularModel {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> transitions;
  std::vector<double> rewards;

  double p(int s, int a, int next) const {
    return transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + next];
  }
  double r(int s, int a) const {
    return rewards[static_cast<std::size_t>(s) * num_actions + a];
  }
};

// Non-stationary finite-horizon plan: value[h][s] for h in [0, H] (value[H] = 0)
// and greedy policy[h][s] for h in [0, H). Ties go to the lowest action.
struct FinitePlan {
  std::vector<std::vector<double>> value;
  std::vector<std::vector<int>> policy;
};

FinitePlan backward_induction(const TabularModel& model, int horizon);

// Step-indexed policy: (step h, state s) -> action.
using EpisodePolicy = std::function<int(int, int)>;

struct Transition {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = 0;
};

struct Episode {
  std::vector<Transition> steps;
  double total_reward = 0.0;
};

class EpisodicMdp {
 public:
  EpisodicMdp(TabularModel model, int horizon, int start_state);

  // Six-state chain; see README for the parameters.
  static EpisodicMdp river_swim(int horizon = 20);

  Episode run_episode(const EpisodePolicy& policy, RandomStream& rng) const;
  int sample_next(int s, int a, RandomStream& rng) const;

  // Exact expected return of a deterministic step-indexed policy.
  double policy_value(const EpisodePolicy& policy) const;

  int num_states() const { return model_.num_states; }
  int num_actions() const { return model_.num_actions; }
  int horizon() const { return horizon_; }
  int start_state() const { return start_state_; }
  const TabularModel& model() const { return model_; }
  double optimal_value() const { return optimal_value_; }

 private:
  TabularModel model_;
  int horizon_;
  int start_state_;
  double optimal_value_;
};

enum class LowerBoundVariant { kE1, kE2 };

// Deterministic three-armed world. Arms are 0-based here: arm 0 is a1,
// arm 1 is a2, arm 2 is a3. E1 rewards {1, 1, 0}; E2 rewards {1 + gap, 1, 0}
// with gap = T^(x - 1 + (y - x) / 2).
class LowerBoundWorld {
 public:
  LowerBoundWorld(LowerBoundVariant variant, long horizon, double x, double y);

  double reward(std::size_t arm) const;
  double regret(std::size_t arm) const { return optimal_reward() - reward(arm); }
  double optimal_reward() const;
  std::size_t num_arms() const { return 3; }

  LowerBoundVariant variant() const { return variant_; }
  long horizon() const { return horizon_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double delta_gap() const { return gap_; }

 private:
  LowerBoundVariant variant_;
  long horizon_;
  double x_;
  double y_;
  double gap_;
};

// Uniform view of the three bandit environments used by the masters.
using BanditEnv = std::variant<MabEnv, LinCtxEnv, LowerBoundWorld>;

struct BanditRound {
  std::optional<Vector> context;
  std::vector<double> means;
  double optimal_mean = 0.0;
};

BanditRound begin_round(const BanditEnv& env, RandomStream& rng);
double sample_reward(const BanditEnv& env, const BanditRound& round,
                     std::size_t arm, RandomStream& rng);
std::size_t num_arms(const BanditEnv& env);
bool has_direct_arm_access(const BanditEnv& env);

}  // namespace rebal
