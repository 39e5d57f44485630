#include "rebal/envs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rebal {

namespace {

void check_arm(std::size_t arm, std::size_t n) {
  if (arm >= n) {
    throw std::out_of_range("invalid arm index " + std::to_string(arm) + " (" +
                            std::to_string(n) + " arms)");
  }
}

}  // namespace

MabEnv::MabEnv(std::vector<double> means, NoiseModel noise)
    : means_(std::move(means)), noise_(noise) {
  if (means_.empty()) throw std::invalid_argument("MabEnv: need at least one arm");
  if (noise_.kind == NoiseKind::kBernoulli) {
    for (double m : means_) {
      if (!(m >= 0.0 && m <= 1.0)) {
        throw std::invalid_argument("MabEnv: bernoulli means must lie in [0, 1]");
      }
    }
  } else if (!(noise_.sigma >= 0.0)) {
    throw std::invalid_argument("MabEnv: gaussian sigma must be >= 0");
  }
  optimal_ = *std::max_element(means_.begin(), means_.end());
}

double MabEnv::mean(std::size_t arm) const {
  check_arm(arm, means_.size());
  return means_[arm];
}

double MabEnv::pull(std::size_t arm, RandomStream& rng) const {
  check_arm(arm, means_.size());
  if (noise_.kind == NoiseKind::kBernoulli) {
    return rng.bernoulli(means_[arm]) ? 1.0 : 0.0;
  }
  if (noise_.sigma == 0.0) return means_[arm];
  return means_[arm] + noise_.sigma * rng.normal();
}

double ContextRound::reward(std::size_t arm, RandomStream& rng) const {
  check_arm(arm, means.size());
  if (noise_sigma == 0.0) return means[arm];
  return means[arm] + noise_sigma * rng.normal();
}

LinCtxEnv LinCtxEnv::linear(std::vector<Vector> arm_params, ContextDist dist,
                            double noise_sigma) {
  if (arm_params.empty()) throw std::invalid_argument("LinCtxEnv: need at least one arm");
  const auto d = arm_params.front().size();
  if (d < 1) throw std::invalid_argument("LinCtxEnv: dimension must be >= 1");
  for (const auto& theta : arm_params) {
    if (theta.size() != d) {
      throw std::invalid_argument("LinCtxEnv: arm parameter dimensions differ");
    }
  }
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("LinCtxEnv: noise_sigma must be >= 0");
  LinCtxEnv env;
  env.dim_ = static_cast<int>(d);
  env.num_arms_ = arm_params.size();
  env.dist_ = dist;
  env.mode_ = RewardMode::kLinear;
  env.noise_sigma_ = noise_sigma;
  env.arm_params_ = std::move(arm_params);
  return env;
}

LinCtxEnv LinCtxEnv::constant_mean(int dim, std::vector<double> means,
                                   ContextDist dist, double noise_sigma) {
  if (dim < 1) throw std::invalid_argument("LinCtxEnv: dimension must be >= 1");
  if (means.empty()) throw std::invalid_argument("LinCtxEnv: need at least one arm");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("LinCtxEnv: noise_sigma must be >= 0");
  LinCtxEnv env;
  env.dim_ = dim;
  env.num_arms_ = means.size();
  env.dist_ = dist;
  env.mode_ = RewardMode::kConstantMean;
  env.noise_sigma_ = noise_sigma;
  env.means_ = std::move(means);
  return env;
}

Vector LinCtxEnv::sample_context(RandomStream& rng) const {
  Vector s(dim_);
  s[0] = 1.0;
  for (int k = 1; k < dim_; ++k) {
    s[k] = dist_ == ContextDist::kUniformCube ? rng.uniform() : rng.normal();
  }
  return s;
}

ContextRound LinCtxEnv::step(RandomStream& rng) const {
  ContextRound round;
  round.context = sample_context(rng);
  round.noise_sigma = noise_sigma_;
  round.means.resize(num_arms_);
  for (std::size_t a = 0; a < num_arms_; ++a) {
    round.means[a] = mode_ == RewardMode::kLinear ? arm_params_[a].dot(round.context)
                                                  : means_[a];
  }
  round.optimal_mean = *std::max_element(round.means.begin(), round.means.end());
  return round;
}

FinitePlan backward_induction(const TabularModel& model, int horizon) {
  const int S = model.num_states;
  const int A = model.num_actions;
  FinitePlan plan;
  plan.value.assign(horizon + 1, std::vector<double>(S, 0.0));
  plan.policy.assign(horizon, std::vector<int>(S, 0));
  for (int h = horizon - 1; h >= 0; --h) {
    const auto& next = plan.value[h + 1];
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        double q = model.r(s, a);
        for (int s2 = 0; s2 < S; ++s2) q += model.p(s, a, s2) * next[s2];
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      plan.value[h][s] = best;
      plan.policy[h][s] = best_a;
    }
  }
  return plan;
}

EpisodicMdp::EpisodicMdp(TabularModel model, int horizon, int start_state)
    : model_(std::move(model)), horizon_(horizon), start_state_(start_state) {
  const int S = model_.num_states;
  const int A = model_.num_actions;
  if (S < 1 || A < 1) throw std::invalid_argument("EpisodicMdp: empty state or action space");
  if (horizon_ < 1) throw std::invalid_argument("EpisodicMdp: horizon must be >= 1");
  if (start_state_ < 0 || start_state_ >= S) {
    throw std::invalid_argument("EpisodicMdp: start state out of range");
  }
  const auto rows = static_cast<std::size_t>(S) * A;
  if (model_.transitions.size() != rows * S || model_.rewards.size() != rows) {
    throw std::invalid_argument("EpisodicMdp: table sizes do not match (S, A)");
  }
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double sum = 0.0;
      for (int s2 = 0; s2 < S; ++s2) {
        const double p = model_.p(s, a, s2);
        if (p < 0.0) throw std::invalid_argument("EpisodicMdp: negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("EpisodicMdp: transition row does not sum to 1");
      }
      const double r = model_.r(s, a);
      if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("EpisodicMdp: rewards must lie in [0, 1]");
      }
    }
  }
  optimal_value_ = backward_induction(model_, horizon_).value[0][start_state_];
}

EpisodicMdp EpisodicMdp::river_swim(int horizon) {
  constexpr int S = 6;
  constexpr int A = 2;
  constexpr int kLeft = 0;
  constexpr int kRight = 1;
  TabularModel m;
  m.num_states = S;
  m.num_actions = A;
  m.transitions.assign(static_cast<std::size_t>(S) * A * S, 0.0);
  m.rewards.assign(static_cast<std::size_t>(S) * A, 0.0);
  auto set = [&](int s, int a, int s2, double p) {
    m.transitions[(static_cast<std::size_t>(s) * A + a) * S + s2] = p;
  };
  for (int s = 0; s < S; ++s) {
    set(s, kLeft, std::max(s - 1, 0), 1.0);
    if (s == 0) {
      set(s, kRight, 0, 0.4);
      set(s, kRight, 1, 0.6);
    } else if (s == S - 1) {
      set(s, kRight, S - 1, 0.6);
      set(s, kRight, S - 2, 0.4);
    } else {
      set(s, kRight, s + 1, 0.35);
      set(s, kRight, s, 0.6);
      set(s, kRight, s - 1, 0.05);
    }
  }
  m.rewards[0 * A + kLeft] = 5.0 / 1000.0;
  m.rewards[(S - 1) * A + kRight] = 1.0;
  return EpisodicMdp(std::move(m), horizon, 1);
}

int EpisodicMdp::sample_next(int s, int a, RandomStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = s;
  for (int s2 = 0; s2 < model_.num_states; ++s2) {
    const double p = model_.p(s, a, s2);
    if (p <= 0.0) continue;
    acc += p;
    last_positive = s2;
    if (u < acc) return s2;
  }
  return last_positive;
}

Episode EpisodicMdp::run_episode(const EpisodePolicy& policy, RandomStream& rng) const {
  Episode ep;
  ep.steps.reserve(horizon_);
  int s = start_state_;
  for (int h = 0; h < horizon_; ++h) {
    const int a = policy(h, s);
    if (a < 0 || a >= model_.num_actions) {
      throw std::out_of_range("EpisodicMdp: policy returned an invalid action");
    }
    const double r = model_.r(s, a);
    const int next = sample_next(s, a, rng);
    ep.steps.push_back({s, a, r, next});
    ep.total_reward += r;
    s = next;
  }
  return ep;
}

double EpisodicMdp::policy_value(const EpisodePolicy& policy) const {
  const int S = model_.num_states;
  std::vector<double> next(S, 0.0), cur(S, 0.0);
  for (int h = horizon_ - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      const int a = policy(h, s);
      double v = model_.r(s, a);
      for (int s2 = 0; s2 < S; ++s2) v += model_.p(s, a, s2) * next[s2];
      cur[s] = v;
    }
    std::swap(cur, next);
  }
  return next[start_state_];
}

LowerBoundWorld::LowerBoundWorld(LowerBoundVariant variant, long horizon, double x, double y)
    : variant_(variant), horizon_(horizon), x_(x), y_(y) {
  if (horizon_ < 1) throw std::invalid_argument("LowerBoundWorld: horizon must be >= 1");
  if (!(0.0 < x_ && x_ < y_ && y_ <= 1.0)) {
    throw std::invalid_argument("LowerBoundWorld: need 0 < x < y <= 1");
  }
  gap_ = std::pow(static_cast<double>(horizon_), x_ - 1.0 + (y_ - x_) / 2.0);
}

double LowerBoundWorld::reward(std::size_t arm) const {
  check_arm(arm, 3);
  switch (arm) {
    case 0:
      return variant_ == LowerBoundVariant::kE1 ? 1.0 : 1.0 + gap_;
    case 1:
      return 1.0;
    default:
      return 0.0;
  }
}

double LowerBoundWorld::optimal_reward() const { return reward(0); }

BanditRound begin_round(const BanditEnv& env, RandomStream& rng) {
  BanditRound round;
  if (const auto* mab = std::get_if<MabEnv>(&env)) {
    round.means = mab->means();
    round.optimal_mean = mab->optimal_mean();
  } else if (const auto* lin = std::get_if<LinCtxEnv>(&env)) {
    auto step = lin->step(rng);
    round.context = std::move(step.context);
    round.means = std::move(step.means);
    round.optimal_mean = step.optimal_mean;
  } else {
    const auto& world = std::get<LowerBoundWorld>(env);
    round.means = {world.reward(0), world.reward(1), world.reward(2)};
    round.optimal_mean = world.optimal_reward();
  }
  return round;
}

double sample_reward(const BanditEnv& env, const BanditRound& round,
                     std::size_t arm, RandomStream& rng) {
  check_arm(arm, round.means.size());
  if (const auto* mab = std::get_if<MabEnv>(&env)) return mab->pull(arm, rng);
  if (const auto* lin = std::get_if<LinCtxEnv>(&env)) {
    if (lin->noise_sigma() == 0.0) return round.means[arm];
    return round.means[arm] + lin->noise_sigma() * rng.normal();
  }
  return round.means[arm];
}

std::size_t num_arms(const BanditEnv& env) {
  return std::visit([](const auto& e) { return e.num_arms(); }, env);
}

bool has_direct_arm_access(const BanditEnv& env) {
  return !std::holds_alternative<LinCtxEnv>(env);
}

}  // namespace rebal
