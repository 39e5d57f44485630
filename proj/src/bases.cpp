#include "rebal/bases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rebal {

std::size_t BaseLearner::act(const Context&, RandomStream&) {
  throw std::logic_error(kind() + ": episodic base invoked as a bandit base");
}

void BaseLearner::update(const Context&, std::size_t, double) {
  throw std::logic_error(kind() + ": episodic base invoked as a bandit base");
}

Episode BaseLearner::run_episode(const EpisodicMdp&, RandomStream&) {
  throw std::logic_error(kind() + ": bandit base invoked episodically");
}

namespace {

void require_arm(std::size_t arm, std::size_t n, const char* who) {
  if (arm >= n) throw std::out_of_range(std::string(who) + ": action out of range");
}

const Vector& require_context(const Context& context, const char* who) {
  if (!context) throw std::invalid_argument(std::string(who) + ": contextual base invoked without context");
  return *context;
}

}  // namespace

// ---------------------------------------------------------------- UCB1

Ucb1::Ucb1(std::size_t num_arms) : counts_(num_arms, 0), sums_(num_arms, 0.0) {
  if (num_arms == 0) throw std::invalid_argument("ucb1: need at least one arm");
}

std::size_t Ucb1::act(const Context&, RandomStream&) {
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    if (counts_[a] == 0) return a;
  }
  const double log_t = std::log(static_cast<double>(time_));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    const double n = static_cast<double>(counts_[a]);
    const double index = sums_[a] / n + std::sqrt(2.0 * log_t / n);
    if (index > best_index) {
      best_index = index;
      best = a;
    }
  }
  return best;
}

void Ucb1::update(const Context&, std::size_t action, double reward) {
  require_arm(action, counts_.size(), "ucb1");
  ++counts_[action];
  sums_[action] += reward;
  ++time_;
}

double Ucb1::mean(std::size_t arm) const {
  require_arm(arm, counts_.size(), "ucb1");
  return counts_[arm] == 0 ? 0.0 : sums_[arm] / static_cast<double>(counts_[arm]);
}

// ---------------------------------------------------------- eps-greedy

EpsGreedy::EpsGreedy(std::size_t num_arms, double c)
    : c_(c), counts_(num_arms, 0), sums_(num_arms, 0.0) {
  if (num_arms == 0) throw std::invalid_argument("eps_greedy: need at least one arm");
  if (!(c > 0.0)) throw std::invalid_argument("eps_greedy: c must be > 0");
}

double EpsGreedy::exploration_probability(long tau) const {
  if (tau < 1) throw std::invalid_argument("eps_greedy: internal time starts at 1");
  return std::min(1.0, c_ / static_cast<double>(tau));
}

std::size_t EpsGreedy::greedy_arm() const {
  std::size_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    const double m = counts_[a] == 0 ? std::numeric_limits<double>::infinity()
                                     : sums_[a] / static_cast<double>(counts_[a]);
    if (m > best_mean) {
      best_mean = m;
      best = a;
    }
  }
  return best;
}

std::size_t EpsGreedy::act(const Context&, RandomStream& rng) {
  if (rng.uniform() < exploration_probability(time_ + 1)) {
    return rng.uniform_index(counts_.size());
  }
  return greedy_arm();
}

void EpsGreedy::update(const Context&, std::size_t action, double reward) {
  require_arm(action, counts_.size(), "eps_greedy");
  ++counts_[action];
  sums_[action] += reward;
  ++time_;
}

// --------------------------------------------------------- feature maps

FeatureMap FeatureMap::disjoint(int context_dim, std::size_t num_arms, double scale) {
  if (context_dim < 1 || num_arms == 0) throw std::invalid_argument("FeatureMap: empty dimensions");
  if (!(scale > 0.0)) throw std::invalid_argument("FeatureMap: scale must be > 0");
  FeatureMap f;
  f.kind_ = Kind::kDisjoint;
  f.context_dim_ = context_dim;
  f.num_arms_ = num_arms;
  f.dim_ = context_dim * static_cast<int>(num_arms);
  f.scale_ = scale;
  return f;
}

FeatureMap FeatureMap::one_hot(std::size_t num_arms) {
  std::vector<Vector> actions;
  for (std::size_t a = 0; a < num_arms; ++a) {
    actions.push_back(Vector::Unit(static_cast<Eigen::Index>(num_arms), static_cast<Eigen::Index>(a)));
  }
  return fixed(std::move(actions));
}

FeatureMap FeatureMap::fixed(std::vector<Vector> actions) {
  if (actions.empty()) throw std::invalid_argument("FeatureMap: empty action set");
  FeatureMap f;
  f.kind_ = Kind::kFixed;
  f.dim_ = static_cast<int>(actions.front().size());
  for (const auto& x : actions) {
    if (x.size() != f.dim_) throw std::invalid_argument("FeatureMap: action dimensions differ");
  }
  f.num_arms_ = actions.size();
  f.actions_ = std::move(actions);
  return f;
}

Vector FeatureMap::features(const Context& context, std::size_t arm) const {
  require_arm(arm, num_arms_, "FeatureMap");
  if (kind_ == Kind::kFixed) return actions_[arm];
  const Vector& s = require_context(context, "FeatureMap");
  if (s.size() != context_dim_) throw std::invalid_argument("FeatureMap: context dimension mismatch");
  Vector x = Vector::Zero(dim_);
  x.segment(static_cast<Eigen::Index>(arm) * context_dim_, context_dim_) = scale_ * s;
  return x;
}

std::vector<Vector> FeatureMap::action_set(const Context& context) const {
  if (kind_ == Kind::kFixed) return actions_;
  std::vector<Vector> out;
  out.reserve(num_arms_);
  for (std::size_t a = 0; a < num_arms_; ++a) out.push_back(features(context, a));
  return out;
}

// ----------------------------------------------------------------- OFUL

Oful::Oful(FeatureMap features, LinearParams params)
    : features_(std::move(features)),
      params_(params),
      ridge_(features_.dim(), params.lambda) {
  if (!(params.delta > 0.0 && params.delta < 1.0)) throw std::invalid_argument("oful: delta must lie in (0, 1)");
}

std::size_t Oful::act(const Context& context, RandomStream&) {
  if (features_.contextual()) require_context(context, "oful");
  const auto actions = features_.action_set(context);
  const double beta = ridge_.beta_radius(params_.delta, params_.sigma, params_.s_bound);
  return ucb_argmax(ridge_, actions, beta);
}

void Oful::update(const Context& context, std::size_t action, double reward) {
  ridge_.update(features_.features(context, action), reward);
}

LinearBalancingBase::LinearBalancingBase(FeatureMap features, LinearParams params)
    : features_(std::move(features)),
      algo_(features_.dim(), params.lambda, params.delta, params.sigma, params.s_bound) {}

std::size_t LinearBalancingBase::act(const Context& context, RandomStream&) {
  if (features_.contextual()) require_context(context, "linear_rb");
  const auto actions = features_.action_set(context);
  return algo_.select(actions).chosen;
}

void LinearBalancingBase::update(const Context& context, std::size_t action, double reward) {
  algo_.update(features_.features(context, action), reward);
}

// ------------------------------------------------------ synthetic bases

SyntheticRegretBase::SyntheticRegretBase(double rate, long horizon, std::optional<long> switch_time)
    : rate_(rate), horizon_(horizon), switch_time_(switch_time) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("synthetic base: rate must lie in [0, 1]");
  if (horizon < 1) throw std::invalid_argument("synthetic base: horizon must be >= 1");
  if (switch_time && *switch_time < 0) throw std::invalid_argument("synthetic base: t0 must be >= 0");
  explore_p_ = std::pow(static_cast<double>(horizon), rate - 1.0);
}

std::size_t SyntheticRegretBase::act(const Context&, RandomStream& rng) {
  if (switch_time_ && time_ + 1 > *switch_time_) return 0;
  return rng.uniform() < explore_p_ ? 2 : 1;
}

double SyntheticRegretBase::expected_regret_alone(const LowerBoundWorld& world, long rounds) const {
  const double mimic = explore_p_ * world.regret(2) + (1.0 - explore_p_) * world.regret(1);
  const long mimic_rounds = switch_time_ ? std::min(rounds, *switch_time_) : rounds;
  return mimic * static_cast<double>(mimic_rounds) +
         world.regret(0) * static_cast<double>(rounds - mimic_rounds);
}

// ---------------------------------------------------------------- UCRL2

Ucrl2::Ucrl2(int num_states, int num_actions, int horizon, double delta)
    : S_(num_states), A_(num_actions), H_(horizon), delta_(delta) {
  if (S_ < 1 || A_ < 1 || H_ < 1) throw std::invalid_argument("ucrl2: invalid dimensions");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("ucrl2: delta must lie in (0, 1)");
  visits_.assign(static_cast<std::size_t>(S_) * A_, 0);
  transition_counts_.assign(static_cast<std::size_t>(S_) * A_ * S_, 0);
  reward_sums_.assign(static_cast<std::size_t>(S_) * A_, 0.0);
}

double Ucrl2::plan(int start_state) {
  const double t = static_cast<double>(std::max<long>(1, steps_));
  const double log_p = std::log(2.0 * A_ * t / delta_);
  const double log_r = std::log(2.0 * S_ * A_ * t / delta_);
  std::vector<double> next(S_, 0.0), cur(S_, 0.0), p(S_);
  std::vector<int> order(S_);
  policy_.assign(H_, std::vector<int>(S_, 0));
  for (int h = H_ - 1; h >= 0; --h) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return next[a] > next[b]; });
    for (int s = 0; s < S_; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < A_; ++a) {
        const long n = visits_[sa(s, a)];
        const double nn = static_cast<double>(std::max<long>(1, n));
        const double r_hat = n == 0 ? 0.0 : reward_sums_[sa(s, a)] / nn;
        const double r_opt = std::min(1.0, r_hat + std::sqrt(7.0 * log_r / (2.0 * nn)));
        const double radius = std::sqrt(14.0 * S_ * log_p / nn);
        for (int s2 = 0; s2 < S_; ++s2) {
          p[s2] = n == 0 ? 1.0 / S_
                         : static_cast<double>(transition_counts_[sa(s, a) * S_ + s2]) / nn;
        }
        // Move up to radius/2 of mass onto the best next state, taking it
        // from the worst states first.
        const int top = order[0];
        p[top] = std::min(1.0, p[top] + radius / 2.0);
        double total = std::accumulate(p.begin(), p.end(), 0.0);
        for (int k = S_ - 1; k >= 0 && total > 1.0; --k) {
          const int s2 = order[k];
          if (s2 == top) continue;
          const double cut = std::min(p[s2], total - 1.0);
          p[s2] -= cut;
          total -= cut;
        }
        double q = r_opt;
        for (int s2 = 0; s2 < S_; ++s2) q += p[s2] * next[s2];
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      cur[s] = std::min(best, static_cast<double>(H_ - h));
      policy_[h][s] = best_a;
    }
    std::swap(cur, next);
  }
  last_optimistic_value_ = next[start_state];
  return last_optimistic_value_;
}

Episode Ucrl2::run_episode(const EpisodicMdp& env, RandomStream& rng) {
  if (env.num_states() != S_ || env.num_actions() != A_ || env.horizon() != H_) {
    throw std::invalid_argument("ucrl2: environment shape mismatch");
  }
  plan(env.start_state());
  Episode ep = env.run_episode([this](int h, int s) { return policy_[h][s]; }, rng);
  for (const auto& st : ep.steps) {
    ++visits_[sa(st.state, st.action)];
    ++transition_counts_[sa(st.state, st.action) * S_ + st.next_state];
    reward_sums_[sa(st.state, st.action)] += st.reward;
    ++steps_;
  }
  ++episodes_;
  return ep;
}

// ----------------------------------------------------------------- PSRL

Psrl::Psrl(int num_states, int num_actions, int horizon)
    : S_(num_states), A_(num_actions), H_(horizon) {
  if (S_ < 1 || A_ < 1 || H_ < 1) throw std::invalid_argument("psrl: invalid dimensions");
  dirichlet_.assign(static_cast<std::size_t>(S_) * A_ * S_, 1.0);
  beta_alpha_.assign(static_cast<std::size_t>(S_) * A_, 1.0);
  beta_beta_.assign(static_cast<std::size_t>(S_) * A_, 1.0);
}

TabularModel Psrl::sample_model(RandomStream& rng) const {
  TabularModel m;
  m.num_states = S_;
  m.num_actions = A_;
  m.transitions.resize(dirichlet_.size());
  m.rewards.resize(beta_alpha_.size());
  for (int s = 0; s < S_; ++s) {
    for (int a = 0; a < A_; ++a) {
      const std::size_t row = sa(s, a) * S_;
      double total = 0.0;
      for (int s2 = 0; s2 < S_; ++s2) {
        const double g = rng.gamma(dirichlet_[row + s2]);
        m.transitions[row + s2] = g;
        total += g;
      }
      for (int s2 = 0; s2 < S_; ++s2) m.transitions[row + s2] /= total;
      const double ga = rng.gamma(beta_alpha_[sa(s, a)]);
      const double gb = rng.gamma(beta_beta_[sa(s, a)]);
      m.rewards[sa(s, a)] = ga / (ga + gb);
    }
  }
  return m;
}

Episode Psrl::run_episode(const EpisodicMdp& env, RandomStream& rng) {
  if (env.num_states() != S_ || env.num_actions() != A_ || env.horizon() != H_) {
    throw std::invalid_argument("psrl: environment shape mismatch");
  }
  const FinitePlan plan = backward_induction(sample_model(rng), H_);
  Episode ep = env.run_episode([&plan](int h, int s) { return plan.policy[h][s]; }, rng);
  for (const auto& st : ep.steps) {
    dirichlet_[sa(st.state, st.action) * S_ + st.next_state] += 1.0;
    beta_alpha_[sa(st.state, st.action)] += st.reward;
    beta_beta_[sa(st.state, st.action)] += 1.0 - st.reward;
  }
  ++episodes_;
  return ep;
}

// ----------------------------------------------------------- Q-learning

QLearnEps::QLearnEps(int num_states, int num_actions, int horizon, double epsilon)
    : S_(num_states), A_(num_actions), H_(horizon), epsilon_(epsilon) {
  if (S_ < 1 || A_ < 1 || H_ < 1) throw std::invalid_argument("qlearn_eps: invalid dimensions");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("qlearn_eps: epsilon must lie in [0, 1]");
  const std::size_t n = static_cast<std::size_t>(H_) * S_ * A_;
  q_.assign(n, static_cast<double>(H_));
  visits_.assign(n, 0);
}

int QLearnEps::greedy(int h, int s) const {
  int best = 0;
  for (int a = 1; a < A_; ++a) {
    if (q_[idx(h, s, a)] > q_[idx(h, s, best)]) best = a;
  }
  return best;
}

Episode QLearnEps::run_episode(const EpisodicMdp& env, RandomStream& rng) {
  if (env.num_states() != S_ || env.num_actions() != A_ || env.horizon() != H_) {
    throw std::invalid_argument("qlearn_eps: environment shape mismatch");
  }
  Episode ep;
  ep.steps.reserve(H_);
  int s = env.start_state();
  for (int h = 0; h < H_; ++h) {
    const int a = rng.uniform() < epsilon_ ? static_cast<int>(rng.uniform_index(A_)) : greedy(h, s);
    const double r = env.model().r(s, a);
    const int next = env.sample_next(s, a, rng);
    const std::size_t i = idx(h, s, a);
    ++visits_[i];
    const double alpha = 1.0 / static_cast<double>(visits_[i]);
    const double target = r + (h + 1 < H_ ? q_[idx(h + 1, next, greedy(h + 1, next))] : 0.0);
    q_[i] += alpha * (target - q_[i]);
    ep.steps.push_back({s, a, r, next});
    ep.total_reward += r;
    s = next;
  }
  ++episodes_;
  return ep;
}

}  // namespace rebal
