#include "rebal/balancer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rebal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Played {
  std::size_t action = 0;
  double reward = 0.0;
  double instant_regret = 0.0;
};

// One bandit interaction with a single base. The environment draws the
// round before the base acts; only the base's own stream is used for its
// internal randomness.
Played play_bandit_base(BaseLearner& base, RandomStream& base_rng, const BanditEnv& env,
                        RandomStream& env_rng) {
  BanditRound round = begin_round(env, env_rng);
  Context context;
  if (base.contextual()) {
    if (!round.context) {
      throw std::invalid_argument(base.kind() + ": contextual base in an environment without contexts");
    }
    context = round.context;
  }
  Played p;
  p.action = base.act(context, base_rng);
  p.reward = sample_reward(env, round, p.action, env_rng);
  base.update(context, p.action, p.reward);
  p.instant_regret = round.optimal_mean - round.means[p.action];
  return p;
}

void check_streams(std::size_t bases, std::size_t streams) {
  if (bases == 0) throw std::invalid_argument("master: need at least one base");
  if (bases != streams) throw std::invalid_argument("master: need one random stream per base");
}

std::vector<long> counts_of(const MasterState& state) {
  std::vector<long> n;
  n.reserve(state.stats.size());
  for (const auto& s : state.stats) n.push_back(s.n_rounds);
  return n;
}

HistorySummary summarize(const BaseLearner& base, long rounds) {
  return HistorySummary{rounds, base.logdet()};
}

}  // namespace

OptimisticChoice optimistic_base(std::span<const BaseStats> stats, const RegretBoundSpec& bound) {
  if (stats.empty()) throw std::invalid_argument("optimistic_base: no bases");
  OptimisticChoice best{0, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    if (s.n_rounds < 1) {
      throw std::invalid_argument("optimistic_base: base " + std::to_string(i) + " has not been played");
    }
    const double n = static_cast<double>(s.n_rounds);
    const double value = s.total_reward / n + eval_bound(bound, s.summary) / n;
    if (value > best.value) best = {i, value};
  }
  return best;
}

double empirical_regret(const BaseStats& stats, double b_t) {
  return static_cast<double>(stats.n_rounds) * b_t - stats.total_reward;
}

std::size_t select_base(std::span<const BaseStats> stats, double b_t) {
  if (stats.empty()) throw std::invalid_argument("select_base: no bases");
  std::size_t best = 0;
  double best_g = empirical_regret(stats[0], b_t);
  for (std::size_t i = 1; i < stats.size(); ++i) {
    const double g = empirical_regret(stats[i], b_t);
    if (g < best_g) {
      best_g = g;
      best = i;
    }
  }
  return best;
}

std::size_t select_base(std::span<const BaseStats> stats, const RegretBoundSpec& bound) {
  return select_base(stats, optimistic_base(stats, bound).value);
}

// ------------------------------------------------------------ MasterState

MasterState::MasterState(std::size_t num_bases, RegretBoundSpec bound_spec, MasterMode m)
    : stats(num_bases), bound(bound_spec), mode(m) {
  validate(bound);
}

bool MasterState::initialized() const {
  for (const auto& s : stats) {
    if (s.n_rounds < 1) return false;
  }
  return true;
}

std::size_t MasterState::choose(RoundRecord& record) {
  if (!initialized()) {
    record.optimistic_base = -1;
    record.b_t = kNaN;
    record.g_hat.assign(stats.size(), kNaN);
    for (std::size_t i = 0; i < stats.size(); ++i) {
      if (stats[i].n_rounds < 1) return i;
    }
  }
  const auto opt = optimistic_base(stats, bound);
  last_b_t = opt.value;
  record.optimistic_base = static_cast<long>(opt.base);
  record.b_t = opt.value;
  record.g_hat.resize(stats.size());
  std::size_t chosen = 0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    record.g_hat[i] = empirical_regret(stats[i], opt.value);
    if (record.g_hat[i] < record.g_hat[chosen]) chosen = i;
  }
  return chosen;
}

void MasterState::absorb(std::size_t base, double reward, HistorySummary summary) {
  auto& s = stats.at(base);
  ++s.n_rounds;
  s.total_reward += reward;
  s.summary = std::move(summary);
  s.last_played = round;
  ++round;
}

// ----------------------------------------------------------- BanditMaster

BanditMaster::BanditMaster(std::vector<BasePtr> bases, std::vector<RandomStream> base_streams,
                           RegretBoundSpec bound)
    : state_(bases.size(), bound, MasterMode::kBandit),
      bases_(std::move(bases)),
      streams_(std::move(base_streams)) {
  check_streams(bases_.size(), streams_.size());
  for (const auto& b : bases_) {
    if (b->episodic()) throw std::invalid_argument("bandit master: episodic base " + b->kind());
  }
}

RoundRecord BanditMaster::play_round(const BanditEnv& env, RandomStream& env_rng) {
  RoundRecord rec;
  rec.t = state_.round + 1;
  const std::size_t i = state_.choose(rec);
  const Played p = play_bandit_base(*bases_[i], streams_[i], env, env_rng);
  state_.absorb(i, p.reward, summarize(*bases_[i], state_.stats[i].n_rounds + 1));
  cumulative_regret_ += p.instant_regret;
  rec.chosen_base = static_cast<long>(i);
  rec.action = static_cast<long>(p.action);
  rec.reward = p.reward;
  rec.instant_regret = p.instant_regret;
  rec.cumulative_regret = cumulative_regret_;
  rec.n = counts_of(state_);
  return rec;
}

// --------------------------------------------------------- EpisodicMaster

EpisodicMaster::EpisodicMaster(std::vector<BasePtr> bases, std::vector<RandomStream> base_streams,
                               RegretBoundSpec bound)
    : state_(bases.size(), bound, MasterMode::kEpisodic),
      bases_(std::move(bases)),
      streams_(std::move(base_streams)) {
  check_streams(bases_.size(), streams_.size());
  for (const auto& b : bases_) {
    if (!b->episodic()) throw std::invalid_argument("episodic master: bandit base " + b->kind());
  }
}

EpisodeRecord EpisodicMaster::play_episode(const EpisodicMdp& env) {
  EpisodeRecord rec;
  rec.t = state_.round + 1;
  const std::size_t i = state_.choose(rec);
  const Episode ep = bases_[i]->run_episode(env, streams_[i]);
  state_.absorb(i, ep.total_reward, summarize(*bases_[i], state_.stats[i].n_rounds + 1));
  const double regret = env.optimal_value() - ep.total_reward;
  cumulative_regret_ += regret;
  rec.chosen_base = static_cast<long>(i);
  rec.action = -1;
  rec.reward = ep.total_reward;
  rec.instant_regret = regret;
  rec.cumulative_regret = cumulative_regret_;
  rec.n = counts_of(state_);
  return rec;
}

// ------------------------------------------------ ForcedExplorationMaster

long forced_exploration_pulls(long horizon, long num_bases, long num_arms) {
  if (horizon < 1 || num_bases < 1 || num_arms < 1) {
    throw std::invalid_argument("forced exploration: T, M and K must be >= 1");
  }
  // Smallest n with n^3 * K^2 >= (T * M)^2, i.e. n >= (T M / K)^(2/3).
  using i128 = __int128;
  const i128 tm = static_cast<i128>(horizon) * num_bases;
  const i128 lhs = tm * tm;
  const i128 k2 = static_cast<i128>(num_arms) * num_arms;
  auto enough = [&](i128 n) { return n * n * n * k2 >= lhs; };
  const double guess = std::pow(static_cast<double>(horizon) * num_bases / num_arms, 2.0 / 3.0);
  i128 n = static_cast<i128>(std::max(1.0, std::floor(guess)) - 1);
  if (n < 1) n = 1;
  while (!enough(n)) ++n;
  while (n > 1 && enough(n - 1)) --n;
  return static_cast<long>(n);
}

ForcedExplorationMaster::ForcedExplorationMaster(std::size_t num_arms, long horizon,
                                                 std::vector<BasePtr> bases,
                                                 std::vector<RandomStream> base_streams)
    : num_arms_(num_arms),
      horizon_(horizon),
      per_arm_(forced_exploration_pulls(horizon, static_cast<long>(bases.size()),
                                        static_cast<long>(num_arms))),
      state_(bases.size(), RegretBoundSpec::zero(), MasterMode::kForcedExploration),
      bases_(std::move(bases)),
      streams_(std::move(base_streams)),
      arm_counts_(num_arms, 0),
      arm_sums_(num_arms, 0.0) {
  check_streams(bases_.size(), streams_.size());
  for (const auto& b : bases_) {
    if (b->episodic()) throw std::invalid_argument("forced exploration: episodic base " + b->kind());
  }
}

bool ForcedExplorationMaster::in_phase_one() const {
  return state_.round < per_arm_ * static_cast<long>(num_arms_);
}

RoundRecord ForcedExplorationMaster::play_round(const BanditEnv& env, RandomStream& env_rng) {
  if (!has_direct_arm_access(env)) {
    throw std::invalid_argument("forced exploration: environment has no direct arm access");
  }
  if (num_arms(env) != num_arms_) {
    throw std::invalid_argument("forced exploration: arm count does not match environment");
  }
  RoundRecord rec;
  rec.t = state_.round + 1;
  rec.optimistic_base = -1;
  const std::size_t M = bases_.size();

  if (in_phase_one()) {
    const std::size_t arm = static_cast<std::size_t>(state_.round) % num_arms_;
    const BanditRound round = begin_round(env, env_rng);
    const double reward = sample_reward(env, round, arm, env_rng);
    ++arm_counts_[arm];
    arm_sums_[arm] += reward;
    ++state_.round;
    rec.chosen_base = -1;
    rec.b_t = kNaN;
    rec.g_hat.assign(M, kNaN);
    rec.action = static_cast<long>(arm);
    rec.reward = reward;
    rec.instant_regret = round.optimal_mean - round.means[arm];
  } else {
    double b_t = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < num_arms_; ++a) {
      const double n = static_cast<double>(arm_counts_[a]);
      b_t = std::max(b_t, arm_sums_[a] / n + 1.0 / std::sqrt(n));
    }
    state_.last_b_t = b_t;
    rec.b_t = b_t;
    rec.g_hat.resize(M);
    std::size_t k = 0;
    for (std::size_t i = 0; i < M; ++i) {
      rec.g_hat[i] = empirical_regret(state_.stats[i], b_t);
      if (rec.g_hat[i] < rec.g_hat[k]) k = i;
    }
    const Played p = play_bandit_base(*bases_[k], streams_[k], env, env_rng);
    ++arm_counts_[p.action];
    arm_sums_[p.action] += p.reward;
    state_.absorb(k, p.reward, summarize(*bases_[k], state_.stats[k].n_rounds + 1));
    rec.chosen_base = static_cast<long>(k);
    rec.action = static_cast<long>(p.action);
    rec.reward = p.reward;
    rec.instant_regret = p.instant_regret;
  }
  cumulative_regret_ += rec.instant_regret;
  rec.cumulative_regret = cumulative_regret_;
  rec.n = counts_of(state_);
  return rec;
}

// ---------------------------------------------------------- ScriptedMaster

ScriptedMaster::ScriptedMaster(std::vector<BasePtr> bases, std::vector<RandomStream> base_streams,
                               std::size_t majority, std::size_t minority, long minority_plays)
    : state_(bases.size(), RegretBoundSpec::zero(), MasterMode::kBandit),
      bases_(std::move(bases)),
      streams_(std::move(base_streams)),
      majority_(majority),
      minority_(minority),
      minority_plays_(minority_plays) {
  check_streams(bases_.size(), streams_.size());
  if (majority_ >= bases_.size() || minority_ >= bases_.size()) {
    throw std::out_of_range("scripted master: base index out of range");
  }
  if (minority_plays_ < 0) throw std::invalid_argument("scripted master: minority_plays must be >= 0");
}

RoundRecord ScriptedMaster::play_round(const BanditEnv& env, RandomStream& env_rng) {
  RoundRecord rec;
  rec.t = state_.round + 1;
  rec.optimistic_base = -1;
  rec.b_t = kNaN;
  rec.g_hat.assign(bases_.size(), kNaN);
  const std::size_t i =
      state_.stats[minority_].n_rounds < minority_plays_ ? minority_ : majority_;
  const Played p = play_bandit_base(*bases_[i], streams_[i], env, env_rng);
  state_.absorb(i, p.reward, summarize(*bases_[i], state_.stats[i].n_rounds + 1));
  cumulative_regret_ += p.instant_regret;
  rec.chosen_base = static_cast<long>(i);
  rec.action = static_cast<long>(p.action);
  rec.reward = p.reward;
  rec.instant_regret = p.instant_regret;
  rec.cumulative_regret = cumulative_regret_;
  rec.n = counts_of(state_);
  return rec;
}

// --------------------------------------------------------- diagnostics

std::vector<RatioPoint> balancing_ratio(std::span<const RatioSample> samples) {
  std::vector<RatioPoint> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    RatioPoint p;
    p.t = s.t;
    if (!(s.g_a > 0.0) || !(s.g_b > 0.0) || s.t < 2) {
      p.skipped = true;
      p.ratio = kNaN;
    } else {
      const double r = std::max(s.g_a / s.g_b, s.g_b / s.g_a);
      p.ratio = std::log(r) / std::log(static_cast<double>(s.t));
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace rebal
