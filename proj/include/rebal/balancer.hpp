#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rebal/bases.hpp"
#include "rebal/bounds.hpp"
#include "rebal/envs.hpp"
#include "rebal/rng.hpp"

namespace rebal {

// Everything the master observes about one base.
struct BaseStats {
  long n_rounds = 0;
  double total_reward = 0.0;
  HistorySummary summary;
  long last_played = -1;  // round index of the most recent selection

  bool operator==(const BaseStats&) const = default;
};

struct OptimisticChoice {
  std::size_t base = 0;  // j_t
  double value = 0.0;    // b_t
};

// j_t = argmax_i R_i/N_i + U(delta, S_i)/N_i and b_t its value. Ties go to
// the lowest index. Throws if some base has N_i = 0.
OptimisticChoice optimistic_base(std::span<const BaseStats> stats, const RegretBoundSpec& bound);

// N_i * b_t - R_i
double empirical_regret(const BaseStats& stats, double b_t);

// argmin_i of the empirical regret at the given b_t (lowest index on ties).
std::size_t select_base(std::span<const BaseStats> stats, double b_t);
std::size_t select_base(std::span<const BaseStats> stats, const RegretBoundSpec& bound);

enum class MasterMode { kBandit, kEpisodic, kForcedExploration };

// One row of a master's trace. During round-robin initialization (and the
// forced-exploration phase) optimistic_base is -1 and b_t / g_hat are NaN.
// For forced exploration chosen_base is -1 during phase one.
struct RoundRecord {
  long t = 0;
  long chosen_base = -1;
  long optimistic_base = -1;
  double b_t = 0.0;
  long action = -1;  // -1 for episodes
  double reward = 0.0;
  double instant_regret = 0.0;
  double cumulative_regret = 0.0;
  std::vector<double> g_hat;
  std::vector<long> n;
};

using EpisodeRecord = RoundRecord;

struct MasterState {
  std::vector<BaseStats> stats;
  RegretBoundSpec bound;
  MasterMode mode = MasterMode::kBandit;
  long round = 0;
  double last_b_t = 0.0;

  MasterState(std::size_t num_bases, RegretBoundSpec bound, MasterMode mode);

  bool initialized() const;
  // Next base to play: round-robin until initialized, then argmin of the
  // empirical regret. Fills the diagnostic fields of `record`.
  std::size_t choose(RoundRecord& record);
  void absorb(std::size_t base, double reward, HistorySummary summary);
};

// Regret balancing over bandit bases. Each base owns its random stream;
// the environment draws from the stream passed to play_round.
class BanditMaster {
 public:
  BanditMaster(std::vector<BasePtr> bases, std::vector<RandomStream> base_streams,
               RegretBoundSpec bound);

  RoundRecord play_round(const BanditEnv& env, RandomStream& env_rng);

  const MasterState& state() const { return state_; }
  std::size_t num_bases() const { return bases_.size(); }
  const BaseLearner& base(std::size_t i) const { return *bases_.at(i); }
  double cumulative_regret() const { return cumulative_regret_; }

 private:
  MasterState state_;
  std::vector<BasePtr> bases_;
  std::vector<RandomStream> streams_;
  double cumulative_regret_ = 0.0;
};

// Same selection rule with whole episodes as rounds and episode returns as
// rewards. Regret per episode is V_* minus the realized return.
class EpisodicMaster {
 public:
  EpisodicMaster(std::vector<BasePtr> bases, std::vector<RandomStream> base_streams,
                 RegretBoundSpec bound);

  EpisodeRecord play_episode(const EpisodicMdp& env);

  const MasterState& state() const { return state_; }
  std::size_t num_bases() const { return bases_.size(); }
  const BaseLearner& base(std::size_t i) const { return *bases_.at(i); }
  double cumulative_regret() const { return cumulative_regret_; }

 private:
  MasterState state_;
  std::vector<BasePtr> bases_;
  std::vector<RandomStream> streams_;
  double cumulative_regret_ = 0.0;
};

// ceil((T * M / K)^(2/3)), computed exactly.
long forced_exploration_pulls(long horizon, long num_bases, long num_arms);

// Master that needs no regret bound: pulls every arm a fixed number of
// times, then sets b_t = max_i mu_hat_i + 1/sqrt(N_i) over arms and plays
// the base with the smallest M_k * b_t - R_k.
class ForcedExplorationMaster {
 public:
  ForcedExplorationMaster(std::size_t num_arms, long horizon, std::vector<BasePtr> bases,
                          std::vector<RandomStream> base_streams);

  RoundRecord play_round(const BanditEnv& env, RandomStream& env_rng);

  long phase_one_pulls_per_arm() const { return per_arm_; }
  bool in_phase_one() const;
  const MasterState& state() const { return state_; }
  long arm_pulls(std::size_t arm) const { return arm_counts_.at(arm); }
  double cumulative_regret() const { return cumulative_regret_; }

 private:
  std::size_t num_arms_;
  long horizon_;
  long per_arm_;
  MasterState state_;
  std::vector<BasePtr> bases_;
  std::vector<RandomStream> streams_;
  std::vector<long> arm_counts_;
  std::vector<double> arm_sums_;
  double cumulative_regret_ = 0.0;
};

// Fixed schedule that ignores all feedback: plays `minority` for its first
// `minority_plays` rounds and `majority` afterwards.
class ScriptedMaster {
 public:
  ScriptedMaster(std::vector<BasePtr> bases, std::vector<RandomStream> base_streams,
                 std::size_t majority, std::size_t minority, long minority_plays);

  RoundRecord play_round(const BanditEnv& env, RandomStream& env_rng);

  const MasterState& state() const { return state_; }
  double cumulative_regret() const { return cumulative_regret_; }

 private:
  MasterState state_;
  std::vector<BasePtr> bases_;
  std::vector<RandomStream> streams_;
  std::size_t majority_;
  std::size_t minority_;
  long minority_plays_;
  double cumulative_regret_ = 0.0;
};

struct RatioSample {
  long t = 0;
  double g_a = 0.0;
  double g_b = 0.0;
};

struct RatioPoint {
  long t = 0;
  double ratio = 0.0;  // log(max(gA/gB, gB/gA)) / log(t)
  bool skipped = false;
};

// Normalized log-ratio of two bases' empirical regrets at each sample.
// Samples with a nonpositive regret (or t < 2) are flagged and skipped.
std::vector<RatioPoint> balancing_ratio(std::span<const RatioSample> samples);

}  // namespace rebal
