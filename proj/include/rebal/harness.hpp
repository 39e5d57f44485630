#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rebal/balancer.hpp"
#include "rebal/bounds.hpp"

namespace rebal {

// Validation failure carrying the offending field path, e.g.
// "runs[1].bases[0].c: must be > 0".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Only the fields relevant to `kind` are read and written; the others keep
// their defaults.
struct EnvironmentSpec {
  // mab | linear_contextual | linear_fixed | episodic | lower_bound
  std::string kind = "mab";

  // mab; also constant_mean means when set
  std::vector<double> means;
  std::string noise = "bernoulli";  // bernoulli | gaussian
  double noise_sigma = 0.0;

  // linear_contextual
  int dim = 0;
  int num_arms = 0;
  std::string context = "uniform_cube";  // uniform_cube | standard_normal
  std::string reward_mode = "linear";    // linear | constant_mean
  std::vector<std::vector<double>> arm_params;  // empty: drawn per seed
  double param_low = 0.0;   // range of drawn parameters or means
  double param_high = 1.0;

  // linear_fixed: a fixed action set with a shared parameter
  std::vector<std::vector<double>> actions;
  std::vector<double> theta;

  // episodic
  std::string mdp = "riverswim";  // riverswim | single_state
  int episode_length = 20;
  int num_actions = 2;       // single_state
  double state_reward = 1.0; // single_state

  // lower_bound
  std::string variant = "E1";  // E1 | E2
  double x = 0.4;
  double y = 0.8;
  long world_horizon = 0;  // 0: scenario horizon

  bool operator==(const EnvironmentSpec&) const = default;
};

struct BaseSpec {
  std::string kind;
  std::map<std::string, double> params;

  bool operator==(const BaseSpec&) const = default;
};

struct MasterSpec {
  // regret_balancing | episodic_regret_balancing | forced_exploration |
  // alone | scripted
  std::string kind = "regret_balancing";
  std::optional<RegretBoundSpec> bound;
  std::map<std::string, double> params;

  bool operator==(const MasterSpec&) const = default;
};

// One algorithm series. An `alone` master with several bases yields one
// series per base, named <run>_<index>.
struct RunSpec {
  std::string name;
  MasterSpec master;
  std::vector<BaseSpec> bases;
  std::optional<EnvironmentSpec> environment;  // overrides the scenario's

  bool operator==(const RunSpec&) const = default;
};

struct CheckpointSpec {
  std::string kind = "every";  // every | doubling | list
  long step = 100;             // every
  long start = 1;              // doubling
  std::vector<long> points;    // list

  bool operator==(const CheckpointSpec&) const = default;
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  EnvironmentSpec environment;
  std::vector<RunSpec> runs;
  long horizon = 10000;
  int num_seeds = 10;
  std::optional<int> full_scale_seeds;
  std::uint64_t master_seed = 0;
  CheckpointSpec checkpoints;
  std::string output_dir;  // empty: command line or environment default

  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config(std::string_view text);
std::string emit_config(const ScenarioConfig& config);
void validate_config(const ScenarioConfig& config);

// "runs.0.master.bound.scale=2" style override applied to the config text
// before parsing. Values are read as JSON, falling back to a string.
std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides);

std::vector<std::string> builtin_scenario_names();
std::optional<std::string> builtin_scenario_text(std::string_view name);
// A builtin name or a path to a config file.
ScenarioConfig load_scenario(const std::string& name_or_path,
                             const std::vector<std::string>& overrides = {});

// n points from lo to hi with constant ratio.
std::vector<double> geometric_grid(double lo, double hi, int n);

std::vector<long> resolve_checkpoints(const CheckpointSpec& spec, long horizon);

// Algorithm series names in output order.
std::vector<std::string> series_names(const ScenarioConfig& config);

struct SeriesResult {
  std::string algorithm;
  int seed = 0;
  std::vector<long> checkpoints;
  std::vector<double> regret;  // cumulative regret at each checkpoint
  std::vector<std::vector<double>> g_hat;
  std::vector<std::vector<long>> n;
  std::vector<BaseStats> final_stats;
  std::vector<double> base_regret;  // per base, summed over its own rounds
  double optimal_value = 0.0;       // mu_* per round or V_* per episode
  std::vector<RoundRecord> trace;   // filled only with keep_trace
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<std::string> algorithms;
  std::vector<long> checkpoints;
  std::vector<SeriesResult> series;  // algorithm-major, then seed

  const SeriesResult& at(std::string_view algorithm, int seed) const;
  std::vector<double> final_regrets(std::string_view algorithm) const;
};

struct RunOptions {
  int threads = 0;  // 0: hardware concurrency
  bool keep_trace = false;
};

ScenarioResult run_scenario_in_memory(const ScenarioConfig& config, const RunOptions& options = {});

// Closed-form expected regret of every synthetic base that runs alone.
struct ReferenceRow {
  std::string algorithm;
  std::string environment;
  long horizon = 0;
  double expected_regret = 0.0;
};
std::vector<ReferenceRow> reference_regrets(const ScenarioConfig& config);

std::string format_double(double value);
std::string summary_csv(const ScenarioResult& result);
std::string trace_csv(const ScenarioResult& result, std::string_view algorithm);

struct WrittenFiles {
  std::filesystem::path summary;
  std::vector<std::filesystem::path> traces;
  std::optional<std::filesystem::path> reference;
};

// Runs the scenario and writes <out>/<name>.csv, plus per-algorithm traces
// and a reference table when applicable.
WrittenFiles run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                          bool full_trace, int threads = 0);

std::filesystem::path default_output_dir();

}  // namespace rebal
