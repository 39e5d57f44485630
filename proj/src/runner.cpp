#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>
#include <variant>

#include "harness_internal.hpp"
#include "rebal/harness.hpp"

namespace rebal {

namespace {

using detail::expand_bases;
using detail::run_environment;

ContextDist context_dist(const EnvironmentSpec& env) {
  return env.context == "standard_normal" ? ContextDist::kStandardNormal : ContextDist::kUniformCube;
}

// Parameters drawn per seed come from their own stream so that every run
// of a scenario faces the same instance.
BanditEnv build_bandit_env(const EnvironmentSpec& env, long horizon, RandomStream params_rng) {
  if (env.kind == "mab") {
    const NoiseModel noise =
        env.noise == "gaussian" ? NoiseModel::gaussian(env.noise_sigma) : NoiseModel::bernoulli();
    return MabEnv(env.means, noise);
  }
  if (env.kind == "linear_fixed") {
    std::vector<double> means;
    for (const auto& a : env.actions) {
      double m = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) m += a[k] * env.theta[k];
      means.push_back(m);
    }
    return MabEnv(std::move(means), NoiseModel::gaussian(env.noise_sigma));
  }
  if (env.kind == "linear_contextual") {
    auto draw = [&] { return env.param_low + (env.param_high - env.param_low) * params_rng.uniform(); };
    if (env.reward_mode == "constant_mean") {
      std::vector<double> means = env.means;
      if (means.empty()) {
        for (int a = 0; a < env.num_arms; ++a) means.push_back(draw());
      }
      return LinCtxEnv::constant_mean(env.dim, std::move(means), context_dist(env), env.noise_sigma);
    }
    std::vector<Vector> params;
    for (int a = 0; a < env.num_arms; ++a) {
      Vector theta(env.dim);
      for (int k = 0; k < env.dim; ++k) {
        theta[k] = env.arm_params.empty() ? draw() : env.arm_params[a][k];
      }
      params.push_back(std::move(theta));
    }
    return LinCtxEnv::linear(std::move(params), context_dist(env), env.noise_sigma);
  }
  if (env.kind == "lower_bound") {
    const auto variant = env.variant == "E2" ? LowerBoundVariant::kE2 : LowerBoundVariant::kE1;
    return LowerBoundWorld(variant, detail::world_horizon(env, horizon), env.x, env.y);
  }
  throw std::invalid_argument("environment '" + env.kind + "' is not a bandit environment");
}

EpisodicMdp build_mdp(const EnvironmentSpec& env) {
  if (env.mdp == "riverswim") return EpisodicMdp::river_swim(env.episode_length);
  TabularModel m;
  m.num_states = 1;
  m.num_actions = env.num_actions;
  m.transitions.assign(static_cast<std::size_t>(env.num_actions), 1.0);
  m.rewards.assign(static_cast<std::size_t>(env.num_actions), env.state_reward);
  return EpisodicMdp(std::move(m), env.episode_length, 0);
}

FeatureMap build_features(const EnvironmentSpec& env, double scale) {
  if (env.kind == "linear_contextual") {
    return FeatureMap::disjoint(env.dim, static_cast<std::size_t>(env.num_arms), scale);
  }
  if (env.kind == "linear_fixed") {
    std::vector<Vector> actions;
    for (const auto& a : env.actions) actions.push_back(Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size())));
    return FeatureMap::fixed(std::move(actions));
  }
  return FeatureMap::one_hot(static_cast<std::size_t>(detail::environment_arms(env)));
}

BasePtr build_base(const BaseSpec& b, const EnvironmentSpec& env) {
  const auto& p = b.params;
  const auto arms = static_cast<std::size_t>(detail::environment_arms(env));
  if (b.kind == "ucb1") return std::make_unique<Ucb1>(arms);
  if (b.kind == "eps_greedy") return std::make_unique<EpsGreedy>(arms, p.at("c"));
  if (b.kind == "fixed_arm") return std::make_unique<FixedArm>(static_cast<std::size_t>(p.at("arm")));
  if (b.kind == "oful" || b.kind == "linear_rb") {
    const LinearParams lp{p.at("lambda"), p.at("delta"), p.at("sigma"), p.at("s_bound")};
    FeatureMap features = build_features(env, p.at("feature_scale"));
    if (b.kind == "oful") return std::make_unique<Oful>(std::move(features), lp);
    return std::make_unique<LinearBalancingBase>(std::move(features), lp);
  }
  if (b.kind == "synthetic_const_regret") {
    return std::make_unique<SyntheticRegretBase>(p.at("rate"), static_cast<long>(p.at("horizon")));
  }
  if (b.kind == "synthetic_switching") {
    return std::make_unique<SyntheticRegretBase>(p.at("rate"), static_cast<long>(p.at("horizon")),
                                                 static_cast<long>(p.at("t0")));
  }
  const int S = env.mdp == "riverswim" ? 6 : 1;
  const int A = detail::environment_arms(env);
  if (b.kind == "ucrl2") return std::make_unique<Ucrl2>(S, A, env.episode_length, p.at("delta"));
  if (b.kind == "psrl") return std::make_unique<Psrl>(S, A, env.episode_length);
  if (b.kind == "qlearn_eps") return std::make_unique<QLearnEps>(S, A, env.episode_length, p.at("epsilon"));
  throw std::invalid_argument("unknown base kind '" + b.kind + "'");
}

// One (series, seed) unit of work.
struct Job {
  std::size_t series = 0;
  std::size_t run = 0;
  long alone_index = -1;  // which base runs alone, for expanded alone runs
  int seed = 0;
};

using Master = std::variant<BanditMaster, EpisodicMaster, ForcedExplorationMaster, ScriptedMaster>;

SeriesResult simulate(const ScenarioConfig& config, const std::vector<std::string>& names,
                      const std::vector<long>& checkpoints, const Job& job, bool keep_trace) {
  const RunSpec& run = config.runs[job.run];
  const EnvironmentSpec& env = run_environment(config, run);
  const auto seed = static_cast<std::uint64_t>(job.seed);

  std::vector<BaseSpec> specs = expand_bases(run, env, config.horizon);
  if (job.alone_index >= 0) specs = {specs[static_cast<std::size_t>(job.alone_index)]};
  std::vector<BasePtr> bases;
  std::vector<RandomStream> streams;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    bases.push_back(build_base(specs[i], env));
    const std::size_t label_index = job.alone_index >= 0 ? static_cast<std::size_t>(job.alone_index) : i;
    streams.push_back(
        derive_substream(config.master_seed, seed, "base/" + run.name + "/" + std::to_string(label_index)));
  }
  const std::size_t M = bases.size();
  const RegretBoundSpec bound = run.master.bound.value_or(RegretBoundSpec::zero());
  const std::string& kind = run.master.kind;
  RandomStream env_rng = derive_substream(config.master_seed, seed, "env");

  SeriesResult out;
  out.algorithm = names[job.series];
  out.seed = job.seed;
  out.checkpoints = checkpoints;
  out.base_regret.assign(M, 0.0);

  std::optional<BanditEnv> bandit_env;
  std::optional<EpisodicMdp> mdp;
  std::optional<Master> master;
  if (env.kind == "episodic") {
    mdp.emplace(build_mdp(env));
    out.optimal_value = mdp->optimal_value();
    master.emplace(std::in_place_type<EpisodicMaster>, std::move(bases), std::move(streams), bound);
  } else {
    bandit_env.emplace(
        build_bandit_env(env, config.horizon, derive_substream(config.master_seed, seed, "env_params")));
    out.optimal_value = std::visit(
        [](const auto& e) -> double {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, MabEnv>) return e.optimal_mean();
          else if constexpr (std::is_same_v<E, LowerBoundWorld>) return e.optimal_reward();
          else return std::numeric_limits<double>::quiet_NaN();
        },
        *bandit_env);
    if (kind == "forced_exploration") {
      master.emplace(std::in_place_type<ForcedExplorationMaster>, num_arms(*bandit_env), config.horizon,
                     std::move(bases), std::move(streams));
    } else if (kind == "scripted") {
      const auto& p = run.master.params;
      const long plays = p.count("minority_plays") ? static_cast<long>(p.at("minority_plays"))
                                                   : detail::default_switch_time(env, config.horizon, 1.0);
      master.emplace(std::in_place_type<ScriptedMaster>, std::move(bases), std::move(streams),
                     static_cast<std::size_t>(p.at("majority")), static_cast<std::size_t>(p.at("minority")),
                     plays);
    } else {
      master.emplace(std::in_place_type<BanditMaster>, std::move(bases), std::move(streams), bound);
    }
  }

  std::size_t next_checkpoint = 0;
  for (long t = 1; t <= config.horizon; ++t) {
    RoundRecord rec = std::visit(
        [&](auto& m) -> RoundRecord {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, EpisodicMaster>) return m.play_episode(*mdp);
          else return m.play_round(*bandit_env, env_rng);
        },
        *master);
    if (rec.chosen_base >= 0) out.base_regret[static_cast<std::size_t>(rec.chosen_base)] += rec.instant_regret;
    if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
      out.regret.push_back(rec.cumulative_regret);
      out.g_hat.push_back(rec.g_hat);
      out.n.push_back(rec.n);
      ++next_checkpoint;
    }
    if (keep_trace) out.trace.push_back(std::move(rec));
  }
  out.final_stats = std::visit([](const auto& m) { return m.state().stats; }, *master);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::string format_long(long v) { return std::to_string(v); }

}  // namespace

const SeriesResult& ScenarioResult::at(std::string_view algorithm, int seed) const {
  for (const auto& s : series) {
    if (s.algorithm == algorithm && s.seed == seed) return s;
  }
  throw std::out_of_range("no series " + std::string(algorithm) + " for seed " + std::to_string(seed));
}

std::vector<double> ScenarioResult::final_regrets(std::string_view algorithm) const {
  std::vector<double> out;
  for (const auto& s : series) {
    if (s.algorithm == algorithm && !s.regret.empty()) out.push_back(s.regret.back());
  }
  if (out.empty()) throw std::out_of_range("no series " + std::string(algorithm));
  return out;
}

ScenarioResult run_scenario_in_memory(const ScenarioConfig& config, const RunOptions& options) {
  validate_config(config);
  ScenarioResult result;
  result.config = config;
  result.algorithms = series_names(config);
  result.checkpoints = resolve_checkpoints(config.checkpoints, config.horizon);

  std::vector<Job> jobs;
  std::size_t series = 0;
  for (std::size_t r = 0; r < config.runs.size(); ++r) {
    const RunSpec& run = config.runs[r];
    const std::size_t count =
        run.master.kind == "alone" ? expand_bases(run, run_environment(config, run), config.horizon).size() : 1;
    for (std::size_t k = 0; k < count; ++k, ++series) {
      for (int s = 0; s < config.num_seeds; ++s) {
        jobs.push_back({series, r, run.master.kind == "alone" ? static_cast<long>(k) : -1, s});
      }
    }
  }

  std::vector<SeriesResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = simulate(config, result.algorithms, result.checkpoints, jobs[i], options.keep_trace);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads > 0 ? static_cast<unsigned>(options.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  result.series = std::move(results);
  return result;
}

std::vector<ReferenceRow> reference_regrets(const ScenarioConfig& config) {
  std::vector<ReferenceRow> rows;
  const auto names = series_names(config);
  std::size_t series = 0;
  for (const auto& run : config.runs) {
    const EnvironmentSpec& env = run_environment(config, run);
    const auto bases = expand_bases(run, env, config.horizon);
    if (run.master.kind != "alone") {
      ++series;
      continue;
    }
    for (const auto& b : bases) {
      const std::string& name = names[series++];
      if (env.kind != "lower_bound") continue;
      if (b.kind != "synthetic_const_regret" && b.kind != "synthetic_switching") continue;
      std::optional<long> t0;
      if (b.kind == "synthetic_switching") t0 = static_cast<long>(b.params.at("t0"));
      const SyntheticRegretBase base(b.params.at("rate"), static_cast<long>(b.params.at("horizon")), t0);
      const auto world = std::get<LowerBoundWorld>(build_bandit_env(env, config.horizon, RandomStream{}));
      rows.push_back({name, env.variant, config.horizon, base.expected_regret_alone(world, config.horizon)});
    }
  }
  return rows;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string summary_csv(const ScenarioResult& result) {
  std::string out = "scenario,seed,checkpoint_t,algorithm,cumulative_regret\n";
  for (const auto& s : result.series) {
    for (std::size_t c = 0; c < s.regret.size(); ++c) {
      out += result.config.name;
      out += ',';
      out += std::to_string(s.seed);
      out += ',';
      out += format_long(s.checkpoints[c]);
      out += ',';
      out += s.algorithm;
      out += ',';
      out += format_double(s.regret[c]);
      out += '\n';
    }
  }
  return out;
}

std::string trace_csv(const ScenarioResult& result, std::string_view algorithm) {
  std::size_t M = 0;
  for (const auto& s : result.series) {
    if (s.algorithm == algorithm) M = std::max(M, s.final_stats.size());
  }
  std::string out = "seed,t,chosen_base,optimistic_base,b_t,action,reward,instant_regret,cumulative_regret";
  for (std::size_t i = 0; i < M; ++i) out += ",g_hat_" + std::to_string(i);
  for (std::size_t i = 0; i < M; ++i) out += ",n_" + std::to_string(i);
  out += '\n';
  for (const auto& s : result.series) {
    if (s.algorithm != algorithm) continue;
    for (const auto& r : s.trace) {
      out += std::to_string(s.seed) + ',' + format_long(r.t) + ',' + format_long(r.chosen_base) + ',' +
             format_long(r.optimistic_base) + ',' + format_double(r.b_t) + ',' + format_long(r.action) + ',' +
             format_double(r.reward) + ',' + format_double(r.instant_regret) + ',' +
             format_double(r.cumulative_regret);
      for (double g : r.g_hat) out += ',' + format_double(g);
      for (long n : r.n) out += ',' + format_long(n);
      out += '\n';
    }
  }
  return out;
}

WrittenFiles run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir, bool full_trace,
                          int threads) {
  const ScenarioResult result = run_scenario_in_memory(config, {threads, full_trace});
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  WrittenFiles files;
  files.summary = out_dir / (config.name + ".csv");
  write_file(files.summary, summary_csv(result));
  if (full_trace) {
    for (const auto& name : result.algorithms) {
      auto path = out_dir / (config.name + "__" + name + "__trace.csv");
      write_file(path, trace_csv(result, name));
      files.traces.push_back(std::move(path));
    }
  }
  const auto refs = reference_regrets(config);
  if (!refs.empty()) {
    std::string text = "scenario,algorithm,environment,horizon,expected_cumulative_regret\n";
    for (const auto& r : refs) {
      text += config.name + ',' + r.algorithm + ',' + r.environment + ',' + std::to_string(r.horizon) + ',' +
              format_double(r.expected_regret) + '\n';
    }
    files.reference = out_dir / (config.name + "_reference.csv");
    write_file(*files.reference, text);
  }
  return files;
}

std::filesystem::path default_output_dir() {
  if (const char* dir = std::getenv("RBAL_OUT_DIR"); dir && *dir) return dir;
  return "results";
}

}  // namespace rebal
