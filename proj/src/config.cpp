#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "harness_internal.hpp"
#include "json.hpp"
#include "rebal/harness.hpp"

namespace rebal {

using Json = nlohmann::ordered_json;

namespace {

// ------------------------------------------------------------ JSON reading

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const Json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(child(path, key), "unknown field");
  }
}

double read_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

long read_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    if (j.is_number_float()) {
      const double v = j.get<double>();
      if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long>(v);
    }
    throw ConfigError(path, "expected an integer");
  }
  return j.get<long>();
}

std::string read_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> read_numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_number(j[i], index_path(path, i)));
  return out;
}

template <class T, class F>
void read_optional(const Json& j, const std::string& path, const char* key, T& out, F reader) {
  if (j.contains(key)) out = reader(j.at(key), child(path, key));
}

// Every non-reserved numeric field of a base or master object is a parameter.
std::map<std::string, double> read_params(const Json& j, const std::string& path,
                                          const std::set<std::string>& reserved) {
  std::map<std::string, double> params;
  for (const auto& [key, value] : j.items()) {
    if (reserved.count(key)) continue;
    params[key] = read_number(value, child(path, key));
  }
  return params;
}

EnvironmentSpec parse_environment(const Json& j, const std::string& path) {
  require_object(j, path);
  EnvironmentSpec env;
  if (!j.contains("kind")) throw ConfigError(child(path, "kind"), "missing");
  env.kind = read_string(j.at("kind"), child(path, "kind"));
  if (env.kind == "mab") {
    reject_unknown(j, path, {"kind", "means", "noise", "noise_sigma"});
    read_optional(j, path, "means", env.means, read_numbers);
    read_optional(j, path, "noise", env.noise, read_string);
    read_optional(j, path, "noise_sigma", env.noise_sigma, read_number);
  } else if (env.kind == "linear_contextual") {
    reject_unknown(j, path,
                   {"kind", "dim", "num_arms", "context", "reward_mode", "arm_params", "means",
                    "param_low", "param_high", "noise_sigma"});
    auto read_int = [](const Json& v, const std::string& p) { return static_cast<int>(read_integer(v, p)); };
    read_optional(j, path, "dim", env.dim, read_int);
    read_optional(j, path, "num_arms", env.num_arms, read_int);
    read_optional(j, path, "context", env.context, read_string);
    read_optional(j, path, "reward_mode", env.reward_mode, read_string);
    read_optional(j, path, "means", env.means, read_numbers);
    read_optional(j, path, "param_low", env.param_low, read_number);
    read_optional(j, path, "param_high", env.param_high, read_number);
    read_optional(j, path, "noise_sigma", env.noise_sigma, read_number);
    if (j.contains("arm_params")) {
      const auto& a = j.at("arm_params");
      const std::string p = child(path, "arm_params");
      if (!a.is_array()) throw ConfigError(p, "expected an array of arrays");
      for (std::size_t i = 0; i < a.size(); ++i) env.arm_params.push_back(read_numbers(a[i], index_path(p, i)));
    }
  } else if (env.kind == "linear_fixed") {
    reject_unknown(j, path, {"kind", "actions", "theta", "noise_sigma"});
    read_optional(j, path, "theta", env.theta, read_numbers);
    read_optional(j, path, "noise_sigma", env.noise_sigma, read_number);
    if (j.contains("actions")) {
      const auto& a = j.at("actions");
      const std::string p = child(path, "actions");
      if (!a.is_array()) throw ConfigError(p, "expected an array of arrays");
      for (std::size_t i = 0; i < a.size(); ++i) env.actions.push_back(read_numbers(a[i], index_path(p, i)));
    }
  } else if (env.kind == "episodic") {
    reject_unknown(j, path, {"kind", "mdp", "episode_length", "num_actions", "state_reward"});
    auto read_int = [](const Json& v, const std::string& p) { return static_cast<int>(read_integer(v, p)); };
    read_optional(j, path, "mdp", env.mdp, read_string);
    read_optional(j, path, "episode_length", env.episode_length, read_int);
    read_optional(j, path, "num_actions", env.num_actions, read_int);
    read_optional(j, path, "state_reward", env.state_reward, read_number);
  } else if (env.kind == "lower_bound") {
    reject_unknown(j, path, {"kind", "variant", "x", "y", "world_horizon"});
    read_optional(j, path, "variant", env.variant, read_string);
    read_optional(j, path, "x", env.x, read_number);
    read_optional(j, path, "y", env.y, read_number);
    read_optional(j, path, "world_horizon", env.world_horizon, read_integer);
  } else {
    throw ConfigError(child(path, "kind"),
                      "unknown environment kind '" + env.kind +
                          "' (expected mab, linear_contextual, linear_fixed, episodic or lower_bound)");
  }
  return env;
}

RegretBoundSpec parse_bound(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"form", "delta", "scale", "exponent", "num_arms"});
  RegretBoundSpec b;
  if (!j.contains("form")) throw ConfigError(child(path, "form"), "missing");
  const std::string form = read_string(j.at("form"), child(path, "form"));
  try {
    b.form = parse_bound_form(form);
  } catch (const std::invalid_argument&) {
    throw ConfigError(child(path, "form"), "unknown bound form '" + form + "'");
  }
  read_optional(j, path, "delta", b.delta, read_number);
  read_optional(j, path, "scale", b.scale, read_number);
  read_optional(j, path, "exponent", b.exponent, read_number);
  read_optional(j, path, "num_arms", b.num_arms,
                [](const Json& v, const std::string& p) { return static_cast<int>(read_integer(v, p)); });
  return b;
}

RunSpec parse_run(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"name", "master", "bases", "environment"});
  RunSpec run;
  if (!j.contains("name")) throw ConfigError(child(path, "name"), "missing");
  run.name = read_string(j.at("name"), child(path, "name"));

  const std::string mpath = child(path, "master");
  if (!j.contains("master")) throw ConfigError(mpath, "missing");
  const Json& m = j.at("master");
  require_object(m, mpath);
  if (!m.contains("kind")) throw ConfigError(child(mpath, "kind"), "missing");
  run.master.kind = read_string(m.at("kind"), child(mpath, "kind"));
  if (m.contains("bound")) run.master.bound = parse_bound(m.at("bound"), child(mpath, "bound"));
  run.master.params = read_params(m, mpath, {"kind", "bound"});

  const std::string bpath = child(path, "bases");
  if (!j.contains("bases")) throw ConfigError(bpath, "missing");
  const Json& bases = j.at("bases");
  if (!bases.is_array()) throw ConfigError(bpath, "expected an array");
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const std::string p = index_path(bpath, i);
    require_object(bases[i], p);
    BaseSpec b;
    if (!bases[i].contains("kind")) throw ConfigError(child(p, "kind"), "missing");
    b.kind = read_string(bases[i].at("kind"), child(p, "kind"));
    b.params = read_params(bases[i], p, {"kind"});
    run.bases.push_back(std::move(b));
  }
  if (j.contains("environment")) run.environment = parse_environment(j.at("environment"), child(path, "environment"));
  return run;
}

CheckpointSpec parse_checkpoints(const Json& j, const std::string& path) {
  CheckpointSpec c;
  if (j.is_array()) {
    c.kind = "list";
    for (std::size_t i = 0; i < j.size(); ++i) c.points.push_back(read_integer(j[i], index_path(path, i)));
    return c;
  }
  require_object(j, path);
  reject_unknown(j, path, {"every", "doubling_from"});
  if (j.contains("every") == j.contains("doubling_from")) {
    throw ConfigError(path, "expected exactly one of 'every', 'doubling_from' or an explicit list");
  }
  if (j.contains("every")) {
    c.kind = "every";
    c.step = read_integer(j.at("every"), child(path, "every"));
  } else {
    c.kind = "doubling";
    c.start = read_integer(j.at("doubling_from"), child(path, "doubling_from"));
  }
  return c;
}

// ------------------------------------------------------------ JSON writing

Json emit_environment(const EnvironmentSpec& env) {
  Json j;
  j["kind"] = env.kind;
  if (env.kind == "mab") {
    j["means"] = env.means;
    j["noise"] = env.noise;
    j["noise_sigma"] = env.noise_sigma;
  } else if (env.kind == "linear_contextual") {
    j["dim"] = env.dim;
    j["num_arms"] = env.num_arms;
    j["context"] = env.context;
    j["reward_mode"] = env.reward_mode;
    if (!env.arm_params.empty()) j["arm_params"] = env.arm_params;
    if (!env.means.empty()) j["means"] = env.means;
    j["param_low"] = env.param_low;
    j["param_high"] = env.param_high;
    j["noise_sigma"] = env.noise_sigma;
  } else if (env.kind == "linear_fixed") {
    j["actions"] = env.actions;
    j["theta"] = env.theta;
    j["noise_sigma"] = env.noise_sigma;
  } else if (env.kind == "episodic") {
    j["mdp"] = env.mdp;
    j["episode_length"] = env.episode_length;
    if (env.mdp == "single_state") {
      j["num_actions"] = env.num_actions;
      j["state_reward"] = env.state_reward;
    }
  } else if (env.kind == "lower_bound") {
    j["variant"] = env.variant;
    j["x"] = env.x;
    j["y"] = env.y;
    j["world_horizon"] = env.world_horizon;
  }
  return j;
}

Json emit_bound(const RegretBoundSpec& b) {
  Json j;
  j["form"] = std::string(to_string(b.form));
  j["delta"] = b.delta;
  j["scale"] = b.scale;
  j["exponent"] = b.exponent;
  j["num_arms"] = b.num_arms;
  return j;
}

// ------------------------------------------------------------ validation

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

void validate_environment(const EnvironmentSpec& env, const std::string& path) {
  if (env.kind == "mab") {
    check(!env.means.empty(), child(path, "means"), "need at least one arm");
    check(env.noise == "bernoulli" || env.noise == "gaussian", child(path, "noise"),
          "expected bernoulli or gaussian");
    for (std::size_t i = 0; i < env.means.size(); ++i) {
      const double m = env.means[i];
      check(std::isfinite(m), index_path(child(path, "means"), i), "must be finite");
      if (env.noise == "bernoulli") {
        check(m >= 0.0 && m <= 1.0, index_path(child(path, "means"), i), "Bernoulli means must lie in [0, 1]");
      }
    }
    check(env.noise_sigma >= 0.0, child(path, "noise_sigma"), "must be >= 0");
  } else if (env.kind == "linear_contextual") {
    check(env.dim >= 1, child(path, "dim"), "must be >= 1");
    check(env.num_arms >= 1, child(path, "num_arms"), "must be >= 1");
    check(env.context == "uniform_cube" || env.context == "standard_normal", child(path, "context"),
          "expected uniform_cube or standard_normal");
    check(env.reward_mode == "linear" || env.reward_mode == "constant_mean", child(path, "reward_mode"),
          "expected linear or constant_mean");
    check(env.noise_sigma >= 0.0, child(path, "noise_sigma"), "must be >= 0");
    check(env.param_low <= env.param_high, child(path, "param_high"), "must be >= param_low");
    if (env.reward_mode == "linear") {
      check(env.means.empty(), child(path, "means"), "only used with reward_mode constant_mean");
      if (!env.arm_params.empty()) {
        check(static_cast<int>(env.arm_params.size()) == env.num_arms, child(path, "arm_params"),
              "need one parameter vector per arm");
        for (std::size_t i = 0; i < env.arm_params.size(); ++i) {
          check(static_cast<int>(env.arm_params[i].size()) == env.dim,
                index_path(child(path, "arm_params"), i), "length must equal dim");
        }
      }
    } else {
      check(env.arm_params.empty(), child(path, "arm_params"), "only used with reward_mode linear");
      check(env.means.empty() || static_cast<int>(env.means.size()) == env.num_arms,
            child(path, "means"), "need one mean per arm");
    }
  } else if (env.kind == "linear_fixed") {
    check(!env.theta.empty(), child(path, "theta"), "must not be empty");
    check(!env.actions.empty(), child(path, "actions"), "need at least one action");
    check(env.noise_sigma >= 0.0, child(path, "noise_sigma"), "must be >= 0");
    for (std::size_t i = 0; i < env.actions.size(); ++i) {
      const std::string p = index_path(child(path, "actions"), i);
      check(env.actions[i].size() == env.theta.size(), p, "length must equal the length of theta");
      double sq = 0.0;
      for (double v : env.actions[i]) {
        check(std::isfinite(v), p, "must be finite");
        sq += v * v;
      }
      check(sq > 0.0, p, "zero action vectors are not allowed");
      check(std::sqrt(sq) <= 1.0 + 1e-9, p, "action norm must be <= 1");
    }
  } else if (env.kind == "episodic") {
    check(env.mdp == "riverswim" || env.mdp == "single_state", child(path, "mdp"),
          "expected riverswim or single_state");
    check(env.episode_length >= 1, child(path, "episode_length"), "must be >= 1");
    check(env.num_actions >= 1, child(path, "num_actions"), "must be >= 1");
    check(env.state_reward >= 0.0 && env.state_reward <= 1.0, child(path, "state_reward"),
          "must lie in [0, 1]");
  } else if (env.kind == "lower_bound") {
    check(env.variant == "E1" || env.variant == "E2", child(path, "variant"), "expected E1 or E2");
    check(env.x > 0.0, child(path, "x"), "must be > 0");
    check(env.x < env.y && env.y <= 1.0, child(path, "y"), "need x < y <= 1");
    check(env.world_horizon >= 0, child(path, "world_horizon"), "must be >= 0");
  } else {
    throw ConfigError(child(path, "kind"), "unknown environment kind '" + env.kind + "'");
  }
}

struct ParamRule {
  bool required = false;
  bool integer = false;
};

const std::map<std::string, std::map<std::string, ParamRule>>& base_rules() {
  static const std::map<std::string, std::map<std::string, ParamRule>> rules = {
      {"ucb1", {}},
      {"eps_greedy", {{"c", {true, false}}}},
      {"eps_greedy_grid", {{"count", {true, true}}, {"low", {}}, {"high_per_horizon", {}}}},
      {"fixed_arm", {{"arm", {true, true}}}},
      {"fixed_arms", {}},
      {"oful", {{"lambda", {}}, {"delta", {}}, {"sigma", {}}, {"s_bound", {}}, {"feature_scale", {}}}},
      {"linear_rb", {{"lambda", {}}, {"delta", {}}, {"sigma", {}}, {"s_bound", {}}, {"feature_scale", {}}}},
      {"synthetic_const_regret", {{"rate", {true, false}}, {"horizon", {false, true}}}},
      {"synthetic_switching",
       {{"rate", {true, false}}, {"horizon", {false, true}}, {"t0", {false, true}}, {"c2", {}}}},
      {"ucrl2", {{"delta", {}}}},
      {"psrl", {}},
      {"qlearn_eps", {{"epsilon", {}}}},
  };
  return rules;
}

bool is_episodic_kind(const std::string& kind) {
  return kind == "ucrl2" || kind == "psrl" || kind == "qlearn_eps";
}

bool is_lower_bound_kind(const std::string& kind) {
  return kind == "synthetic_const_regret" || kind == "synthetic_switching";
}

void validate_base_params(const BaseSpec& b, const std::string& path) {
  const auto& rules = base_rules();
  const auto it = rules.find(b.kind);
  if (it == rules.end()) throw ConfigError(child(path, "kind"), "unknown base kind '" + b.kind + "'");
  for (const auto& [key, value] : b.params) {
    const auto r = it->second.find(key);
    check(r != it->second.end(), child(path, key), "unknown parameter for " + b.kind);
    check(std::isfinite(value), child(path, key), "must be finite");
    if (r->second.integer) check(std::floor(value) == value, child(path, key), "must be an integer");
  }
  for (const auto& [key, rule] : it->second) {
    if (rule.required) check(b.params.count(key) > 0, child(path, key), "required for " + b.kind);
  }
}

double param_or(const BaseSpec& b, const std::string& key, double fallback) {
  const auto it = b.params.find(key);
  return it == b.params.end() ? fallback : it->second;
}

void validate_concrete_base(const BaseSpec& b, const EnvironmentSpec& env, const std::string& path) {
  const bool episodic_env = env.kind == "episodic";
  if (is_episodic_kind(b.kind)) {
    check(episodic_env, child(path, "kind"), b.kind + " needs an episodic environment");
  } else {
    check(!episodic_env, child(path, "kind"), b.kind + " is a bandit base; environment is episodic");
  }
  if (is_lower_bound_kind(b.kind)) {
    check(env.kind == "lower_bound", child(path, "kind"), b.kind + " needs a lower_bound environment");
  }
  const auto& p = b.params;
  if (b.kind == "eps_greedy") check(p.at("c") > 0.0, child(path, "c"), "must be > 0");
  if (b.kind == "fixed_arm") {
    const double arm = p.at("arm");
    check(arm >= 0 && arm < detail::environment_arms(env), child(path, "arm"), "arm index out of range");
  }
  if (b.kind == "oful" || b.kind == "linear_rb") {
    check(p.at("lambda") > 0.0, child(path, "lambda"), "must be > 0");
    check(p.at("delta") > 0.0 && p.at("delta") < 1.0, child(path, "delta"), "must lie in (0, 1)");
    check(p.at("sigma") >= 0.0, child(path, "sigma"), "must be >= 0");
    check(p.at("s_bound") >= 0.0, child(path, "s_bound"), "must be >= 0");
    check(p.at("feature_scale") > 0.0, child(path, "feature_scale"), "must be > 0");
    if (b.kind == "linear_rb" && env.kind == "linear_contextual") {
      check(env.context == "uniform_cube", child(path, "kind"),
            "linear_rb needs bounded contexts (uniform_cube) so that feature norms stay <= 1");
      check(p.at("feature_scale") * std::sqrt(static_cast<double>(env.dim)) <= 1.0 + 1e-12,
            child(path, "feature_scale"), "must be <= 1/sqrt(dim) so that feature norms stay <= 1");
    }
  }
  if (is_lower_bound_kind(b.kind)) {
    check(p.at("rate") >= 0.0 && p.at("rate") <= 1.0, child(path, "rate"), "must lie in [0, 1]");
    check(p.at("horizon") >= 1, child(path, "horizon"), "must be >= 1");
    if (b.kind == "synthetic_switching") check(p.at("t0") >= 0, child(path, "t0"), "must be >= 0");
  }
  if (b.kind == "ucrl2") {
    check(p.at("delta") > 0.0 && p.at("delta") < 1.0, child(path, "delta"), "must lie in (0, 1)");
  }
  if (b.kind == "qlearn_eps") {
    check(p.at("epsilon") >= 0.0 && p.at("epsilon") <= 1.0, child(path, "epsilon"), "must lie in [0, 1]");
  }
}

void validate_run(const RunSpec& run, const ScenarioConfig& config, const std::string& path) {
  check(!run.name.empty(), child(path, "name"), "must not be empty");
  for (const char c : run.name) {
    check(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-', child(path, "name"),
          "use letters, digits, '_' or '-'");
  }
  if (run.environment) validate_environment(*run.environment, child(path, "environment"));
  const EnvironmentSpec& env = detail::run_environment(config, run);
  check(!run.bases.empty(), child(path, "bases"), "need at least one base");
  for (std::size_t i = 0; i < run.bases.size(); ++i) {
    const std::string bpath = index_path(child(path, "bases"), i);
    validate_base_params(run.bases[i], bpath);
    if (run.bases[i].kind == "eps_greedy_grid") {
      const auto& p = run.bases[i].params;
      check(p.at("count") >= 2, child(bpath, "count"), "must be >= 2");
      check(param_or(run.bases[i], "low", 1.0) > 0.0, child(bpath, "low"), "must be > 0");
    }
    if (run.bases[i].kind == "fixed_arms") {
      check(detail::is_bandit_environment(env), child(bpath, "kind"), "needs a bandit environment");
    }
  }
  std::vector<BaseSpec> bases;
  try {
    bases = detail::expand_bases(run, env, config.horizon);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(child(path, "bases"), e.what());
  }
  // Expanded bases are reported by their position after expansion.
  for (std::size_t i = 0; i < bases.size(); ++i) {
    validate_concrete_base(bases[i], env, index_path(child(path, "bases"), i));
  }

  const auto& m = run.master;
  const std::string mpath = child(path, "master");
  const std::string& kind = m.kind;
  auto no_params = [&] {
    for (const auto& [key, v] : m.params) throw ConfigError(child(mpath, key), "unknown parameter for " + kind);
  };
  if (kind == "regret_balancing" || kind == "episodic_regret_balancing") {
    check(m.bound.has_value(), child(mpath, "bound"), "required for " + kind);
    try {
      validate(*m.bound);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(child(mpath, "bound"), e.what());
    }
    if (kind == "regret_balancing") {
      check(detail::is_bandit_environment(env), child(mpath, "kind"), "needs a bandit environment");
    } else {
      check(env.kind == "episodic", child(mpath, "kind"), "needs an episodic environment");
    }
    if (m.bound->form == BoundForm::kOfulLogdet) {
      for (std::size_t i = 0; i < bases.size(); ++i) {
        check(bases[i].kind == "oful" || bases[i].kind == "linear_rb",
              index_path(child(path, "bases"), i), "oful_logdet bound needs ridge-based bases");
      }
    }
    no_params();
  } else if (kind == "forced_exploration") {
    check(!m.bound.has_value(), child(mpath, "bound"), "forced_exploration takes no regret bound");
    check(env.kind == "mab" || env.kind == "linear_fixed" || env.kind == "lower_bound", child(mpath, "kind"),
          "forced_exploration needs direct arm access (not a contextual or episodic environment)");
    no_params();
  } else if (kind == "alone") {
    check(!m.bound.has_value(), child(mpath, "bound"), "alone takes no regret bound");
    no_params();
  } else if (kind == "scripted") {
    check(!m.bound.has_value(), child(mpath, "bound"), "scripted takes no regret bound");
    check(detail::is_bandit_environment(env), child(mpath, "kind"), "needs a bandit environment");
    for (const auto& [key, v] : m.params) {
      check(key == "majority" || key == "minority" || key == "minority_plays", child(mpath, key),
            "unknown parameter for scripted");
      check(std::floor(v) == v, child(mpath, key), "must be an integer");
    }
    for (const char* key : {"majority", "minority"}) {
      check(m.params.count(key) > 0, child(mpath, key), "required for scripted");
      const double v = m.params.at(key);
      check(v >= 0 && v < static_cast<double>(bases.size()), child(mpath, key), "base index out of range");
    }
    if (m.params.count("minority_plays")) {
      check(m.params.at("minority_plays") >= 0, child(mpath, "minority_plays"), "must be >= 0");
    } else {
      check(env.kind == "lower_bound", child(mpath, "minority_plays"), "required outside lower_bound environments");
    }
  } else {
    throw ConfigError(child(mpath, "kind"),
                      "unknown master kind '" + kind +
                          "' (expected regret_balancing, episodic_regret_balancing, forced_exploration, alone "
                          "or scripted)");
  }
}

}  // namespace

// ------------------------------------------------------------ internals

namespace detail {

bool is_bandit_environment(const EnvironmentSpec& env) { return env.kind != "episodic"; }

const EnvironmentSpec& run_environment(const ScenarioConfig& config, const RunSpec& run) {
  return run.environment ? *run.environment : config.environment;
}

long world_horizon(const EnvironmentSpec& env, long horizon) {
  return env.world_horizon > 0 ? env.world_horizon : horizon;
}

int environment_arms(const EnvironmentSpec& env) {
  if (env.kind == "mab") return static_cast<int>(env.means.size());
  if (env.kind == "linear_contextual") return env.num_arms;
  if (env.kind == "linear_fixed") return static_cast<int>(env.actions.size());
  if (env.kind == "lower_bound") return 3;
  return env.mdp == "riverswim" ? 2 : env.num_actions;
}

long default_switch_time(const EnvironmentSpec& env, long horizon, double c2) {
  const double T = static_cast<double>(world_horizon(env, horizon));
  const double exponent = env.x - env.y + 1.0 + (env.y - env.x) / 4.0;
  return static_cast<long>(std::ceil(c2 * std::pow(T, exponent)));
}

namespace {

// Largest absolute coordinate of the true parameter in the base's feature
// space, before feature scaling.
double coordinate_bound(const EnvironmentSpec& env) {
  double bound = 0.0;
  if (env.kind == "mab") {
    for (double m : env.means) bound = std::max(bound, std::abs(m));
  } else if (env.kind == "linear_contextual") {
    if (env.reward_mode == "linear" && !env.arm_params.empty()) {
      for (const auto& row : env.arm_params) {
        for (double v : row) bound = std::max(bound, std::abs(v));
      }
    } else if (env.reward_mode == "constant_mean" && !env.means.empty()) {
      for (double m : env.means) bound = std::max(bound, std::abs(m));
    } else {
      bound = std::max(std::abs(env.param_low), std::abs(env.param_high));
    }
  } else if (env.kind == "linear_fixed") {
    for (double v : env.theta) bound = std::max(bound, std::abs(v));
  } else if (env.kind == "lower_bound") {
    bound = 2.0;
  }
  return bound;
}

int feature_dim(const EnvironmentSpec& env) {
  if (env.kind == "linear_contextual") return env.dim * env.num_arms;
  if (env.kind == "linear_fixed") return static_cast<int>(env.theta.size());
  return environment_arms(env);
}

double default_sigma(const EnvironmentSpec& env) {
  if (env.kind == "mab") return env.noise == "bernoulli" ? 0.5 : env.noise_sigma;
  if (env.kind == "linear_contextual" || env.kind == "linear_fixed") return env.noise_sigma;
  return 0.0;
}

}  // namespace

std::vector<BaseSpec> expand_bases(const RunSpec& run, const EnvironmentSpec& env, long horizon) {
  std::vector<BaseSpec> out;
  for (const auto& b : run.bases) {
    if (b.kind == "eps_greedy_grid") {
      const double lo = param_or(b, "low", 1.0);
      const double hi = param_or(b, "high_per_horizon", 2.0) * static_cast<double>(horizon);
      for (double c : geometric_grid(lo, hi, static_cast<int>(b.params.at("count")))) {
        out.push_back({"eps_greedy", {{"c", c}}});
      }
    } else if (b.kind == "fixed_arms") {
      for (int a = 0; a < environment_arms(env); ++a) out.push_back({"fixed_arm", {{"arm", a}}});
    } else {
      BaseSpec c = b;
      auto fill = [&](const char* key, double value) { c.params.emplace(key, value); };
      if (b.kind == "oful" || b.kind == "linear_rb") {
        double scale_default = 1.0;
        if (b.kind == "linear_rb" && env.kind == "linear_contextual") {
          scale_default = 1.0 / std::sqrt(static_cast<double>(env.dim));
        }
        fill("lambda", 1.0);
        fill("delta", 0.1);
        fill("sigma", default_sigma(env));
        fill("feature_scale", scale_default);
        const double scale = c.params.at("feature_scale");
        // One-hot features are not scaled.
        const double effective = env.kind == "linear_contextual" ? scale : 1.0;
        fill("s_bound", std::sqrt(static_cast<double>(feature_dim(env))) * coordinate_bound(env) / effective);
      } else if (is_lower_bound_kind(b.kind)) {
        fill("horizon", static_cast<double>(world_horizon(env, horizon)));
        if (b.kind == "synthetic_switching") {
          fill("c2", 1.0);
          fill("t0", static_cast<double>(default_switch_time(env, horizon, c.params.at("c2"))));
        }
      } else if (b.kind == "ucrl2") {
        fill("delta", 0.1);
      } else if (b.kind == "qlearn_eps") {
        fill("epsilon", 0.1);
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace detail

// ------------------------------------------------------------ public API

ScenarioConfig parse_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  require_object(j, "");
  reject_unknown(j, "",
                 {"name", "description", "environment", "runs", "horizon", "num_seeds", "full_scale_seeds",
                  "master_seed", "checkpoints", "output_dir"});
  ScenarioConfig c;
  if (!j.contains("name")) throw ConfigError("name", "missing");
  c.name = read_string(j.at("name"), "name");
  read_optional(j, "", "description", c.description, read_string);
  if (!j.contains("environment")) throw ConfigError("environment", "missing");
  c.environment = parse_environment(j.at("environment"), "environment");
  if (!j.contains("runs")) throw ConfigError("runs", "missing");
  const Json& runs = j.at("runs");
  if (!runs.is_array()) throw ConfigError("runs", "expected an array");
  for (std::size_t i = 0; i < runs.size(); ++i) c.runs.push_back(parse_run(runs[i], index_path("runs", i)));
  read_optional(j, "", "horizon", c.horizon, read_integer);
  auto read_int = [](const Json& v, const std::string& p) { return static_cast<int>(read_integer(v, p)); };
  read_optional(j, "", "num_seeds", c.num_seeds, read_int);
  if (j.contains("full_scale_seeds")) c.full_scale_seeds = read_int(j.at("full_scale_seeds"), "full_scale_seeds");
  if (j.contains("master_seed")) {
    const Json& s = j.at("master_seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("master_seed", "expected a nonnegative 64-bit integer");
    }
    c.master_seed = s.get<std::uint64_t>();
  }
  if (j.contains("checkpoints")) c.checkpoints = parse_checkpoints(j.at("checkpoints"), "checkpoints");
  read_optional(j, "", "output_dir", c.output_dir, read_string);
  return c;
}

std::string emit_config(const ScenarioConfig& c) {
  Json j;
  j["name"] = c.name;
  if (!c.description.empty()) j["description"] = c.description;
  j["horizon"] = c.horizon;
  j["num_seeds"] = c.num_seeds;
  if (c.full_scale_seeds) j["full_scale_seeds"] = *c.full_scale_seeds;
  j["master_seed"] = c.master_seed;
  if (c.checkpoints.kind == "list") {
    j["checkpoints"] = c.checkpoints.points;
  } else if (c.checkpoints.kind == "doubling") {
    j["checkpoints"] = Json{{"doubling_from", c.checkpoints.start}};
  } else {
    j["checkpoints"] = Json{{"every", c.checkpoints.step}};
  }
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
  j["environment"] = emit_environment(c.environment);
  Json runs = Json::array();
  for (const auto& r : c.runs) {
    Json run;
    run["name"] = r.name;
    Json master;
    master["kind"] = r.master.kind;
    if (r.master.bound) master["bound"] = emit_bound(*r.master.bound);
    for (const auto& [k, v] : r.master.params) master[k] = v;
    run["master"] = master;
    Json bases = Json::array();
    for (const auto& b : r.bases) {
      Json bj;
      bj["kind"] = b.kind;
      for (const auto& [k, v] : b.params) bj[k] = v;
      bases.push_back(bj);
    }
    run["bases"] = bases;
    if (r.environment) run["environment"] = emit_environment(*r.environment);
    runs.push_back(run);
  }
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

void validate_config(const ScenarioConfig& c) {
  check(!c.name.empty(), "name", "must not be empty");
  for (const char ch : c.name) {
    check(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-', "name",
          "use letters, digits, '_' or '-'");
  }
  check(c.horizon >= 1, "horizon", "must be >= 1");
  check(c.num_seeds >= 1, "num_seeds", "must be >= 1");
  if (c.full_scale_seeds) check(*c.full_scale_seeds >= 1, "full_scale_seeds", "must be >= 1");
  validate_environment(c.environment, "environment");
  check(!c.runs.empty(), "runs", "need at least one run");
  std::set<std::string> names;
  for (std::size_t i = 0; i < c.runs.size(); ++i) {
    validate_run(c.runs[i], c, index_path("runs", i));
    check(names.insert(c.runs[i].name).second, index_path("runs", i) + ".name", "duplicate run name");
  }
  const auto& cp = c.checkpoints;
  if (cp.kind == "every") {
    check(cp.step >= 1, "checkpoints.every", "must be >= 1");
  } else if (cp.kind == "doubling") {
    check(cp.start >= 1, "checkpoints.doubling_from", "must be >= 1");
    check(cp.start <= c.horizon, "checkpoints.doubling_from", "must be <= horizon");
  } else if (cp.kind == "list") {
    check(!cp.points.empty(), "checkpoints", "need at least one checkpoint");
    for (std::size_t i = 0; i < cp.points.size(); ++i) {
      const std::string p = index_path("checkpoints", i);
      check(cp.points[i] >= 1 && cp.points[i] <= c.horizon, p, "must lie in [1, horizon]");
      if (i > 0) check(cp.points[i] > cp.points[i - 1], p, "checkpoints must be strictly increasing");
    }
  } else {
    throw ConfigError("checkpoints", "unknown schedule '" + cp.kind + "'");
  }
  std::set<std::string> series;
  for (const auto& s : series_names(c)) check(series.insert(s).second, "runs", "duplicate series name " + s);
}

std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides) {
  if (overrides.empty()) return std::string(text);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(o, "override must look like field.path=value");
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    std::string pointer;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) pointer += "/" + part;
    Json value;
    try {
      value = Json::parse(raw);
    } catch (const Json::parse_error&) {
      value = raw;
    }
    try {
      j[Json::json_pointer(pointer)] = value;
    } catch (const Json::exception& e) {
      throw ConfigError(key, std::string("cannot override: ") + e.what());
    }
  }
  return j.dump(2) + "\n";
}

ScenarioConfig load_scenario(const std::string& name_or_path, const std::vector<std::string>& overrides) {
  std::string text;
  if (auto builtin = builtin_scenario_text(name_or_path)) {
    text = *builtin;
  } else {
    std::ifstream in(name_or_path, std::ios::binary);
    if (!in) {
      throw std::runtime_error("'" + name_or_path + "' is neither a builtin scenario nor a readable file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  ScenarioConfig c = parse_config(apply_overrides(text, overrides));
  validate_config(c);
  return c;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("geometric_grid: need 0 < lo < hi");
  }
  if (n < 2) throw std::invalid_argument("geometric_grid: need n >= 2");
  std::vector<double> grid(static_cast<std::size_t>(n));
  const double log_ratio = std::log(hi / lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(log_ratio * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<long> resolve_checkpoints(const CheckpointSpec& spec, long horizon) {
  std::vector<long> out;
  if (spec.kind == "list") {
    for (long p : spec.points) {
      if (p >= 1 && p <= horizon) out.push_back(p);
    }
  } else if (spec.kind == "doubling") {
    for (long t = std::max(1L, spec.start); t <= horizon; t *= 2) out.push_back(t);
    if (out.empty() || out.back() != horizon) out.push_back(horizon);
  } else {
    const long step = std::max(1L, spec.step);
    for (long t = step; t <= horizon; t += step) out.push_back(t);
    if (out.empty() || out.back() != horizon) out.push_back(horizon);
  }
  return out;
}

std::vector<std::string> series_names(const ScenarioConfig& config) {
  std::vector<std::string> names;
  for (const auto& run : config.runs) {
    if (run.master.kind == "alone") {
      const auto bases = detail::expand_bases(run, detail::run_environment(config, run), config.horizon);
      if (bases.size() == 1) {
        names.push_back(run.name);
      } else {
        for (std::size_t i = 0; i < bases.size(); ++i) names.push_back(run.name + "_" + std::to_string(i));
      }
    } else {
      names.push_back(run.name);
    }
  }
  return names;
}

}  // namespace rebal
