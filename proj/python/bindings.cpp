#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rebal/balancer.hpp"
#include "rebal/harness.hpp"
#include "rebal/linbandit.hpp"
#include "rebal/numerics.hpp"
#include "rebal/rng.hpp"

namespace py = pybind11;
using namespace rebal;

namespace {

RegretBoundSpec make_bound(const std::string& form, double delta, double scale, double exponent, int num_arms) {
  RegretBoundSpec spec{parse_bound_form(form), delta, scale, exponent, num_arms};
  validate(spec);
  return spec;
}

std::vector<BaseStats> make_stats(const std::vector<long>& n, const std::vector<double>& r) {
  if (n.size() != r.size()) throw std::invalid_argument("counts and rewards differ in length");
  std::vector<BaseStats> out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    out[i].n_rounds = n[i];
    out[i].total_reward = r[i];
    out[i].summary.rounds = n[i];
  }
  return out;
}

ScenarioConfig resolve(const std::string& scenario, const std::vector<std::string>& overrides,
                       std::optional<int> seeds, std::optional<long> horizon) {
  ScenarioConfig config;
  if (builtin_scenario_text(scenario) || scenario.find('{') == std::string::npos) {
    config = load_scenario(scenario, overrides);
  } else {
    config = parse_config(apply_overrides(scenario, overrides));
  }
  if (seeds) config.num_seeds = *seeds;
  if (horizon) config.horizon = *horizon;
  validate_config(config);
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regret-balancing model selection for bandits and episodic RL";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("derive_substream_key",
        [](std::uint64_t master_seed, std::uint64_t seed_index, const std::string& label) {
          return derive_substream(master_seed, seed_index, label).key();
        },
        py::arg("master_seed"), py::arg("seed_index"), py::arg("label"));

  m.def("eval_bound",
        [](const std::string& form, long rounds, double delta, double scale, double exponent, int num_arms,
           std::optional<double> logdet) {
          return eval_bound(make_bound(form, delta, scale, exponent, num_arms), {rounds, logdet});
        },
        py::arg("form"), py::arg("rounds"), py::arg("delta") = 0.1, py::arg("scale") = 1.0,
        py::arg("exponent") = 0.5, py::arg("num_arms") = 1, py::arg("logdet") = py::none());

  m.def("optimistic_base",
        [](const std::vector<long>& n, const std::vector<double>& r, const std::string& form, double delta,
           double scale, double exponent) {
          const auto stats = make_stats(n, r);
          const auto opt = optimistic_base(stats, make_bound(form, delta, scale, exponent, 1));
          return py::make_tuple(opt.base, opt.value);
        },
        py::arg("n"), py::arg("rewards"), py::arg("form") = "power_law", py::arg("delta") = 0.1,
        py::arg("scale") = 1.0, py::arg("exponent") = 0.5,
        "Returns (j_t, b_t) for the given per-base counts and reward sums.");

  m.def("select_base",
        [](const std::vector<long>& n, const std::vector<double>& r, const std::string& form, double delta,
           double scale, double exponent) {
          return select_base(make_stats(n, r), make_bound(form, delta, scale, exponent, 1));
        },
        py::arg("n"), py::arg("rewards"), py::arg("form") = "power_law", py::arg("delta") = 0.1,
        py::arg("scale") = 1.0, py::arg("exponent") = 0.5);

  m.def("empirical_regret",
        [](long n, double r, double b_t) { return empirical_regret(make_stats({n}, {r})[0], b_t); },
        py::arg("n"), py::arg("reward"), py::arg("b_t"));

  m.def("forced_exploration_pulls", &forced_exploration_pulls, py::arg("horizon"), py::arg("num_bases"),
        py::arg("num_arms"));

  m.def("balancing_ratio",
        [](long t, double g_a, double g_b) -> std::optional<double> {
          const RatioSample s{t, g_a, g_b};
          const auto p = balancing_ratio(std::span<const RatioSample>(&s, 1))[0];
          if (p.skipped) return std::nullopt;
          return p.ratio;
        },
        py::arg("t"), py::arg("g_a"), py::arg("g_b"));

  m.def("geometric_grid", &geometric_grid, py::arg("lo"), py::arg("hi"), py::arg("n"));

  py::class_<RidgeState>(m, "RidgeState")
      .def(py::init<int, double>(), py::arg("dim"), py::arg("lam") = 1.0)
      .def("update", &RidgeState::update, py::arg("x"), py::arg("y"))
      .def("weighted_norm", &RidgeState::weighted_norm, py::arg("x"))
      .def("beta_radius", &RidgeState::beta_radius, py::arg("delta"), py::arg("sigma"), py::arg("s_bound"))
      .def_property_readonly("theta_hat", &RidgeState::theta_hat)
      .def_property_readonly("logdet", &RidgeState::logdet)
      .def_property_readonly("count", &RidgeState::count)
      .def_property_readonly("cov_inv", &RidgeState::cov_inv);

  py::class_<LinearRegretBalancer>(m, "LinearRegretBalancer")
      .def(py::init<int, double, double, double, double>(), py::arg("dim"), py::arg("lam") = 1.0,
           py::arg("delta") = 0.1, py::arg("sigma") = 1.0, py::arg("s_bound") = 1.0)
      .def("select",
           [](LinearRegretBalancer& self, const std::vector<Vector>& actions) {
             const auto sel = self.select(actions);
             py::dict d;
             d["chosen"] = sel.chosen;
             d["optimistic"] = sel.optimistic;
             d["b_t"] = sel.b_t;
             d["beta"] = sel.beta;
             d["g_hat"] = sel.g_hat;
             return d;
           },
           py::arg("actions"))
      .def("update", &LinearRegretBalancer::update, py::arg("x"), py::arg("reward"))
      .def_property_readonly("ridge", &LinearRegretBalancer::ridge, py::return_value_policy::reference_internal);

  m.def("list_scenarios", &builtin_scenario_names);

  m.def("show_scenario",
        [](const std::string& scenario, const std::vector<std::string>& overrides) {
          return emit_config(resolve(scenario, overrides, std::nullopt, std::nullopt));
        },
        py::arg("scenario"), py::arg("overrides") = std::vector<std::string>{},
        "Resolved JSON config of a builtin name, a config path or config text.");

  m.def("run",
        [](const std::string& scenario, std::optional<int> seeds, std::optional<long> horizon,
           const std::vector<std::string>& overrides, int threads) {
          const auto config = resolve(scenario, overrides, seeds, horizon);
          ScenarioResult result;
          {
            py::gil_scoped_release release;
            result = run_scenario_in_memory(config, {threads, false});
          }
          py::dict regret;
          for (const auto& alg : result.algorithms) {
            std::vector<std::vector<double>> rows;
            for (const auto& s : result.series) {
              if (s.algorithm == alg) rows.push_back(s.regret);
            }
            regret[py::str(alg)] = rows;
          }
          py::dict out;
          out["name"] = config.name;
          out["algorithms"] = result.algorithms;
          out["checkpoints"] = result.checkpoints;
          out["regret"] = regret;
          out["summary_csv"] = summary_csv(result);
          return out;
        },
        py::arg("scenario"), py::arg("seeds") = py::none(), py::arg("horizon") = py::none(),
        py::arg("overrides") = std::vector<std::string>{}, py::arg("threads") = 0,
        "Runs a scenario in memory. regret[alg] holds one row per seed, one column per checkpoint.");

  m.def("run_to_dir",
        [](const std::string& scenario, const std::filesystem::path& out_dir, std::optional<int> seeds,
           std::optional<long> horizon, const std::vector<std::string>& overrides, bool full_trace, int threads) {
          const auto config = resolve(scenario, overrides, seeds, horizon);
          WrittenFiles files;
          {
            py::gil_scoped_release release;
            files = run_scenario(config, out_dir, full_trace, threads);
          }
          py::dict out;
          out["summary"] = files.summary;
          out["traces"] = files.traces;
          out["reference"] = files.reference;
          return out;
        },
        py::arg("scenario"), py::arg("out_dir"), py::arg("seeds") = py::none(), py::arg("horizon") = py::none(),
        py::arg("overrides") = std::vector<std::string>{}, py::arg("full_trace") = false, py::arg("threads") = 0);
}
