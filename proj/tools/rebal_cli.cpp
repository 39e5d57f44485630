#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rebal/harness.hpp"

namespace {

rebal::ScenarioConfig load(const std::string& target, const std::vector<std::string>& sets, int seeds,
                           long horizon, bool full_scale) {
  rebal::ScenarioConfig config = rebal::load_scenario(target, sets);
  if (full_scale && config.full_scale_seeds) config.num_seeds = *config.full_scale_seeds;
  if (seeds > 0) config.num_seeds = seeds;
  if (horizon > 0) config.horizon = horizon;
  rebal::validate_config(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regret-balancing model selection experiments"};
  app.require_subcommand(1);

  std::string target;
  std::vector<std::string> sets;
  int seeds = 0;
  long horizon = 0;
  std::string out_dir;
  bool full_trace = false;
  bool full_scale = false;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run a builtin scenario or a config file");
  run->add_option("scenario", target, "Builtin scenario name or config path")->required();
  run->add_option("--seeds", seeds, "Number of seeds")->check(CLI::PositiveNumber);
  run->add_option("--horizon", horizon, "Rounds (or episodes) per run")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (default: $RBAL_OUT_DIR or ./results)");
  run->add_flag("--full-trace", full_trace, "Also write per-round traces");
  run->add_flag("--full-scale", full_scale, "Use the full replication count");
  run->add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  run->add_option("--set", sets, "Override a config field, e.g. runs.0.master.bound.scale=2");

  auto* list = app.add_subcommand("list", "List builtin scenarios");

  auto* validate = app.add_subcommand("validate", "Validate a config file or builtin scenario");
  validate->add_option("config", target, "Config path or builtin name")->required();
  validate->add_option("--set", sets, "Override a config field");

  auto* show = app.add_subcommand("show", "Print the resolved config of a scenario");
  show->add_option("scenario", target, "Builtin scenario name or config path")->required();
  show->add_option("--set", sets, "Override a config field");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& name : rebal::builtin_scenario_names()) {
        const auto config = rebal::parse_config(*rebal::builtin_scenario_text(name));
        std::printf("%-22s %s\n", name.c_str(), config.description.c_str());
      }
    } else if (*validate) {
      const auto config = load(target, sets, 0, 0, false);
      std::printf("%s: ok (%zu series, %d seeds, horizon %ld)\n", config.name.c_str(),
                  rebal::series_names(config).size(), config.num_seeds, config.horizon);
    } else if (*show) {
      std::fputs(rebal::emit_config(load(target, sets, 0, 0, false)).c_str(), stdout);
    } else if (*run) {
      const auto config = load(target, sets, seeds, horizon, full_scale);
      std::filesystem::path dir = !out_dir.empty()              ? std::filesystem::path(out_dir)
                                  : !config.output_dir.empty() ? std::filesystem::path(config.output_dir)
                                                               : rebal::default_output_dir();
      const auto files = rebal::run_scenario(config, dir, full_trace, threads);
      std::printf("%s\n", files.summary.string().c_str());
      for (const auto& t : files.traces) std::printf("%s\n", t.string().c_str());
      if (files.reference) std::printf("%s\n", files.reference->string().c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
