#pragma once

#include <string>
#include <vector>

#include "rebal/harness.hpp"

namespace rebal::detail {

bool is_bandit_environment(const EnvironmentSpec& env);
const EnvironmentSpec& run_environment(const ScenarioConfig& config, const RunSpec& run);
long world_horizon(const EnvironmentSpec& env, long horizon);
int environment_arms(const EnvironmentSpec& env);

// Concrete bases after grid / arms-as-bases expansion, with every default
// parameter filled in.
std::vector<BaseSpec> expand_bases(const RunSpec& run, const EnvironmentSpec& env, long horizon);

// ceil(c2 * T^(x - y + 1 + (y - x) / 4))
long default_switch_time(const EnvironmentSpec& env, long horizon, double c2);

}  // namespace rebal::detail
