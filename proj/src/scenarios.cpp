#include <array>

#include "rebal/harness.hpp"

namespace rebal {

namespace {

struct Builtin {
  std::string_view name;
  std::string_view text;
};

constexpr std::string_view kFig1Left = R"json({
  "name": "fig1_left",
  "description": "4-armed Bernoulli bandit; every arm is a base; compared with UCB1",
  "horizon": 10000,
  "num_seeds": 200,
  "full_scale_seeds": 2000,
  "master_seed": 20200101,
  "checkpoints": {"every": 100},
  "environment": {"kind": "mab", "means": [0.1, 0.2, 0.3, 0.4], "noise": "bernoulli"},
  "runs": [
    {"name": "regret_balancing",
     "master": {"kind": "regret_balancing", "bound": {"form": "sqrt_half_t_log", "delta": 0.1}},
     "bases": [{"kind": "fixed_arms"}]},
    {"name": "ucb1", "master": {"kind": "alone"}, "bases": [{"kind": "ucb1"}]}
  ]
})json";

constexpr std::string_view kFig1Right = R"json({
  "name": "fig1_right",
  "description": "2-armed linear contextual bandit in R^3; linear regret balancing vs OFUL",
  "horizon": 10000,
  "num_seeds": 20,
  "master_seed": 20200102,
  "checkpoints": {"every": 100},
  "environment": {"kind": "linear_contextual", "dim": 3, "num_arms": 2, "context": "uniform_cube",
                  "reward_mode": "linear", "param_low": 0.0, "param_high": 1.0, "noise_sigma": 1.0},
  "runs": [
    {"name": "regret_balancing", "master": {"kind": "alone"}, "bases": [{"kind": "linear_rb"}]},
    {"name": "oful", "master": {"kind": "alone"}, "bases": [{"kind": "oful"}]}
  ]
})json";

constexpr std::string_view kFig2Left = R"json({
  "name": "fig2_left",
  "description": "Two Bernoulli arms; 18 epsilon-greedy bases with c on a geometric grid in [1, 2T]",
  "horizon": 10000,
  "num_seeds": 20,
  "master_seed": 20200201,
  "checkpoints": {"every": 100},
  "environment": {"kind": "mab", "means": [0.5, 0.45], "noise": "bernoulli"},
  "runs": [
    {"name": "regret_balancing",
     "master": {"kind": "regret_balancing", "bound": {"form": "power_law", "exponent": 0.5, "scale": 1.0}},
     "bases": [{"kind": "eps_greedy_grid", "count": 18, "low": 1, "high_per_horizon": 2}]},
    {"name": "eps_greedy", "master": {"kind": "alone"},
     "bases": [{"kind": "eps_greedy_grid", "count": 18, "low": 1, "high_per_horizon": 2}]}
  ]
})json";

constexpr std::string_view kFig2Mid = R"json({
  "name": "fig2_mid",
  "description": "Choosing between UCB1 and OFUL; 2 linear arms in R^10, normal contexts",
  "horizon": 10000,
  "num_seeds": 100,
  "full_scale_seeds": 500,
  "master_seed": 20200202,
  "checkpoints": {"every": 100},
  "environment": {"kind": "linear_contextual", "dim": 10, "num_arms": 2, "context": "standard_normal",
                  "reward_mode": "linear", "param_low": 0.0, "param_high": 0.3333333333333333,
                  "noise_sigma": 0.31622776601683794},
  "runs": [
    {"name": "regret_balancing",
     "master": {"kind": "regret_balancing",
                "bound": {"form": "power_law", "exponent": 0.5, "scale": 1.4142135623730951}},
     "bases": [{"kind": "ucb1"}, {"kind": "oful"}]},
    {"name": "ucb1", "master": {"kind": "alone"}, "bases": [{"kind": "ucb1"}]},
    {"name": "oful", "master": {"kind": "alone"}, "bases": [{"kind": "oful"}]}
  ]
})json";

constexpr std::string_view kFig2Right = R"json({
  "name": "fig2_right",
  "description": "Choosing between UCB1 and OFUL; 5 arms with context-free means, contexts in R^10",
  "horizon": 10000,
  "num_seeds": 100,
  "full_scale_seeds": 200,
  "master_seed": 20200203,
  "checkpoints": {"every": 100},
  "environment": {"kind": "linear_contextual", "dim": 10, "num_arms": 5, "context": "standard_normal",
                  "reward_mode": "constant_mean", "param_low": 0.0, "param_high": 1.0,
                  "noise_sigma": 0.31622776601683794},
  "runs": [
    {"name": "regret_balancing",
     "master": {"kind": "regret_balancing",
                "bound": {"form": "power_law", "exponent": 0.5, "scale": 2.23606797749979}},
     "bases": [{"kind": "ucb1"}, {"kind": "oful"}]},
    {"name": "ucb1", "master": {"kind": "alone"}, "bases": [{"kind": "ucb1"}]},
    {"name": "oful", "master": {"kind": "alone"}, "bases": [{"kind": "oful"}]}
  ]
})json";

constexpr std::string_view kFig3 = R"json({
  "name": "fig3_riverswim",
  "description": "Episodic model selection over UCRL2, epsilon-greedy Q-learning and PSRL on RiverSwim",
  "horizon": 2000,
  "num_seeds": 10,
  "master_seed": 20200301,
  "checkpoints": {"every": 20},
  "environment": {"kind": "episodic", "mdp": "riverswim", "episode_length": 20},
  "runs": [
    {"name": "regret_balancing",
     "master": {"kind": "episodic_regret_balancing",
                "bound": {"form": "power_law", "exponent": 0.5, "scale": 10.0}},
     "bases": [{"kind": "ucrl2", "delta": 0.1}, {"kind": "qlearn_eps", "epsilon": 0.1}, {"kind": "psrl"}]},
    {"name": "ucrl2", "master": {"kind": "alone"}, "bases": [{"kind": "ucrl2", "delta": 0.1}]},
    {"name": "qlearn_eps", "master": {"kind": "alone"}, "bases": [{"kind": "qlearn_eps", "epsilon": 0.1}]},
    {"name": "psrl", "master": {"kind": "alone"}, "bases": [{"kind": "psrl"}]}
  ]
})json";

constexpr std::string_view kThm5 = R"json({
  "name": "thm5_dichotomy",
  "description": "Three-armed worlds E1/E2 with bases B1, B2 and the switching B2'",
  "horizon": 10000,
  "num_seeds": 20,
  "master_seed": 20200501,
  "checkpoints": {"every": 100},
  "environment": {"kind": "lower_bound", "variant": "E1", "x": 0.4, "y": 0.8},
  "runs": [
    {"name": "b1_e1", "master": {"kind": "alone"}, "bases": [{"kind": "synthetic_const_regret", "rate": 0.4}]},
    {"name": "b2_e1", "master": {"kind": "alone"}, "bases": [{"kind": "synthetic_const_regret", "rate": 0.8}]},
    {"name": "b1_e2", "master": {"kind": "alone"}, "bases": [{"kind": "synthetic_const_regret", "rate": 0.4}],
     "environment": {"kind": "lower_bound", "variant": "E2", "x": 0.4, "y": 0.8}},
    {"name": "b2prime_e2", "master": {"kind": "alone"}, "bases": [{"kind": "synthetic_switching", "rate": 0.8}],
     "environment": {"kind": "lower_bound", "variant": "E2", "x": 0.4, "y": 0.8}},
    {"name": "scripted_e1", "master": {"kind": "scripted", "majority": 0, "minority": 1},
     "bases": [{"kind": "synthetic_const_regret", "rate": 0.4}, {"kind": "synthetic_const_regret", "rate": 0.8}]},
    {"name": "scripted_e2", "master": {"kind": "scripted", "majority": 0, "minority": 1},
     "bases": [{"kind": "synthetic_const_regret", "rate": 0.4}, {"kind": "synthetic_switching", "rate": 0.8}],
     "environment": {"kind": "lower_bound", "variant": "E2", "x": 0.4, "y": 0.8}},
    {"name": "balancer_e1",
     "master": {"kind": "regret_balancing", "bound": {"form": "power_law", "exponent": 0.5, "scale": 1.0}},
     "bases": [{"kind": "synthetic_const_regret", "rate": 0.4}, {"kind": "synthetic_const_regret", "rate": 0.8}]},
    {"name": "balancer_e2",
     "master": {"kind": "regret_balancing", "bound": {"form": "power_law", "exponent": 0.5, "scale": 1.0}},
     "bases": [{"kind": "synthetic_const_regret", "rate": 0.4}, {"kind": "synthetic_switching", "rate": 0.8}],
     "environment": {"kind": "lower_bound", "variant": "E2", "x": 0.4, "y": 0.8}}
  ]
})json";

constexpr std::string_view kFixedArmsBound = R"json({
  "name": "fixed_arms_bound",
  "description": "Three fixed-arm bases on a noiseless bandit with U(t) = sqrt(t)",
  "horizon": 10000,
  "num_seeds": 200,
  "master_seed": 20200111,
  "checkpoints": {"every": 100},
  "environment": {"kind": "mab", "means": [0.3, 0.8, 0.55], "noise": "gaussian", "noise_sigma": 0.0},
  "runs": [
    {"name": "regret_balancing",
     "master": {"kind": "regret_balancing", "bound": {"form": "power_law", "exponent": 0.5, "scale": 1.0}},
     "bases": [{"kind": "fixed_arms"}]}
  ]
})json";

constexpr std::string_view kLinearScaling = R"json({
  "name": "linear_scaling",
  "description": "Linear regret balancing on a fixed 5-action instance in R^3",
  "horizon": 32768,
  "num_seeds": 100,
  "master_seed": 20200121,
  "checkpoints": {"doubling_from": 1024},
  "environment": {"kind": "linear_fixed", "noise_sigma": 1.0,
                  "theta": [0.9, -0.2, 0.1],
                  "actions": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0],
                              [0.7071067811865476, 0.7071067811865476, 0.0],
                              [0.0, 0.7071067811865476, 0.7071067811865476]]},
  "runs": [
    {"name": "regret_balancing", "master": {"kind": "alone"},
     "bases": [{"kind": "linear_rb", "lambda": 1.0, "delta": 0.1, "sigma": 1.0, "s_bound": 1.0}]},
    {"name": "oful", "master": {"kind": "alone"},
     "bases": [{"kind": "oful", "lambda": 1.0, "delta": 0.1, "sigma": 1.0, "s_bound": 1.0}]}
  ]
})json";

constexpr std::string_view kBalancingRatio = R"json({
  "name": "balancing_ratio",
  "description": "Two constant-regret synthetic bases (rates 0.4 and 0.8) under the balancer",
  "horizon": 65536,
  "num_seeds": 50,
  "master_seed": 20200141,
  "checkpoints": {"doubling_from": 1024},
  "environment": {"kind": "lower_bound", "variant": "E1", "x": 0.4, "y": 0.8},
  "runs": [
    {"name": "regret_balancing",
     "master": {"kind": "regret_balancing", "bound": {"form": "power_law", "exponent": 0.5, "scale": 1.0}},
     "bases": [{"kind": "synthetic_const_regret", "rate": 0.4}, {"kind": "synthetic_const_regret", "rate": 0.8}]}
  ]
})json";

constexpr std::string_view kForced = R"json({
  "name": "forced_exploration",
  "description": "Forced-exploration master over the 18 epsilon-greedy bases of fig2_left",
  "horizon": 10000,
  "num_seeds": 20,
  "master_seed": 20200901,
  "checkpoints": {"every": 100},
  "environment": {"kind": "mab", "means": [0.5, 0.45], "noise": "bernoulli"},
  "runs": [
    {"name": "forced_exploration", "master": {"kind": "forced_exploration"},
     "bases": [{"kind": "eps_greedy_grid", "count": 18, "low": 1, "high_per_horizon": 2}]},
    {"name": "eps_greedy", "master": {"kind": "alone"},
     "bases": [{"kind": "eps_greedy_grid", "count": 18, "low": 1, "high_per_horizon": 2}]}
  ]
})json";

constexpr std::array<Builtin, 11> kBuiltins = {{
    {"fig1_left", kFig1Left},
    {"fig1_right", kFig1Right},
    {"fig2_left", kFig2Left},
    {"fig2_mid", kFig2Mid},
    {"fig2_right", kFig2Right},
    {"fig3_riverswim", kFig3},
    {"thm5_dichotomy", kThm5},
    {"fixed_arms_bound", kFixedArmsBound},
    {"linear_scaling", kLinearScaling},
    {"balancing_ratio", kBalancingRatio},
    {"forced_exploration", kForced},
}};

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& b : kBuiltins) names.emplace_back(b.name);
  return names;
}

std::optional<std::string> builtin_scenario_text(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return std::string(b.text);
  }
  return std::nullopt;
}

}  // namespace rebal
