"""Regret-balancing model selection for bandits and episodic RL."""

from ._core import (
    ConfigError,
    LinearRegretBalancer,
    RidgeState,
    balancing_ratio,
    derive_substream_key,
    empirical_regret,
    eval_bound,
    forced_exploration_pulls,
    geometric_grid,
    list_scenarios,
    optimistic_base,
    run,
    run_to_dir,
    select_base,
    show_scenario,
)

__all__ = [
    "ConfigError",
    "LinearRegretBalancer",
    "RidgeState",
    "balancing_ratio",
    "derive_substream_key",
    "empirical_regret",
    "eval_bound",
    "forced_exploration_pulls",
    "geometric_grid",
    "list_scenarios",
    "optimistic_base",
    "run",
    "run_to_dir",
    "select_base",
    "show_scenario",
]
