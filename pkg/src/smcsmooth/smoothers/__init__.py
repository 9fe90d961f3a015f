"""Offline trajectory sampling and online additive smoothing over any backward kernel."""

from .additive import (
    AdditiveFunction,
    additive_estimate,
    first_coordinate_sum,
    genealogy_estimate,
    initial_statistics,
    online_update,
    zero_function,
)
from .offline import TrajectoryDraws, check_storage, fixed_marginal_estimate, offline_smoother, path_additive_values
from .runner import (
    OnlineState,
    SmootherOptions,
    SmootherRun,
    forward_pass,
    online_step,
    paris_online_step,
    run_offline,
    run_online,
)

__all__ = [
    "AdditiveFunction",
    "OnlineState",
    "SmootherOptions",
    "SmootherRun",
    "TrajectoryDraws",
    "additive_estimate",
    "check_storage",
    "first_coordinate_sum",
    "fixed_marginal_estimate",
    "forward_pass",
    "genealogy_estimate",
    "initial_statistics",
    "offline_smoother",
    "online_step",
    "online_update",
    "paris_online_step",
    "path_additive_values",
    "run_offline",
    "run_online",
    "zero_function",
]
