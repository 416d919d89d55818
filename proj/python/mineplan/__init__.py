"""Open-pit mine production scheduling with sliding windows and LNS."""

from ._core import (
    Instance,
    MineplanError,
    Solution,
    WindowInfeasible,
    full_solve,
    lns,
    npv,
    oracle_optimum,
    preset_names,
    sliding_windows,
    validate,
    window_schedule,
)

__all__ = [
    "Instance",
    "MineplanError",
    "Solution",
    "WindowInfeasible",
    "full_solve",
    "lns",
    "npv",
    "oracle_optimum",
    "preset_names",
    "sliding_windows",
    "validate",
    "window_schedule",
]
