"""Explicit polar coding for empirical coordination over a noisy channel.

The heavy lifting lives in the compiled extension; this package re-exports the
public names and adds a small convenience for running a preset end to end.
"""

from ._coordsim import (
    CondDist,
    CoordinationSpec,
    ExperimentResult,
    FiniteDist,
    IndexLayout,
    RegionReport,
    RunResult,
    Scenario,
    check_region,
    delta_for,
    make_layout,
    polar_transform,
    preset_names,
    run_experiment,
    scenario_from_json_text,
    scenario_preset,
    to_csv,
)

__all__ = [
    "CondDist",
    "CoordinationSpec",
    "ExperimentResult",
    "FiniteDist",
    "IndexLayout",
    "RegionReport",
    "RunResult",
    "Scenario",
    "check_region",
    "delta_for",
    "make_layout",
    "polar_transform",
    "preset_names",
    "run_experiment",
    "run_preset",
    "scenario_from_json_text",
    "scenario_preset",
    "to_csv",
]


def run_preset(name, n_list=None, k=None, seeds=None, **overrides):
    """Run a named preset, optionally overriding block lengths, k, or seeds."""
    scenario = scenario_preset(name)
    if n_list is not None:
        scenario.n_list = list(n_list)
    if k is not None:
        scenario.k = k
    if seeds is not None:
        scenario.seeds = list(seeds)
    for field, value in overrides.items():
        if not hasattr(scenario, field):
            raise AttributeError(f"scenario has no field {field!r}")
        setattr(scenario, field, value)
    return run_experiment(scenario)
