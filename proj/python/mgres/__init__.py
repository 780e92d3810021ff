"""Python access to the mgres dispatch, reserve and event analysis core."""

import json

from ._core import InputError, LpResult, Scenario, load_scenario, run_cli, solve_lp
from ._core import _advset, _baseline, _robust, _simulate

__all__ = [
    "InputError",
    "LpResult",
    "Scenario",
    "load_scenario",
    "run_cli",
    "solve_lp",
    "baseline",
    "robust",
    "advset",
    "simulate",
]


def _scenario(s):
    return s if isinstance(s, Scenario) else load_scenario(str(s))


def baseline(scenario):
    """Deterministic dispatch; same layout as dispatch.json."""
    return json.loads(_baseline(_scenario(scenario)))


def robust(scenario):
    """Robust dispatch with reserves; same layout as robust.json."""
    return json.loads(_robust(_scenario(scenario)))


def advset(scenario):
    """Inner polytope of mitigable events; same layout as polytope.json."""
    return json.loads(_advset(_scenario(scenario)))


def simulate(scenario):
    """Replays the scenario's events against the robust plan.

    Returns the violation summary plus the trajectory as CSV text.
    """
    return json.loads(_simulate(_scenario(scenario)))
