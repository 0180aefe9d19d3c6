"""Python front end for the dualdec C++ library.

Problems and schedules travel as JSON documents in the same format the
``dualdec`` command-line tool reads and writes.
"""

import json

from . import _dualdec
from ._dualdec import InfeasibleError, SolverError, ValidationError, dual_update, primal_average_update

__all__ = [
    "InfeasibleError",
    "SolverError",
    "ValidationError",
    "check_slater",
    "dual_update",
    "g_bound",
    "generate_pev",
    "make_schedule",
    "primal_average_update",
    "run",
    "solve_centralized",
    "validate_schedule",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def generate_pev(m=20, slots=24, seed=1):
    return json.loads(_dualdec.generate_pev(m, slots, seed))


def solve_centralized(problem):
    return json.loads(_dualdec.solve_centralized(_text(problem)))


def check_slater(problem):
    return json.loads(_dualdec.check_slater(_text(problem)))


def g_bound(problem):
    return _dualdec.g_bound(_text(problem))


def make_schedule(source, m, seed=0):
    """``source`` is "alternating", "metropolis" or a schedule JSON path."""
    return json.loads(_dualdec.make_schedule(source, m, seed))


def validate_schedule(schedule, horizon=0):
    return json.loads(_dualdec.validate_schedule(_text(schedule), horizon))


def run(problem, schedule="metropolis", *, iterations=1000, beta=1.0, refresh_threshold=1e-5,
        refresh_window=None, seed=0, threads=1, full_diagnostics=False, reference=True):
    """Runs the distributed iteration and returns final iterates and per-step curves."""
    problem = _text(problem)
    if isinstance(schedule, str) and schedule in ("alternating", "metropolis"):
        schedule = _dualdec.make_schedule(schedule, json.loads(problem)["m"], seed)
    out = _dualdec.run(problem, _text(schedule), iterations, beta, refresh_threshold,
                       refresh_window, seed, threads, full_diagnostics, reference)
    out["summary"] = json.loads(out["summary"])
    if "reference" in out:
        out["reference"] = json.loads(out["reference"])
    return out
