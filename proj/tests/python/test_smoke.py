import numpy as np
import pytest

import dualdec

TOY = {
    "m": 2,
    "p": 1,
    "agents": [
        {
            "n": 1,
            "objective": {"q": [1.0]},
            "coupling": {"A": [[-1.0]], "b": [-0.5]},
            "polytope": {"C": [], "d": [], "lb": [0.0], "ub": [1.0]},
        }
    ]
    * 2,
}


def test_toy_multipliers_reach_one():
    out = dualdec.run(TOY, "metropolis", iterations=5000)
    assert out["multipliers"].shape == (2, 1)
    assert np.max(np.abs(out["multipliers"] - 1.0)) <= 1e-2
    assert out["reference"]["f_star"] == pytest.approx(1.0)
    assert len(out["obj_hat"]) == 5000


def test_dual_update_projects():
    got = dualdec.dual_update(np.array([1.0, 0.0]), 0.5, np.array([-4.0, 2.0]))
    np.testing.assert_array_equal(got, [0.0, 1.0])


def test_primal_average():
    x = dualdec.primal_average_update(np.array([0.0]), np.array([3.0]), 0.5, 1.5)
    assert x[0] == pytest.approx(1.0)


def test_pev_instance_and_schedule():
    problem = dualdec.generate_pev(m=4, slots=6, seed=2)
    assert problem["m"] == 4 and problem["p"] == 12
    assert dualdec.check_slater(problem)["holds"]
    schedule = dualdec.make_schedule("alternating", 4, seed=2)
    assert dualdec.validate_schedule(schedule, 16)["admissible"]
    a = dualdec.run(problem, schedule, iterations=100, threads=1)
    b = dualdec.run(problem, schedule, iterations=100, threads=3)
    np.testing.assert_array_equal(a["multipliers"], b["multipliers"])
    assert a["obj_tilde"] == b["obj_tilde"]


def test_errors_map_to_python_exceptions():
    bad = dict(TOY, m=3)
    with pytest.raises(ValueError):
        dualdec.solve_centralized(bad)
    empty = {
        "m": 1,
        "p": 1,
        "agents": [
            {
                "n": 1,
                "objective": {"q": [1.0]},
                "coupling": {"A": [[1.0]], "b": [0.0]},
                "polytope": {"C": [[1.0]], "d": [-1.0], "lb": [0.0], "ub": [1.0]},
            }
        ],
    }
    with pytest.raises(dualdec.InfeasibleError):
        dualdec.solve_centralized(empty)
