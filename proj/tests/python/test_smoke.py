"""End-to-end smoke checks for the python bindings."""

import math

import numpy as np
import pytest

import aqls

INSTANCE_8DIM = "(3III+XII-2XYI+3XYZ)/4"
INSTANCE_4DIM = "(3II+2ZI+3XI-3XY)/4"


def test_parse_round_trip():
    expr = aqls.PauliExpr.parse(INSTANCE_8DIM)
    assert expr.n_qubits == 3
    assert aqls.PauliExpr.parse(str(expr)) == expr
    with pytest.raises(aqls.AqlsError):
        aqls.PauliExpr.parse("XY+Q")


def test_instance_condition_number():
    inst = aqls.instance(INSTANCE_8DIM)
    assert inst.dim == 8
    assert inst.kappa == pytest.approx(9.0, abs=1e-10)
    assert inst.scale == pytest.approx(2.25, abs=1e-12)

    inst2 = aqls.instance(INSTANCE_4DIM, b=[0.5, 0.5, 0.5, 0.5], algorithm=2)
    assert inst2.kappa == pytest.approx(3.0 + 2.0 * math.sqrt(10.0), abs=1e-10)


def test_schedule_endpoints():
    va, vb = aqls.schedule_bounds(9.0)
    assert aqls.s_of_v(va, 9.0) == pytest.approx(0.0, abs=1e-12)
    assert aqls.s_of_v(vb, 9.0) == pytest.approx(1.0, abs=1e-12)
    grid = aqls.build_grid(9.0, 25, "alg1")
    assert len(grid.grid) == 25
    assert grid.grid[-1].s == 1.0
    assert grid.grid[-1].t_max == pytest.approx(2.0 * math.pi * 81.0, rel=1e-12)


def test_oracle_matches_reference_solution():
    inst = aqls.instance(INSTANCE_4DIM, b=[0.5, 0.5, 0.5, 0.5], algorithm=2)
    x = np.asarray(aqls.oracle_solve(inst))
    x_th = np.array([0.175 - 0.019j, 0.175 + 0.019j, 0.500 - 0.468j, 0.500 + 0.468j])
    x_th /= np.linalg.norm(x_th)
    assert abs(np.vdot(x_th, x)) >= 0.999


def test_trajectory_run():
    inst = aqls.instance(INSTANCE_4DIM, b=[0.5, 0.5, 0.5, 0.5], algorithm=2)
    ce = aqls.CompiledEvolution(inst, aqls.build_grid(inst.kappa, 60, "alg2"))
    run = aqls.run_trajectory(ce, 42)
    assert run.status == "ok"
    assert run.steps[-1].ground_fidelity >= 0.9
    assert 0.0 < run.success_probability <= 1.0
    assert run.solution_fidelity >= 0.9
    # Determinism.
    again = aqls.run_trajectory(ce, 42)
    assert again.solution_fidelity == run.solution_fidelity


def test_channel_run():
    inst = aqls.instance(INSTANCE_8DIM)
    run = aqls.run_channel(inst, aqls.build_grid(inst.kappa, 80, "alg1"))
    rho = np.asarray(run.final_density)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
    assert run.traced_fidelity >= 0.8
    assert aqls.channel_damping(0.0) == 1.0


def test_linalg_utilities():
    bell = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)
    rho = np.outer(bell, bell.conj())
    reduced = np.asarray(aqls.partial_trace(rho, [2, 2], [0]))
    assert np.allclose(reduced, np.eye(2) / 2.0, atol=1e-12)

    zero = np.outer([1.0, 0.0], [1.0, 0.0])
    assert aqls.fidelity_mixed(zero, np.eye(2) / 2.0) == pytest.approx(
        1.0 / math.sqrt(2.0), abs=1e-12
    )
