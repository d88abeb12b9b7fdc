import numpy as np
import pytest

from ctap.dynamics import (
    Control,
    ControlSchedule,
    dark_state_at,
    default_schedule,
    evolve,
    find_tstar,
    hamiltonian_at,
    sequential_schedule,
    simulate,
    transfer_phase_prediction,
    validate_schedule,
)
from ctap.errors import (
    DarkStateUndefined,
    InvalidSchedule,
    PartyPlacement,
    SameEndpoints,
    TStarNotFound,
)
from ctap.generators import path, subdivided_tree
from ctap.graph import adjacency, build_graph
from ctap.viability import graph_kernel
from oracles import ode_transfer

LAMBDA_C = build_graph(2, 1, [(0, 2, 1.0), (1, 2, 1j)], parties=(0, 1))
# <b|U|a> error for the lambda graph at T=200 from an adaptive 8th-order RK run (rtol 1e-11)
LAMBDA_T200_ERROR = 1.2815694920398357e-05
# regression pins from this integrator at 20 steps per unit time
LAMBDA_TSTAR = 7.5625
TREE1_S10_TSTAR = 10.6875
TREE2_S10_TSTAR = 15.125


def test_controls():
    T = 10.0
    assert Control("ramp_up")(2.5, T) == 0.25
    assert Control("ramp_down")(2.5, T) == 0.75
    assert Control("constant", 2.0)(3.0, T, straddle=5) == 10.0
    assert Control("half_ramp_up")(np.array([0, 2.5, 7.5]), T).tolist() == [0, 0.5, 1]
    assert Control("half_ramp_down")(np.array([0, 2.5, 7.5]), T).tolist() == [1, 0.5, 0]
    tab = Control("tabulated", samples=((0, 0.5, 1), (0, 2, 1)))
    assert tab(2.5, T) == 1.0
    assert Control("half_ramp_down").zero_set(T) == [(5.0, 10.0)]
    with pytest.raises(InvalidSchedule):
        Control("sine")
    with pytest.raises(InvalidSchedule):
        Control("tabulated", samples=((0, 0.7), (1, 1)))


def test_default_schedule_values():
    g = path(5)
    sch = default_schedule(g, 0, 2, 10.0, s=3.0)
    assert sch.values(0.0).tolist() == [0.0, 3.0, 1.0]
    assert sch.values(10.0).tolist() == [1.0, 3.0, 0.0]


def test_schedule_errors():
    g = path(5)
    with pytest.raises(SameEndpoints):
        default_schedule(g, 0, 0, 1.0)
    with pytest.raises(PartyPlacement):
        default_schedule(g, 0, 1, 1.0)
    with pytest.raises(InvalidSchedule):
        default_schedule(g, 0, 2, 0.0)
    bad = ControlSchedule(1.0, (Control("ramp_up"), Control("ramp_up"), Control("ramp_down")),
                          0, 2, (0, 2))
    with pytest.raises(InvalidSchedule):
        validate_schedule(bad)
    clash = ControlSchedule(1.0, (Control("ramp_up"), Control("constant"), Control("half_ramp_down"),
                                  Control("ramp_up")), 0, 2, (0, 2, 3))
    with pytest.raises(InvalidSchedule):
        validate_schedule(clash)


def test_sequential_schedule_valid():
    sch = sequential_schedule(path(5), 0, 2, 10.0)
    assert sch.values(0.0).tolist() == [0.0, 1.0, 1.0]
    assert sch.values(2.5).tolist() == [0.5, 1.0, 0.5]
    assert sch.values(5.0).tolist() == [1.0, 1.0, 0.0]
    assert sch.values(10.0).tolist() == [1.0, 1.0, 0.0]


def test_hamiltonian_scaling():
    g = path(3)
    sch = default_schedule(g, 0, 1, 4.0)
    H = hamiltonian_at(sch, adjacency(g), 1.0)
    assert np.allclose(H, [[0, 0, 0.25], [0, 0, 0.75], [0.25, 0.75, 0]])
    with pytest.raises(ValueError):
        hamiltonian_at(sch, adjacency(g), 5.0)


def test_dark_state_endpoints():
    g = path(3)
    A = adjacency(g)
    sch = default_schedule(g, 0, 1, 1.0)
    assert np.allclose(dark_state_at(sch, A, 0.0), [1, 0, 0])
    assert np.allclose(np.abs(dark_state_at(sch, A, 1.0)), [0, 1, 0])
    y = dark_state_at(sch, A, 0.5)
    assert np.linalg.norm(hamiltonian_at(sch, A, 0.5) @ y) < 1e-14


def test_dark_state_undefined():
    g = build_graph(3, 2, [(0, 3), (1, 3), (1, 4), (2, 4)], parties=(0, 1, 2))
    sch = ControlSchedule(1.0, (Control("ramp_up"), Control("ramp_up", 2.0), Control("ramp_down")),
                          0, 2, (0, 1, 2))
    with pytest.raises(DarkStateUndefined):
        dark_state_at(sch, adjacency(g), 0.0)


def test_lambda_against_ode_oracle():
    res = simulate(path(3), 0, 1, 200.0, steps=4000)
    assert abs(res.error - LAMBDA_T200_ERROR) < 1e-8
    live = 1 - abs(ode_transfer(adjacency(path(3)), 2, 0, 1, 50.0))
    assert abs(simulate(path(3), 0, 1, 50.0).error - live) < 1e-6


def test_step_halving_converges():
    g = path(5)
    e1 = simulate(g, 0, 2, 40.0, steps=800).error
    e2 = simulate(g, 0, 2, 40.0, steps=1600).error
    e3 = simulate(g, 0, 2, 40.0, steps=3200).error
    assert abs(e2 - e3) < abs(e1 - e2) / 3  # second order


def test_short_protocol_fails():
    assert simulate(path(3), 0, 1, 0.1).error > 0.99


@pytest.mark.parametrize("g, b", [(path(3), 1), (path(5), 2)], ids=["lambda", "path5"])
def test_error_envelope_decreases(g, b):
    def envelope(T):
        return max(simulate(g, 0, b, t).error for t in np.linspace(T, 2 * T, 8))
    env = [envelope(T) for T in (20.0, 40.0, 80.0)]
    assert env[0] > env[1] > env[2]


def test_v2_population_falls_with_time():
    pops = [simulate(path(5), 0, 2, T).v2_population_max for T in (10.0, 20.0, 40.0, 80.0, 160.0)]
    assert all(b < a + 1e-3 for a, b in zip(pops, pops[1:]))


@pytest.mark.parametrize("g, a, b", [(path(5), 0, 2), (LAMBDA_C, 0, 1), (path(3), 0, 1)],
                         ids=["path5", "complex", "lambda"])
def test_phase_prediction(g, a, b):
    res = simulate(g, a, b, 300.0)
    diff = np.angle(np.exp(1j * (res.acquired_phase - transfer_phase_prediction(g, a, b))))
    assert abs(diff) < 0.05
    assert res.predicted_phase == pytest.approx(transfer_phase_prediction(g, a, b))


def test_complex_phase_matches_ode():
    amp = ode_transfer(adjacency(LAMBDA_C), 2, 0, 1, 100.0)
    assert abs(np.angle(amp) - transfer_phase_prediction(LAMBDA_C, 0, 1)) < 0.05


def test_straddle_leaves_endpoint_dark_states_unchanged():
    g = subdivided_tree(2, 2)
    A = adjacency(g)
    a, b = g.parties[0], g.parties[-1]
    z = graph_kernel(g)
    for t in (0.0, 1.0):
        ref = dark_state_at(default_schedule(g, a, b, 1.0, 1.0), A, t, z)
        for s in (2.0, 10.0):
            y = dark_state_at(default_schedule(g, a, b, 1.0, s), A, t, z)
            assert np.allclose(y, ref)


def test_invariants_and_trace():
    g = path(5)
    res = evolve(default_schedule(g, 0, 2, 20.0), adjacency(g), trace=True)
    assert res.unitarity_defect < 1e-8 and res.zero_energy_residual < 1e-8
    tr = res.trace
    assert tr["population"].shape == (res.steps + 1, g.n)
    assert np.allclose(tr["population"].sum(axis=1), 1)
    assert tr["controls"][0].tolist() == [0, 1, 1] and tr["gap"].min() > 0


def test_tstar_regressions():
    assert find_tstar(path(3), 0, 1).tstar == LAMBDA_TSTAR
    t1 = subdivided_tree(2, 1)
    t2 = subdivided_tree(2, 2)
    r1 = find_tstar(t1, t1.parties[0], t1.parties[-1], s=10.0)
    r2 = find_tstar(t2, t2.parties[0], t2.parties[-1], s=10.0)
    assert (r1.tstar, r2.tstar) == (TREE1_S10_TSTAR, TREE2_S10_TSTAR)
    assert r1.tstar < r2.tstar < 2 * 10 * np.sqrt(2)
    assert r1.error < 0.05 and r1.max_unitarity_defect < 1e-8


def test_tstar_trivial_threshold():
    r = find_tstar(path(3), 0, 1, threshold=1.0)
    assert r.tstar == 1.0 and r.probes[0][0] == 1.0


def test_tstar_cap():
    with pytest.raises(TStarNotFound):
        find_tstar(path(5), 0, 2, threshold=1e-9, cap=16)


def test_tstar_converged_in_step_size():
    t1 = subdivided_tree(2, 1)
    a, b = t1.parties[0], t1.parties[-1]
    coarse = find_tstar(t1, a, b, s=10.0).tstar
    fine = find_tstar(t1, a, b, s=10.0, steps_per_unit_time=40).tstar
    assert abs(coarse - fine) <= 0.02 * fine


def test_imaginary_first_coupling_gives_quarter_turn():
    g = build_graph(2, 1, [(0, 2, 1j), (1, 2, 1.0)], parties=(0, 1))
    assert transfer_phase_prediction(g, 0, 1) == pytest.approx(np.pi / 2)
    res = simulate(g, 0, 1, 200.0)
    assert abs(res.acquired_phase - np.pi / 2) < 0.05
    assert abs(np.angle(ode_transfer(adjacency(g), 2, 0, 1, 100.0)) - np.pi / 2) < 0.05
