import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qef import faults
from qef.circuit import CliffordCircuit, CX, H
from qef.encoder import standard_form, synth_nonft
from qef.ftencoder import plan_blocks, synth_ft

import oracles

P_GRID = np.linspace(0.0, 0.5, 50)


@pytest.mark.parametrize(
    "w,p,expected",
    [(0, 0.0, 1.0), (5, 0.0, 1.0), (0, 0.3, 0.8), (2, 0.3, 0.544), (3, 0.3, 0.8 * (0.8**3 + 3 * 0.8 * 0.04))],
)
def test_factor_values(w, p, expected):
    assert faults.no_prop_factor(w, p) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("w", range(1, 5))
@pytest.mark.parametrize("p", [0.01, 0.1, 0.3])
def test_factor_matches_fanout_enumeration(w, p):
    # w = 0 has no gate to change any frame; the factor still charges the control
    assert faults.no_prop_factor(w, p) == pytest.approx(oracles.fanout_no_change_probability(w, p), abs=1e-12)


def test_factor_closed_form():
    for w in range(8):
        for p in P_GRID:
            q = 2 * p / 3
            assert faults.no_prop_factor(w, p) == pytest.approx((1 - q) * (1 + (1 - 2 * q) ** w) / 2)


def test_paper_literal_form_exceeds_one():
    assert faults.no_prop_factor(3, 0.0, paper_literal=True) == 2.0
    assert faults.no_prop_factor(3, 0.01, paper_literal=True) > 1.0


@pytest.fixture(scope="module")
def example_pair(example_ea):
    return standard_form(example_ea), synth_ft(example_ea, plan_blocks(9, boundaries=[6])).trace


def test_bounds_grid(example_pair):
    sf, trace = example_pair
    prev_nf = prev_f = -1.0
    for p in P_GRID:
        nf, f = faults.bound_nonft(sf, p), faults.bound_ft(trace, p)
        assert 0.0 <= nf <= 1.0 and 0.0 <= f <= 1.0
        assert nf >= prev_nf and f >= prev_f
        prev_nf, prev_f = nf, f
    assert faults.bound_nonft(sf, 0.0) == 0.0 and faults.bound_ft(trace, 0.0) == 0.0


def test_bound_with_zero_weights():
    from qef.code import build_css

    c = build_css([[1, 0, 0, 0]], [[0, 1, 0, 0]])
    sf = standard_form(c)
    p = 0.2
    assert faults.bound_nonft(sf, p) == pytest.approx(1 - (1 - 2 * p / 3) ** 3)


def test_bounds_example_values(example_pair):
    sf, trace = example_pair
    p = 0.01
    nf = 1 - math.prod(faults.no_prop_factor(w, p) for w in [3, 3, 3, 1, 1, 1, 3])
    assert faults.bound_nonft(sf, p) == pytest.approx(nf)
    ws = [1, 3, 3, 0, 2, 2, 2, 2, 3, 2, 0, 2]
    assert faults.bound_ft(trace, p) == pytest.approx(1 - math.prod(faults.no_prop_factor(w, p) for w in ws))


def test_simulate_zero_noise(example_ea):
    enc = synth_nonft(example_ea).encoder
    r = faults.simulate(enc, faults.FaultModel(0.0), 5000, 1)
    assert r.estimate == 0.0 and r.stderr == 0.0


def test_simulate_deterministic(example_ea):
    enc = synth_nonft(example_ea).encoder
    a = faults.simulate(enc, faults.FaultModel(0.05), 30000, 11)
    b = faults.simulate(enc, faults.FaultModel(0.05), 30000, 11)
    c = faults.simulate(enc, faults.FaultModel(0.05), 30000, 12)
    assert a == b and a != c


def test_single_cx_control_only():
    c = CliffordCircuit(2, (CX(0, 1),))
    r = faults.simulate(c, faults.FaultModel(0.3), 100_000, 3, protected=[1])
    assert abs(r.estimate - 0.2) <= 3 * r.stderr


def test_self_correction_case():
    c = CliffordCircuit(3, (CX(0, 2), CX(1, 2)))
    locs = [(0, 0), (1, 1)]
    both_x = np.array([[1, 1]], dtype=np.uint8)
    assert faults.count_events(c, both_x, locs) == 0
    one_x = np.array([[1, 0]], dtype=np.uint8)
    assert faults.count_events(c, one_x, locs) == 1


def test_protected_qubits_get_no_locations():
    c = CliffordCircuit(3, (CX(0, 1), CX(0, 2)))
    assert faults.fault_locations(c, [2], "gate") == [(0, 0), (0, 1), (1, 0)]
    assert faults.fault_locations(c, [2], "group") == [(0, 0), (0, 1)]


def test_groups_split_on_hadamard_and_new_control():
    c = CliffordCircuit(4, (CX(0, 1), CX(0, 2), H(3), CX(0, 3), CX(1, 3), CX(2, 3), CX(2, 0)))
    assert faults._groups(c.gates) == [[0, 1], [3, 4, 5], [6]]


@st.composite
def small_circuits(draw):
    n = draw(st.integers(2, 4))
    gates = []
    for _ in range(draw(st.integers(1, 4))):
        if draw(st.integers(0, 4)) == 0:
            gates.append(H(draw(st.integers(0, n - 1))))
        else:
            a, b = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
            gates.append(CX(a, b))
    prot = draw(st.lists(st.integers(0, n - 1), max_size=n - 1, unique=True))
    return CliffordCircuit(n, tuple(gates)), prot


@settings(max_examples=25, deadline=None)
@given(small_circuits(), st.sampled_from([0.05, 0.2]), st.sampled_from(["gate", "group"]))
def test_mc_matches_exact_enumeration(cp, p, injection):
    c, prot = cp
    locs = faults.fault_locations(c, prot, injection)
    if len(locs) > 4:
        locs = locs[:4]
        c = CliffordCircuit(c.qubits, c.gates[: locs[-1][0] + 1])
        locs = faults.fault_locations(c, prot, injection)
        if len(locs) > 4:
            return
    exact = oracles.event_probability(c.gates, c.qubits, locs, p)
    r = faults.simulate(c, faults.FaultModel(p), 40_000, 5, prot, injection)
    sigma = max(r.stderr, math.sqrt(max(exact * (1 - exact), 1e-12) / r.trials))
    assert abs(r.estimate - exact) <= 3 * sigma + 1e-9


def test_report_json_keys(example_ea):
    enc = synth_nonft(example_ea).encoder
    rep = faults.PropagationReport(0.1, 0.2, {"a": [1]}, faults.simulate(enc, faults.FaultModel(0.01), 100, 1))
    js = rep.to_json()
    assert set(js) == {"bound_nf", "bound_ft", "factors", "mc"}
    assert set(js["mc"]) == {"p", "trials", "seed", "estimate", "stderr"}


def test_fault_model_validates():
    with pytest.raises(ValueError):
        faults.FaultModel(1.5)
    with pytest.raises(ValueError):
        faults.simulate(CliffordCircuit(2), faults.FaultModel(0.1), 0, 1)


def test_min_blocks_zero_noise(example_ea):
    assert faults.min_blocks(example_ea, 0.0, 3) is None


def test_min_blocks_reports_a_winning_g():
    from qef.code import build_css, random_dual_containing

    c = build_css(*random_dual_containing(16, 2, seed=4, rho2=2))
    g = faults.min_blocks(c, 0.01, 4)
    if g is not None:
        assert faults.bound_ft(synth_ft(c, plan_blocks(16, g)).trace, 0.01) < faults.bound_nonft(standard_form(c), 0.01)
