import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasepsr import circuits as qc
from phasepsr import protocols as pr
from phasepsr import qlinalg as la
from phasepsr.rng import Xoshiro256

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
unit = st.floats(0.0, 1.0)


def U(phi):
    return np.diag([1.0, np.exp(1j * phi)])


def conj(u, rho):
    m = rho.matrix if isinstance(rho, la.DensityMatrix) else rho
    return u @ m @ u.conj().T


def qudit_kraus(n, phi, t):
    """Closed-form Kraus operator of outcome ``t`` for the shift-down retrieval."""
    return np.diag([np.exp(1j * t * phi), np.exp(1j * ((t + 1) % (n + 1)) * phi)]) / math.sqrt(n + 1)


def by_label(outcomes):
    return {o.label: o for o in outcomes}


def _xi(seed):
    return la.bloch_ball_qubit(Xoshiro256(seed))


# ------------------------------------------------------------------ 1 -> 1 ---

def test_store_single():
    np.testing.assert_allclose(pr.store_single(math.pi / 2).amplitudes,
                               np.array([1, 1j]) / math.sqrt(2), atol=1e-16)


def test_retrieve_single_plus_quarter_turn(plus_state):
    out = by_label(pr.retrieve_single(pr.store_single(math.pi / 2), plus_state))
    assert out["0"].success and not out["1"].success
    assert out["0"].probability == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(out["0"].post_state.matrix, np.array([[1, -1j], [1j, 1]]) / 2,
                               atol=1e-15)
    np.testing.assert_allclose(out["1"].post_state.matrix, np.array([[1, 1j], [-1j, 1]]) / 2,
                               atol=1e-15)


def test_retrieve_single_rejects_bad_inputs(plus_state):
    with pytest.raises(ValueError):
        pr.retrieve_single(pr.store_qudit(2, 0.1), plus_state)
    with pytest.raises(ValueError):
        pr.retrieve_single(pr.store_single(0.1), np.eye(2) / 2)


# ------------------------------------------------------------------ N -> 1 ---

def test_store_qudit_half_turn():
    np.testing.assert_allclose(pr.store_qudit(3, math.pi).amplitudes, [0.5, -0.5, 0.5, -0.5],
                               atol=1e-15)
    with pytest.raises(ValueError):
        pr.store_qudit(0, 0.3)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_retrieve_qudit_matches_kraus_oracle(n):
    phi, xi = 0.73, _xi(n)
    outs = pr.retrieve_qudit(n, pr.store_qudit(n, phi), xi)
    assert [o.label for o in outs] == [str(t) for t in range(n + 1)]
    for t, o in enumerate(outs):
        unnorm = conj(qudit_kraus(n, phi, t), xi)
        p = np.trace(unnorm).real
        assert o.probability == pytest.approx(p, abs=1e-14)
        np.testing.assert_allclose(o.post_state.matrix, unnorm / p, atol=1e-13)
        assert o.success == (t < n)
    np.testing.assert_allclose(outs[-1].post_state.matrix, conj(U(-n * phi), xi), atol=1e-13)


def test_retrieve_qudit_memory_dimension_checked(plus_state):
    with pytest.raises(ValueError):
        pr.retrieve_qudit(3, pr.store_qudit(2, 0.1), plus_state)


def test_code_projection_of_v3_memory():
    phi = 1.234
    proj = pr.code_projection(pr.store_2to1_physical(phi).density(), pr.V3_CODE)
    np.testing.assert_allclose(proj.matrix, pr.store_qudit(2, phi).density().matrix, atol=1e-14)


def test_code_projection_sends_leakage_to_t0():
    v = np.array([1, 1, 0, 1]) / math.sqrt(3)  # |01> lies outside the code
    rho = la.StateVector((2, 2), v).density()
    proj = pr.code_projection(rho, pr.V3_CODE)
    expected = np.array([[2, 0, 1], [0, 0, 0], [1, 0, 1]]) / 3
    np.testing.assert_allclose(proj.matrix, expected, atol=1e-15)
    moved = pr.code_projection(rho, pr.V3_CODE, t0=(1, 1))
    assert moved.matrix[2, 2] == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        pr.code_projection(rho, pr.V3_CODE, t0=(0, 1))
    with pytest.raises(ValueError):
        pr.code_projection(rho, [0, 0, 3])


# ------------------------------------------------------------------ 2 -> 1 ---

def test_prep_2to1_structure_and_action():
    c = pr.prep_2to1()
    assert [s.gate.name for s in c.steps] == ["m", "ry", "cnot", "ry"]
    out = qc.run_circuit(c, la.StateVector.basis((2, 2), (0, 0))).amplitudes
    np.testing.assert_allclose(out, np.array([1, 0, 1, 1]) / math.sqrt(3), atol=1e-15)


def test_shift_down_v3_on_code_and_off_code():
    c = pr.shift_down_v3()
    assert c.gate_counts() == {"x": 1, "cnot": 2}
    u = qc.circuit_unitary(c)
    for t, code in enumerate(pr.V3_CODE):
        src = la.digits_to_index((2, 2), code)
        dst = la.digits_to_index((2, 2), pr.V3_CODE[(t - 1) % 3])
        assert abs(u[dst, src]) == pytest.approx(1.0)
    assert abs(u[1, 1]) == pytest.approx(1.0)  # |01> fixed


def test_store_2to1_physical():
    phi = 0.9
    v = pr.store_2to1_physical(phi).amplitudes
    np.testing.assert_allclose(v, np.array([1, 0, np.exp(1j * phi), np.exp(2j * phi)]) / math.sqrt(3),
                               atol=1e-15)


def test_add_control_rejects_rotations():
    with pytest.raises(ValueError):
        pr.add_control(pr.prep_2to1(), 0, {0: 1, 1: 2}, (2, 2, 2))


def test_toffoli_level_counts():
    c = pr.build_2to1_toffoli(0.3)
    counts = c.gate_counts()
    assert counts["toffoli"] == 2 and counts["cnot"] == 2 and counts["phase"] == 2
    assert pr.one_qubit_fixed_gate_count(c) == 3


@pytest.mark.parametrize("order", [(0, 1), (1, 0)])
def test_relative_phase_toffoli(order):
    c = pr.relative_phase_toffoli(order)
    assert c.count("cnot") == 3 and c.count("ry") == 4
    u = qc.circuit_unitary(c)
    d = np.ones(8)
    digits = [0, 0, 0]
    digits[order[0]] = 1
    d[la.digits_to_index((2, 2, 2), digits)] = -1
    np.testing.assert_allclose(u, qc.toffoli().matrix @ np.diag(d), atol=1e-14)
    # a genuine Toffoli only up to one relative sign
    assert not la.equal_up_to_global_phase(u, qc.toffoli().matrix)
    with pytest.raises(ValueError):
        pr.relative_phase_toffoli((0, 0))


@pytest.mark.parametrize("phi", [0.0, 0.5, 2.9])
def test_cnot_level_equals_toffoli_level(phi):
    a = qc.circuit_unitary(pr.build_2to1_toffoli(phi))
    b = qc.circuit_unitary(pr.build_2to1_cnot(phi))
    assert la.global_phase_deficit(a, b) < 1e-10
    c = pr.build_2to1_cnot(phi)
    assert c.count("cnot") == 8 and c.count("toffoli") == 0
    assert pr.one_qubit_fixed_gate_count(c) == 11


def test_two_to_one_outcomes():
    phi, xi = 0.61, _xi(3)
    out = by_label(pr.run_2to1_toffoli(phi, xi))
    assert set(out) == {"00", "01", "10", "11"}
    assert out["01"].probability < 1e-12 and out["01"].post_state is None
    assert out["00"].probability == pytest.approx(1 / 3, abs=1e-14)
    assert out["10"].probability == pytest.approx(1 / 3, abs=1e-14)
    assert not out["11"].success
    np.testing.assert_allclose(out["11"].post_state.matrix, conj(U(-2 * phi), xi), atol=1e-13)


def test_two_to_one_matches_virtual_qutrit():
    phi, xi = 2.2, _xi(9)
    physical = by_label(pr.run_2to1_cnot(phi, xi))
    virtual = pr.retrieve_qudit(2, pr.store_qudit(2, phi), xi)
    for label, t in pr.V3_LABELS.items():
        o, v = physical[label], virtual[int(t)]
        assert o.probability == pytest.approx(v.probability, abs=1e-12)
        assert o.success == v.success
        np.testing.assert_allclose(o.post_state.matrix, v.post_state.matrix, atol=1e-12)


# -------------------------------------------------------------------- VMC ---

def test_vmc_program_state():
    ps = pr.vmc_program_state(3, 0.4)
    assert ps.gate_uses == 7
    expected = np.ones(1)
    for m in range(3):
        expected = np.kron(expected, np.array([1, np.exp(1j * 2 ** m * 0.4)]) / math.sqrt(2))
    np.testing.assert_allclose(ps.vector.amplitudes, expected, atol=1e-14)
    with pytest.raises(ValueError):
        pr.vmc_program_state(0, 0.4)


def test_vmc_branches():
    phi, xi = 0.37, _xi(5)
    outs = pr.run_vmc(3, phi, xi)
    assert [o.label for o in outs] == ["0", "1,0", "1,1,0", "1,1,1"]
    assert [o.probability for o in outs] == pytest.approx([0.5, 0.25, 0.125, 0.125], abs=1e-14)
    assert [o.success for o in outs] == [True, True, True, False]
    for o in outs[:-1]:
        np.testing.assert_allclose(o.post_state.matrix, conj(U(phi), xi), atol=1e-13)
    np.testing.assert_allclose(outs[-1].post_state.matrix, conj(U(-7 * phi), xi), atol=1e-13)


# -------------------------------------------- cross-protocol consistency ---

def _unnormalized(outcomes):
    return {o.label: (o.probability * o.post_state.matrix if o.post_state is not None
                      else np.zeros((2, 2))) for o in outcomes}


RUNNERS = {
    "single": lambda phi, xi: pr.retrieve_single(pr.store_single(phi), xi),
    "qudit3": lambda phi, xi: pr.retrieve_qudit(3, pr.store_qudit(3, phi), xi),
    "two_toffoli": pr.run_2to1_toffoli,
    "two_cnot": pr.run_2to1_cnot,
    "vmc3": lambda phi, xi: pr.run_vmc(3, phi, xi),
}


def test_one_use_schemes_coincide():
    phi, xi = 1.1, _xi(17)
    ref = _unnormalized(pr.retrieve_single(pr.store_single(phi), xi))
    for other in (pr.retrieve_qudit(1, pr.store_qudit(1, phi), xi), pr.run_vmc(1, phi, xi)):
        got = _unnormalized(other)
        for label in ("0", "1"):
            np.testing.assert_allclose(got[label], ref[label], atol=1e-13)


@pytest.mark.parametrize("name", sorted(RUNNERS))
@settings(max_examples=15, deadline=None)
@given(phi=angles, a=unit, s1=st.integers(0, 10 ** 6), s2=st.integers(0, 10 ** 6))
def test_branches_linear_in_input(name, phi, a, s1, s2):
    r, s = _xi(s1), _xi(s2)
    mix = la.DensityMatrix((2,), a * r.matrix + (1 - a) * s.matrix)
    run = RUNNERS[name]
    lhs = _unnormalized(run(phi, mix))
    rr, ss = _unnormalized(run(phi, r)), _unnormalized(run(phi, s))
    for label in lhs:
        np.testing.assert_allclose(lhs[label], a * rr[label] + (1 - a) * ss[label], atol=1e-12)


@pytest.mark.parametrize("name", sorted(RUNNERS))
@settings(max_examples=15, deadline=None)
@given(phi=angles, theta=angles, seed=st.integers(0, 10 ** 6))
def test_branches_covariant_under_phase_rotations(name, phi, theta, seed):
    xi = _xi(seed)
    rotated = la.DensityMatrix((2,), conj(U(theta), xi))
    run = RUNNERS[name]
    plain, turned = _unnormalized(run(phi, xi)), _unnormalized(run(phi, rotated))
    for label in plain:
        np.testing.assert_allclose(turned[label], conj(U(theta), plain[label]), atol=1e-12)


@pytest.mark.parametrize("name", sorted(RUNNERS))
def test_branch_probabilities_sum_to_one(name):
    outs = RUNNERS[name](0.3, _xi(2))
    assert math.fsum(o.probability for o in outs) == pytest.approx(1.0, abs=1e-13)


# ----------------------------------------------------------------- reports ---

def test_report_json_schema():
    outs = pr.run_2to1_toffoli(0.2, _xi(1))
    doc = json.loads(pr.report_json("two_toffoli", {"phi": 0.2}, outs))
    assert set(doc) == {"protocol", "params", "outcomes"}
    assert doc["params"] == {"phi": 0.2}
    for o, src in zip(doc["outcomes"], outs):
        assert set(o) == {"label", "probability", "success", "post_state_matrix"}
        assert o["label"] == src.label
        if src.post_state is None:
            assert o["post_state_matrix"] is None
        else:
            m = np.array(o["post_state_matrix"])
            assert m.shape == (2, 2, 2)
            np.testing.assert_array_equal(m[..., 0] + 1j * m[..., 1], src.post_state.matrix)
