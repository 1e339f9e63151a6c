"""Storage-and-retrieval schemes for qubit phase gates.

Every runner returns the full list of measurement branches of the retrieval
as :class:`ProtocolOutcome` values: the heralding label, its exact
probability, the resulting data-qubit state and whether the branch heralds
success. Nothing is sampled here.

Registers put the data qubit on wire 0 and memory wires after it.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from phasepsr.circuits import (
    Circuit,
    cnot,
    circuit_unitary,
    controlled_shift_down,
    evolve_density,
    m_gate,
    measure_wire,
    pauli_x,
    phase_gate,
    run_circuit,
    ry,
    toffoli,
)
from phasepsr.qlinalg import (
    DensityMatrix,
    StateVector,
    digits_to_index,
    global_phase_deficit,
    max_abs,
    partial_trace,
)

EXACT_TOL = 1e-12

# V3 encoding of the virtual qutrit on two qubits: t=0 <-> 00, t=1 <-> 10, t=2 <-> 11
V3_CODE = ((0, 0), (1, 0), (1, 1))
V3_LABELS = {"00": "0", "10": "1", "11": "2"}


@dataclass(frozen=True, eq=False)
class ProtocolOutcome:
    label: str
    probability: float
    post_state: DensityMatrix | None
    success: bool


@dataclass(frozen=True, eq=False)
class ProgramState:
    """VMC program register ``|phi> (x) |2 phi> (x) ... (x) |2^(k-1) phi>``."""

    k: int
    vector: StateVector
    gate_uses: int


def success_probability(outcomes):
    return math.fsum(o.probability for o in outcomes if o.success)


def target_state(phi, xi: DensityMatrix) -> DensityMatrix:
    """``U_phi xi U_phi^dagger``."""
    u = phase_gate(phi).matrix
    return DensityMatrix((2,), u @ xi.matrix @ u.conj().T)


def _check_qubit(xi, what="xi"):
    if not isinstance(xi, DensityMatrix) or xi.dims != (2,):
        raise ValueError(f"{what} must be a one-qubit DensityMatrix")


def _enumerate_branches(rho, measured_wires, success, data_wire=0):
    branches = [("", 1.0, rho)]
    for w in measured_wires:
        grown = []
        for label, p, st in branches:
            if st is None:
                grown.extend((label + str(k), 0.0, None) for k in range(rho.dims[w]))
                continue
            for rec in measure_wire(st, w):
                grown.append((label + str(rec.outcome), p * rec.probability, rec.post_state))
        branches = grown
    return [
        ProtocolOutcome(
            label,
            p,
            partial_trace(st, [data_wire]) if st is not None else None,
            success(label),
        )
        for label, p, st in branches
    ]


# --------------------------------------------------------------------------- #
#                         1 -> 1: CNOT as a processor                         #
# --------------------------------------------------------------------------- #

def store_single(phi) -> StateVector:
    """``U_phi |+> = (|0> + e^{i phi}|1>)/sqrt(2)``."""
    plus = StateVector((2,), np.array([1.0, 1.0]) / math.sqrt(2))
    return run_circuit(Circuit((2,), ((phase_gate(phi), (0,)),)), plus)


def retrieve_single(psi_phi: StateVector, xi: DensityMatrix):
    """CNOT from the data qubit onto the program qubit, then measure the program.

    Outcome ``"0"`` leaves ``U_phi xi U_phi^dagger`` (success), outcome ``"1"``
    leaves ``U_{-phi} xi U_{-phi}^dagger``.
    """
    _check_qubit(xi)
    if psi_phi.dims != (2,):
        raise ValueError("program state must be a single qubit")
    rho = xi.tensor(psi_phi.density())
    rho = evolve_density(Circuit((2, 2), ((cnot(), (0, 1)),)), rho)
    return _enumerate_branches(rho, [1], lambda lab: lab == "0")


# --------------------------------------------------------------------------- #
#                        N -> 1: virtual qudit memory                         #
# --------------------------------------------------------------------------- #

def store_qudit(n, phi) -> StateVector:
    """``(1/sqrt(N+1)) sum_t e^{i t phi}|t>`` on an (N+1)-level wire."""
    n = int(n)
    if n < 1:
        raise ValueError(f"need at least one use of the gate, got n={n}")
    t = np.arange(n + 1)
    return StateVector((n + 1,), np.exp(1j * t * float(phi)) / math.sqrt(n + 1))


def code_projection(rho: DensityMatrix, code_basis, t0=None) -> DensityMatrix:
    """``P rho P + Tr(rho P_perp)|t0><t0|`` re-expressed on a ``len(code_basis)``-level wire.

    ``code_basis`` lists computational-basis labels of ``rho``'s register,
    either digit tuples or flat indices; code state ``t`` is ``code_basis[t]``.
    ``t0`` defaults to the first code label.
    """
    def flat(label):
        if isinstance(label, (int, np.integer)):
            return int(label)
        return digits_to_index(rho.dims, tuple(label))

    idx = [flat(lab) for lab in code_basis]
    if len(set(idx)) != len(idx):
        raise ValueError("code basis labels must be distinct")
    dim = rho.matrix.shape[0]
    if any(not 0 <= i < dim for i in idx):
        raise ValueError("code basis label outside the register")
    t0_index = idx[0] if t0 is None else flat(t0)
    if t0_index not in idx:
        raise ValueError(f"t0={t0!r} is not in the code basis")
    block = rho.matrix[np.ix_(idx, idx)]
    leak = 1.0 - float(np.trace(block).real)
    out = np.array(block)
    pos = idx.index(t0_index)
    out[pos, pos] += leak
    return DensityMatrix((len(idx),), out)


def retrieve_qudit(n, psi_phi: StateVector, xi: DensityMatrix):
    """Controlled shift-down from the data qubit onto the memory qudit, measure the qudit.

    Outcomes ``t = 0..N-1`` herald success; ``t = N`` leaves
    ``U_{-N phi} xi U_{-N phi}^dagger``.
    """
    n = int(n)
    _check_qubit(xi)
    if psi_phi.dims != (n + 1,):
        raise ValueError(f"memory must be one wire of dimension {n + 1}, got {psi_phi.dims}")
    rho = xi.tensor(psi_phi.density())
    rho = evolve_density(Circuit((2, n + 1), ((controlled_shift_down(n + 1), (0, 1)),)), rho)
    return _enumerate_branches(rho, [1], lambda lab: int(lab) < n)


# --------------------------------------------------------------------------- #
#                        2 -> 1: qubit-level circuits                         #
# --------------------------------------------------------------------------- #

_PREP_TARGET = np.array([1, 0, 1, 1]) / math.sqrt(3)


@lru_cache(maxsize=None)
def prep_2to1() -> Circuit:
    """Two-qubit circuit taking ``|00>`` to ``(|00> + |10> + |11>)/sqrt(3)``.

    ``M`` on the first qubit, then a controlled Hadamard-like rotation
    ``R_y(a) . CNOT . R_y(b)`` on the second; the signs of ``a, b`` are picked
    by checking the action on ``|00>``.
    """
    q = math.pi / 4
    for s1, s2 in itertools.product((-1, 1), repeat=2):
        c = Circuit(
            (2, 2),
            (
                (m_gate(), (0,)),
                (ry(s1 * q), (1,)),
                (cnot(), (0, 1)),
                (ry(s2 * q), (1,)),
            ),
        )
        out = run_circuit(c, StateVector.basis((2, 2), (0, 0))).amplitudes
        if max_abs(out - _PREP_TARGET) < EXACT_TOL:
            return c
    raise RuntimeError("no sign choice of R_y(+-pi/4) prepares the V3 memory state")


def _shift_down_v3_target():
    # |00> -> |11>, |10> -> |00>, |11> -> |10>, |01> -> |01>
    perm = {(0, 0): (1, 1), (1, 0): (0, 0), (1, 1): (1, 0), (0, 1): (0, 1)}
    u = np.zeros((4, 4))
    for src, dst in perm.items():
        u[digits_to_index((2, 2), dst), digits_to_index((2, 2), src)] = 1.0
    return u


@lru_cache(maxsize=None)
def shift_down_v3() -> Circuit:
    """Shift-down ``t -> t - 1 mod 3`` on the V3 code, from one X and two CNOTs.

    Exhaustive over X position (ends first), X wire and CNOT directions.
    """
    target = _shift_down_v3_target()
    directions = ((0, 1), (1, 0))
    for xpos in (0, 2, 1):
        for xwire in (0, 1):
            for d1, d2 in itertools.product(directions, repeat=2):
                cnots = [(cnot(), d1), (cnot(), d2)]
                steps = list(cnots)
                steps.insert(xpos, (pauli_x(), (xwire,)))
                c = Circuit((2, 2), tuple(steps))
                if max_abs(circuit_unitary(c) - target) < EXACT_TOL:
                    return c
    raise RuntimeError("no X + 2 CNOT circuit realizes the V3 shift-down")


def add_control(c: Circuit, control_wire, wire_map, register_dims) -> Circuit:
    """Promote every step of ``c`` by one control: X -> CNOT, CNOT -> Toffoli."""
    steps = []
    for s in c.steps:
        wires = tuple(wire_map[w] for w in s.wires)
        if s.gate.name == "x":
            steps.append((cnot(), (control_wire,) + wires))
        elif s.gate.name == "cnot":
            steps.append((toffoli(), (control_wire,) + wires))
        else:
            raise ValueError(f"cannot add a control to gate {s.gate.name!r}")
    return Circuit(register_dims, tuple(steps))


def _storage_prefix(phi) -> Circuit:
    reg = (2, 2, 2)
    c = prep_2to1().remap({0: 1, 1: 2}, reg)
    return c.append(phase_gate(phi), (1,)).append(phase_gate(phi), (2,))


def build_2to1_toffoli(phi=0.0) -> Circuit:
    """Full three-qubit 2 -> 1 circuit: preparation, two uses of ``U_phi``,
    controlled V3 shift-down (2 CNOT, 2 Toffoli, 3 fixed one-qubit gates)."""
    reg = (2, 2, 2)
    retrieval = add_control(shift_down_v3(), 0, {0: 1, 1: 2}, reg)
    return _storage_prefix(phi).then(retrieval)


def _relative_phase_target(control_order):
    digits = [0, 0, 0]
    digits[control_order[0]] = 1
    d = np.ones(8)
    d[digits_to_index((2, 2, 2), digits)] = -1.0
    return toffoli().matrix @ np.diag(d)


@lru_cache(maxsize=None)
def relative_phase_toffoli(control_order=(0, 1)) -> Circuit:
    """Three-CNOT Toffoli that also flips the sign of one basis state.

    Controls on wires 0 and 1, target on wire 2. The sign lands on the state
    with control ``control_order[0]`` set, ``control_order[1]`` clear and the
    target clear (``|100>`` for the default order). Found by search over
    ``R_y(+-pi/4)`` sandwiches of the CNOT pattern outer-middle-outer.
    """
    control_order = tuple(control_order)
    if sorted(control_order) != [0, 1]:
        raise ValueError(f"control_order must be a permutation of (0, 1), got {control_order}")
    target = _relative_phase_target(control_order)
    q = math.pi / 4
    for middle in (control_order[0], control_order[1]):
        outer = 1 - middle
        for signs in itertools.product((1, -1), repeat=4):
            steps = []
            for i, s in enumerate(signs):
                steps.append((ry(s * q), (2,)))
                if i < 3:
                    steps.append((cnot(), (middle if i == 1 else outer, 2)))
            c = Circuit((2, 2, 2), tuple(steps))
            if max_abs(circuit_unitary(c) - target) < EXACT_TOL:
                return c
    raise RuntimeError(f"no template realizes the relative-phase Toffoli for {control_order}")


@lru_cache(maxsize=None)
def _cnot_level_orders():
    """Control orders for the two relative-phase Toffolis whose spurious signs cancel."""
    reference = circuit_unitary(build_2to1_toffoli(0.0))
    for orders in itertools.product(((0, 1), (1, 0)), repeat=2):
        c = _assemble_cnot_level(0.0, orders)
        if global_phase_deficit(reference, circuit_unitary(c)) < 1e-10:
            return orders
    raise RuntimeError("no control assignment cancels the relative phases")


def _assemble_cnot_level(phi, orders):
    reg = (2, 2, 2)
    c = _storage_prefix(phi)
    toffolis = iter(orders)
    for s in build_2to1_toffoli(phi).steps[len(c.steps):]:
        if s.gate.name == "toffoli":
            # canonical wires (0, 1, 2) -> (data, memory control, memory target)
            rccx = relative_phase_toffoli(next(toffolis))
            c = c.then(rccx.remap(dict(enumerate(s.wires)), reg))
        else:
            c = c.append(s.gate, s.wires)
    return c


def build_2to1_cnot(phi=0.0) -> Circuit:
    """The 2 -> 1 circuit with both Toffolis replaced by relative-phase Toffolis.

    Control assignments are chosen so the two spurious signs cancel; the
    result equals :func:`build_2to1_toffoli` up to a global phase.
    """
    return _assemble_cnot_level(phi, _cnot_level_orders())


def one_qubit_fixed_gate_count(c: Circuit):
    """One-qubit gates other than the stored phase gate."""
    return sum(1 for s in c.steps if s.gate.arity == 1 and s.gate.name != "phase")


def store_2to1_physical(phi) -> StateVector:
    """Two-qubit memory ``(|00> + e^{i phi}|10> + e^{2i phi}|11>)/sqrt(3)``."""
    c = prep_2to1().append(phase_gate(phi), (0,)).append(phase_gate(phi), (1,))
    return run_circuit(c, StateVector.basis((2, 2), (0, 0)))


def _run_three_qubit(circuit, xi):
    _check_qubit(xi)
    rho = xi.tensor(StateVector.basis((2, 2), (0, 0)).density())
    rho = evolve_density(circuit, rho)
    return _enumerate_branches(rho, [1, 2], lambda lab: lab in ("00", "10"))


def run_2to1_toffoli(phi, xi: DensityMatrix):
    """Outcomes ``00``/``10`` succeed, ``11`` fails, ``01`` never occurs."""
    return _run_three_qubit(build_2to1_toffoli(phi), xi)


def run_2to1_cnot(phi, xi: DensityMatrix):
    return _run_three_qubit(build_2to1_cnot(phi), xi)


# --------------------------------------------------------------------------- #
#                      (2^k - 1) -> 1: iterated CNOT (VMC)                    #
# --------------------------------------------------------------------------- #

def vmc_program_state(k, phi) -> ProgramState:
    """Apply ``U_phi`` ``2^m`` times to ``|+>`` on program qubit ``m``."""
    k = int(k)
    if k < 1:
        raise ValueError(f"need k >= 1 program qubits, got {k}")
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    amps = plus
    for _ in range(k - 1):
        amps = np.kron(amps, plus)
    steps = []
    for m in range(k):
        steps.extend((phase_gate(phi), (m,)) for _ in range(2 ** m))
    c = Circuit((2,) * k, tuple(steps))
    vec = run_circuit(c, StateVector((2,) * k, amps))
    return ProgramState(k, vec, c.count("phase"))


def run_vmc(k, phi, xi: DensityMatrix):
    """Iterate CNOT(data -> program m) and measure program m until outcome 0.

    Leaves are labelled by the outcomes seen, e.g. ``"1,1,0"``; the all-ones
    leaf is the only failure.
    """
    _check_qubit(xi)
    program = vmc_program_state(k, phi)
    k = program.k
    reg = (2,) * (k + 1)
    rho = xi.tensor(program.vector.density())
    outcomes = []
    prob = 1.0
    for m in range(1, k + 1):
        if rho is None:
            # unreachable for a normalized program state; kept for null branches
            break
        rho = evolve_density(Circuit(reg, ((cnot(), (0, m)),)), rho)
        rec0, rec1 = measure_wire(rho, m)
        label = ",".join(["1"] * (m - 1) + ["0"])
        post = partial_trace(rec0.post_state, [0]) if rec0.post_state is not None else None
        outcomes.append(ProtocolOutcome(label, prob * rec0.probability, post, True))
        prob *= rec1.probability
        rho = rec1.post_state
    post = partial_trace(rho, [0]) if rho is not None else None
    outcomes.append(ProtocolOutcome(",".join(["1"] * k), prob, post, False))
    return outcomes


# --------------------------------------------------------------------------- #
#                                  Reports                                    #
# --------------------------------------------------------------------------- #

def _matrix_to_json(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def report_dict(protocol, params, outcomes):
    """``{protocol, params, outcomes: [{label, probability, success, post_state_matrix}]}``."""
    return {
        "protocol": protocol,
        "params": dict(params),
        "outcomes": [
            {
                "label": o.label,
                "probability": o.probability,
                "success": o.success,
                "post_state_matrix": (
                    _matrix_to_json(o.post_state.matrix) if o.post_state is not None else None
                ),
            }
            for o in outcomes
        ],
    }


def report_json(protocol, params, outcomes, **kwargs):
    return json.dumps(report_dict(protocol, params, outcomes), **kwargs)
