"""Gates and circuits on registers of mixed-dimension wires.

Evolution is exact (dense unitaries, no sampling). Measurement returns every
branch of a computational-basis measurement with its Born probability.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from phasepsr.qlinalg import DensityMatrix, StateVector, _frozen, is_unitary

MAX_UNITARY_DIM = 2 ** 14
NULL_PROBABILITY = 1e-14


@dataclass(frozen=True, eq=False)
class Gate:
    """Named unitary acting on ``len(dims)`` slots of the given dimensions."""

    name: str
    dims: tuple
    matrix: np.ndarray
    params: tuple = ()

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        m = _frozen(self.matrix)
        dim = math.prod(dims)
        if m.shape != (dim, dim):
            raise ValueError(f"gate {self.name}: matrix shape {m.shape} != ({dim}, {dim})")
        if not is_unitary(m):
            raise ValueError(f"gate {self.name} is not unitary")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @property
    def arity(self):
        return len(self.dims)


# --------------------------------------------------------------------------- #
#                                Gate library                                 #
# --------------------------------------------------------------------------- #

def phase_gate(phi):
    """``U_phi = |0><0| + e^{i phi}|1><1|``."""
    phi = float(phi)
    if not math.isfinite(phi):
        raise ValueError("phase angle must be finite")
    return Gate("phase", (2,), np.diag([1.0, np.exp(1j * phi)]), (phi,))


def cnot():
    """``|j>|k> -> |j>|j xor k>``; control on slot 0."""
    m = np.eye(4)[:, [0, 1, 3, 2]]
    return Gate("cnot", (2, 2), m)


def controlled_shift_down(d):
    """``|c>|t> -> |c>|t - c mod d>`` with a qubit control on slot 0."""
    d = int(d)
    if d < 2:
        raise ValueError(f"target dimension must be >= 2, got {d}")
    m = np.zeros((2 * d, 2 * d))
    for c in range(2):
        for t in range(d):
            m[c * d + (t - c) % d, c * d + t] = 1.0
    return Gate("cshift_down", (2, d), m, (d,))


_SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def ry(theta):
    """``exp(i theta sigma_y / 2) = [[cos, sin], [-sin, cos]]`` (half-angle)."""
    theta = float(theta)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return Gate("ry", (2,), np.array([[c, s], [-s, c]]), (theta,))


def pauli_x():
    return Gate("x", (2,), np.array([[0, 1], [1, 0]]))


def m_gate():
    a, b = 1 / math.sqrt(3), math.sqrt(2 / 3)
    return Gate("m", (2,), np.array([[a, b], [b, -a]]))


def toffoli():
    """Controls on slots 0 and 1, target on slot 2."""
    m = np.eye(8)[:, [0, 1, 2, 3, 4, 5, 7, 6]]
    return Gate("toffoli", (2, 2, 2), m)


GATES = {
    "phase": phase_gate,
    "cnot": cnot,
    "cshift_down": controlled_shift_down,
    "ry": ry,
    "x": pauli_x,
    "m": m_gate,
    "toffoli": toffoli,
}


def make_gate(name, params=()):
    try:
        builder = GATES[name]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}") from None
    if name == "cshift_down":
        params = [int(p) for p in params]
    return builder(*params)


# --------------------------------------------------------------------------- #
#                                  Circuits                                   #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class Step:
    gate: Gate
    wires: tuple


@dataclass(frozen=True, eq=False)
class Circuit:
    register_dims: tuple
    steps: tuple = field(default=())

    def __post_init__(self):
        dims = tuple(int(d) for d in self.register_dims)
        steps = tuple(
            s if isinstance(s, Step) else Step(s[0], tuple(s[1])) for s in self.steps
        )
        for i, step in enumerate(steps):
            wires = tuple(int(w) for w in step.wires)
            if len(wires) != step.gate.arity:
                raise ValueError(
                    f"step {i}: gate {step.gate.name} takes {step.gate.arity} wires, got {wires}"
                )
            if len(set(wires)) != len(wires):
                raise ValueError(f"step {i}: repeated wire in {wires}")
            for w, d in zip(wires, step.gate.dims):
                if not 0 <= w < len(dims):
                    raise ValueError(f"step {i}: wire {w} out of range")
                if dims[w] != d:
                    raise ValueError(
                        f"step {i}: wire {w} has dimension {dims[w]}, gate slot needs {d}"
                    )
        object.__setattr__(self, "register_dims", dims)
        object.__setattr__(self, "steps", steps)

    def append(self, gate, wires):
        return Circuit(self.register_dims, self.steps + (Step(gate, tuple(wires)),))

    def then(self, other):
        """This circuit followed by ``other`` on the same register."""
        if other.register_dims != self.register_dims:
            raise ValueError("cannot concatenate circuits on different registers")
        return Circuit(self.register_dims, self.steps + other.steps)

    def remap(self, wire_map, register_dims):
        """Place this circuit on a larger register; wire ``w`` goes to ``wire_map[w]``."""
        steps = tuple(
            Step(s.gate, tuple(wire_map[w] for w in s.wires)) for s in self.steps
        )
        return Circuit(register_dims, steps)

    def count(self, name):
        return sum(1 for s in self.steps if s.gate.name == name)

    def gate_counts(self):
        counts = {}
        for s in self.steps:
            counts[s.gate.name] = counts.get(s.gate.name, 0) + 1
        return counts

    def to_dict(self):
        return {
            "register_dims": list(self.register_dims),
            "steps": [
                {"gate": s.gate.name, "params": list(s.gate.params), "wires": list(s.wires)}
                for s in self.steps
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc):
        steps = tuple(
            Step(make_gate(s["gate"], s.get("params", ())), tuple(s["wires"]))
            for s in doc["steps"]
        )
        return cls(tuple(doc["register_dims"]), steps)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def apply_gate(matrix, gate_dims, wires, register_dims, arr):
    """Apply a gate to the leading (register) axis of ``arr``.

    ``arr`` has shape ``(D,)`` or ``(D, K)``; extra axes are carried along.
    """
    k = len(wires)
    batch = arr.shape[1:]
    t = np.asarray(arr).reshape(tuple(register_dims) + batch)
    g = np.asarray(matrix).reshape(tuple(gate_dims) * 2)
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), list(wires)))
    t = np.moveaxis(t, list(range(k)), list(wires))
    return t.reshape(arr.shape)


def circuit_unitary(c: Circuit):
    """Product of the embedded step unitaries, first step applied first."""
    dim = math.prod(c.register_dims)
    if dim > MAX_UNITARY_DIM:
        raise ValueError(f"register dimension {dim} exceeds guard {MAX_UNITARY_DIM}")
    u = np.eye(dim, dtype=complex)
    for s in c.steps:
        u = apply_gate(s.gate.matrix, s.gate.dims, s.wires, c.register_dims, u)
    return u


def run_circuit(c: Circuit, state: StateVector) -> StateVector:
    if state.dims != c.register_dims:
        raise ValueError(f"state dims {state.dims} != register dims {c.register_dims}")
    v = np.array(state.amplitudes)
    for s in c.steps:
        v = apply_gate(s.gate.matrix, s.gate.dims, s.wires, c.register_dims, v)
    return StateVector(state.dims, v)


def evolve_density(c: Circuit, rho: DensityMatrix) -> DensityMatrix:
    """``U rho U^dagger`` step by step, without forming ``U``."""
    if rho.dims != c.register_dims:
        raise ValueError(f"state dims {rho.dims} != register dims {c.register_dims}")
    m = np.array(rho.matrix)
    for s in c.steps:
        m = apply_gate(s.gate.matrix, s.gate.dims, s.wires, c.register_dims, m)
        m = apply_gate(s.gate.matrix, s.gate.dims, s.wires, c.register_dims, m.conj().T).conj().T
    return DensityMatrix(rho.dims, 0.5 * (m + m.conj().T))


# --------------------------------------------------------------------------- #
#                                Measurement                                  #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """One branch of a basis measurement; ``post_state`` is None for null branches."""

    wire: int
    outcome: int
    probability: float
    post_state: StateVector | DensityMatrix | None


def measure_wire(state, wire):
    """All branches of a computational-basis measurement of ``wire``.

    Post-measurement states stay on the full register, renormalized.
    Branches with probability below 1e-14 get ``post_state=None``.
    """
    if not isinstance(state, (StateVector, DensityMatrix)):
        raise TypeError(f"cannot measure {type(state).__name__}")
    dims = state.dims
    if not 0 <= wire < len(dims):
        raise IndexError(f"wire {wire} out of range for {len(dims)} wires")
    d = dims[wire]
    records = []
    if isinstance(state, StateVector):
        t = state.amplitudes.reshape(dims)
        for k in range(d):
            proj = np.zeros_like(t)
            idx = [slice(None)] * len(dims)
            idx[wire] = k
            proj[tuple(idx)] = t[tuple(idx)]
            v = proj.reshape(-1)
            p = float(np.vdot(v, v).real)
            post = StateVector(dims, v / math.sqrt(p)) if p >= NULL_PROBABILITY else None
            records.append(MeasurementRecord(wire, k, p, post))
    else:
        n = len(dims)
        t = state.matrix.reshape(dims + dims)
        for k in range(d):
            proj = np.zeros_like(t)
            idx = [slice(None)] * (2 * n)
            idx[wire] = k
            idx[n + wire] = k
            proj[tuple(idx)] = t[tuple(idx)]
            m = proj.reshape(state.matrix.shape)
            p = float(np.trace(m).real)
            post = DensityMatrix(dims, m / p) if p >= NULL_PROBABILITY else None
            records.append(MeasurementRecord(wire, k, max(p, 0.0), post))
    return records
