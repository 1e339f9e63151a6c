"""Invariant suites behind ``phasepsr verify``.

Each suite yields :class:`Check` rows: a measured margin compared against a
fixed tolerance. Suites are deterministic (seeded through :mod:`phasepsr.rng`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from phasepsr import circuits as qc
from phasepsr import comb, protocols as pr
from phasepsr import qlinalg as la
from phasepsr.rng import Xoshiro256

PHI_GRID = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: float
    tol: float
    passed: bool

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} [{self.suite}] {self.name}: {self.value:.3e} (tol {self.tol:.0e})"


def _le(suite, name, value, tol):
    return Check(suite, name, float(value), tol, bool(value <= tol))


def _random_hermitian(gen, d):
    x = gen.normal(2 * d * d).reshape(2, d, d)
    a = x[0] + 1j * x[1]
    return a + a.conj().T


def suite_linalg():
    s = "linalg"
    gen = Xoshiro256(2024)
    bell = la.StateVector((2, 2), np.array([1, 0, 0, 1]) / math.sqrt(2)).density()
    yield _le(s, "kron(I2, I2) = I4", la.max_abs(la.kron(np.eye(2), np.eye(2)) - np.eye(4)), 0.0)
    yield _le(s, "Tr_1 Bell = I/2",
              la.max_abs(la.partial_trace(bell, [0]).matrix - np.eye(2) / 2), 1e-15)
    worst = 0.0
    for d in (2, 5, 17, 32):
        h = _random_hermitian(gen, d)
        ev = la.eigvalsh(h)
        worst = max(worst, abs(ev.sum() - np.trace(h).real))
    yield _le(s, "Jacobi: sum of eigenvalues = trace", worst, 1e-10)
    yield _le(s, "min_eigenvalue(diag(3,-2)) = -2",
              abs(la.min_eigenvalue(np.diag([3.0, -2.0])) + 2.0), 1e-12)
    u = qc.ry(0.3).matrix @ qc.phase_gate(1.1).matrix
    yield _le(s, "global phase ignored",
              la.global_phase_deficit(u, np.exp(1j * math.pi / 7) * u), 1e-10)


def suite_circuits():
    s = "circuits"
    gates = [qc.phase_gate(0.7), qc.cnot(), qc.controlled_shift_down(5), qc.ry(0.4),
             qc.pauli_x(), qc.m_gate(), qc.toffoli()]
    margin = max(la.max_abs(g.matrix.conj().T @ g.matrix - np.eye(g.matrix.shape[0]))
                 for g in gates)
    yield _le(s, "gate unitarity margin", margin, 1e-12)
    a = pr.prep_2to1()
    b = pr.shift_down_v3()
    lhs = qc.circuit_unitary(a.then(b))
    rhs = qc.circuit_unitary(b) @ qc.circuit_unitary(a)
    yield _le(s, "U(A then B) = U_B U_A", la.max_abs(lhs - rhs), 1e-12)
    out = qc.run_circuit(a, la.StateVector.basis((2, 2), (0, 0))).amplitudes
    yield _le(s, "prep_2to1 |00> = (|00>+|10>+|11>)/sqrt3",
              la.max_abs(out - np.array([1, 0, 1, 1]) / math.sqrt(3)), 1e-12)
    st = pr.store_qudit(4, 0.9)
    probs = [r.probability for r in qc.measure_wire(st, 0)]
    yield _le(s, "qudit measurement uniform 1/(N+1)", max(abs(p - 0.2) for p in probs), 1e-12)


def suite_protocols():
    s = "protocols"
    gen = Xoshiro256(7)
    xi = la.haar_qubit(gen).density()
    for n in range(1, 9):
        ps = [pr.success_probability(pr.retrieve_qudit(n, pr.store_qudit(n, phi), xi))
              for phi in PHI_GRID[::8]]
        yield _le(s, f"qudit N={n}: |p_success - N/(N+1)|",
                  max(abs(p - n / (n + 1)) for p in ps), 1e-12)
    ref = qc.circuit_unitary(pr.build_2to1_toffoli(0.37))
    cn = pr.build_2to1_cnot(0.37)
    yield _le(s, "2->1 CNOT-level = Toffoli-level (phase deficit)",
              la.global_phase_deficit(ref, qc.circuit_unitary(cn)), 1e-10)
    yield _le(s, "2->1 CNOT count - 8", abs(cn.count("cnot") - 8), 0)
    p = pr.success_probability(pr.run_2to1_toffoli(0.37, xi))
    yield _le(s, "2->1 success - 2/3", abs(p - 2 / 3), 1e-12)
    for k in range(1, 7):
        p = pr.success_probability(pr.run_vmc(k, 0.37, xi))
        yield _le(s, f"VMC k={k}: |p_success - (1 - 2^-k)|", abs(p - (1 - 2.0 ** -k)), 1e-12)
    target = pr.target_state(0.37, xi)
    worst = 0.0
    runs = [
        pr.retrieve_single(pr.store_single(0.37), xi),
        pr.retrieve_qudit(3, pr.store_qudit(3, 0.37), xi),
        pr.run_2to1_toffoli(0.37, xi),
        pr.run_2to1_cnot(0.37, xi),
        pr.run_vmc(3, 0.37, xi),
    ]
    for outcomes in runs:
        for o in outcomes:
            if o.success:
                worst = max(worst, 1.0 - la.fidelity(o.post_state, target))
    yield _le(s, "success branches: 1 - fidelity", worst, 1e-12)


def suite_comb():
    s = "comb"
    for n in range(1, 21):
        r = comb.solve_lp(n)
        yield _le(s, f"LP n={n:2d}: optimum {r.optimum:.12f} vs {n}/{n + 1}",
                  abs(r.optimum - n / (n + 1)), 1e-9)
    for n in range(1, 7):
        spec = comb.RetrievalSpec.optimal(n)
        rep = comb.check_rs(spec, comb.build_rs(spec), PHI_GRID)
        yield _le(s, f"R_s N={n}: -min eigenvalue", -rep.min_eigenvalue, 1e-12)
        yield _le(s, f"R_s N={n}: trace ratio - 1", rep.trace_ratio - 1.0, 1e-12)
        yield _le(s, f"R_s N={n}: covariance error", rep.covariance_error, 1e-10)
    for n in (1, 2, 3):
        ch = comb.instrument_choi(
            lambda phi, xi: pr.retrieve_qudit(n, pr.store_qudit(n, phi), xi), 0.81
        )
        yield _le(s, f"qudit N={n}: Choi = N/(N+1) |U>><<U|",
                  comb.retrieval_error(ch, 0.81, n / (n + 1)), 1e-10)


SUITES = {
    "linalg": suite_linalg,
    "circuits": suite_circuits,
    "protocols": suite_protocols,
    "comb": suite_comb,
}


def run_suites(name="all"):
    names = list(SUITES) if name == "all" else [name]
    checks = []
    for n in names:
        checks.extend(SUITES[n]())
    return checks
