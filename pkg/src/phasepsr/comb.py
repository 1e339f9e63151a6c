"""Choi-operator checks of perfect retrieval and the optimal retrieval operator.

Choi convention: ``C = sum_ij E(|i><j|) (x) |i><j|`` (output factor first), so
a unitary channel has ``C = |U>><<U|`` with ``|U>> = (U (x) I) sum_i |ii>``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from phasepsr.circuits import phase_gate
from phasepsr.qlinalg import DensityMatrix, max_abs, min_eigenvalue, partial_trace_matrix
from phasepsr.simplex import linprog_max

ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class ChoiOperator:
    """Choi matrix of a map from ``dim_in`` to ``dim_out`` levels.

    ``input_first`` records the tensor order of ``matrix``: False for
    output (x) input, True for input (x) output.
    """

    dim_in: int
    dim_out: int
    matrix: np.ndarray
    input_first: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.dim_in * self.dim_out
        if m.shape != (d, d):
            raise ValueError(f"Choi matrix shape {m.shape} != ({d}, {d})")
        object.__setattr__(self, "matrix", m)

    @property
    def dims(self):
        return (self.dim_in, self.dim_out) if self.input_first else (self.dim_out, self.dim_in)

    def trace_output(self):
        """Partial trace over the output factor (an operator on the input)."""
        keep = [0] if self.input_first else [1]
        return partial_trace_matrix(self.matrix, self.dims, keep)

    def __add__(self, other):
        if (self.dim_in, self.dim_out, self.input_first) != (
            other.dim_in, other.dim_out, other.input_first
        ):
            raise ValueError("incompatible Choi operators")
        return ChoiOperator(self.dim_in, self.dim_out, self.matrix + other.matrix, self.input_first)


def double_ket(u):
    """``|U>> = (U (x) I) sum_i |i>|i>``; entry ``a*d + i`` is ``u[a, i]``."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"double_ket needs a square matrix, got shape {u.shape}")
    return u.reshape(-1).copy()


def unitary_choi(u, weight=1.0):
    v = double_ket(u)
    return ChoiOperator(u.shape[0], u.shape[0], weight * np.outer(v, v.conj()))


# --------------------------------------------------------------------------- #
#                        Induced instrument on the data                       #
# --------------------------------------------------------------------------- #

_PROBES = {
    "0": np.array([[1, 0], [0, 0]], dtype=complex),
    "1": np.array([[0, 0], [0, 1]], dtype=complex),
    "+": 0.5 * np.array([[1, 1], [1, 1]], dtype=complex),
    "+i": 0.5 * np.array([[1, -1j], [1j, 1]], dtype=complex),
}


def _select(which):
    if which == "success":
        return lambda o: o.success
    if which == "failure":
        return lambda o: not o.success
    if which == "all":
        return lambda o: True
    if callable(which):
        return which
    raise ValueError(f"unknown branch selector {which!r}")


def instrument_choi(protocol, phi, which="success") -> ChoiOperator:
    """Choi matrix of the data-qubit operation summed over selected branches.

    ``protocol(phi, xi)`` must return a list of ``ProtocolOutcome``. The map
    is reconstructed by linearity from four density-matrix probes:
    ``|0><1| = |+><+| + i|+i><+i| - (1+i)/2 (|0><0| + |1><1|)``.
    """
    keep = _select(which)
    images = {}
    for name, probe in _PROBES.items():
        acc = np.zeros((2, 2), dtype=complex)
        for o in protocol(phi, DensityMatrix((2,), probe)):
            if keep(o) and o.post_state is not None:
                acc += o.probability * o.post_state.matrix
        images[name] = acc
    e00, e11 = images["0"], images["1"]
    e01 = images["+"] + 1j * images["+i"] - 0.5 * (1 + 1j) * (e00 + e11)
    e10 = images["+"] - 1j * images["+i"] - 0.5 * (1 - 1j) * (e00 + e11)
    units = {(0, 0): e00, (0, 1): e01, (1, 0): e10, (1, 1): e11}
    c = np.zeros((4, 4), dtype=complex)
    for (i, j), img in units.items():
        eij = np.zeros((2, 2))
        eij[i, j] = 1.0
        c += np.kron(img, eij)
    return ChoiOperator(2, 2, c)


def retrieval_error(choi: ChoiOperator, phi, lam):
    """``max |choi - lam |U_phi>><<U_phi||``."""
    return max_abs(choi.matrix - unitary_choi(phase_gate(phi).matrix, lam).matrix)


def check_perfect_retrieval(choi: ChoiOperator, phi, lam, tol=ATOL):
    return retrieval_error(choi, phi, lam) < tol


# --------------------------------------------------------------------------- #
#                          Optimal retrieval operator                         #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class RetrievalSpec:
    """Storage weights ``p_0..p_N`` and block weights ``mu_0..mu_{N-1}``."""

    n: int
    p: tuple
    mu: tuple

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        mu = tuple(float(x) for x in self.mu)
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if len(p) != self.n + 1 or len(mu) != self.n:
            raise ValueError(f"need {self.n + 1} p values and {self.n} mu values")
        if min(p) < 0 or abs(math.fsum(p) - 1.0) > 1e-12:
            raise ValueError("p must be a probability vector")
        if min(mu) < 0:
            raise ValueError("mu must be non-negative")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "mu", mu)

    @classmethod
    def optimal(cls, n):
        w = 1.0 / (n + 1)
        return cls(n, (w,) * (n + 1), (w,) * n)

    @property
    def lam(self):
        return math.fsum(self.mu)

    def is_feasible(self, tol=1e-12):
        return all(
            m <= min(self.p[j], self.p[j + 1]) + tol for j, m in enumerate(self.mu)
        )


def _rs_index(n, c, j, d):
    return (c * (n + 1) + j) * 2 + d


def build_rs(spec: RetrievalSpec, strict=True) -> ChoiOperator:
    """Retrieval operator on C (x) M (x) D (dims 2, N+1, 2).

    ``R_s = sum_J sum_{j,j' in {J,J+1}} mu_J / sqrt(p_j p_j') |b_Jj><b_Jj'|``
    with ``|b_Jj> = |j-J>_C |j>_M |j-J>_D``. With ``strict=False`` an
    infeasible spec is built anyway so its violations can be reported.
    """
    if strict and not spec.is_feasible():
        raise ValueError("infeasible spec: some mu_J exceeds p_J or p_{J+1}")
    n = spec.n
    dim = 2 * (n + 1) * 2
    r = np.zeros((dim, dim))
    for J, mu in enumerate(spec.mu):
        if mu == 0.0:
            continue
        for j in (J, J + 1):
            for jp in (J, J + 1):
                if spec.p[j] == 0.0 or spec.p[jp] == 0.0:
                    raise ValueError(f"mu_{J} > 0 requires p_{j}, p_{jp} > 0")
                a = _rs_index(n, j - J, j, j - J)
                b = _rs_index(n, jp - J, jp, jp - J)
                r[a, b] = mu / math.sqrt(spec.p[j] * spec.p[jp])
    return ChoiOperator(2 * (n + 1), 2, r, input_first=True)


def conditioned_rs(rs: ChoiOperator, n, memory):
    """``<m*| R_s |m*>`` contracted on M, giving an operator on C (x) D."""
    t = rs.matrix.reshape(2, n + 1, 2, 2, n + 1, 2)
    v = np.asarray(memory, dtype=complex)
    return np.einsum("m,cmdeMf,M->cdef", v.conj(), t, v).reshape(4, 4)


@dataclass(frozen=True)
class RsReport:
    n: int
    lam: float
    min_eigenvalue: float
    trace_ratio: float
    trace_max_eigenvalue: float
    covariance_error: float
    grid_points: int
    identity_error: float = field(default=0.0)

    def passed(self, positivity_tol=1e-12, trace_tol=1e-12, equality_tol=ATOL):
        return (
            self.min_eigenvalue >= -positivity_tol
            and self.trace_ratio <= 1.0 + trace_tol
            and self.covariance_error < equality_tol
        )

    def to_dict(self):
        d = dict(self.__dict__)
        d["passed"] = self.passed()
        return d

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def check_rs(spec: RetrievalSpec, rs: ChoiOperator, phi_grid) -> RsReport:
    """Positivity, trace non-increase and covariant perfect retrieval of ``R_s``.

    ``trace_ratio`` is ``max_{c,j} mu_{j-c} / p_j`` over the blocks present,
    i.e. the largest diagonal entry of ``Tr_D R_s``; ``trace_max_eigenvalue``
    is the same quantity read off the operator itself.
    """
    n = spec.n
    lam = spec.lam
    ratio = 0.0
    for c in (0, 1):
        for j in range(n + 1):
            J = j - c
            if 0 <= J < n and spec.mu[J] > 0:
                ratio = max(ratio, spec.mu[J] / spec.p[j])
    tr_d = rs.trace_output()
    sqrt_p = np.sqrt(np.array(spec.p))
    ident = np.zeros(4)
    ident[[0, 3]] = 1.0
    id_err = max_abs(conditioned_rs(rs, n, sqrt_p) - lam * np.outer(ident, ident))
    cov = 0.0
    grid = list(phi_grid)
    j = np.arange(n + 1)
    for phi in grid:
        mem = sqrt_p * np.exp(-1j * j * phi)
        target = unitary_choi(phase_gate(phi).matrix, lam).matrix
        cov = max(cov, max_abs(conditioned_rs(rs, n, mem) - target))
    return RsReport(
        n=n,
        lam=lam,
        min_eigenvalue=min_eigenvalue(rs.matrix),
        trace_ratio=ratio,
        trace_max_eigenvalue=float(np.max(np.diag(tr_d).real)),
        covariance_error=cov,
        grid_points=len(grid),
        identity_error=id_err,
    )


# --------------------------------------------------------------------------- #
#                           The linear program                                #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class LPResult:
    n: int
    optimum: float
    argmax_p: tuple
    argmax_mu: tuple
    certificate_weights: tuple
    iterations: int

    @property
    def closed_form(self):
        return self.n / (self.n + 1)

    def certificate_value(self):
        """``sum_J f_J mu_J + (1 - f_J) mu_{J-1}``; never exceeds ``sum p = 1``."""
        f = self.certificate_weights
        mu = self.argmax_mu
        total = 0.0
        for J in range(self.n + 1):
            if J < self.n:
                total += f[J] * mu[J]
            if J >= 1:
                total += (1 - f[J]) * mu[J - 1]
        return total

    def certificate_bound(self):
        """``sum_J ((N+1)/N) mu_J``, which the certificate caps at 1."""
        return (self.n + 1) / self.n * math.fsum(self.argmax_mu)

    def to_dict(self):
        return {
            "n": self.n,
            "optimum": self.optimum,
            "closed_form": self.closed_form,
            "argmax_p": list(self.argmax_p),
            "argmax_mu": list(self.argmax_mu),
            "certificate_weights": list(self.certificate_weights),
            "certificate_value": self.certificate_value(),
            "certificate_bound": self.certificate_bound(),
            "iterations": self.iterations,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def solve_lp(n) -> LPResult:
    """Maximize ``sum mu_J`` s.t. ``0 <= mu_J <= p_J, p_{J+1}``, ``p >= 0``, ``sum p = 1``.

    Variables are ordered ``p_0..p_N, mu_0..mu_{N-1}``.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    nv = 2 * n + 1
    c = np.zeros(nv)
    c[n + 1:] = 1.0
    rows = []
    for J in range(n):
        for j in (J, J + 1):
            row = np.zeros(nv)
            row[n + 1 + J] = 1.0
            row[j] = -1.0
            rows.append(row)
    A_eq = np.zeros((1, nv))
    A_eq[0, :n + 1] = 1.0
    res = linprog_max(c, np.array(rows), np.zeros(len(rows)), A_eq, np.ones(1))
    weights = tuple((n - J) / n for J in range(n + 1))
    return LPResult(
        n=n,
        optimum=res.optimum,
        argmax_p=tuple(float(v) for v in res.x[:n + 1]),
        argmax_mu=tuple(float(v) for v in res.x[n + 1:]),
        certificate_weights=weights,
        iterations=res.iterations,
    )
