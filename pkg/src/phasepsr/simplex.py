"""Dense two-phase simplex for small linear programs.

Solves ``maximize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0`` with
Bland's anti-cycling rule. The pivoting loop runs in :mod:`phasepsr.kernels`.
"""

from dataclasses import dataclass

import numpy as np

from phasepsr import kernels


class InfeasibleError(ValueError):
    pass


class UnboundedError(ValueError):
    pass


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    optimum: float
    iterations: int


def _reduce_objective(tableau, basis):
    m = tableau.shape[0] - 1
    for i in range(m):
        f = tableau[m, basis[i]]
        if f != 0.0:
            tableau[m] -= f * tableau[i]


def linprog_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol=1e-12, max_iter=10000):
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # columns: x (n) | slacks (m_ub) | artificials (m) | rhs
    n_slack = m_ub
    n_art = m
    ncol = n + n_slack + n_art + 1
    T = np.zeros((m + 1, ncol))
    T[:m_ub, :n] = A_ub
    T[:m_ub, n:n + m_ub] = np.eye(m_ub)
    T[:m_ub, -1] = b_ub
    T[m_ub:m, :n] = A_eq
    T[m_ub:m, -1] = b_eq
    neg = T[:m, -1] < 0
    T[:m][neg] *= -1.0
    T[:m, n + n_slack:n + n_slack + n_art] = np.eye(m)
    basis = np.arange(n + n_slack, n + n_slack + n_art, dtype=np.int64)

    # phase 1: maximize -sum(artificials)
    T[m, n + n_slack:n + n_slack + n_art] = 1.0
    _reduce_objective(T, basis)
    status, it1 = kernels.simplex_pivot_loop(T, basis, n + n_slack + n_art, tol, max_iter)
    if status == 2:
        raise RuntimeError("simplex iteration limit reached in phase 1")
    if T[m, -1] < -1e-9:
        raise InfeasibleError(f"infeasible: phase-1 residual {-T[m, -1]:.3e}")

    # drive remaining artificials out of the basis
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] >= n + n_slack:
            cols = np.nonzero(np.abs(T[i, :n + n_slack]) > tol)[0]
            if cols.size:
                kernels.pivot(T, i, int(cols[0]))
                basis[i] = cols[0]
            else:
                keep[i] = False  # redundant equality
    T = np.ascontiguousarray(np.vstack([T[:m][keep], T[m:]]))
    basis = np.ascontiguousarray(basis[keep])

    # phase 2 on the original objective; artificials may not re-enter
    T[-1] = 0.0
    T[-1, :n] = -c
    _reduce_objective(T, basis)
    status, it2 = kernels.simplex_pivot_loop(T, basis, n + n_slack, tol, max_iter)
    if status == 1:
        raise UnboundedError("objective is unbounded")
    if status == 2:
        raise RuntimeError("simplex iteration limit reached in phase 2")

    x = np.zeros(n + n_slack + n_art)
    x[basis] = T[:-1, -1]
    return SimplexResult(x[:n], float(T[-1, -1]), it1 + it2)
