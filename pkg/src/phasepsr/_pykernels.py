"""Pure-Python versions of the hot kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and the same arithmetic order, so the two backends agree to
rounding (and bit-for-bit for the integer PRNG).
"""

import math

import numpy as np

MASK64 = (1 << 64) - 1
_TWO_M53 = 1.0 / 9007199254740992.0


# --------------------------------------------------------------------------- #
#                           Hermitian eigenvalues                             #
# --------------------------------------------------------------------------- #

def jacobi_eigvalsh(h, tol=1e-15, max_sweeps=100):
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns the eigenvalues in ascending order. ``tol`` bounds the final
    off-diagonal Frobenius norm relative to the full Frobenius norm.
    """
    a = np.array(h, dtype=np.complex128, copy=True)
    n = a.shape[0]
    if n == 0:
        return np.empty(0)
    fro = math.sqrt(float(np.sum(np.abs(a) ** 2)))
    if fro == 0.0:
        return np.zeros(n)
    thresh = tol * fro
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(np.abs(np.triu(a, 1)) ** 2)))
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                e = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                se = s * e
                sec = s * e.conjugate()
                # A <- A G
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - sec * colq
                a[:, q] = se * colp + c * colq
                # A <- G^dagger A
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - se * rowq
                a[q, :] = sec * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
    return np.sort(np.diag(a).real.copy())


# --------------------------------------------------------------------------- #
#                               Simplex pivots                                #
# --------------------------------------------------------------------------- #

def simplex_pivot_loop(tableau, basis, n_allowed, tol=1e-12, max_iter=10000):
    """Run Bland's-rule primal simplex pivots on a dense tableau in place.

    ``tableau`` has one row per constraint followed by the reduced-cost row;
    the last column is the right-hand side. Only the first ``n_allowed``
    columns may enter the basis. Returns ``(status, iterations)`` with status
    0 = optimal, 1 = unbounded, 2 = iteration limit.
    """
    m = tableau.shape[0] - 1
    rhs = tableau.shape[1] - 1
    for it in range(max_iter):
        obj = tableau[m]
        enter = -1
        for j in range(n_allowed):
            if obj[j] < -tol:
                enter = j
                break
        if enter < 0:
            return 0, it
        best = math.inf
        for i in range(m):
            a = tableau[i, enter]
            if a > tol:
                r = tableau[i, rhs] / a
                if r < best:
                    best = r
        if best == math.inf:
            return 1, it
        # Bland: among (near-)minimal ratios take the smallest basic index
        leave = -1
        for i in range(m):
            a = tableau[i, enter]
            if a > tol and tableau[i, rhs] / a <= best + tol:
                if leave < 0 or basis[i] < basis[leave]:
                    leave = i
        pivot(tableau, leave, enter)
        basis[leave] = enter
    return 2, max_iter


def pivot(tableau, row, col):
    prow = tableau[row] / tableau[row, col]
    tableau[row] = prow
    for i in range(tableau.shape[0]):
        if i != row:
            f = tableau[i, col]
            if f != 0.0:
                tableau[i] = tableau[i] - f * prow


# --------------------------------------------------------------------------- #
#                          xoshiro256** sampling                              #
# --------------------------------------------------------------------------- #

def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


def _next(s):
    result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
    t = (s[1] << 17) & MASK64
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


def xoshiro_next(state, count):
    """Draw ``count`` raw 64-bit outputs, advancing ``state`` (uint64[4]) in place."""
    s = [int(v) for v in state]
    out = np.empty(count, dtype=np.uint64)
    for i in range(count):
        out[i] = _next(s)
    state[:] = np.array(s, dtype=np.uint64)
    return out


def xoshiro_uniforms(state, count):
    """Draw ``count`` doubles in [0, 1) as ``(x >> 11) * 2**-53``."""
    s = [int(v) for v in state]
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = (_next(s) >> 11) * _TWO_M53
    state[:] = np.array(s, dtype=np.uint64)
    return out


def sample_counts(state, cdf, shots):
    """Inverse-CDF sampling of ``shots`` outcomes; returns per-outcome counts."""
    s = [int(v) for v in state]
    k = len(cdf)
    cdf = [float(c) for c in cdf]
    counts = np.zeros(k, dtype=np.int64)
    for _ in range(shots):
        u = (_next(s) >> 11) * _TWO_M53
        idx = 0
        while idx < k - 1 and u >= cdf[idx]:
            idx += 1
        counts[idx] += 1
    state[:] = np.array(s, dtype=np.uint64)
    return counts
