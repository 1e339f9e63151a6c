"""Dense complex linear algebra on small registers of mixed-dimension wires.

Conventions
-----------
Wire 0 is the leftmost tensor factor, i.e. the most significant digit of a
computational-basis index written in the mixed radix given by ``dims``.
Matrices are plain ``numpy`` complex arrays; states carry their ``dims``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from phasepsr import kernels

ATOL = 1e-10


def _frozen(a):
    arr = np.array(a, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------- #
#                                   States                                    #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state on a register with per-wire dimensions ``dims``."""

    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = _frozen(self.amplitudes).reshape(-1)
        if any(d < 1 for d in dims):
            raise ValueError(f"wire dimensions must be positive, got {dims}")
        if amps.size != math.prod(dims):
            raise ValueError(
                f"{amps.size} amplitudes do not fit register dims {dims}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        if abs(np.linalg.norm(amps) - 1.0) > ATOL:
            raise ValueError(f"state norm {np.linalg.norm(amps)!r} != 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, dims, digits):
        """Computational basis state ``|digits>``."""
        dims = tuple(dims)
        amps = np.zeros(math.prod(dims), dtype=complex)
        amps[digits_to_index(dims, digits)] = 1.0
        return cls(dims, amps)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))

    def tensor(self, other: StateVector) -> StateVector:
        return StateVector(self.dims + other.dims, np.kron(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state on a register; Hermitian with unit trace on construction.

    Positivity is not checked on construction (it costs a diagonalization);
    call :meth:`min_eigenvalue` where it matters.
    """

    dims: tuple
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        m = _frozen(self.matrix)
        dim = math.prod(dims)
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not fit register dims {dims}")
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix entries must be finite")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > 1e-12:
            raise ValueError(f"density matrix trace {np.trace(m).real!r} != 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    def min_eigenvalue(self):
        return min_eigenvalue(self.matrix)

    def tensor(self, other: DensityMatrix) -> DensityMatrix:
        return DensityMatrix(self.dims + other.dims, np.kron(self.matrix, other.matrix))


def digits_to_index(dims, digits):
    idx = 0
    for d, x in zip(dims, digits):
        if not 0 <= x < d:
            raise ValueError(f"digit {x} out of range for wire dimension {d}")
        idx = idx * d + x
    return idx


def index_to_digits(dims, index):
    digits = []
    for d in reversed(dims):
        index, r = divmod(index, d)
        digits.append(r)
    return tuple(reversed(digits))


# --------------------------------------------------------------------------- #
#                                 Operations                                  #
# --------------------------------------------------------------------------- #

def kron(a, b):
    """Kronecker product ``(a (x) b)[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(a):
    return np.asarray(a).conj().T


def partial_trace_matrix(m, dims, keep):
    """Trace out every wire of ``m`` (on register ``dims``) not listed in ``keep``.

    The kept wires stay in their original relative order.
    """
    dims = tuple(dims)
    n = len(dims)
    keep = sorted(set(keep))
    for w in keep:
        if not 0 <= w < n:
            raise IndexError(f"wire {w} out of range for {n} wires")
    if len(keep) == n:
        return np.array(m, dtype=complex)
    t = np.asarray(m, dtype=complex).reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    upper = letters.upper()
    row = [letters[i] for i in range(n)]
    col = [upper[i] if i in keep else letters[i] for i in range(n)]
    out = [letters[i] for i in keep] + [upper[i] for i in keep]
    t = np.einsum("".join(row) + "".join(col) + "->" + "".join(out), t)
    dk = math.prod(dims[i] for i in keep)
    return t.reshape(dk, dk)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    kept = sorted(set(keep))
    m = partial_trace_matrix(rho.matrix, rho.dims, kept)
    return DensityMatrix(tuple(rho.dims[i] for i in kept), m)


def is_hermitian(h, tol=ATOL):
    h = np.asarray(h)
    return h.shape[0] == h.shape[1] and np.max(np.abs(h - h.conj().T), initial=0.0) <= tol


def eigvalsh(h):
    """Ascending eigenvalues of a Hermitian matrix (cyclic Jacobi kernel)."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not is_hermitian(h):
        raise ValueError("matrix is not Hermitian within 1e-10")
    # symmetrize so the rotations see an exactly Hermitian input
    return kernels.jacobi_eigvalsh(0.5 * (h + h.conj().T))


def min_eigenvalue(h):
    return float(eigvalsh(h)[0])


def equal_up_to_global_phase(a, b, tol=ATOL):
    """True iff ``|Tr(a^dagger b)| / d >= 1 - tol`` for d x d unitaries."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return global_phase_deficit(a, b) <= tol


def global_phase_deficit(a, b):
    """``1 - |Tr(a^dagger b)| / d``; zero iff equal up to a global phase."""
    a = np.asarray(a)
    b = np.asarray(b)
    d = a.shape[0]
    return 1.0 - abs(np.vdot(a, b)) / d


def is_unitary(u, tol=1e-12):
    u = np.asarray(u)
    return max_abs(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def max_abs(a):
    return float(np.max(np.abs(a), initial=0.0))


def fidelity(rho, sigma):
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Qubits use the closed form ``Tr(rho sigma) + 2 sqrt(det rho det sigma)``,
    which avoids square roots of nearly singular matrices and stays accurate
    to rounding for pure states.
    """
    r = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    s = sigma.matrix if isinstance(sigma, DensityMatrix) else np.asarray(sigma)
    if r.shape != s.shape:
        raise ValueError(f"shape mismatch: {r.shape} vs {s.shape}")
    if r.shape == (2, 2):
        overlap = np.trace(r @ s).real
        dets = (np.linalg.det(r) * np.linalg.det(s)).real
        return float(overlap + 2.0 * math.sqrt(max(dets, 0.0)))
    w, v = np.linalg.eigh(r)
    sq = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    inner = np.linalg.eigvalsh(sq @ s @ sq)
    return float(np.sum(np.sqrt(np.clip(inner, 0.0, None))) ** 2)


# --------------------------------------------------------------------------- #
#                             Random qubit states                             #
# --------------------------------------------------------------------------- #

def haar_qubit(gen) -> StateVector:
    """Haar-random pure qubit: two standard complex Gaussians, normalized."""
    z = gen.normal(4)
    amps = np.array([z[0] + 1j * z[1], z[2] + 1j * z[3]])
    return StateVector((2,), amps / np.linalg.norm(amps))


def bloch_state(x, y, z) -> DensityMatrix:
    r = math.sqrt(x * x + y * y + z * z)
    if r > 1.0 + 1e-12:
        raise ValueError(f"Bloch vector length {r} exceeds 1")
    m = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])
    return DensityMatrix((2,), m)


def bloch_ball_qubit(gen) -> DensityMatrix:
    """Mixed qubit with Bloch vector uniform in the unit ball.

    Direction from three of four Box-Muller normals, radius ``u**(1/3)``.
    """
    z = gen.normal(4)[:3]
    direction = z / np.linalg.norm(z)
    r = gen.random() ** (1.0 / 3.0)
    return bloch_state(*(r * direction))
