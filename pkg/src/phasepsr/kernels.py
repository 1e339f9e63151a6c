"""Backend selection for the hot kernels.

The compiled extension ``phasepsr._ckernels`` is used when it imports;
otherwise the pure-Python module ``phasepsr._pykernels`` is used. Both expose
the same functions, and :func:`use_backend` switches between them at runtime
(handy for benchmarks and parity tests).
"""

from contextlib import contextmanager

from phasepsr import _pykernels

try:
    from phasepsr import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_impl = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return sorted(_BACKENDS)


def current_backend():
    return "cython" if _impl is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Select the kernel implementation by name (``"cython"`` or ``"python"``)."""
    global _impl
    try:
        _impl = _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} unavailable; choose from {available_backends()}"
        ) from None


@contextmanager
def backend(name):
    previous = current_backend()
    use_backend(name)
    try:
        yield
    finally:
        use_backend(previous)


def jacobi_eigvalsh(h, tol=1e-15, max_sweeps=100):
    return _impl.jacobi_eigvalsh(h, tol, max_sweeps)


def simplex_pivot_loop(tableau, basis, n_allowed, tol=1e-12, max_iter=10000):
    return _impl.simplex_pivot_loop(tableau, basis, n_allowed, tol, max_iter)


def pivot(tableau, row, col):
    return _impl.pivot(tableau, row, col)


def xoshiro_next(state, count):
    return _impl.xoshiro_next(state, count)


def xoshiro_uniforms(state, count):
    return _impl.xoshiro_uniforms(state, count)


def sample_counts(state, cdf, shots):
    return _impl.sample_counts(state, cdf, shots)
