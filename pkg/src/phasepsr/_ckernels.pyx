# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; mirrors ``_pykernels`` operation for operation."""

from libc.math cimport sqrt, fabs, INFINITY
from libc.stdint cimport uint64_t, int64_t

import numpy as np


cdef extern from "complex.h":
    double creal(double complex)
    double cimag(double complex)
    double cabs(double complex)
    double complex conj(double complex)


def jacobi_eigvalsh(h, double tol=1e-15, int max_sweeps=100):
    cdef double complex[:, ::1] a = np.array(h, dtype=np.complex128, copy=True, order="C")
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, p, q, sweep
    cdef double fro = 0.0, off, thresh, mag, tau, sgn, t, c, s
    cdef double complex apq, e, se, sec, xp, xq
    if n == 0:
        return np.empty(0)
    for i in range(n):
        for j in range(n):
            fro += creal(a[i, j]) * creal(a[i, j]) + cimag(a[i, j]) * cimag(a[i, j])
    fro = sqrt(fro)
    if fro == 0.0:
        return np.zeros(n)
    thresh = tol * fro
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += creal(a[i, j]) * creal(a[i, j]) + cimag(a[i, j]) * cimag(a[i, j])
        off = sqrt(2.0 * off)
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = cabs(apq)
                if mag == 0.0:
                    continue
                e = apq / mag
                tau = (creal(a[q, q]) - creal(a[p, p])) / (2.0 * mag)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                se = s * e
                sec = s * conj(e)
                for i in range(n):
                    xp = a[i, p]
                    xq = a[i, q]
                    a[i, p] = c * xp - sec * xq
                    a[i, q] = se * xp + c * xq
                for j in range(n):
                    xp = a[p, j]
                    xq = a[q, j]
                    a[p, j] = c * xp - se * xq
                    a[q, j] = sec * xp + c * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
    out = np.empty(n)
    cdef double[::1] ov = out
    for i in range(n):
        ov[i] = creal(a[i, i])
    out.sort()
    return out


cdef void _pivot(double[:, ::1] T, Py_ssize_t row, Py_ssize_t col) noexcept nogil:
    cdef Py_ssize_t i, j, ncol = T.shape[1], nrow = T.shape[0]
    cdef double pv = T[row, col], f
    for j in range(ncol):
        T[row, j] = T[row, j] / pv
    for i in range(nrow):
        if i == row:
            continue
        f = T[i, col]
        if f != 0.0:
            for j in range(ncol):
                T[i, j] = T[i, j] - f * T[row, j]


def pivot(tableau, Py_ssize_t row, Py_ssize_t col):
    cdef double[:, ::1] T = tableau
    _pivot(T, row, col)


def simplex_pivot_loop(tableau, basis, Py_ssize_t n_allowed, double tol=1e-12,
                       Py_ssize_t max_iter=10000):
    cdef double[:, ::1] T = tableau
    cdef int64_t[::1] B = basis
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it, i, j, enter, leave
    cdef double best, a, r
    for it in range(max_iter):
        enter = -1
        for j in range(n_allowed):
            if T[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            return 0, it
        best = INFINITY
        for i in range(m):
            a = T[i, enter]
            if a > tol:
                r = T[i, rhs] / a
                if r < best:
                    best = r
        if best == INFINITY:
            return 1, it
        leave = -1
        for i in range(m):
            a = T[i, enter]
            if a > tol and T[i, rhs] / a <= best + tol:
                if leave < 0 or B[i] < B[leave]:
                    leave = i
        _pivot(T, leave, enter)
        B[leave] = enter
    return 2, max_iter


cdef inline uint64_t _rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _next(uint64_t* s) noexcept nogil:
    cdef uint64_t result = _rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


cdef double _TWO_M53 = 1.0 / 9007199254740992.0


def xoshiro_next(state, Py_ssize_t count):
    cdef uint64_t[::1] st = state
    cdef uint64_t s[4]
    cdef Py_ssize_t i
    for i in range(4):
        s[i] = st[i]
    out = np.empty(count, dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    for i in range(count):
        ov[i] = _next(s)
    for i in range(4):
        st[i] = s[i]
    return out


def xoshiro_uniforms(state, Py_ssize_t count):
    cdef uint64_t[::1] st = state
    cdef uint64_t s[4]
    cdef Py_ssize_t i
    for i in range(4):
        s[i] = st[i]
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] ov = out
    for i in range(count):
        ov[i] = (_next(s) >> 11) * _TWO_M53
    for i in range(4):
        st[i] = s[i]
    return out


def sample_counts(state, cdf, Py_ssize_t shots):
    cdef uint64_t[::1] st = state
    cdef double[::1] cv = np.ascontiguousarray(cdf, dtype=np.float64)
    cdef Py_ssize_t k = cv.shape[0]
    cdef uint64_t s[4]
    cdef Py_ssize_t i, idx
    cdef double u
    for i in range(4):
        s[i] = st[i]
    counts = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] cnt = counts
    for i in range(shots):
        u = (_next(s) >> 11) * _TWO_M53
        idx = 0
        while idx < k - 1 and u >= cv[idx]:
            idx += 1
        cnt[idx] += 1
    for i in range(4):
        st[i] = s[i]
    return counts
