# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops; mirrors ``mulspace._pykernels`` one-to-one."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, floor, ceil, sqrt, pow, hypot, INFINITY, isinf

cnp.import_array()


cdef inline double _edge(double t) noexcept nogil:
    if t <= 0.0:
        return 0.0
    return exp(-1.0 / t)


cdef inline double _step(double u) noexcept nogil:
    cdef double a, b
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    a = _edge(u)
    b = _edge(1.0 - u)
    return a / (a + b)


cdef inline double _sigma(double t, double b) noexcept nogil:
    if t <= -1.0 or t >= 1.0:
        return 0.0
    return exp(-b / (1.0 - t * t))


cdef inline double _theta(double t, double b) noexcept nogil:
    cdef double num
    if t <= -1.0 or t >= 1.0:
        return 0.0
    num = _sigma(t, b)
    return num / (_sigma(t - 1.0, b) + num + _sigma(t + 1.0, b))


def smooth_step(u):
    cdef const double[::1] uv = np.ascontiguousarray(u, dtype=np.float64).ravel()
    out = np.empty(uv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(uv.shape[0]):
            ov[i] = _step(uv[i])
    return out.reshape(np.shape(u))


def bump_profile(t, double b):
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = _theta(tv[i], b)
    return out.reshape(np.shape(t))


cdef inline void _window(double k, double xi0, double dxi, Py_ssize_t n,
                         Py_ssize_t* lo, Py_ssize_t* hi) noexcept nogil:
    cdef double a = (k - 1.0 - xi0) / dxi
    cdef double c = (k + 1.0 - xi0) / dxi
    lo[0] = <Py_ssize_t>floor(a)
    hi[0] = <Py_ssize_t>ceil(c) + 1
    if lo[0] < 0:
        lo[0] = 0
    if hi[0] > n:
        hi[0] = n
    if hi[0] < lo[0]:
        hi[0] = lo[0]


def lattice_power_sums_1d(a, double xi0, double dxi, ks, double b, double p):
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const long long[::1] kv = np.ascontiguousarray(ks, dtype=np.int64)
    out = np.zeros(kv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t n = av.shape[0], m, i, lo, hi
    cdef double acc, v, k
    cdef bint is_inf = isinf(p)
    with nogil:
        for m in range(kv.shape[0]):
            k = <double>kv[m]
            _window(k, xi0, dxi, n, &lo, &hi)
            acc = 0.0
            for i in range(lo, hi):
                v = _theta(xi0 + i * dxi - k, b) * av[i]
                if is_inf:
                    if v > acc:
                        acc = v
                elif p == 2.0:
                    acc += v * v
                elif p == 1.0:
                    acc += v
                else:
                    acc += pow(v, p)
            ov[m] = acc
    return out


def lattice_power_sums_2d(a, double xi0, double dxi, k1s, k2s, double b, double p):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const long long[::1] k1v = np.ascontiguousarray(k1s, dtype=np.int64)
    cdef const long long[::1] k2v = np.ascontiguousarray(k2s, dtype=np.int64)
    out = np.zeros(k1v.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t n = av.shape[0], m, i, j, lo1, hi1, lo2, hi2
    cdef double acc, v, w1, k1, k2
    cdef bint is_inf = isinf(p)
    with nogil:
        for m in range(k1v.shape[0]):
            k1 = <double>k1v[m]
            k2 = <double>k2v[m]
            _window(k1, xi0, dxi, n, &lo1, &hi1)
            _window(k2, xi0, dxi, n, &lo2, &hi2)
            acc = 0.0
            for i in range(lo1, hi1):
                w1 = _theta(xi0 + i * dxi - k1, b)
                if w1 == 0.0:
                    continue
                for j in range(lo2, hi2):
                    v = w1 * _theta(xi0 + j * dxi - k2, b) * av[i, j]
                    if is_inf:
                        if v > acc:
                            acc = v
                    elif p == 2.0:
                        acc += v * v
                    elif p == 1.0:
                        acc += v
                    else:
                        acc += pow(v, p)
            ov[m] = acc
    return out


def masked_shift_l1_1d(kernel, x, Py_ssize_t shift, double radius):
    cdef const double complex[::1] kv = np.ascontiguousarray(kernel, dtype=np.complex128)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = kv.shape[0], m, src
    cdef double acc = 0.0
    cdef double complex d
    with nogil:
        for m in range(n):
            if fabs(xv[m]) <= radius:
                continue
            src = (m - shift) % n
            if src < 0:
                src = src + n
            d = kv[src] - kv[m]
            acc += hypot(d.real, d.imag)
    return acc


def masked_shift_l1_2d(kernel, x, Py_ssize_t shift1, Py_ssize_t shift2, double radius):
    cdef const double complex[:, ::1] kv = np.ascontiguousarray(kernel, dtype=np.complex128)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = kv.shape[0], i, j, si, sj
    cdef double acc = 0.0, r2 = radius * radius
    cdef double complex d
    with nogil:
        for i in range(n):
            si = (i - shift1) % n
            if si < 0:
                si = si + n
            for j in range(n):
                if xv[i] * xv[i] + xv[j] * xv[j] <= r2:
                    continue
                sj = (j - shift2) % n
                if sj < 0:
                    sj = sj + n
                d = kv[si, sj] - kv[i, j]
                acc += hypot(d.real, d.imag)
    return acc
