"""Pure numpy versions of the inner loops in ``_ckernels.pyx``.

Same signatures and semantics; selected by ``mulspace.kernels`` when the
compiled extension is unavailable or ``MULSPACE_PURE_PYTHON=1``.
"""

import numpy as np


def _edge(t):
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(over="ignore"):  # subnormal t: -1/t -> -inf, exp -> 0
        out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(u):
    u = np.asarray(u, dtype=np.float64)
    flat = u.ravel()
    out = np.zeros_like(flat)
    mid = (flat > 0) & (flat < 1)
    a = _edge(flat[mid])
    b = _edge(1.0 - flat[mid])
    out[mid] = a / (a + b)
    out[flat >= 1] = 1.0
    return out.reshape(u.shape)


def _sigma(t, b):
    out = np.zeros_like(t)
    inside = (t > -1) & (t < 1)
    out[inside] = np.exp(-b / (1.0 - t[inside] ** 2))
    return out


def bump_profile(t, b):
    t = np.asarray(t, dtype=np.float64)
    flat = t.ravel()
    out = np.zeros_like(flat)
    inside = (flat > -1) & (flat < 1)
    ti = flat[inside]
    num = _sigma(ti, b)
    out[inside] = num / (_sigma(ti - 1.0, b) + num + _sigma(ti + 1.0, b))
    return out.reshape(t.shape)


def _window(k, xi0, dxi, n):
    lo = max(int(np.floor((k - 1.0 - xi0) / dxi)), 0)
    hi = min(int(np.ceil((k + 1.0 - xi0) / dxi)) + 1, n)
    return lo, max(hi, lo)


def _reduce(v, p):
    if np.isinf(p):
        return float(v.max()) if v.size else 0.0
    if p == 2.0:
        return float(np.sum(v * v))
    if p == 1.0:
        return float(np.sum(v))
    return float(np.sum(v ** p))


def lattice_power_sums_1d(a, xi0, dxi, ks, b, p):
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    out = np.zeros(len(ks))
    for m, k in enumerate(np.asarray(ks, dtype=np.int64)):
        lo, hi = _window(float(k), xi0, dxi, n)
        nodes = xi0 + np.arange(lo, hi) * dxi
        out[m] = _reduce(bump_profile(nodes - k, b) * a[lo:hi], p)
    return out


def lattice_power_sums_2d(a, xi0, dxi, k1s, k2s, b, p):
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    out = np.zeros(len(k1s))
    for m, (k1, k2) in enumerate(zip(np.asarray(k1s, dtype=np.int64), np.asarray(k2s, dtype=np.int64))):
        lo1, hi1 = _window(float(k1), xi0, dxi, n)
        lo2, hi2 = _window(float(k2), xi0, dxi, n)
        w1 = bump_profile(xi0 + np.arange(lo1, hi1) * dxi - k1, b)
        w2 = bump_profile(xi0 + np.arange(lo2, hi2) * dxi - k2, b)
        out[m] = _reduce(np.outer(w1, w2) * a[lo1:hi1, lo2:hi2], p)
    return out


def masked_shift_l1_1d(kernel, x, shift, radius):
    kernel = np.asarray(kernel, dtype=np.complex128)
    keep = np.abs(np.asarray(x)) > radius
    return float(np.sum(np.abs(np.roll(kernel, shift) - kernel)[keep]))


def masked_shift_l1_2d(kernel, x, shift1, shift2, radius):
    kernel = np.asarray(kernel, dtype=np.complex128)
    x = np.asarray(x)
    keep = (x[:, None] ** 2 + x[None, :] ** 2) > radius * radius
    diff = np.roll(kernel, (shift1, shift2), axis=(0, 1)) - kernel
    return float(np.sum(np.abs(diff)[keep]))
