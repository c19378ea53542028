"""Function-space norms of grid functions.

Every routine returns a :class:`NormValue`, a ``float`` that also carries
``warnings`` and ``truncation_mass`` (the fraction of ``|f^|^2`` lying where
the finite decomposition is no longer a full partition of unity).  The
decompositions are the ones in :mod:`mulspace.partitions`; ``p = 2`` pieces
are measured on the frequency side through the discrete Plancherel
identity, other ``p`` through an inverse FFT per piece.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import QuadratureError, ValidationError
from .grid import (FREQUENCY, SPACE, GridFunction, forward_batch, forward_transform,
                   inverse_batch, inverse_transform, lp_norm, weighted_lp)
from .parallel import ordered_map

#: relative mass above which a truncated decomposition warns
TRUNCATION_TOL = 1e-8
#: relative quadrature error above which the STFT norm refuses to answer
STFT_QUADRATURE_TOL = 0.05
_BATCH_ELEMENTS = 1 << 21


class NormValue(float):
    """A norm value with the diagnostics gathered while computing it."""

    def __new__(cls, value, warnings=(), truncation_mass=0.0, **info):
        obj = super().__new__(cls, value)
        obj.warnings = tuple(warnings)
        obj.truncation_mass = float(truncation_mass)
        obj.info = info
        return obj


FAMILIES = ("Lp", "Sobolev", "Besov", "Modulation", "ModulationSTFT", "Herz", "FLq", "Hardy1")


@dataclass(frozen=True)
class NormSpec:
    family: str
    p: float = 2.0
    q: float = 2.0
    s: float = 0.0
    method: str = "riesz"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown norm family {self.family!r}", "family")
        for name in ("p", "q"):
            v = float(getattr(self, name))
            if not v >= 1:
                raise ValidationError(f"{name} must lie in [1, inf], got {v}", name)
            object.__setattr__(self, name, v)
        s = float(self.s)
        if not np.isfinite(s):
            raise ValidationError("s must be finite", "s")
        object.__setattr__(self, "s", s)
        if self.method not in ("riesz", "maximal"):
            raise ValidationError(f"unknown Hardy method {self.method!r}", "method")

    def as_dict(self):
        return {"family": self.family, "p": _jsonable(self.p), "q": _jsonable(self.q), "s": self.s,
                "method": self.method}


def _jsonable(v):
    return "inf" if np.isinf(v) else v


@dataclass(frozen=True)
class Window:
    g: GridFunction
    label: str = "gaussian"

    def __post_init__(self):
        if self.g.side != SPACE:
            raise ValidationError("window must be a space-side function", "window")
        if not np.any(self.g.samples):
            raise ValidationError("window must be nonzero", "window")


def gaussian_window(grid):
    """``exp(-|x|^2/2)`` normalized to unit L^2 norm."""
    r = grid.radius(SPACE)
    g = np.exp(-0.5 * r * r) * np.pi ** (-grid.dim / 4.0)
    return Window(GridFunction(grid, g, SPACE), "gaussian")


def _check_pq(p=None, q=None):
    for name, v in (("p", p), ("q", q)):
        if v is not None and not float(v) >= 1:
            raise ValidationError(f"{name} must lie in [1, inf], got {v}", name)


def _require_space(f):
    if f.side != SPACE:
        raise ValidationError(f"expected a space-side function, got {f.side}", "side")


def _lq(values, q):
    """Unweighted l^q norm of a nonnegative sequence."""
    return weighted_lp(np.asarray(values, dtype=np.float64), 1.0, float(q))


def _mass_beyond(F, mask):
    a2 = np.abs(F) ** 2
    total = a2.sum()
    if total == 0:
        return 0.0
    return float(a2[mask].sum() / total)


def _truncation(mass, what):
    if mass > TRUNCATION_TOL:
        return (f"{what}: {mass:.3g} of the spectral mass lies beyond the last fully resolved piece",)
    return ()


def _dyadic_threshold(halfwidth):
    """Radius up to which the resolved inhomogeneous pieces sum to 1."""
    return 2.0 ** (np.floor(np.log2(halfwidth)) - 1)


def sobolev_norm(f, s):
    """``||(1 + |xi|^2)^{s/2} f^||_2 / (2 pi)^{n/2}``."""
    _require_space(f)
    F = forward_transform(f)
    r = f.grid.radius(FREQUENCY)
    a = np.abs(F.samples) * (1.0 + r * r) ** (s / 2.0)
    return NormValue((2 * np.pi) ** (-f.grid.dim / 2) * weighted_lp(a, F.weight, 2.0))


def _piece_norms_spectral(grid, pieces, p):
    """L^p norms of ``F^{-1}`` of each spectrum in ``pieces`` (a list of arrays)."""
    if p == 2.0:
        c = (2 * np.pi) ** (-grid.dim / 2)
        w = grid.weight(FREQUENCY)
        return [c * weighted_lp(np.abs(P), w, 2.0) for P in pieces]
    w = grid.weight(SPACE)
    out = []
    per = max(1, _BATCH_ELEMENTS // (grid.points_per_axis ** grid.dim))
    for start in range(0, len(pieces), per):
        vals = inverse_batch(grid, np.stack(pieces[start:start + per]))
        out.extend(weighted_lp(np.abs(v), w, p) for v in vals)
    return out


def besov_norm(f, p, q, s, partition, plancherel=True):
    """``(sum_{j>=0} 2^{jsq} ||psi_j(D) f||_p^q)^{1/q}`` over the pieces that meet the grid."""
    _require_space(f)
    _check_pq(p, q)
    p, q = float(p), float(q)
    g = f.grid
    F = forward_transform(f).samples
    r = g.radius(FREQUENCY)
    count = partition.inhomogeneous_count(float(r.max()))

    def piece(l):
        return partition.inhomogeneous(r, l) * F

    pieces = ordered_map(piece, range(count))
    if p == 2.0 and not plancherel:
        norms = [lp_norm(inverse_transform(GridFunction(g, P, FREQUENCY)), 2.0) for P in pieces]
    else:
        norms = _piece_norms_spectral(g, pieces, p)
    weights = 2.0 ** (s * np.arange(count))
    mass = _mass_beyond(F, r > _dyadic_threshold(g.freq_halfwidth))
    return NormValue(_lq(weights * np.array(norms), q), _truncation(mass, "besov"), mass,
                     pieces=count, piece_norms=[float(v) for v in norms])


def _lattice_for(grid, partition):
    K = int(np.ceil(grid.freq_halfwidth)) + 1
    return K, partition.lattice(K)


def _lattice_power_sums(A, grid, ks, partition, p):
    xi0, dxi = float(grid.xi_axis[0]), grid.freq_spacing
    if grid.dim == 1:
        return kernels.lattice_power_sums_1d(A, xi0, dxi, ks[:, 0], partition.sharpness, p)
    return kernels.lattice_power_sums_2d(A, xi0, dxi, ks[:, 0], ks[:, 1], partition.sharpness, p)


def modulation_piece_norms(f, p, partition, plancherel=True):
    """``||phi(D - k) f||_p`` for every lattice point, with the lattice (lexicographic)."""
    _require_space(f)
    g = f.grid
    F = forward_transform(f).samples
    _, ks = _lattice_for(g, partition)
    p = float(p)
    if p == 2.0 and plancherel:
        sums = _lattice_power_sums(np.abs(F), g, ks, partition, 2.0)
        c = (2 * np.pi) ** (-g.dim / 2)
        return ks, F, c * np.sqrt(g.weight(FREQUENCY) * sums)

    ax = g.xi_axis
    theta = [partition.theta(ax - k) for k in range(int(ks.min()), int(ks.max()) + 1)]
    off = -int(ks.min())

    def piece(k):
        if g.dim == 1:
            w = theta[k[0] + off]
        else:
            w = np.outer(theta[k[0] + off], theta[k[1] + off])
        return w * F

    # pieces whose window misses every node are exactly zero
    live = [i for i, k in enumerate(ks) if all(np.any(theta[c + off]) for c in k)]
    norms = np.zeros(len(ks))
    per = max(1, _BATCH_ELEMENTS // (g.points_per_axis ** g.dim))
    chunks = [live[i:i + per] for i in range(0, len(live), per)]

    def run(chunk):
        return _piece_norms_spectral(g, [piece(ks[i]) for i in chunk], p)

    for chunk, vals in zip(chunks, ordered_map(run, chunks)):
        norms[chunk] = vals
    return ks, F, norms


def modulation_norm(f, p, q, s, partition, plancherel=True):
    """``(sum_k (1+|k|)^{sq} ||phi(D-k) f||_p^q)^{1/q}`` over ``|k|_inf <= ceil(Xi)+1``."""
    _check_pq(p, q)
    ks, F, norms = modulation_piece_norms(f, p, partition, plancherel)
    weights = (1.0 + np.linalg.norm(ks, axis=1)) ** float(s)
    g = f.grid
    edge = np.abs(g.points(FREQUENCY)).max(axis=-1) > g.freq_halfwidth - 1.0
    mass = _mass_beyond(F, edge)
    return NormValue(_lq(weights * norms, q), _truncation(mass, "modulation"), mass,
                     pieces=int(np.count_nonzero(norms)))


def stft_modulation_norm(f, p, q, s, window=None, stride=None):
    """Mixed ``L^q_xi(L^p_x)`` norm of the STFT ``V_g f`` with weight ``(1+|xi|^2)^{s/2}``.

    ``V_g f(x, xi)`` is evaluated for ``x`` on every ``stride``-th spatial
    node per axis and all frequency nodes.  The same sum restricted to every
    ``2 * stride``-th node gives the error estimate ``|I_s - I_2s| / I_s``.
    The x-sums of smooth periodic data converge faster than any power of
    the step, so the difference to the coarser level bounds the error of
    the finer one.  An estimate above 5% raises
    :class:`~mulspace.errors.QuadratureError`.  Cost is
    ``O((N/stride)^n N^n log N)``.
    """
    _require_space(f)
    _check_pq(p, q)
    p, q = float(p), float(q)
    g = f.grid
    n, dim = g.points_per_axis, g.dim
    window = gaussian_window(g) if window is None else window
    if window.g.grid != g:
        raise ValidationError("window lives on a different grid", "window")
    if stride is None:
        stride = 1 if dim == 1 else 4
    stride = int(stride)
    if stride < 1 or n // stride < 2:
        raise ValidationError("stride must leave at least two x samples per axis", "stride")

    fs = f.samples
    gc = np.conj(window.g.samples)
    centers = list(range(0, n, stride))
    if dim == 1:
        xs = [(m,) for m in centers]
    else:
        xs = [(a, b) for a in centers for b in centers]
    per = max(1, _BATCH_ELEMENTS // (n ** dim))

    def rows(batch):
        stack = np.stack([fs * np.roll(gc, tuple(c - n // 2 for c in m), axis=tuple(range(dim)))
                          for m in batch])
        return np.abs(forward_batch(g, stack))

    fine = np.zeros(g.shape)
    coarse = np.zeros(g.shape)
    for start in range(0, len(xs), per):
        batch = xs[start:start + per]
        V = rows(batch)
        sel = np.array([all(c % (2 * stride) == 0 for c in m) for m in batch])
        if np.isinf(p):
            fine = np.maximum(fine, V.max(axis=0))
            if sel.any():
                coarse = np.maximum(coarse, V[sel].max(axis=0))
        else:
            Vp = V ** p
            fine += Vp.sum(axis=0)
            coarse += Vp[sel].sum(axis=0)

    r = g.radius(FREQUENCY)
    wxi = (1.0 + r * r) ** (s / 2.0)

    def total(acc, step):
        inner = acc if np.isinf(p) else (acc * (step * g.spacing) ** dim) ** (1.0 / p)
        return weighted_lp(inner * wxi, g.weight(FREQUENCY), q)

    value = total(fine, stride)
    rough = total(coarse, 2 * stride)
    err = abs(value - rough) / value if value > 0 else 0.0
    if err > STFT_QUADRATURE_TOL:
        raise QuadratureError(f"STFT x-quadrature error estimate {err:.3g} exceeds {STFT_QUADRATURE_TOL}")
    return NormValue(value, (), 0.0, quadrature_error=err, stride=stride, window=window.label)


def herz_norm(F, p, q, s, partition):
    """``(sum_{j>=0} 2^{jsq} ||psi_j F||_p^q)^{1/q}``, multiplying in ``F``'s own variable."""
    _check_pq(p, q)
    p, q = float(p), float(q)
    g = F.grid
    r = g.radius(F.side)
    vals = F.samples
    count = partition.inhomogeneous_count(float(r.max()))
    w = F.weight
    norms = ordered_map(lambda l: weighted_lp(np.abs(partition.inhomogeneous(r, l) * vals), w, p),
                        range(count))
    half = g.half_width if F.side == SPACE else g.freq_halfwidth
    mass = _mass_beyond(vals, r > _dyadic_threshold(half))
    return NormValue(_lq(2.0 ** (s * np.arange(count)) * np.array(norms), q),
                     _truncation(mass, "herz"), mass, pieces=count, piece_norms=[float(v) for v in norms])


def flq_norm(f, q):
    """``||f^||_q``."""
    _require_space(f)
    _check_pq(q=q)
    return NormValue(lp_norm(forward_transform(f), q))


def riesz_symbol(points, axis):
    """``-i xi_axis / |xi|`` with value 0 at the origin."""
    r = np.sqrt(np.sum(points * points, axis=-1))
    out = np.zeros(r.shape, dtype=np.complex128)
    nz = r > 0
    out[nz] = -1j * points[..., axis][nz] / r[nz]
    return out


def hardy_norm(f, method="riesz", l0=10):
    """H^1 norm estimate.

    ``maximal``: L^1 norm of ``max_l |eta_t * f|`` over ``t = 2^l``,
    ``|l| <= l0``, with ``eta`` the unit-mass Gaussian; a lower bound that
    is nondecreasing in ``l0``.
    ``riesz``: ``||f||_1 + sum_l ||R_l f||_1``.
    """
    _require_space(f)
    g = f.grid
    F = forward_transform(f).samples
    w = g.weight(SPACE)
    if method == "maximal":
        r2 = g.radius(FREQUENCY) ** 2
        ts = 2.0 ** np.arange(-int(l0), int(l0) + 1)
        smoothed = ordered_map(lambda t: np.abs(inverse_batch(g, np.exp(-0.5 * t * t * r2) * F)), ts)
        sup = np.zeros(g.shape)
        for u in smoothed:
            sup = np.maximum(sup, u)
        return NormValue(weighted_lp(sup, w, 1.0), l0=int(l0))
    if method == "riesz":
        pts = g.points(FREQUENCY)
        total = weighted_lp(np.abs(f.samples), w, 1.0)
        for axis in range(g.dim):
            total += weighted_lp(np.abs(inverse_batch(g, riesz_symbol(pts, axis) * F)), w, 1.0)
        return NormValue(total)
    raise ValidationError(f"unknown Hardy method {method!r}", "method")


def compute(spec, f, dyadic=None, uniform=None, window=None):
    """Dispatch a :class:`NormSpec` to the matching routine."""
    from .partitions import build_dyadic_partition, build_uniform_partition

    dyadic = dyadic or build_dyadic_partition()
    uniform = uniform or build_uniform_partition(f.grid.dim)
    fam, p, q, s = spec.family, spec.p, spec.q, spec.s
    if fam == "Herz":
        return herz_norm(f, p, q, s, dyadic)
    if f.side != SPACE:
        raise ValidationError(f"{fam} norm needs a space-side input", "side")
    if fam == "Lp":
        return NormValue(lp_norm(f, p))
    if fam == "Sobolev":
        return sobolev_norm(f, s)
    if fam == "Besov":
        return besov_norm(f, p, q, s, dyadic)
    if fam == "Modulation":
        return modulation_norm(f, p, q, s, uniform)
    if fam == "ModulationSTFT":
        return stft_modulation_norm(f, p, q, s, window)
    if fam == "FLq":
        return flq_norm(f, q)
    return hardy_norm(f, spec.method)
