"""Symbol catalog and seeded test-function ensembles.

Symbols
-------
==============  ======  ============================================  =============
name            params  symbol                                        derivatives
==============  ======  ============================================  =============
one             --      1                                             closed form
sign            --      xi / |xi| (1D only)                           closed form
riesz           l       -i xi_l / |xi|, ``l`` counted from 1          closed form
mihlin_poly     b       (1 + |xi|^2)^(-b/2)                           closed form
oscillatory     a       chi(|xi|) exp(i|xi|) (1 + |xi|^2)^(-a/2)      differences
imag_power      t0      |xi|^(i t0)                                   closed form
==============  ======  ============================================  =============

``chi`` is a smooth step, 0 for ``|xi| <= 1/2`` and 1 for ``|xi| >= 1``.
The oscillatory family is a representative of the classical class of
symbols satisfying modulation-type piece bounds while failing L^p
boundedness; it is not a transcription of any particular construction.
Closed-form derivatives cover orders up to 2.

Ensembles
---------
Every member ``i`` draws from its own stream ``rng.stream(seed, i)``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ValidationError
from .grid import FREQUENCY, SPACE, GridFunction, Symbol, inverse_transform
from .rng import stream

# --- symbols ------------------------------------------------------------------


def _r(xi):
    return np.sqrt(np.sum(xi * xi, axis=-1))


def _delta(a, b):
    return 1.0 if a == b else 0.0


def _axes_of(alpha):
    """Expand a multi-index into the list of differentiated axes."""
    return [d for d, a in enumerate(alpha) for _ in range(a)]


def _one():
    def deriv(xi, alpha):
        return np.zeros(xi.shape[:-1], dtype=np.complex128)

    return Symbol(lambda xi: np.ones(xi.shape[:-1]), "one", deriv)


def _sign():
    def func(xi):
        if xi.shape[-1] != 1:
            raise ValidationError("sign is a one-dimensional symbol", "symbol")
        return np.sign(xi[..., 0])

    return Symbol(func, "sign", lambda xi, alpha: np.zeros(xi.shape[:-1], dtype=np.complex128))


def _riesz(l):
    if l != int(l) or l < 1:
        raise ValidationError("riesz index counts from 1", "symbol")
    ax = int(l) - 1

    def check(xi):
        if ax >= xi.shape[-1]:
            raise ValidationError(f"riesz:{l} needs dimension >= {l}", "symbol")

    def func(xi):
        check(xi)
        r = _r(xi)
        out = np.zeros(r.shape, dtype=np.complex128)
        nz = r > 0
        out[nz] = -1j * xi[..., ax][nz] / r[nz]
        return out

    def deriv(xi, alpha):
        check(xi)
        r = _r(xi)
        axes = _axes_of(alpha)
        if len(axes) == 1:
            (k,) = axes
            return -1j * (_delta(k, ax) / r - xi[..., ax] * xi[..., k] / r ** 3)
        if len(axes) == 2:
            k, p = axes
            return -1j * (-_delta(k, ax) * xi[..., p] / r ** 3 - _delta(ax, p) * xi[..., k] / r ** 3
                          - _delta(k, p) * xi[..., ax] / r ** 3
                          + 3.0 * xi[..., ax] * xi[..., k] * xi[..., p] / r ** 5)
        return None

    return Symbol(func, f"riesz:{int(l)}", deriv)


def _mihlin_poly(b):
    def func(xi):
        return (1.0 + np.sum(xi * xi, axis=-1)) ** (-b / 2.0)

    def deriv(xi, alpha):
        u = 1.0 + np.sum(xi * xi, axis=-1)
        axes = _axes_of(alpha)
        if len(axes) == 1:
            (k,) = axes
            return -b * xi[..., k] * u ** (-b / 2.0 - 1.0)
        if len(axes) == 2:
            k, p = axes
            return (-b * _delta(k, p) * u ** (-b / 2.0 - 1.0)
                    + b * (b + 2.0) * xi[..., k] * xi[..., p] * u ** (-b / 2.0 - 2.0))
        return None

    return Symbol(func, f"mihlin_poly:{b:g}", deriv)


def _oscillatory(a):
    def func(xi):
        r = _r(xi)
        chi = kernels.smooth_step(2.0 * r - 1.0)
        return chi * np.exp(1j * r) * (1.0 + r * r) ** (-a / 2.0)

    return Symbol(func, f"oscillatory:{a:g}")


def _imag_power(t0):
    def func(xi):
        r = _r(xi)
        out = np.zeros(r.shape, dtype=np.complex128)
        nz = r > 0
        out[nz] = np.exp(1j * t0 * np.log(r[nz]))
        return out

    def deriv(xi, alpha):
        r = _r(xi)
        m = np.exp(1j * t0 * np.log(r))
        axes = _axes_of(alpha)
        it = 1j * t0
        if len(axes) == 1:
            (k,) = axes
            return it * xi[..., k] / r ** 2 * m
        if len(axes) == 2:
            k, p = axes
            return m * (it * (_delta(k, p) / r ** 2 - 2.0 * xi[..., k] * xi[..., p] / r ** 4)
                        + it * it * xi[..., k] * xi[..., p] / r ** 4)
        return None

    return Symbol(func, f"imag_power:{t0:g}", deriv)


_CATALOG = {
    "one": (0, _one),
    "sign": (0, _sign),
    "riesz": (1, _riesz),
    "mihlin_poly": (1, _mihlin_poly),
    "oscillatory": (1, _oscillatory),
    "imag_power": (1, _imag_power),
}
CATALOG_NAMES = tuple(_CATALOG)


def symbol_catalog(name, params=()):
    """Build a catalog symbol; see the module table for names and parameters."""
    if name not in _CATALOG:
        raise ValidationError(f"unknown symbol {name!r}; known: {', '.join(CATALOG_NAMES)}", "symbol")
    arity, make = _CATALOG[name]
    params = [float(v) for v in params]
    if len(params) != arity:
        raise ValidationError(f"{name} takes {arity} parameter(s), got {len(params)}", "symbol")
    return make(*params)


def parse_symbol(text):
    """``"name"`` or ``"name:p1,p2"`` to a catalog symbol."""
    name, _, rest = text.partition(":")
    try:
        params = [float(v) for v in rest.split(",")] if rest else []
    except ValueError:
        raise ValidationError(f"bad symbol parameters in {text!r}", "symbol") from None
    return symbol_catalog(name.strip(), params)


# --- ensembles ----------------------------------------------------------------

KINDS = ("band_limited", "h1_atom", "gaussian_mix")


@dataclass(frozen=True)
class Band:
    """A frequency region: ``ball`` / ``box`` of ``radius`` or ``annulus`` ``inner <= |xi| <= radius``."""

    shape: str = "ball"
    radius: float = 4.0
    inner: float = 0.0

    def __post_init__(self):
        if self.shape not in ("ball", "box", "annulus"):
            raise ValidationError(f"unknown band shape {self.shape!r}", "band")
        if not self.radius > 0 or not 0 <= self.inner < self.radius:
            raise ValidationError("band needs 0 <= inner < radius", "band")

    def contains(self, xi):
        if self.shape == "box":
            return np.max(np.abs(xi), axis=-1) <= self.radius
        r = _r(xi)
        return (r <= self.radius) & (r >= self.inner)

    def as_dict(self):
        return {"shape": self.shape, "radius": self.radius, "inner": self.inner}


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    count: int
    seed: int
    band: Band = field(default_factory=Band)
    atom_scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown ensemble kind {self.kind!r}", "kind")
        if int(self.count) < 1:
            raise ValidationError("count must be >= 1", "count")
        if not self.atom_scale > 0:
            raise ValidationError("atom_scale must be positive", "atom_scale")

    def as_dict(self):
        return {"kind": self.kind, "count": int(self.count), "seed": int(self.seed),
                "band": self.band.as_dict(), "atom_scale": self.atom_scale}


def _band_limited(grid, band, rng):
    """Gaussian coefficients on the in-band nodes, drawn in integer-index order.

    The integer indices of in-band nodes depend only on ``L``, so refining
    ``N`` at fixed ``L`` reproduces the same function.
    """
    ks = np.arange(-grid.points_per_axis // 2, grid.points_per_axis // 2)
    half = int(np.ceil(band.radius / grid.freq_spacing))
    local = np.arange(-half, half + 1)
    if grid.dim == 1:
        idx = local[:, None]
    else:
        a, b = np.meshgrid(local, local, indexing="ij")
        idx = np.stack([a.ravel(), b.ravel()], axis=-1)
    inside = band.contains(idx * grid.freq_spacing)
    idx = idx[inside]
    coef = rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx))
    F = np.zeros(grid.shape, dtype=np.complex128)
    pos = tuple((idx + grid.points_per_axis // 2).T)
    F[pos] = coef
    return inverse_transform(GridFunction(grid, F, FREQUENCY))


def _bump(t):
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def _atom(grid, scale, rng, degree=3):
    """Smooth mean-zero atom on a cube of side ``scale``, sup equal to ``1/|Q|``."""
    half = grid.half_width
    center = rng.uniform(-half / 4, half / 4, grid.dim)
    x = grid.x_axis
    profile = np.ones(grid.shape)
    bump = np.ones(grid.shape)
    for d in range(grid.dim):
        t = 2.0 * (x - center[d]) / scale
        b = _bump(t)
        k = np.arange(degree + 1)
        a = rng.standard_normal(degree + 1)
        c = rng.standard_normal(degree + 1)
        p = (a[:, None] * np.cos(np.pi * k[:, None] * t) + c[:, None] * np.sin(np.pi * k[:, None] * t)).sum(0)
        shape = [1] * grid.dim
        shape[d] = -1
        bump = bump * b.reshape(shape)
        profile = profile * (b * p).reshape(shape)
    profile = profile - bump * (profile.sum() / bump.sum())
    profile = profile - bump * (profile.sum() / bump.sum())
    volume = scale ** grid.dim
    return GridFunction(grid, profile / (np.abs(profile).max() * volume), SPACE)


def _gaussian_mix(grid, rng, terms=3):
    pts = grid.points(SPACE)
    half = grid.half_width
    out = np.zeros(grid.shape, dtype=np.complex128)
    for _ in range(terms):
        c = rng.uniform(-half / 8, half / 8, grid.dim)
        w = rng.uniform(0.02, 0.05) * half
        amp = rng.standard_normal() + 1j * rng.standard_normal()
        out += amp * np.exp(-np.sum((pts - c) ** 2, axis=-1) / (2 * w * w))
    return GridFunction(grid, out, SPACE)


def make_ensemble(spec, grid):
    """Generate ``spec.count`` members on ``grid``; member ``i`` depends only on ``(seed, i)``.

    ``band_limited`` fills in-band frequency nodes with iid complex Gaussians.
    ``h1_atom`` places a smooth cube-supported atom of side ``atom_scale``
    (mean exactly removed, sup normalized to ``1/|Q|``) at a random center
    with ``|c|_inf <= L/4``.  ``gaussian_mix`` sums three random Gaussians.
    """
    if spec.kind == "band_limited":
        # the +Nyquist node is not on the grid, so the band must stay strictly inside
        if spec.band.radius >= grid.freq_halfwidth:
            raise ValidationError(
                f"band radius {spec.band.radius} must be below the grid Nyquist {grid.freq_halfwidth}", "band")
        make = lambda rng: _band_limited(grid, spec.band, rng)
    elif spec.kind == "h1_atom":
        if spec.atom_scale < 8 * grid.spacing or spec.atom_scale > grid.half_width / 2:
            raise ValidationError(
                f"atom_scale must lie in [8h, L/2] = [{8 * grid.spacing:.4g}, {grid.half_width / 2:.4g}]",
                "atom_scale")
        make = lambda rng: _atom(grid, spec.atom_scale, rng)
    else:
        make = lambda rng: _gaussian_mix(grid, rng)
    return [make(stream(spec.seed, i)) for i in range(int(spec.count))]
