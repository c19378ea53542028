"""Uniform periodic grids approximating R^n and the Fourier pair on them.

The box is ``[-L, L)^n`` with ``N`` points per axis.  Spatial nodes are
``x_m = -L + m h`` with ``h = 2L/N``; frequency nodes are ``xi_k = k pi/L``
for ``k = -N/2 .. N/2-1``.  Samples are always stored in natural
(monotone) order along every axis.

The transform pair follows

    F f(xi)      = int exp(-i xi.x) f(x) dx
    F^{-1} g(x)  = (2 pi)^{-n} int exp(i x.xi) g(xi) dxi

discretized as ``h^n``- and ``dxi^n``-weighted exponential sums, which the
FFT evaluates exactly after the node phase ``(-1)^k``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ValidationError

SPACE = "space"
FREQUENCY = "frequency"
SIDES = (SPACE, FREQUENCY)


@dataclass(frozen=True)
class Grid:
    """Uniform sampling of ``[-L, L)^n`` and its dual frequency lattice."""

    dim: int
    points_per_axis: int
    half_width: float

    @property
    def spacing(self):
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def freq_spacing(self):
        return np.pi / self.half_width

    @property
    def freq_halfwidth(self):
        return np.pi * self.points_per_axis / (2.0 * self.half_width)

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dim

    @cached_property
    def x_axis(self):
        n = self.points_per_axis
        return -self.half_width + np.arange(n) * self.spacing

    @cached_property
    def xi_axis(self):
        n = self.points_per_axis
        return np.arange(-n // 2, n // 2) * self.freq_spacing

    @cached_property
    def _sign(self):
        k = np.arange(-self.points_per_axis // 2, self.points_per_axis // 2)
        s = np.where(k % 2 == 0, 1.0, -1.0)
        if self.dim == 2:
            s = np.outer(s, s)
        return s

    def axis(self, side):
        return self.x_axis if side == SPACE else self.xi_axis

    def weight(self, side):
        """Quadrature weight per node: ``h^n`` or ``dxi^n``."""
        step = self.spacing if side == SPACE else self.freq_spacing
        return step ** self.dim

    def points(self, side):
        """Node coordinates with shape ``grid.shape + (dim,)``."""
        ax = self.axis(side)
        if self.dim == 1:
            return ax[:, None]
        a, b = np.meshgrid(ax, ax, indexing="ij")
        return np.stack([a, b], axis=-1)

    @cached_property
    def _radius_space(self):
        return _radius(self.x_axis, self.dim)

    @cached_property
    def _radius_freq(self):
        return _radius(self.xi_axis, self.dim)

    def radius(self, side):
        """Euclidean norm of every node, shape ``grid.shape``."""
        return self._radius_space if side == SPACE else self._radius_freq

    def dual(self):
        """The grid whose spatial nodes are this grid's frequency nodes.

        A frequency-side function here is the same sample array as a
        space-side function on the dual grid; the dual's frequency nodes
        are this grid's spatial nodes.
        """
        return Grid(self.dim, self.points_per_axis, self.freq_halfwidth)

    def as_dict(self):
        return {"dim": self.dim, "N": self.points_per_axis, "L": self.half_width}


def _radius(ax, dim):
    if dim == 1:
        return np.abs(ax)
    return np.hypot(ax[:, None], ax[None, :])


def make_grid(dim, points_per_axis, half_width):
    """Validate parameters and build a :class:`Grid`.

    >>> g = make_grid(1, 8, np.pi)
    >>> float(g.spacing), float(g.freq_spacing), float(g.freq_halfwidth)
    (0.7853981633974483, 1.0, 4.0)
    """
    if dim not in (1, 2):
        raise ValidationError(f"dim must be 1 or 2, got {dim}", "dim")
    n = int(points_per_axis)
    if n != points_per_axis or n < 8 or n & (n - 1):
        raise ValidationError(f"points_per_axis must be a power of two >= 8, got {points_per_axis}", "N")
    if not (np.isfinite(half_width) and half_width > 0):
        raise ValidationError(f"half_width must be positive, got {half_width}", "L")
    return Grid(int(dim), n, float(half_width))


DEFAULT_GRIDS = {1: (4096, 64 * np.pi), 2: (512, 16 * np.pi)}


def default_grid(dim=1):
    n, half = DEFAULT_GRIDS[dim]
    return make_grid(dim, n, half)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on one side of a grid; immutable."""

    grid: Grid
    samples: np.ndarray = field(repr=False)
    side: str = SPACE

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValidationError(f"side must be one of {SIDES}, got {self.side!r}", "side")
        arr = np.array(self.samples, dtype=np.complex128)
        if arr.size != self.grid.points_per_axis ** self.grid.dim:
            raise ValidationError(
                f"expected {self.grid.points_per_axis ** self.grid.dim} samples, got {arr.size}", "samples"
            )
        arr = arr.reshape(self.grid.shape)
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @property
    def weight(self):
        return self.grid.weight(self.side)

    def with_samples(self, samples):
        return GridFunction(self.grid, samples, self.side)

    def on_dual(self):
        """Reinterpret the samples on the dual grid with the side flipped."""
        other = FREQUENCY if self.side == SPACE else SPACE
        return GridFunction(self.grid.dual(), self.samples, other)

    def boundary_ratio(self):
        """Max boundary-sample modulus over max modulus (0 for f = 0)."""
        a = np.abs(self.samples)
        top = a.max()
        if top == 0:
            return 0.0
        if self.grid.dim == 1:
            edge = max(a[0], a[-1])
        else:
            edge = max(a[0, :].max(), a[-1, :].max(), a[:, 0].max(), a[:, -1].max())
        return float(edge / top)


def sample(grid, func, side=SPACE):
    """Sample ``func(points)`` (points shaped ``(..., dim)``) on ``grid``."""
    return GridFunction(grid, func(grid.points(side)), side)


def _check_side(f, side):
    if f.side != side:
        raise ValidationError(f"expected a {side}-side function, got {f.side}", "side")


def forward_transform(f):
    """Discrete ``F f`` on the frequency nodes."""
    _check_side(f, SPACE)
    g = f.grid
    axes = tuple(range(g.dim))
    spec = np.fft.fftshift(np.fft.fftn(f.samples, axes=axes), axes=axes)
    return GridFunction(g, spec * (g._sign * g.weight(SPACE)), FREQUENCY)


def inverse_transform(F):
    """Discrete ``F^{-1}`` back to the spatial nodes, ``(2 pi)^{-n}`` included."""
    _check_side(F, FREQUENCY)
    g = F.grid
    axes = tuple(range(g.dim))
    vals = np.fft.ifftn(np.fft.ifftshift(F.samples * g._sign, axes=axes), axes=axes)
    # (2 pi)^{-n} dxi^n N^n = h^{-n}
    return GridFunction(g, vals / g.weight(SPACE), SPACE)


def forward_batch(grid, values):
    """``forward_transform`` along the trailing ``dim`` axes of a stack."""
    axes = tuple(range(-grid.dim, 0))
    spec = np.fft.fftshift(np.fft.fftn(values, axes=axes), axes=axes)
    return spec * (grid._sign * grid.weight(SPACE))


def inverse_batch(grid, spectra):
    """``inverse_transform`` along the trailing ``dim`` axes of a stack."""
    axes = tuple(range(-grid.dim, 0))
    vals = np.fft.ifftn(np.fft.ifftshift(spectra * grid._sign, axes=axes), axes=axes)
    return vals / grid.weight(SPACE)


def lp_norm(f, p):
    """Weighted ``(sum w |f|^p)^{1/p}``; ``p = inf`` gives the max modulus."""
    p = float(p)
    if not p >= 1:
        raise ValidationError(f"p must lie in [1, inf], got {p}", "p")
    return weighted_lp(np.abs(f.samples), f.weight, p)


def weighted_lp(a, w, p):
    """``(w sum a^p)^{1/p}`` for nonnegative ``a``, scaled against overflow."""
    if a.size == 0:
        return 0.0
    top = float(a.max())
    if np.isinf(p):
        return top
    if top == 0.0:
        return 0.0
    if p == 2.0:
        return top * float(np.sqrt(w * np.sum((a / top) ** 2)))
    if p == 1.0:
        return float(w * np.sum(a))
    return top * float((w * np.sum((a / top) ** p)) ** (1.0 / p))


class Symbol:
    """A multiplier ``m`` evaluable at arbitrary frequency points.

    ``func`` receives points shaped ``(..., n)`` and returns values shaped
    ``(...)``.  ``derivative(points, alpha)``, when given, returns the
    closed-form ``d^alpha m``.  Singular symbols evaluate to 0 at the
    origin by convention.
    """

    def __init__(self, func, label, derivative=None):
        self.func = func
        self.label = label
        self.derivative = derivative

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=np.float64)
        return np.asarray(self.func(xi), dtype=np.complex128) * np.ones(xi.shape[:-1])

    def covers(self, xi):
        return True

    def __repr__(self):
        return f"Symbol({self.label!r})"


class SampledSymbol(Symbol):
    """Symbol given by samples on a regular tensor grid, linearly interpolated.

    Evaluation outside the sampled box raises; there is no extrapolation.
    """

    def __init__(self, axes, values, label="sampled"):
        self.axes = tuple(np.asarray(a, dtype=np.float64) for a in axes)
        self.values = np.asarray(values, dtype=np.complex128)
        if self.values.shape != tuple(len(a) for a in self.axes):
            raise ValidationError("sample values do not match the axes", "values")
        super().__init__(self._interp, label)

    def covers(self, xi):
        xi = np.asarray(xi, dtype=np.float64)
        ok = True
        for d, ax in enumerate(self.axes):
            ok = ok and bool(np.all((xi[..., d] >= ax[0]) & (xi[..., d] <= ax[-1])))
        return ok

    def _interp(self, xi):
        if not self.covers(xi):
            raise ValidationError(f"{self.label}: evaluation outside the sampled range", "symbol")
        if len(self.axes) == 1:
            ax = self.axes[0]
            t = xi[..., 0]
            return np.interp(t, ax, self.values.real) + 1j * np.interp(t, ax, self.values.imag)
        (a0, a1), v = self.axes, self.values
        t0, t1 = xi[..., 0], xi[..., 1]
        i = np.clip(np.searchsorted(a0, t0) - 1, 0, len(a0) - 2)
        j = np.clip(np.searchsorted(a1, t1) - 1, 0, len(a1) - 2)
        u = (t0 - a0[i]) / (a0[i + 1] - a0[i])
        w = (t1 - a1[j]) / (a1[j + 1] - a1[j])
        return (
            (1 - u) * (1 - w) * v[i, j]
            + u * (1 - w) * v[i + 1, j]
            + (1 - u) * w * v[i, j + 1]
            + u * w * v[i + 1, j + 1]
        )
