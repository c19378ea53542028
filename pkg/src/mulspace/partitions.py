"""Dyadic (Littlewood-Paley) and uniform (unit-lattice) partitions of unity.

Dyadic family
    A radial cutoff ``rho`` equal to 1 for ``|xi| <= 1`` and 0 for
    ``|xi| >= 2**(1/sharpness)`` is built from the ``exp(-1/t)`` smooth step
    in ``log2 |xi|``.  Then ``psi(xi) = rho(|xi|) - rho(2|xi|)`` is supported
    in ``1/2 <= |xi| <= 2`` and ``sum_j psi(2^-j xi)`` telescopes to 1.
    The inhomogeneous first piece ``psi_0 = 1 - sum_{j>=1} psi(2^-j .)``
    equals ``rho`` itself.

Uniform family
    ``theta(t) = sigma(t) / (sigma(t-1) + sigma(t) + sigma(t+1))`` with
    ``sigma(t) = exp(-b/(1-t^2))`` on ``(-1, 1)``.  The denominator is the
    1-periodic sum of all translates of ``sigma`` on the support, so the
    translates of ``theta`` sum to 1.  In 2D ``phi`` is the tensor product.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import ValidationError
from .grid import Symbol
from .rng import stream

#: partition-of-unity constructions fail below this lower bound
MIN_LOWER_BOUND = 1e-6
DEFAULT_J_RANGE = (-20, 20)


def _radius(xi):
    xi = np.asarray(xi, dtype=np.float64)
    return np.sqrt(np.sum(xi * xi, axis=-1))


@dataclass(frozen=True)
class DyadicPartition:
    radial: Callable
    lower_bound: float
    j_range: tuple = DEFAULT_J_RANGE
    sharpness: Optional[float] = None
    rho: Optional[Callable] = None

    @property
    def psi(self):
        return Symbol(lambda xi: self.radial(_radius(xi)), f"psi(sharpness={self.sharpness})")

    def scaled(self, r, j):
        """``psi(2^-j xi)`` at radii ``r``."""
        return self.radial(np.asarray(r, dtype=np.float64) * 2.0 ** (-j))

    def inhomogeneous(self, r, l):
        """``psi_l`` of the inhomogeneous family: ``psi_0`` for ``l = 0``."""
        r = np.asarray(r, dtype=np.float64)
        if l > 0:
            return self.scaled(r, l)
        if self.rho is not None:
            return self.rho(r)
        top = max(float(np.max(r)), 1.0) if r.size else 1.0
        total = np.zeros_like(r)
        for j in range(1, int(np.ceil(np.log2(top))) + 3):
            total += self.scaled(r, j)
        return 1.0 - total

    def inhomogeneous_count(self, rmax):
        """Number of inhomogeneous pieces not identically zero on ``|xi| <= rmax``."""
        count = 1
        while 2.0 ** (count - 1) < rmax:
            count += 1
        return count

    def as_dict(self):
        return {"family": "dyadic", "sharpness": self.sharpness, "lower_bound_c": self.lower_bound,
                "j_range": list(self.j_range)}


@dataclass(frozen=True)
class UniformPartition:
    dim: int
    lattice_radius: int = 8
    sharpness: float = 1.0

    def theta(self, t):
        return kernels.bump_profile(t, self.sharpness)

    @property
    def phi(self):
        def evaluate(xi):
            xi = np.asarray(xi, dtype=np.float64)
            out = self.theta(xi[..., 0])
            for d in range(1, xi.shape[-1]):
                out = out * self.theta(xi[..., d])
            return out

        return Symbol(evaluate, f"phi(sharpness={self.sharpness})")

    def lattice(self, radius=None):
        """Lattice points ``|k|_inf <= radius`` in lexicographic order, shape ``(M, dim)``."""
        r = self.lattice_radius if radius is None else int(radius)
        ax = np.arange(-r, r + 1)
        if self.dim == 1:
            return ax[:, None]
        a, b = np.meshgrid(ax, ax, indexing="ij")
        return np.stack([a.ravel(), b.ravel()], axis=-1)

    def as_dict(self):
        return {"family": "uniform", "dim": self.dim, "lattice_radius": self.lattice_radius,
                "sharpness": self.sharpness}


def _dyadic_rho(sharpness):
    def rho(r):
        r = np.asarray(r, dtype=np.float64)
        out = np.ones_like(r)
        pos = r > 0
        out[pos] = 1.0 - kernels.smooth_step(np.log2(r[pos]) * sharpness)
        return out

    return rho


def _lower_bound(radial):
    r = np.linspace(2.0 ** -0.5, 2.0 ** 0.5, 20001)
    return float(np.min(radial(r)))


def build_dyadic_partition(transition_sharpness=1.0, j_range=DEFAULT_J_RANGE):
    """Build the dyadic family.

    ``transition_sharpness`` ``s`` puts the cutoff's transition on
    ``1 <= |xi| <= 2**(1/s)``.  ``s >= 1`` keeps the support inside
    ``[1/2, 2]``; as ``s`` approaches 2 the lower bound on the middle
    annulus collapses, and the build is rejected once it drops below 1e-6
    (in practice for ``s`` above roughly 1.9).
    """
    s = float(transition_sharpness)
    if not s >= 1.0:
        raise ValidationError("transition_sharpness must be >= 1 (support would leave [1/2, 2])",
                              "transition_sharpness")
    jmin, jmax = int(j_range[0]), int(j_range[1])
    if jmin > jmax:
        raise ValidationError("j_range must satisfy jmin <= jmax", "j_range")
    rho = _dyadic_rho(s)

    def radial(r):
        r = np.asarray(r, dtype=np.float64)
        return rho(r) - rho(2.0 * r)

    c = _lower_bound(radial)
    if c <= MIN_LOWER_BOUND:
        raise ValidationError(f"lower bound {c:.3g} too small for sharpness {s}", "transition_sharpness")
    return DyadicPartition(radial, c, (jmin, jmax), s, rho)


def build_uniform_partition(dim, lattice_radius=8, sharpness=1.0):
    if dim not in (1, 2):
        raise ValidationError(f"dim must be 1 or 2, got {dim}", "dim")
    if not sharpness > 0:
        raise ValidationError("sharpness must be positive", "sharpness")
    return UniformPartition(int(dim), int(lattice_radius), float(sharpness))


def partition_defect(partition, sample_count, seed, dim=1):
    """Max over random samples of ``|sum of partition terms - 1|``.

    Dyadic samples are drawn log-uniformly in radius on the validity region
    ``2^(jmin+1) <= |xi| <= 2^(jmax-1)`` with random directions in ``dim``
    dimensions; uniform samples are drawn in the box
    ``|xi|_inf <= lattice_radius - 2``.
    """
    if sample_count < 1:
        raise ValidationError("sample_count must be >= 1", "samples")
    rng = stream(seed)
    if isinstance(partition, DyadicPartition):
        jmin, jmax = partition.j_range
        lo, hi = jmin + 1, jmax - 1
        if lo > hi:
            raise ValidationError("j_range too narrow for a validity region", "j_range")
        r = 2.0 ** rng.uniform(lo, hi, sample_count)
        d = rng.standard_normal((sample_count, dim))
        xi = d / np.linalg.norm(d, axis=1, keepdims=True) * r[:, None]
        psi = partition.psi
        total = np.zeros(sample_count)
        for j in range(jmin, jmax + 1):
            total += psi(xi * 2.0 ** (-j)).real
        return float(np.max(np.abs(total - 1.0)))

    half = partition.lattice_radius - 2
    if half <= 0:
        raise ValidationError("lattice_radius must exceed 2", "lattice_radius")
    xi = rng.uniform(-half, half, (sample_count, partition.dim))
    phi = partition.phi
    total = np.zeros(sample_count)
    for k in partition.lattice():
        total += phi(xi - k).real
    return float(np.max(np.abs(total - 1.0)))
