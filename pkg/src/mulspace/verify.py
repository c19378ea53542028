"""Measured two-sided constants for norm equivalences and embeddings.

Nothing here asserts a value for an unspecified constant.  Each mode
computes a left and a right norm per input and reports the spread of
their ratio; the one-sided constants are ``ratio_min`` and ``ratio_max``.

=========== ================================== ==================================
mode        lhs                                rhs
=========== ================================== ==================================
prop32      ``||f||_{M^{p,q}_s}``              ``||(1+|xi|^2)^{s/2} f^||_q``
herz16      ``||m_j^||_{K^{1,1}_s}``           ``||m_j||_{M^{2,1}_s}``
pnorm17     ``||m_j||_{M^{p,1}_s}``            ``||m_j||_{M^{2,1}_s}``
embed110    ``||f^||_1``                       ``||f||_{M^{2,1}_0}``
toft_chain  ``||f||_{B^{2,1}_{n/2}}``          ``||f||_{B^{2,1}_0}`` (via M^{2,1}_0)
=========== ================================== ==================================
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .fixtures import Band, EnsembleSpec, make_ensemble
from .grid import FREQUENCY, SPACE, GridFunction, Symbol, default_grid, forward_transform, lp_norm
from .multiplier import apply_multiplier, extract_piece
from .norms import besov_norm, hardy_norm, herz_norm, modulation_norm, weighted_lp
from .parallel import ordered_map
from .partitions import build_dyadic_partition, build_uniform_partition
from .rng import stream

MODES = ("prop32", "herz16", "pnorm17", "embed110", "toft_chain")
#: spectral mass allowed outside the declared band before an input is rejected
BAND_LEAK_TOL = 1e-20
INEQUALITY_SLACK = 1e-10


@dataclass
class RatioReport:
    mode: str
    per_input: list
    grid_params: dict
    seed: object = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.per_input:
            raise ValidationError("a ratio report needs at least one input", "count")

    @property
    def ratios(self):
        """Ratios of the inputs with a nonzero norm pair (0/0 rows are skipped)."""
        r = np.array([row["ratio"] for row in self.per_input])
        return r[~np.isnan(r)]

    @property
    def ratio_min(self):
        r = self.ratios
        return float(r.min()) if r.size else float("nan")

    @property
    def ratio_max(self):
        r = self.ratios
        return float(r.max()) if r.size else float("nan")

    @property
    def ratio_spread(self):
        lo = self.ratio_min
        return float("inf") if lo == 0 else self.ratio_max / lo

    def to_dict(self):
        return {"mode": self.mode, "per_input": list(self.per_input), "ratio_min": self.ratio_min,
                "ratio_max": self.ratio_max, "ratio_spread": self.ratio_spread,
                "grid_params": dict(self.grid_params), "seed": self.seed, **self.extra}

    def to_csv(self):
        keys = list(self.per_input[0])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for row in self.per_input:
            w.writerow([row[k] if isinstance(row[k], (int, str)) else repr(row[k]) for k in keys])
        return buf.getvalue()


def _row(i, lhs, rhs, **more):
    lhs, rhs = float(lhs), float(rhs)
    if rhs > 0:
        ratio = lhs / rhs
    else:
        ratio = float("nan") if lhs == 0 else float("inf")
    return {"id": i, "lhs": lhs, "rhs": rhs, "ratio": ratio, **more}


def _check_band(f, band):
    F = np.abs(forward_transform(f).samples) ** 2
    outside = ~band.contains(f.grid.points(FREQUENCY))
    total = F.sum()
    if total > 0 and F[outside].sum() > BAND_LEAK_TOL * total:
        raise ValidationError("input is not band-limited to the declared band", "band")


def _inputs(ensemble, grid, band_limited):
    if isinstance(ensemble, EnsembleSpec):
        if band_limited and ensemble.kind != "band_limited":
            raise ValidationError("this mode needs a band-limited ensemble", "kind")
        funcs = make_ensemble(ensemble, grid)
        band = ensemble.band
    else:
        funcs, band = ensemble
        funcs = list(funcs)
    if band_limited:
        for f in funcs:
            _check_band(f, band)
    return funcs


def _weighted_flq(f, q, s):
    F = forward_transform(f)
    r = f.grid.radius(FREQUENCY)
    return weighted_lp(np.abs(F.samples) * (1.0 + r * r) ** (s / 2.0), F.weight, float(q))


def equivalence_ratio(mode, ensemble=None, params=None, grid=None, symbol=None,
                      j_range=(-8, 8), dyadic=None, uniform=None, support="frequency"):
    """Measure one of the norm comparisons listed in the module table.

    ``ensemble`` is an :class:`EnsembleSpec` (generated on ``grid``) or a
    ``(functions, band)`` pair; the pieces modes take ``symbol`` and
    ``j_range`` instead.  ``params`` holds ``p``, ``q``, ``s``.

    ``support`` only affects ``prop32``: ``"frequency"`` compares the norms
    of the band-limited inputs themselves, ``"space"`` reads each input's
    spectrum as a function of compact spatial support on the dual grid.
    """
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}", "mode")
    params = dict(params or {})
    p = float(params.get("p", 2.0))
    q = float(params.get("q", 1.0))
    s = float(params.get("s", 0.0))
    for name, v in (("p", p), ("q", q)):
        if not v >= 1:
            raise ValidationError(f"{name} must lie in [1, inf]", name)
    grid = grid or default_grid(1)
    n = grid.dim
    dyadic = dyadic or build_dyadic_partition()
    uniform = uniform or build_uniform_partition(n)
    seed = ensemble.seed if isinstance(ensemble, EnsembleSpec) else None
    extra = {"params": {"p": "inf" if np.isinf(p) else p, "q": "inf" if np.isinf(q) else q, "s": s}}

    if mode in ("herz16", "pnorm17"):
        if symbol is None:
            raise ValidationError(f"{mode} needs a symbol", "symbol")
        js = list(range(int(j_range[0]), int(j_range[1]) + 1))
        if not js:
            raise ValidationError("empty j_range", "j_range")

        def piece_row(j):
            f = extract_piece(symbol, j, dyadic, grid).as_function()
            rhs = modulation_norm(f, 2, 1, s, uniform)
            if mode == "herz16":
                lhs = herz_norm(forward_transform(f), 1, 1, s, dyadic)
            else:
                lhs = modulation_norm(f, p, 1, s, uniform)
            return _row(j, lhs, rhs)

        rows = ordered_map(piece_row, js)
        extra.update(symbol=symbol.label, j_range=[js[0], js[-1]])
        return RatioReport(mode, rows, grid.as_dict(), seed, extra)

    if ensemble is None:
        raise ValidationError(f"{mode} needs an ensemble", "ensemble")
    funcs = _inputs(ensemble, grid, band_limited=mode == "prop32")
    if isinstance(ensemble, EnsembleSpec):
        extra["ensemble"] = ensemble.as_dict()

    if mode == "prop32":
        if support not in ("frequency", "space"):
            raise ValidationError("support must be 'frequency' or 'space'", "support")
        if support == "space":
            funcs = [forward_transform(f).on_dual() for f in funcs]
        extra["support"] = support

        def row(item):
            i, f = item
            return _row(i, modulation_norm(f, p, q, s, uniform), _weighted_flq(f, q, s))

        return RatioReport(mode, ordered_map(row, enumerate(funcs)), funcs[0].grid.as_dict(), seed, extra)

    if mode == "embed110":
        const = (4.0 * np.pi) ** (n / 2.0)

        def row(item):
            i, f = item
            return _row(i, _weighted_flq(f, 1, 0.0), modulation_norm(f, 2, 1, 0.0, uniform))

        rows = ordered_map(row, enumerate(funcs))
        violations = sum(r["ratio"] > const * (1 + INEQUALITY_SLACK) for r in rows)
        extra.update(cell_constant=const, violations=int(violations))
        return RatioReport(mode, rows, grid.as_dict(), seed, extra)

    # toft_chain: B^{2,1}_{n/2} >= c M^{2,1}_0 >= c' B^{2,1}_0
    def row(item):
        i, f = item
        top = besov_norm(f, 2, 1, n / 2.0, dyadic)
        mid = modulation_norm(f, 2, 1, 0.0, uniform)
        low = besov_norm(f, 2, 1, 0.0, dyadic)
        out = _row(i, top, low, mid=float(mid))
        out["upper_ratio"] = float(top) / float(mid)
        out["lower_ratio"] = float(mid) / float(low)
        return out

    rows = ordered_map(row, enumerate(funcs))
    c = min(r["upper_ratio"] for r in rows)
    c2 = min(r["lower_ratio"] for r in rows)
    scale = max(r["lhs"] for r in rows)
    violations = 0
    for r in rows:
        if r["lhs"] < c * r["mid"] - INEQUALITY_SLACK * scale:
            violations += 1
        if c * r["mid"] < c * c2 * r["rhs"] - INEQUALITY_SLACK * scale:
            violations += 1
    extra.update(
        upper={"min": c, "max": max(r["upper_ratio"] for r in rows)},
        lower={"min": c2, "max": max(r["lower_ratio"] for r in rows)},
        constants={"c": c, "c_prime": c * c2}, violations=violations, s_left=n / 2.0)
    return RatioReport(mode, rows, grid.as_dict(), seed, extra)


def operator_norm_l2(m, grid=None, iterations=200000, rtol=1e-13, seed=0, return_info=False):
    """Power iteration for ``||m(D)||_{L^2 -> L^2}``.

    Iterates ``f -> m*(D) m(D) f`` from a seeded random start and stops
    when the Rayleigh quotient changes by less than ``rtol`` (relative) or
    after ``iterations`` steps.  The quotients increase monotonically, so
    the estimate approaches the true norm from below.
    """
    if int(iterations) < 16:
        raise ValidationError("iterations must be >= 16", "iterations")
    grid = grid or default_grid(1)
    rng = stream(seed)
    f = GridFunction(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape), SPACE)
    conj = Symbol(lambda xi: np.conj(m(xi)), f"conj({m.label})")
    f = f.with_samples(f.samples / lp_norm(f, 2))
    lam = 0.0
    steps = 0
    for steps in range(1, int(iterations) + 1):
        g = apply_multiplier(conj, apply_multiplier(m, f))
        new = float(np.real(np.vdot(f.samples, g.samples)) * grid.weight(SPACE))
        size = lp_norm(g, 2)
        if size == 0:
            lam = 0.0
            break
        f = g.with_samples(g.samples / size)
        done = steps >= 16 and abs(new - lam) <= rtol * abs(new)
        lam = new
        if done:
            break
    value = float(np.sqrt(max(lam, 0.0)))
    if return_info:
        return value, {"iterations": steps}
    return value


def atom_transfer_ratio(m, ensemble, grid=None, method="riesz"):
    """Per atom ``a``: ``lhs = ||m(D) a||_{H^1}``, ``rhs = ||a||_{H^1}``.

    ``method`` selects the Hardy-norm estimator.  With the default Riesz
    estimator the ratio for a Riesz symbol is 1 by construction in 1D; the
    maximal estimator gives an independent reading.
    """
    if not isinstance(ensemble, EnsembleSpec) or ensemble.kind != "h1_atom":
        raise ValidationError("atom_transfer_ratio needs an h1_atom ensemble", "kind")
    grid = grid or default_grid(1)
    atoms = make_ensemble(ensemble, grid)

    def row(item):
        i, a = item
        return _row(i, hardy_norm(apply_multiplier(m, a), method), hardy_norm(a, method))

    rows = ordered_map(row, enumerate(atoms))
    return RatioReport("atom_transfer", rows, grid.as_dict(), ensemble.seed,
                       {"symbol": m.label, "ensemble": ensemble.as_dict(), "method": method})
