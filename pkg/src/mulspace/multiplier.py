"""Dyadic pieces of a multiplier, the per-piece condition table, and kernel estimates.

A piece is ``m_j(xi) = psi(xi) m(2^j xi)``: the symbol restricted to the
annulus ``2^(j-1) <= |xi| <= 2^(j+1)`` and rescaled to the unit annulus.
``m`` is always evaluated exactly at ``2^j`` times the reference nodes, so
no interpolation ever enters a piece.

Function-space norms of a piece treat ``xi`` as the independent variable:
the piece samples are read as a space-side function on ``ref_grid.dual()``,
whose transform then lives on the original spatial nodes.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .grid import (FREQUENCY, SPACE, GridFunction, default_grid, forward_transform,
                   inverse_transform, lp_norm, weighted_lp)
from .norms import besov_norm, herz_norm, modulation_norm, sobolev_norm
from .parallel import ordered_map
from .partitions import build_dyadic_partition, build_uniform_partition
from . import kernels

COLUMNS = ("sobolev_s", "besov_n2_11", "modulation_s", "herz_s", "modulation_p1")
DEFAULT_J_RANGE = (-20, 20)


def _j_values(j_range):
    lo, hi = int(j_range[0]), int(j_range[1])
    if lo > hi:
        raise ValidationError("j_range must satisfy jmin <= jmax", "j_range")
    return list(range(lo, hi + 1))


@dataclass(frozen=True)
class SymbolPiece:
    j: int
    values: GridFunction
    source: str

    def as_function(self):
        """The piece as a space-side function of ``xi`` on the dual grid."""
        return self.values.on_dual()


def extract_piece(m, j, partition=None, ref_grid=None):
    """Sample ``psi(xi) m(2^j xi)`` on the frequency nodes of ``ref_grid``.

    ``m`` is evaluated only where ``psi`` is nonzero.  A sampled symbol that
    does not cover ``2^j`` times those nodes raises instead of extrapolating.
    """
    partition = partition or build_dyadic_partition()
    ref_grid = ref_grid or default_grid(1)
    pts = ref_grid.points(FREQUENCY)
    psi = partition.radial(ref_grid.radius(FREQUENCY))
    live = psi != 0
    scaled = pts[live] * 2.0 ** j
    if not m.covers(scaled):
        raise ValidationError(f"{m.label}: samples do not cover the annulus for j={j}", "symbol")
    values = np.zeros(ref_grid.shape, dtype=np.complex128)
    values[live] = psi[live] * m(scaled)
    return SymbolPiece(int(j), GridFunction(ref_grid, values, FREQUENCY), m.label)


@dataclass
class ConditionReport:
    """Per-piece norms for the five sufficient conditions."""

    per_j: dict
    sup_values: dict
    argmax_j: dict
    j_range: tuple
    parameters: dict
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "per_j": [{"j": j, **self.per_j[j]} for j in sorted(self.per_j)],
            "sup_values": dict(self.sup_values),
            "argmax_j": dict(self.argmax_j),
            "j_range": list(self.j_range),
            "parameters": dict(self.parameters),
            "warnings": list(self.warnings),
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("j",) + COLUMNS)
        for j in sorted(self.per_j):
            w.writerow([j] + [repr(self.per_j[j][c]) for c in COLUMNS])
        return buf.getvalue()


def piece_norms(piece, s, p, dyadic, uniform, sobolev_s=None):
    """The five condition-table cells for one piece, plus their warnings."""
    f = piece.as_function()
    n = f.grid.dim
    sob = sobolev_norm(f, s if sobolev_s is None else sobolev_s)
    bes = besov_norm(f, 2, 1, n / 2.0, dyadic)
    mod = modulation_norm(f, 2, 1, s, uniform)
    her = herz_norm(forward_transform(f), 1, 1, s, dyadic)
    modp = mod if float(p) == 2.0 else modulation_norm(f, p, 1, s, uniform)
    cells = dict(zip(COLUMNS, (sob, bes, mod, her, modp)))
    warnings = [f"j={piece.j} {c}: {w}" for c, v in cells.items() for w in getattr(v, "warnings", ())]
    return {c: float(v) for c, v in cells.items()}, warnings


def condition_report(m, s, p=2.0, j_range=DEFAULT_J_RANGE, dyadic=None, uniform=None,
                     ref_grid=None, sobolev_s=None):
    """Tabulate, for every ``j``, the norms of ``m_j`` appearing in the five conditions.

    Columns: ``sobolev_s`` (``L^2_{sobolev_s}``, default ``s``),
    ``besov_n2_11`` (``B^{2,1}_{n/2}``), ``modulation_s`` (``M^{2,1}_s``),
    ``herz_s`` (``K^{1,1}_s`` of the transform of ``m_j``) and
    ``modulation_p1`` (``M^{p,1}_s``).
    """
    if not float(p) >= 1:
        raise ValidationError("p must lie in [1, inf]", "p")
    if not np.isfinite(s):
        raise ValidationError("s must be finite", "s")
    ref_grid = ref_grid or default_grid(1)
    dyadic = dyadic or build_dyadic_partition()
    uniform = uniform or build_uniform_partition(ref_grid.dim)
    js = _j_values(j_range)

    def row(j):
        return piece_norms(extract_piece(m, j, dyadic, ref_grid), s, p, dyadic, uniform, sobolev_s)

    rows = ordered_map(row, js)
    per_j, warnings = {}, []
    for j, (cells, warns) in zip(js, rows):
        per_j[j] = cells
        warnings.extend(warns)
    sup_values, argmax_j = {}, {}
    for c in COLUMNS:
        col = [per_j[j][c] for j in js]
        i = int(np.argmax(col))
        sup_values[c] = col[i]
        argmax_j[c] = js[i]
    params = {"s": float(s), "p": "inf" if np.isinf(float(p)) else float(p),
              "sobolev_s": float(s if sobolev_s is None else sobolev_s), "symbol": m.label,
              "grid": ref_grid.as_dict()}
    return ConditionReport(per_j, sup_values, argmax_j, (js[0], js[-1]), params, warnings)


# --- Mihlin-type derivative bounds -------------------------------------------

def _multi_indices(dim, order):
    out = []
    for k in range(order + 1):
        if dim == 1:
            out.append((k,))
        else:
            out.extend((a, k - a) for a in range(k, -1, -1))
    return out


def _difference(m, pts, alpha, step):
    """Central difference ``d^alpha m`` with per-point step vector ``step`` (shape ``(M,)``)."""
    dim = pts.shape[-1]
    # build the stencil as a product of 1D central stencils
    stencils = []
    for d in range(dim):
        a = alpha[d]
        if a == 0:
            stencils.append([(0, 1.0)])
        elif a == 1:
            stencils.append([(1, 0.5), (-1, -0.5)])
        elif a == 2:
            stencils.append([(1, 1.0), (0, -2.0), (-1, 1.0)])
        else:
            raise ValidationError("finite differences support orders up to 2 per axis", "order")
    total = np.zeros(pts.shape[0], dtype=np.complex128)
    combos = [[]]
    for st in stencils:
        combos = [c + [t] for c in combos for t in st]
    for combo in combos:
        shift = np.zeros_like(pts)
        coef = 1.0
        for d, (o, c) in enumerate(combo):
            shift[:, d] = o * step
            coef *= c
        total += coef * m(pts + shift)
    return total / step ** sum(alpha)


def mihlin_terms(m, ref_grid=None, order=None, j_range=DEFAULT_J_RANGE, partition=None,
                 rel_step=1e-4, divergence_tol=1e-2):
    """``sup |xi|^|alpha| |d^alpha m(xi)|`` for each ``|alpha| <= order``.

    Points are ``2^j`` times the reference-grid nodes in the support of
    ``psi``, for all ``j`` in ``j_range``.  Closed-form derivatives are used
    when the symbol supplies them.  Otherwise central differences with step
    ``rel_step * |xi|`` are extrapolated once (steps ``h`` and ``h/2``); when
    the two levels disagree by more than ``divergence_tol`` (relative, floor
    1) the term is ``inf``.  Returns ``{alpha: value}``.
    """
    ref_grid = ref_grid or default_grid(1)
    dim = ref_grid.dim
    order = dim // 2 + 1 if order is None else int(order)
    if order < 0:
        raise ValidationError("order must be nonnegative", "order")
    partition = partition or build_dyadic_partition()
    live = partition.radial(ref_grid.radius(FREQUENCY)) != 0
    base = ref_grid.points(FREQUENCY)[live]
    out = {}
    for alpha in _multi_indices(dim, order):
        k = sum(alpha)
        best = 0.0
        for j in _j_values(j_range):
            pts = base * 2.0 ** j
            if not m.covers(pts):
                raise ValidationError(f"{m.label}: not evaluable for j={j}", "symbol")
            r = np.sqrt(np.sum(pts * pts, axis=-1))
            w = r ** k
            vals = None
            if k == 0:
                vals = m(pts)
            elif m.derivative is not None:
                vals = m.derivative(pts, alpha)
            if vals is None:
                step = rel_step * r
                coarse = _difference(m, pts, alpha, step)
                fine = _difference(m, pts, alpha, step / 2)
                vals = (4.0 * fine - coarse) / 3.0
                gap = w * np.abs(fine - coarse)
                if np.any(gap > divergence_tol * np.maximum(1.0, w * np.abs(vals))):
                    best = np.inf
                    break
            best = max(best, float(np.max(w * np.abs(vals))))
        out[alpha] = best
    return out


def mihlin_sup(m, ref_grid=None, order=None, **kwargs):
    """Maximum of :func:`mihlin_terms` over all multi-indices."""
    return max(mihlin_terms(m, ref_grid, order, **kwargs).values())


def apply_multiplier(m, f):
    """``F^{-1}[m f^]`` on ``f``'s own grid."""
    if f.side != SPACE:
        raise ValidationError("apply_multiplier needs a space-side function", "side")
    F = forward_transform(f)
    mv = m(f.grid.points(FREQUENCY))
    return inverse_transform(F.with_samples(mv * F.samples))


# --- kernel estimates --------------------------------------------------------

def _tail_table(a, r, weight):
    """Cumulative masses ``weight * sum_{r > R} a`` summed from the outside in.

    Returns ``(radii_sorted, suffix)`` with ``suffix[i]`` the mass of nodes
    ``i..`` in ascending radius order, so every tail is a partial sum of the
    same sequence: monotone in ``R`` and never above the total.
    """
    order = np.argsort(r.ravel(), kind="stable")
    rs = r.ravel()[order]
    vals = a.ravel()[order]
    suffix = np.cumsum(vals[::-1])[::-1] * weight
    return rs, np.append(suffix, 0.0)


def _tail_at(table, R):
    rs, suffix = table
    return float(suffix[np.searchsorted(rs, R, side="right")])


def _kernel_stats(K, spectrum, grid):
    """L^1 norm, spectral-gradient L^1 norm and the tail table of one kernel."""
    w = grid.weight(SPACE)
    a = np.abs(K)
    table = _tail_table(a, grid.radius(SPACE), w)
    pts = grid.points(FREQUENCY)
    grad = 0.0
    for axis in range(grid.dim):
        gk = inverse_transform(GridFunction(grid, 1j * pts[..., axis] * spectrum, FREQUENCY))
        grad += weighted_lp(np.abs(gk.samples), w, 1.0)
    return table[1][0], grad, table


def _fit_slope(radii, tails, floor=1e-14):
    keep = [(R, t) for R, t in zip(radii, tails) if t > floor]
    if len(keep) < 2:
        return float("nan")
    lr = np.log([R for R, _ in keep])
    lt = np.log([t for _, t in keep])
    return float(np.polyfit(lr, lt, 1)[0])


@dataclass
class KernelDiagnostics:
    per_j: dict
    hormander_sup: float
    tail_slope: float
    radii: tuple
    parameters: dict
    warnings: list = field(default_factory=list)

    def to_dict(self):
        rows = []
        for j in sorted(self.per_j):
            row = self.per_j[j]
            rows.append({"j": j, "k_l1": row["k_l1"], "grad_k_l1": row["grad_k_l1"],
                         "tail": {repr(float(R)): t for R, t in zip(self.radii, row["tail"])},
                         "tail_slope": row["tail_slope"]})
        return {"per_j": rows, "hormander_sup": self.hormander_sup, "tail_slope": self.tail_slope,
                "radii": [float(R) for R in self.radii], "parameters": dict(self.parameters),
                "warnings": list(self.warnings)}

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "k_l1", "grad_k_l1", "tail_slope"] + [f"tail@{R:g}" for R in self.radii])
        for j in sorted(self.per_j):
            row = self.per_j[j]
            w.writerow([j, repr(row["k_l1"]), repr(row["grad_k_l1"]), repr(row["tail_slope"])]
                       + [repr(t) for t in row["tail"]])
        return buf.getvalue()


def kernel_diagnostics(m, j_range=DEFAULT_J_RANGE, partition=None, ref_grid=None,
                       radii=(2.0, 4.0, 8.0, 16.0, 32.0)):
    """L^1, gradient and tail statistics of ``K_j = F^{-1} m_j`` for every ``j``.

    ``tail(R)`` is the L^1 mass of ``K_j`` on ``|x| > R``.  Each row gets a
    least-squares slope of ``log tail`` against ``log R`` (tails below 1e-14
    are left out of the fit); ``tail_slope`` is the largest of them.
    ``hormander_sup`` is the largest per-piece smoothness bound
    ``sum_j min(2^j |y| grad_k_l1, 2 tail(2^j |y|))`` over ``|y| = 2^l h``
    while ``2^j |y|`` stays inside the box.
    """
    ref_grid = ref_grid or default_grid(1)
    partition = partition or build_dyadic_partition()
    radii = tuple(float(R) for R in radii)
    if not radii:
        raise ValidationError("radii must be nonempty", "radii")
    half = ref_grid.half_width
    for R in radii:
        if not 0 < R < half / 2:
            raise ValidationError(f"radius {R} outside (0, L/2) = (0, {half / 2})", "radii")
    js = _j_values(j_range)

    def row(j):
        piece = extract_piece(m, j, partition, ref_grid)
        K = inverse_transform(piece.values).samples
        k1, grad, table = _kernel_stats(K, piece.values.samples, ref_grid)
        tails = [_tail_at(table, R) for R in radii]
        return {"k_l1": k1, "grad_k_l1": grad, "tail": tails, "tail_slope": _fit_slope(radii, tails),
                "_table": table}

    rows = dict(zip(js, ordered_map(row, js)))
    slopes = [rows[j]["tail_slope"] for j in js if np.isfinite(rows[j]["tail_slope"])]
    warnings = []
    if len(slopes) < len(js):
        warnings.append("some pieces have fewer than two tails above 1e-14; excluded from the slope")
    slope = max(slopes) if slopes else float("nan")

    sweep = []
    y = ref_grid.spacing
    while y < half / 8:
        sweep.append(y)
        y *= 2
    hsup = 0.0
    for y in sweep:
        total = 0.0
        for j in js:
            t = 2.0 ** j * y
            total += min(t * rows[j]["grad_k_l1"], 2.0 * _tail_at(rows[j]["_table"], t))
        hsup = max(hsup, total)
    per_j = {j: {k: v for k, v in rows[j].items() if k != "_table"} for j in js}
    params = {"symbol": m.label, "grid": ref_grid.as_dict(), "j_range": [js[0], js[-1]]}
    return KernelDiagnostics(per_j, hsup, slope, radii, params, warnings)


# --- the integral smoothness condition on the full kernel ----------------------

@dataclass
class HormanderReport:
    value: float
    per_y: list
    parameters: dict
    truncation_bound: float
    warnings: list = field(default_factory=list)

    @property
    def bound(self):
        return max(row["bound"] for row in self.per_y)

    def to_dict(self):
        return {"value": self.value, "bound": self.bound, "per_y": list(self.per_y),
                "truncation_bound": self.truncation_bound, "parameters": dict(self.parameters),
                "warnings": list(self.warnings)}

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["y", "abs_y", "direct", "bound"])
        for row in self.per_y:
            w.writerow([" ".join(repr(v) for v in row["y"]), repr(row["abs_y"]), repr(row["direct"]),
                        repr(row["bound"])])
        return buf.getvalue()


def _grid_shifts(y_samples, grid):
    """Validate ``y`` samples as grid vectors; return ``(y, index shifts)`` pairs."""
    h = grid.spacing
    out = []
    for y in y_samples:
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        if y.shape != (grid.dim,):
            raise ValidationError(f"y sample {y.tolist()} must have {grid.dim} components", "y")
        idx = np.rint(y / h)
        if np.any(np.abs(y / h - idx) > 1e-9):
            raise ValidationError(f"y sample {y.tolist()} is not a grid vector (spacing {h})", "y")
        ay = float(np.linalg.norm(y))
        if ay == 0:
            raise ValidationError("y = 0 is not allowed", "y")
        if not ay < grid.half_width / 8:
            raise ValidationError(f"|y| = {ay} must be below L/8 = {grid.half_width / 8}", "y")
        kept = np.count_nonzero(grid.radius(SPACE) > 2 * ay) / grid.radius(SPACE).size
        if kept < 0.1:
            raise ValidationError(f"|y| = {ay} leaves under 10% of the box", "y")
        out.append((y, tuple(int(i) for i in idx)))
    return out


def _masked_shift_l1(K, grid, shift, radius):
    x = grid.x_axis
    if grid.dim == 1:
        return kernels.masked_shift_l1_1d(K, x, shift[0], radius) * grid.weight(SPACE)
    return kernels.masked_shift_l1_2d(K, x, shift[0], shift[1], radius) * grid.weight(SPACE)


def hormander_integral(m, j_range, partition=None, K_grid=None, y_samples=None, c1=1.0):
    """``int_{|x| > 2|y|} |K(x - y) - K(x)| dx`` for the truncated kernel ``K``.

    ``K = F^{-1}[m sum_j psi(2^-j .)]`` with ``j`` over ``j_range``, sampled
    on ``K_grid``.  Each ``y`` must be a nonzero grid vector with
    ``|y| < L/8``.  Every row also carries the piecewise bound
    ``sum_j min(c1 |y| ||grad K^(j)||_1, 2 int_{|x|>|y|} |K^(j)|)`` with
    ``K^(j)`` the kernel of the ``j``-th piece on the same grid.
    ``truncation_bound`` is the summed L^1 mass of the two outermost pieces,
    a size indicator for what the truncated sum leaves out.
    """
    K_grid = K_grid or default_grid(1)
    partition = partition or build_dyadic_partition()
    if y_samples is None:
        y_samples = [[K_grid.spacing * 2 ** l] + [0.0] * (K_grid.dim - 1) for l in range(4)]
    shifts = _grid_shifts(y_samples, K_grid)
    js = _j_values(j_range)
    pts = K_grid.points(FREQUENCY)
    r = K_grid.radius(FREQUENCY)
    live = r > 0
    mvals = np.zeros(K_grid.shape, dtype=np.complex128)
    mvals[live] = m(pts[live])

    def piece(j):
        spec = partition.scaled(r, j) * mvals
        K = inverse_transform(GridFunction(K_grid, spec, FREQUENCY)).samples
        k1, grad, table = _kernel_stats(K, spec, K_grid)
        return spec, k1, grad, table

    stats = ordered_map(piece, js)
    total_spec = np.zeros(K_grid.shape, dtype=np.complex128)
    for spec, *_ in stats:
        total_spec += spec
    K = inverse_transform(GridFunction(K_grid, total_spec, FREQUENCY)).samples
    rows = []
    for y, shift in shifts:
        ay = float(np.linalg.norm(y))
        direct = _masked_shift_l1(K, K_grid, shift, 2 * ay)
        bound = sum(min(c1 * ay * grad, 2.0 * _tail_at(table, ay)) for _, _, grad, table in stats)
        rows.append({"y": [float(v) for v in y], "abs_y": ay, "direct": direct, "bound": bound})
    trunc = stats[0][1] + (stats[-1][1] if len(stats) > 1 else 0.0)
    warnings = []
    if 2.0 ** (js[-1] + 1) > K_grid.freq_halfwidth:
        warnings.append(f"pieces with j > {int(np.floor(np.log2(K_grid.freq_halfwidth))) - 1} are cut "
                        "at the grid Nyquist; the piecewise bound may not dominate")
    params = {"symbol": m.label, "grid": K_grid.as_dict(), "j_range": [js[0], js[-1]], "c1": c1}
    return HormanderReport(max(row["direct"] for row in rows), rows, params, trunc, warnings)


def annular_kernel_mass(m, j_range, r1, r2, partition=None, K_grid=None):
    """``int_{r1 <= |x| <= r2} |K|`` for the truncated kernel of :func:`hormander_integral`."""
    K_grid = K_grid or default_grid(1)
    partition = partition or build_dyadic_partition()
    if not 0 < r1 < r2 <= K_grid.half_width:
        raise ValidationError("need 0 < r1 < r2 <= L", "radii")
    pts = K_grid.points(FREQUENCY)
    r = K_grid.radius(FREQUENCY)
    live = r > 0
    mvals = np.zeros(K_grid.shape, dtype=np.complex128)
    mvals[live] = m(pts[live])
    cut = np.zeros(K_grid.shape)
    for j in _j_values(j_range):
        cut += partition.scaled(r, j)
    K = inverse_transform(GridFunction(K_grid, cut * mvals, FREQUENCY))
    rx = K_grid.radius(SPACE)
    ring = (rx >= r1) & (rx <= r2)
    return float(np.sum(np.abs(K.samples)[ring]) * K_grid.weight(SPACE))
