"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the "acceptance criteria" section of the pytest
terminal summary.  Tolerances are the stated ones; nothing is loosened.
"""

import io
import json

import numpy as np
import pytest

from mulspace import (Band, EnsembleSpec, FREQUENCY, SPACE, build_dyadic_partition, build_uniform_partition,
                      condition_report, default_grid, equivalence_ratio, extract_piece, forward_transform,
                      hormander_integral, kernel_diagnostics, lp_norm, make_ensemble, make_grid,
                      modulation_norm, operator_norm_l2, parse_symbol, partition_defect, sobolev_norm,
                      symbol_catalog)
from mulspace.cli import run
from mulspace.multiplier import COLUMNS
from mulspace.verify import atom_transfer_ratio

pytestmark = pytest.mark.acceptance

D = build_dyadic_partition()
U1 = build_uniform_partition(1)
BL50 = EnsembleSpec("band_limited", 50, 5, Band("ball", 2.0))
COARSE = make_grid(1, 4096, 64 * np.pi)
FINE = make_grid(1, 8192, 64 * np.pi)


def _direct_dft(f):
    """O(N^2) sum of the continuum transform approximation at every frequency node."""
    g = f.grid
    x = g.points(SPACE).reshape(-1, g.dim)
    xi = g.points(FREQUENCY).reshape(-1, g.dim)
    phase = np.exp(-1j * xi @ x.T)
    return (phase @ f.samples.ravel() * g.weight(SPACE)).reshape(g.shape)


def _fixtures():
    g1, g2 = default_grid(1), make_grid(2, 256, 16 * np.pi)
    out = []
    for kind, extra in (("band_limited", {}), ("h1_atom", {"atom_scale": 4.0}), ("gaussian_mix", {})):
        for g in (g1, g2):
            out += make_ensemble(EnsembleSpec(kind, 3, 11, **extra), g)
    for name in ("one", "sign", "mihlin_poly:1", "oscillatory:0", "imag_power:1"):
        for j in (-3, 0, 3):
            out.append(extract_piece(parse_symbol(name), j, D, g1).as_function())
    out.append(extract_piece(parse_symbol("riesz:2"), 1, D, g2).as_function())
    return out


def test_c1_transform_fidelity(criterion):
    rng = np.random.default_rng(1)
    worst_dft = 0.0
    for dim, n in ((1, 8), (1, 16), (1, 32), (1, 64), (2, 8), (2, 16), (2, 32)):
        g = make_grid(dim, n, 3.0)
        from mulspace import GridFunction
        f = GridFunction(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape), SPACE)
        F = forward_transform(f).samples
        ref = _direct_dft(f)
        worst_dft = max(worst_dft, np.max(np.abs(F - ref)) / np.max(np.abs(ref)))
    worst_pl = 0.0
    for f in _fixtures():
        lhs = lp_norm(f, 2)
        if lhs == 0:  # low oscillatory pieces vanish identically
            continue
        rhs = (2 * np.pi) ** (-f.grid.dim / 2) * lp_norm(forward_transform(f), 2)
        worst_pl = max(worst_pl, abs(lhs - rhs) / lhs)
    ok = worst_dft < 1e-10 and worst_pl < 1e-10
    criterion("C1 transform fidelity", ok, f"dft_rel={worst_dft:.2e} plancherel_rel={worst_pl:.2e} tol=1e-10")
    assert ok


def test_c2_partition_identities(criterion):
    d1 = partition_defect(D, 20000, 0, 1)
    d2 = partition_defect(D, 20000, 1, 2)
    u1 = partition_defect(U1, 20000, 2, 1)
    u2 = partition_defect(build_uniform_partition(2), 20000, 3, 2)
    worst = max(d1, d2, u1, u2)
    ok = worst < 1e-10
    criterion("C2 partition identities", ok,
              f"dyadic={max(d1, d2):.2e} uniform={max(u1, u2):.2e} tol=1e-10")
    assert ok


def test_c3_piece_identities(criterion):
    g = default_grid(1)
    psi = D.radial(g.radius(FREQUENCY)).astype(complex)
    exact = all(np.array_equal(extract_piece(symbol_catalog("one"), j, D, g).values.samples, psi)
                for j in range(-10, 11))
    worst = 0.0
    cases = [("sign", g), ("riesz:1", g), ("imag_power:1", g), ("riesz:1", make_grid(2, 64, 8 * np.pi)),
             ("riesz:2", make_grid(2, 64, 8 * np.pi))]
    for name, grid in cases:
        rep = condition_report(parse_symbol(name), 0.5, 1.0, (-6, 6), ref_grid=grid)
        for c in COLUMNS:
            col = np.array([rep.per_j[j][c] for j in range(-6, 7)])
            worst = max(worst, float((col.max() - col.min()) / col.max()))
    ok = exact and worst < 1e-10
    criterion("C3 piece identities", ok, f"one_exact={exact} homogeneous_rel={worst:.2e} tol=1e-10")
    assert ok


def test_c4_operator_norm(criterion):
    g = make_grid(1, 1024, 8 * np.pi)
    names = ("one", "sign", "riesz:1", "mihlin_poly:1", "imag_power:2", "oscillatory:0")
    errs = {}
    for name in names:
        m = parse_symbol(name)
        target = float(np.max(np.abs(m(g.points(FREQUENCY)))))
        errs[name] = abs(operator_norm_l2(m, g) - target) / target
    worst = max(errs.values())
    ok = worst < 1e-6 and len(errs) >= 5
    criterion("C4 L2 operator norm", ok, f"symbols={len(errs)} worst_rel={worst:.2e} tol=1e-6")
    assert ok


def _sobolev_spread(grid, s):
    r = []
    for f in make_ensemble(BL50, grid):
        r.append(float(modulation_norm(f, 2, 2, s, U1)) / float(sobolev_norm(f, s)))
    return max(r) / min(r)


def test_c5_sobolev_modulation(criterion):
    details, ok = [], True
    for s in (0.0, 1.0):
        a, b = _sobolev_spread(COARSE, s), _sobolev_spread(FINE, s)
        change = abs(b / a - 1)
        ok &= a < 2 and b < 2 and change < 0.05
        details.append(f"s={s}: spread={a:.4f} change={change:.1e}")
    criterion("C5 M22 vs L2_s", ok, "; ".join(details) + " (spread<2, change<5%)")
    assert ok


def test_c6_band_limited_equivalence(criterion):
    details, ok = [], True
    for p, q, s in ((2, 1, 0), (2, 1, 0.5), (1, 1, 0.5), (np.inf, 1, 0.5)):
        a = equivalence_ratio("prop32", BL50, {"p": p, "q": q, "s": s}, COARSE).ratio_spread
        b = equivalence_ratio("prop32", BL50, {"p": p, "q": q, "s": s}, FINE).ratio_spread
        change = abs(b / a - 1)
        ok &= bool(np.isfinite(a) and np.isfinite(b) and change < 0.05)
        details.append(f"({p},{q},{s}): {a:.4f} d={change:.1e}")
    criterion("C6 band-limited M^{p,q}_s vs FL^q", ok, "; ".join(details))
    assert ok


def test_c7_piece_equivalences(criterion):
    osc_grid = make_grid(1, 8192, 256 * np.pi)
    fixtures = (("one", None, True), ("riesz:1", None, True), ("mihlin_poly:1", None, False),
                ("oscillatory:0", osc_grid, False))
    details, ok = [], True
    for name, grid, homogeneous in fixtures:
        spreads = []
        for mode, p in (("herz16", 2), ("pnorm17", 1), ("pnorm17", np.inf)):
            rep = equivalence_ratio(mode, params={"p": p, "s": 0.5}, grid=grid, symbol=parse_symbol(name),
                                    j_range=(-8, 8))
            spreads.append(rep.ratio_spread)
        fine = all(np.isfinite(spreads)) and (not homogeneous or max(spreads) <= 1.10)
        ok &= bool(fine)
        details.append(f"{name}: " + "/".join(f"{x:.3f}" for x in spreads))
    criterion("C7 Herz and M^{p,1} pieces", ok, "; ".join(details) + " (homogeneous <= 1.10)")
    assert ok


def test_c8_embeddings(criterion):
    emb = equivalence_ratio("embed110", BL50, None, COARSE)
    chain = equivalence_ratio("toft_chain", BL50, None, COARSE)
    ok = emb.extra["violations"] == 0 and chain.extra["violations"] == 0 and len(emb.per_input) == 50
    criterion("C8 embeddings", ok,
              f"embed max={emb.ratio_max:.3f} const={emb.extra['cell_constant']:.3f} "
              f"violations={emb.extra['violations']}; chain c={chain.extra['constants']['c']:.3f} "
              f"c'={chain.extra['constants']['c_prime']:.3f} violations={chain.extra['violations']}")
    assert ok


def test_c9_kernel_estimates(criterion):
    g = default_grid(1)
    kd = kernel_diagnostics(parse_symbol("mihlin_poly:1"), (-8, 8), D, g, (4, 8, 16, 32))
    slope_ok = all(kd.tail_slope <= -s + 0.3 for s in (0.5, 1.0))
    r = np.array([row["grad_k_l1"] / row["k_l1"] for row in kd.per_j.values()])
    dev = float(np.max(np.abs(r / r.mean() - 1)))
    ys = [[g.spacing * k] for k in (1, 2, 4, 8, 16, 32, 64)]
    worst = -np.inf
    for name in ("one", "sign", "riesz:1", "mihlin_poly:1", "oscillatory:0", "imag_power:1"):
        rep = hormander_integral(parse_symbol(name), (-8, 4), D, g, ys)
        worst = max(worst, max(row["direct"] / row["bound"] for row in rep.per_y))
    ok = slope_ok and dev <= 0.10 and worst <= 1.0
    criterion("C9 kernel estimates", ok,
              f"slope={kd.tail_slope:.3f} (<= -0.7) grad_dev={dev:.3f} (<= 0.10) max direct/bound={worst:.3f}")
    assert ok


def test_c10_atom_probe(criterion):
    maxima = []
    for scale in (1.0, 2.0, 4.0, 8.0, 16.0, 32.0):
        spec = EnsembleSpec("h1_atom", 8, 3, atom_scale=scale)
        maxima.append(atom_transfer_ratio(parse_symbol("riesz:1"), spec).ratio_max)
    stable = max(maxima) / min(maxima) - 1 <= 0.25
    ident = atom_transfer_ratio(symbol_catalog("one"), EnsembleSpec("h1_atom", 8, 3, atom_scale=4.0))
    exact = bool(np.all(np.abs(ident.ratios - 1) <= 1e-10))
    ok = stable and exact
    criterion("C10 atom transfer", ok,
              "hilbert ratio_max=" + ",".join(f"{m:.4f}" for m in maxima) + f" identity_exact={exact}")
    assert ok


def test_c11_determinism(criterion, tmp_path):
    commands = [
        ["partition-check", "--samples", "2000"],
        ["check", "--symbol", "mihlin_poly:1", "--jmin", "-3", "--jmax", "3"],
        ["kernel", "--symbol", "sign", "--jmin", "-4", "--jmax", "4"],
        ["hormander", "--symbol", "riesz:1", "--jmin", "-4", "--jmax", "4"],
        ["verify", "--mode", "toft_chain", "--count", "5", "--seed", "3"],
        ["verify", "--mode", "atom_transfer", "--symbol", "riesz:1", "--count", "3", "--seed", "3"],
        ["opnorm", "--symbol", "imag_power:1", "--N", "256", "--L", "8"],
        ["gen", "--kind", "gaussian_mix", "--count", "2", "--seed", "3", "--out", str(tmp_path / "ens")],
        ["norm", "--spec", '{"family":"Besov","p":2,"q":1,"s":0.5}',
         "--input", str(tmp_path / "ens" / "gaussian_mix_0000.msgf")],
    ]
    same = 0
    for argv in commands:
        runs = []
        for _ in range(2):
            out = io.StringIO()
            code = run(argv + ["--threads", "1"], out, io.StringIO())
            runs.append((code, out.getvalue().encode()))
        same += runs[0] == runs[1] and runs[0][0] == 0
        json.loads(runs[0][1])
    ok = same == len(commands)
    criterion("C11 determinism", ok, f"{same}/{len(commands)} commands byte-identical")
    assert ok
