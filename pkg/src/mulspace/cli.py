"""Command-line front end: ``mulspace <command> [options]``.

Every command prints one JSON document (or a CSV table with
``--format csv``) on standard output and embeds the resolved run
configuration under ``"config"``.

Exit codes: 0 success, 2 invalid input (``{"error", "field"}`` JSON on
standard error), 64 unknown command, 74 file I/O failure.

Settings are resolved flag > ``--config`` file > ``MULSPACE_THREADS``
(threads only) > built-in default.  The config file holds one
``key = value`` per line; ``#`` starts a comment.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, kernels, msgf, rng
from .errors import QuadratureError, ValidationError
from .fixtures import Band, EnsembleSpec, make_ensemble, parse_symbol
from .grid import DEFAULT_GRIDS, make_grid
from .multiplier import condition_report, hormander_integral, kernel_diagnostics
from .norms import NormSpec, compute
from .parallel import set_threads
from .partitions import build_dyadic_partition, build_uniform_partition, partition_defect
from .verify import MODES, atom_transfer_ratio, equivalence_ratio, operator_norm_l2

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_IO = 0, 2, 64, 74
BOUNDARY_WARN = 1e-8

COMMANDS = ("partition-check", "norm", "check", "kernel", "hormander", "gen", "verify", "opnorm")

#: config-file keys and their types
CONFIG_KEYS = {
    "dim": int, "N": int, "L": float, "jmin": int, "jmax": int,
    "transition_sharpness": float, "uniform_sharpness": float, "lattice_radius": int,
    "format": str, "threads": int,
}


@dataclass
class RunConfig:
    dim: int
    N: int
    L: float
    jmin: int
    jmax: int
    transition_sharpness: float
    uniform_sharpness: float
    lattice_radius: int
    format: str
    threads: int
    rng_algorithm: str = rng.ALGORITHM

    def as_dict(self):
        out = asdict(self)
        out["grid"] = {"dim": out.pop("dim"), "N": out.pop("N"), "L": out.pop("L")}
        out["j_range"] = [out.pop("jmin"), out.pop("jmax")]
        out["partitions"] = {"transition_sharpness": out.pop("transition_sharpness"),
                             "uniform_sharpness": out.pop("uniform_sharpness"),
                             "lattice_radius": out.pop("lattice_radius")}
        out["backend"] = kernels.BACKEND
        return out


def read_config(path):
    """Parse a flat ``key = value`` file into typed settings."""
    out = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in CONFIG_KEYS:
            raise ValidationError(f"config line {lineno}: unknown or malformed entry {line!r}", key or "config")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise ValidationError(f"config line {lineno}: bad value for {key}", key) from None
    return out


def _env_threads():
    raw = os.environ.get("MULSPACE_THREADS")
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise ValidationError("MULSPACE_THREADS must be an integer", "threads") from None


def resolve_config(args):
    file_cfg = read_config(args.config) if args.config else {}
    dim = args.dim if args.dim is not None else file_cfg.get("dim", 1)
    if dim not in DEFAULT_GRIDS:
        raise ValidationError(f"dim must be 1 or 2, got {dim}", "dim")
    n_default, l_default = DEFAULT_GRIDS[dim]

    def pick(name, default):
        v = getattr(args, name, None)
        return v if v is not None else file_cfg.get(name, default)

    cfg = RunConfig(
        dim=dim, N=pick("N", n_default), L=pick("L", l_default),
        jmin=pick("jmin", -20), jmax=pick("jmax", 20),
        transition_sharpness=pick("transition_sharpness", 1.0),
        uniform_sharpness=pick("uniform_sharpness", 1.0),
        lattice_radius=pick("lattice_radius", 8),
        format=pick("format", "json"),
        threads=pick("threads", None) or _env_threads(),
    )
    if cfg.format not in ("json", "csv"):
        raise ValidationError("format must be json or csv", "format")
    if cfg.threads < 1:
        raise ValidationError("threads must be >= 1", "threads")
    if cfg.jmin > cfg.jmax:
        raise ValidationError("jmin must not exceed jmax", "jmin")
    make_grid(cfg.dim, cfg.N, cfg.L)
    return cfg


def _floats(text, field):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers for {field}", field) from None


def _num(text):
    return float(text)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so usage errors get the JSON error contract."""

    def error(self, message):
        raise _UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--config", help="flat key = value settings file (default: none)")
    g.add_argument("--threads", type=int, help="worker threads (default: $MULSPACE_THREADS or 1)")
    g.add_argument("--format", choices=("json", "csv"), help="output format (default: json)")
    g.add_argument("--dim", type=int, help="spatial dimension, 1 or 2 (default: 1)")
    g.add_argument("--N", type=int, help="points per axis (default: 4096 in 1D, 512 in 2D)")
    g.add_argument("--L", type=float, help="box half width (default: 64 pi in 1D, 16 pi in 2D)")
    g.add_argument("--jmin", type=int, help="smallest dyadic index (default: -20)")
    g.add_argument("--jmax", type=int, help="largest dyadic index (default: 20)")
    g.add_argument("--transition-sharpness", dest="transition_sharpness", type=float,
                   help="dyadic cutoff sharpness, >= 1 (default: 1)")
    g.add_argument("--uniform-sharpness", dest="uniform_sharpness", type=float,
                   help="uniform bump sharpness (default: 1)")
    g.add_argument("--lattice-radius", dest="lattice_radius", type=int,
                   help="uniform partition lattice radius for partition-check (default: 8)")

    parser = _Parser(prog="mulspace", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("partition-check", parents=[common], help="partition-of-unity defect")
    p.add_argument("--family", choices=("dyadic", "uniform"), default="dyadic", help="(default: dyadic)")
    p.add_argument("--samples", type=int, default=10000, help="(default: 10000)")
    p.add_argument("--seed", type=int, default=0, help="(default: 0)")

    p = sub.add_parser("norm", parents=[common], help="norm of a stored grid function")
    p.add_argument("--spec", required=True, help='JSON such as {"family": "Besov", "p": 2, "q": 1, "s": 0.5}')
    p.add_argument("--input", required=True, help=".msgf file")

    p = sub.add_parser("check", parents=[common], help="condition table of the dyadic pieces")
    p.add_argument("--symbol", required=True, help="catalog symbol, e.g. riesz:1 or mihlin_poly:1")
    p.add_argument("--s", type=_num, default=1.0, help="smoothness (default: 1)")
    p.add_argument("--p", type=_num, default=2.0, help="integrability for M^{p,1}_s (default: 2)")
    p.add_argument("--sobolev-s", dest="sobolev_s", type=_num, help="Sobolev column order (default: --s)")

    p = sub.add_parser("kernel", parents=[common], help="kernel L1, gradient and tail statistics")
    p.add_argument("--symbol", required=True)
    p.add_argument("--radii", default="2,4,8,16,32", help="tail radii (default: 2,4,8,16,32)")

    p = sub.add_parser("hormander", parents=[common], help="integral smoothness of the truncated kernel")
    p.add_argument("--symbol", required=True)
    p.add_argument("--y-steps", dest="y_steps", default="1,2,4,8",
                   help="shifts |y| as multiples of the grid spacing along the first axis (default: 1,2,4,8)")

    p = sub.add_parser("gen", parents=[common], help="write a seeded ensemble as .msgf files")
    p.add_argument("--kind", choices=("band_limited", "h1_atom", "gaussian_mix"), required=True)
    p.add_argument("--count", type=int, default=10, help="(default: 10)")
    p.add_argument("--seed", type=int, default=0, help="(default: 0)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--band-radius", dest="band_radius", type=float, default=4.0, help="(default: 4)")
    p.add_argument("--band-shape", dest="band_shape", choices=("ball", "box"), default="ball")
    p.add_argument("--atom-scale", dest="atom_scale", type=float, default=1.0, help="(default: 1)")

    p = sub.add_parser("verify", parents=[common], help="measured equivalence constants")
    p.add_argument("--mode", choices=MODES + ("atom_transfer",), required=True)
    p.add_argument("--p", type=_num, default=2.0, help="(default: 2)")
    p.add_argument("--q", type=_num, default=1.0, help="(default: 1)")
    p.add_argument("--s", type=_num, default=0.0, help="(default: 0)")
    p.add_argument("--count", type=int, default=50, help="(default: 50)")
    p.add_argument("--seed", type=int, default=0, help="(default: 0)")
    p.add_argument("--band-radius", dest="band_radius", type=float, default=2.0, help="(default: 2)")
    p.add_argument("--atom-scale", dest="atom_scale", type=float, default=1.0, help="(default: 1)")
    p.add_argument("--symbol", default="one", help="symbol for the piece and atom modes (default: one)")
    p.add_argument("--support", choices=("frequency", "space"), default="frequency",
                   help="prop32 reading of compact support (default: frequency)")

    p = sub.add_parser("opnorm", parents=[common], help="L2 operator norm by power iteration")
    p.add_argument("--symbol", required=True)
    p.add_argument("--iterations", type=int, default=200000, help="iteration cap (default: 200000)")
    return parser


def _clean(obj):
    """Make a report JSON-safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def _grid(cfg):
    return make_grid(cfg.dim, cfg.N, cfg.L)


def _partitions(cfg):
    dyadic = build_dyadic_partition(cfg.transition_sharpness, (cfg.jmin, cfg.jmax))
    uniform = build_uniform_partition(cfg.dim, cfg.lattice_radius, cfg.uniform_sharpness)
    return dyadic, uniform


def _csv_rows(rows):
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = list(rows[0])
    w.writerow(keys)
    for row in rows:
        w.writerow([row[k] if isinstance(row[k], (int, str)) else repr(row[k]) for k in keys])
    return buf.getvalue()


def cmd_partition_check(args, cfg):
    dyadic, uniform = _partitions(cfg)
    part = dyadic if args.family == "dyadic" else uniform
    defect = partition_defect(part, args.samples, args.seed, cfg.dim)
    out = {"family": args.family, "defect": defect, "samples": args.samples, "seed": args.seed}
    if args.family == "dyadic":
        out.update(lower_bound_c=dyadic.lower_bound, j_range=list(dyadic.j_range))
    else:
        out.update(lattice_radius=uniform.lattice_radius)
    return out, None


def cmd_norm(args, cfg):
    try:
        raw = json.loads(args.spec)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"--spec is not JSON: {exc}", "spec") from None
    if not isinstance(raw, dict) or "family" not in raw:
        raise ValidationError("--spec needs a family", "spec")
    unknown = set(raw) - {"family", "p", "q", "s", "method"}
    if unknown:
        raise ValidationError(f"unknown spec keys {sorted(unknown)}", "spec")
    spec = NormSpec(**{k: (float(v) if k in "pqs" and v in ("inf", "Infinity") else v) for k, v in raw.items()})
    f = msgf.read(args.input)
    dyadic, _ = _partitions(cfg)
    uniform = build_uniform_partition(f.grid.dim, cfg.lattice_radius, cfg.uniform_sharpness)
    value = compute(spec, f, dyadic, uniform)
    warnings = list(value.warnings)
    ratio = f.boundary_ratio()
    if ratio > BOUNDARY_WARN:
        warnings.append(f"boundary samples reach {ratio:.3g} of the maximum; periodization error likely")
    out = {"value": float(value), "warnings": warnings, "truncation_mass": value.truncation_mass,
           "spec": spec.as_dict(), "input_grid": f.grid.as_dict(), "side": f.side,
           "info": value.info}
    return out, None


def cmd_check(args, cfg):
    dyadic, _ = _partitions(cfg)
    uniform = build_uniform_partition(cfg.dim, cfg.lattice_radius, cfg.uniform_sharpness)
    rep = condition_report(parse_symbol(args.symbol), args.s, args.p, (cfg.jmin, cfg.jmax), dyadic,
                           uniform, _grid(cfg), args.sobolev_s)
    return rep.to_dict(), rep.to_csv


def cmd_kernel(args, cfg):
    dyadic, _ = _partitions(cfg)
    rep = kernel_diagnostics(parse_symbol(args.symbol), (cfg.jmin, cfg.jmax), dyadic, _grid(cfg),
                             _floats(args.radii, "radii"))
    return rep.to_dict(), rep.to_csv


def cmd_hormander(args, cfg):
    dyadic, _ = _partitions(cfg)
    grid = _grid(cfg)
    steps = _floats(args.y_steps, "y")
    ys = [[k * grid.spacing] + [0.0] * (cfg.dim - 1) for k in steps]
    rep = hormander_integral(parse_symbol(args.symbol), (cfg.jmin, cfg.jmax), dyadic, grid, ys)
    return rep.to_dict(), rep.to_csv


def cmd_gen(args, cfg):
    grid = _grid(cfg)
    band = Band(args.band_shape, args.band_radius)
    spec = EnsembleSpec(args.kind, args.count, args.seed, band, args.atom_scale)
    members = make_ensemble(spec, grid)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for i, f in enumerate(members):
        name = f"{args.kind}_{i:04d}.msgf"
        msgf.write(out_dir / name, f)
        files.append(name)
    manifest = {"ensemble": spec.as_dict(), "grid": grid.as_dict(), "files": files,
                "rng_algorithm": rng.ALGORITHM, "format": "msgf", "msgf_version": msgf.VERSION}
    (out_dir / "manifest.json").write_text(json.dumps(_clean(manifest), sort_keys=True, indent=2) + "\n")
    return manifest, None


def cmd_verify(args, cfg):
    grid = _grid(cfg)
    dyadic, _ = _partitions(cfg)
    uniform = build_uniform_partition(cfg.dim, cfg.lattice_radius, cfg.uniform_sharpness)
    params = {"p": args.p, "q": args.q, "s": args.s}
    if args.mode == "atom_transfer":
        spec = EnsembleSpec("h1_atom", args.count, args.seed, atom_scale=args.atom_scale)
        rep = atom_transfer_ratio(parse_symbol(args.symbol), spec, grid)
    elif args.mode in ("herz16", "pnorm17"):
        rep = equivalence_ratio(args.mode, params=params, grid=grid, symbol=parse_symbol(args.symbol),
                                j_range=(cfg.jmin, cfg.jmax), dyadic=dyadic, uniform=uniform)
    else:
        spec = EnsembleSpec("band_limited", args.count, args.seed, Band("ball", args.band_radius))
        rep = equivalence_ratio(args.mode, spec, params, grid, dyadic=dyadic, uniform=uniform,
                                support=args.support)
    return rep.to_dict(), rep.to_csv


def cmd_opnorm(args, cfg):
    grid = _grid(cfg)
    m = parse_symbol(args.symbol)
    value, info = operator_norm_l2(m, grid, args.iterations, return_info=True)
    from .grid import FREQUENCY

    node_max = float(np.max(np.abs(m(grid.points(FREQUENCY)))))
    return {"symbol": m.label, "estimate": value, "node_max": node_max, **info}, None


HANDLERS = {
    "partition-check": cmd_partition_check, "norm": cmd_norm, "check": cmd_check, "kernel": cmd_kernel,
    "hormander": cmd_hormander, "gen": cmd_gen, "verify": cmd_verify, "opnorm": cmd_opnorm,
}


def _fail(code, message, field=None, stream=None):
    stream = stream or sys.stderr
    stream.write(json.dumps({"error": message, "field": field}, sort_keys=True) + "\n")
    return code


def run(argv, stdout=None, stderr=None):
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(argv)
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        return _fail(EXIT_USAGE, f"unknown command {argv[0]!r}; expected one of {', '.join(COMMANDS)}",
                     "command", stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        msg = str(exc)
        field = msg[len("argument "):].split(":", 1)[0].split("/")[0].lstrip("-") if msg.startswith("argument ") else "argv"
        return _fail(EXIT_INVALID, msg, field.replace("-", "_"), stderr)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(stdout)
        return EXIT_USAGE
    try:
        cfg = resolve_config(args)
        set_threads(cfg.threads)
        report, csv_view = HANDLERS[args.command](args, cfg)
    except ValidationError as exc:
        return _fail(EXIT_INVALID, str(exc), exc.field, stderr)
    except QuadratureError as exc:
        return _fail(EXIT_INVALID, str(exc), "stride", stderr)
    except msgf.FormatError as exc:
        return _fail(EXIT_IO, str(exc), "input", stderr)
    except OSError as exc:
        return _fail(EXIT_IO, f"{exc.strerror or exc}: {exc.filename}", "input", stderr)
    finally:
        set_threads(None)
    if cfg.format == "csv" and csv_view is not None:
        stdout.write(csv_view())
    else:
        report = dict(report)
        report["config"] = cfg.as_dict()
        report["command"] = args.command
        stdout.write(json.dumps(_clean(report), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
