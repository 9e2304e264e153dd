"""Command-line front end.

Every command writes either CSV (first line a ``#`` provenance comment) or a
JSON object with ``provenance`` and ``result`` keys.  Output files are
written to a temporary name and renamed into place, so a failed run never
leaves a partial file behind.

Exit codes: 0 success, 2 invalid arguments, 3 solver did not converge,
4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import BoundTable, SolverSettings, build_table, reference_table
from .closed_form import crosscheck
from .criteria import evaluate_criteria
from .depth import infer_depth_entanglement, infer_depth_pqs, infer_depth_steering
from .exceptions import ConsistencyError, ConvergenceError
from .fock import ModelParams, beam_splitter_state, evolve
from .moments import moments_from_state
from .sweep import OBJECTIVES, SearchSettings, TableOneRow, optimize_over_t, scan_time, table_one

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONVERGENCE = 3
EXIT_CONSISTENCY = 4


class UsageError(ValueError):
    pass


def _int_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, numpy scalars plain."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _provenance(args):
    # worker count never changes results, so it stays out of the header
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "workers")}
    return {"tool": "bec-steering", "version": __version__, "command": args.command,
            "flags": _clean(flags)}


def _emit(args, result=None, csv_text=None):
    prov = _provenance(args)
    if csv_text is not None and args.format == "csv":
        text = "# provenance: " + json.dumps(prov, sort_keys=True) + "\n" + csv_text
    else:
        text = json.dumps(_clean({"provenance": prov, "result": result}), indent=2, sort_keys=True) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return
    path = Path(args.output)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _params(args, time=0.0):
    return ModelParams(args.n, args.chi, args.k, time)


def _rows_csv(columns, rows):
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        cells = []
        for c in columns:
            v = row[c]
            cells.append("" if v is None else repr(float(v)) if isinstance(v, float) else str(v))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def cmd_evolve(args):
    params = _params(args, args.t)
    state = evolve(beam_splitter_state(args.n), params)
    amps = state.amplitudes
    rows = [{"r": r, "re": float(a.real), "im": float(a.imag)} for r, a in enumerate(amps)]
    moments = moments_from_state(state)
    result = {"n_total": args.n, "amplitudes": rows, "moments": moments.as_dict(),
              "criteria": evaluate_criteria(moments).as_dict()}
    _emit(args, result, _rows_csv(("r", "re", "im"), rows))


def cmd_scan(args):
    if args.points < 1:
        raise UsageError("--points must be positive")
    if args.spacing == "log":
        if args.t_min <= 0:
            raise UsageError("log spacing needs --t-min > 0")
        grid = np.geomspace(args.t_min, args.t_max, args.points)
    else:
        grid = np.linspace(args.t_min, args.t_max, args.points)
    res = scan_time(_params(args), grid, args.objective, args.method, args.workers)
    _emit(args, {"param_grid": res.param_grid, "optimum": res.optimum, "rows": res.rows},
          res.to_csv())


def _search(args):
    return SearchSettings(grid_points=args.grid_points, t_max=args.t_max,
                          spacing=args.spacing, method=args.method)


def cmd_optimize(args):
    opt = optimize_over_t(_params(args), args.objective, _search(args))
    _emit(args, opt.as_dict())


def cmd_bounds(args):
    settings = SolverSettings(mu_grid_points=args.mu_grid)
    table = build_table(args.two_s, settings, with_zeta2=args.zeta2, workers=args.workers,
                        cache_dir=args.cache_dir)
    _emit(args, json.loads(table.to_json()), table.to_csv())


def _load_table(source):
    if source is None or source == "reference":
        return reference_table()
    path = Path(source)
    if not path.exists():
        raise UsageError(f"bounds table not found: {source}")
    return BoundTable.load(path)


def cmd_depth(args):
    table = _load_table(args.bounds_table)
    fn = {"entanglement": infer_depth_entanglement, "steering": infer_depth_steering,
          "steering_pqs": infer_depth_pqs}[args.kind]
    res = fn(args.ehz, args.r, table, interpolate=not args.no_interpolate)
    result = {"certified": res is not None}
    if res is not None:
        result.update(res.as_dict())
    _emit(args, result)


def cmd_table1(args):
    table = _load_table(args.bounds_table) if args.bounds_table else None
    rows = table_one(args.n, args.k, args.chi, _search(args), table=table)
    dicts = [r.as_dict() for r in rows]
    _emit(args, dicts, _rows_csv(TableOneRow.COLUMNS, dicts))


def cmd_crosscheck(args):
    grid = np.linspace(0.0, args.t_max, args.points)
    worst = None
    reports = []
    for t in grid:
        rep = crosscheck(_params(args, float(t)), args.tolerance, as_printed=args.as_printed)
        reports.append({"t": float(t), "worst_field": rep.worst_field,
                        "worst_deviation": rep.worst_deviation})
        if worst is None or rep.worst_deviation > worst.worst_deviation:
            worst = rep
    result = {"passed": worst.passed, "worst_deviation": worst.worst_deviation,
              "worst_field": worst.worst_field, "worst_t": worst.params.time,
              "tolerance": args.tolerance, "points": reports}
    _emit(args, result)
    if not worst.passed:
        raise ConsistencyError(
            f"closed forms and Fock sums differ by {worst.worst_deviation:.3g} "
            f"(> {args.tolerance:g}) at t={worst.params.time!r}"
        )


def _add_model(p, need_t=False):
    p.add_argument("--n", type=int, required=True, help="total boson number N")
    p.add_argument("--k", type=float, default=-1.0, help="Hamiltonian shape constant K")
    p.add_argument("--chi", type=float, default=1.0, help="nonlinearity strength")
    if need_t:
        p.add_argument("--t", type=float, default=0.0, help="evolution time")


def _add_output(p, formats=("json",)):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--output", default=None, help="output path (default: stdout)")


def _add_search(p):
    p.add_argument("--grid-points", type=int, default=2000)
    p.add_argument("--t-max", type=float, default=None, help="scan horizon (default: quarter twisting period)")
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--method", choices=("fock", "closed"), default="fock")


def build_parser():
    parser = argparse.ArgumentParser(prog="bec-steering", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="evolve the beam-splitter state and report its moments")
    _add_model(p, need_t=True)
    _add_output(p, ("json", "csv"))
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("scan", help="criteria on a time grid")
    _add_model(p)
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=math.pi / 4)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p.add_argument("--objective", choices=OBJECTIVES, default="e_hz_theta")
    p.add_argument("--method", choices=("fock", "closed"), default="fock")
    p.add_argument("--workers", type=int, default=1)
    _add_output(p, ("csv", "json"))
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize", help="minimize a criterion over time")
    _add_model(p)
    p.add_argument("--objective", choices=OBJECTIVES, default="e_hz_theta")
    _add_search(p)
    _add_output(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("bounds", help="solve and tabulate the spin bounds")
    p.add_argument("--two-s", type=_int_list, default=_int_list("1-100"),
                   help="2S values, e.g. '1-100,200,500'")
    p.add_argument("--zeta2", action="store_true", help="also solve the planar squeezing bound")
    p.add_argument("--mu-grid", type=int, default=SolverSettings.mu_grid_points)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir", default=None)
    _add_output(p, ("csv", "json"))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("depth", help="certified depth from measured E_HZ and Bloch length")
    p.add_argument("--ehz", type=float, required=True)
    p.add_argument("--r", type=float, required=True, help="r (or r_parallel for steering_pqs)")
    p.add_argument("--kind", choices=("entanglement", "steering", "steering_pqs"), default="steering")
    p.add_argument("--bounds-table", default="reference",
                   help="CSV/JSON bound table, or 'reference' for the built-in rows")
    p.add_argument("--no-interpolate", action="store_true",
                   help="only use tabulated spins, no log-log interpolation")
    _add_output(p)
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("table1", help="optimal steering ratio and depth for several N")
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated N values")
    p.add_argument("--k", type=float, default=-1.0)
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--bounds-table", default=None,
                   help="bound table for the depth lookup (default: exact solves)")
    _add_search(p)
    _add_output(p, ("csv", "json"))
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("crosscheck", help="compare closed forms with Fock sums on a time grid")
    _add_model(p)
    p.add_argument("--t-max", type=float, default=2 * math.pi)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--as-printed", action="store_true",
                   help="use the complex-exponential general-K forms")
    _add_output(p)
    p.set_defaults(func=cmd_crosscheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
