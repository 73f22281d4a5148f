"""Command-line front end: ``s3decomp <subcommand> [flags]``.

Exit codes: 0 success, 1 domain result flagged (infeasible decomposition,
failed check), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import shlex
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from importlib import resources

from . import __version__, cycles, gallery, laplace, moments, orientations
from .pairing import Multigraph, Pairing, pairing_to_multigraph, sample_pairing, sample_simple_graph

COMMANDS = ("sample", "decompose", "count", "moments", "laplace", "cycles",
            "verify-conditioning", "gallery", "experiment")


class UsageError(Exception):
    pass


@dataclass
class ExperimentRecord:
    timestamp: str
    command: str
    parameters: dict
    results: object
    version: str
    status: str


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _real(x):
    if isinstance(x, Fraction):
        x = float(x)
    return float(f"{x:.15g}") if math.isfinite(x) else str(x)


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return _frac(obj)
    if isinstance(obj, float):
        return _real(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _jsonable(obj.item())
    if hasattr(obj, "__dataclass_fields__"):
        return _jsonable(asdict(obj))
    return obj


# -- subcommands: each returns (payload, status) -----------------------------

def cmd_sample(args):
    if args.simple:
        g, tries = sample_simple_graph(args.n, args.d, args.seed, index=args.replicate)
        return {"n": args.n, "d": args.d, "seed": args.seed, "configurations_drawn": tries,
                "edges": [list(e) for e in g.edges]}, "ok"
    p = sample_pairing(args.n, args.d, args.seed, replicate=args.replicate)
    g = pairing_to_multigraph(p)
    return {"pairing": json.loads(p.to_json()), "edges": [list(e) for e in g.edges],
            "simple": _is_simple(g)}, "ok"


def _is_simple(g):
    from .pairing import is_simple
    return is_simple(g)


def cmd_decompose(args):
    if args.random:
        if args.n is None:
            raise UsageError("decompose --random needs --n")
        res = orientations.decomposable_fraction(args.n, args.reps or 200, args.seed)
        return res, "ok"
    if not args.graph:
        raise UsageError("decompose needs --graph FILE or --random")
    with open(args.graph) as fh:
        g = Multigraph.from_edgelist(fh.read())
    try:
        dec = orientations.find_star_decomposition(g)
    except orientations.DivisibilityError as exc:
        return {"verdict": "divisibility", "diagnostic": str(exc), "edges": len(g.edges)}, "infeasible"
    except ValueError as exc:
        return {"verdict": "invalid-input", "diagnostic": str(exc)}, "infeasible"
    if dec is None:
        return {"verdict": "infeasible", "edges": len(g.edges)}, "infeasible"
    return {"verdict": "decomposable", "verified": orientations.verify_star_decomposition(g, dec),
            "stars": json.loads(dec.to_json())}, "ok"


def cmd_count(args):
    if args.pairing:
        with open(args.pairing) as fh:
            p = Pairing.from_json(fh.read())
        out = {"n": p.n, "d": p.d, "Y_bruteforce": orientations.count_orientations_bruteforce(p)
               if p.n * p.d // 2 <= orientations.BRUTE_FORCE_MAX_PAIRS else None}
        if p.d == 4 and p.n % 3 == 0:
            out["Y_fast"] = orientations.count_orientations_fast(p)
        return out, "ok"
    if args.n is None:
        raise UsageError("count needs --n or --pairing")
    if args.exhaustive:
        return _exhaustive_report(args.n)
    reps = args.reps or 1
    ys = [orientations.count_orientations_fast_kernel(sample_pairing(args.n, 4, args.seed, replicate=r))
          for r in range(reps)]
    return {"n": args.n, "reps": reps, "Y": ys, "mean": sum(ys) / reps,
            "E_Y_exact": moments.expected_Y_exact(args.n)}, "ok"


def _exhaustive_report(n):
    import numpy as np
    from .pairing import all_partners_array

    partners = all_partners_array(n, 4)
    ys = orientations.count_orientations_bruteforce_batch(partners, n, 4).astype(object)
    xs = np.array([cycles.kernels.cycle_census((row // 4).reshape(n, 4), 3)[1:] for row in partners],
                  dtype=object)
    total = len(partners)
    out = {"n": n, "pairings": total,
           "mean_Y": Fraction(int(ys.sum()), total), "E_Y_exact": moments.expected_Y_exact(n),
           "mean_Y2": Fraction(int((ys * ys).sum()), total), "E_Y2_exact": moments.expected_Y2_exact(n)}
    ok = out["mean_Y"] == out["E_Y_exact"] and out["mean_Y2"] == out["E_Y2_exact"]
    for j in (1, 2, 3):
        emp = Fraction(int((ys * xs[:, j - 1]).sum()), total)
        ex = moments.expected_YXj_exact(n, j)
        out[f"mean_YX{j}"] = emp
        out[f"E_YX{j}_exact"] = ex
        ok = ok and emp == ex
    return out, "pass" if ok else "fail"


def cmd_moments(args):
    n = _need_n(args)
    y, y2, r = moments.report_Y(n), moments.report_Y2(n), moments.second_moment_ratio(n)

    def block(rep):
        return {"exact": _frac(rep.exact), "asymptotic": _real(rep.asymptotic), "ratio": _real(rep.ratio),
                "log_exact": _real(rep.log_exact), "log_asymptotic": _real(rep.log_asymptotic)}

    ratio2 = block(r)
    ratio2["distance_to_limit"] = _real(moments.second_moment_ratio_distance(n))
    return {"n": n, "E_Y": block(y), "E_Y2": block(y2), "ratio2": ratio2}, "ok"


def _need_n(args):
    if args.n is None:
        raise UsageError(f"{args.command} needs --n")
    return args.n


def _laplace_table(ns):
    rows = []
    for n in ns:
        log_lap = laplace.log_laplace_approximation(n)
        log_ex = moments.log_fraction(moments.expected_Y2_exact(n))
        prof = laplace.summand_profile(n)
        rows.append({"n": n, "log_laplace": log_lap, "log_exact": log_ex, "log_ratio": log_ex - log_lap,
                     "peak_A": prof["peak"][0], "peak_B": prof["peak"][1], "peak_error_factor": prof["peak_ratio"]})
    return rows


def cmd_laplace(args):
    rep = laplace.find_stationary_points()
    hess = rep.hessian_at_max
    ns = args.ns or [30, 60, 120, 240]
    table = _laplace_table(ns)
    errs = [abs(r["log_ratio"]) for r in table]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    payload = {
        "stationary_points": [{"a": p.a, "b": p.b, "f": v} for p, v in rep.points],
        "global_max": {"a": rep.global_max.a, "b": rep.global_max.b, "f": rep.global_max_value},
        "hessian": {"faa": hess.faa, "fab": hess.fab, "fbb": hess.fbb},
        "det": hess.det,
        "eigenvalues": list(hess.eigenvalues()),
        "boundary_maxima": [{"segment": s, "a": p.a, "b": p.b, "f": v} for s, p, v in rep.boundary_maxima],
        "corners": [{"a": p.a, "b": p.b, "f": v} for p, v in rep.corners],
        "convergence": table,
        "log_ratio_decreasing": decreasing,
    }
    ok = (hess.det == 81 and abs(rep.global_max.a - 1 / 9) < 1e-9 and abs(rep.global_max.b - 1 / 3) < 1e-9
          and decreasing)
    if args.format == "csv":
        payload["_csv"] = table
    return payload, "pass" if ok else "fail"


def cmd_cycles(args):
    n = _need_n(args)
    reps = args.reps or 1000
    jmax = args.jmax or 3
    rows = cycles.monte_carlo_cycle_means(n, args.d, reps, jmax, args.seed, threads=args.threads)
    payload = {"n": n, "d": args.d, "reps": reps, "seed": args.seed, "rows": rows}
    if args.format != "json":
        payload["_csv"] = [{k: r[k] for k in ("j", "lambda_theory", "mean", "stderr", "dispersion")} for r in rows]
    return payload, "ok"


def cmd_verify_conditioning(args):
    J = args.J or 50
    n = args.n if args.n is not None else 240
    rep = moments.conditioning_checklist(J=J, n=n)
    if args.reps:
        mc = cycles.monte_carlo_cycle_means(args.cycles_n, 4, args.reps, 3, args.seed, threads=args.threads)
        ok1 = all(abs(r["mean"] - r["lambda_theory"]) <= 3 * r["stderr"] for r in mc)
        rep["conditions"]["1"] = {"status": "pass" if ok1 else "fail", "n": args.cycles_n, "rows": mc}
    statuses = [c["status"] for c in rep["conditions"].values()]
    return rep, "fail" if "fail" in statuses else "pass"


def cmd_gallery(args):
    items = gallery.gallery()
    if args.export:
        for ng in items:
            if ng.name == args.export:
                return {"name": ng.name, "_text": ng.graph.to_edgelist()}, "ok"
        raise UsageError(f"unknown gallery graph {args.export!r}; have {[g.name for g in items]}")
    res = [gallery.verify_named(ng) for ng in items]
    return {"graphs": res}, "pass" if all(r["status"] == "pass" for r in res) else "fail"


def cmd_experiment(args):
    if not args.config:
        raise UsageError("experiment needs a config path")
    path = args.config
    if path == "paper-repro":
        text = resources.files("s3decomp").joinpath("configs/paper-repro.cfg").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    jobs = parse_config(text)
    log = args.out or "results.jsonl"
    summary = []
    for name, argv in jobs:
        rec = execute(argv)
        rec.parameters["name"] = name
        append_record(log, rec)
        summary.append({"name": name, "command": rec.command, "status": rec.status})
    failed = any(s["status"] == "fail" for s in summary)
    return {"config": path, "records": len(summary), "log": log, "runs": summary}, "fail" if failed else "ok"


def parse_config(text: str):
    """Lines of the form ``name: subcommand --flag value ...``; ``#`` starts a comment."""
    jobs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, rest = line.partition(":")
        try:
            argv = shlex.split(rest)
        except ValueError as exc:
            raise UsageError(f"config line {lineno}: {raw!r} ({exc})")
        if not sep or not name.strip() or not argv or argv[0] not in COMMANDS or argv[0] == "experiment":
            raise UsageError(f"config line {lineno}: {raw!r}")
        try:
            build_parser().parse_args(argv)
        except SystemExit:
            raise UsageError(f"config line {lineno}: {raw!r}")
        jobs.append((name.strip(), argv))
    return jobs


def append_record(path: str, rec: ExperimentRecord):
    if isinstance(rec.results, dict):
        rec.results = {k: v for k, v in rec.results.items() if k not in ("_csv", "_text")}
    with open(path, "a") as fh:
        fh.write(json.dumps(_jsonable(asdict(rec)), sort_keys=True) + "\n")


HANDLERS = {
    "sample": cmd_sample,
    "decompose": cmd_decompose,
    "count": cmd_count,
    "moments": cmd_moments,
    "laplace": cmd_laplace,
    "cycles": cmd_cycles,
    "verify-conditioning": cmd_verify_conditioning,
    "gallery": cmd_gallery,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--d", type=int, default=4)
    common.add_argument("--j", type=int)
    common.add_argument("--jmax", type=int)
    common.add_argument("--reps", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count())
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="append an ExperimentRecord (JSONL) to PATH")

    parser = argparse.ArgumentParser(prog="s3decomp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("sample", parents=[common], help="sample a configuration")
    sp.add_argument("--replicate", type=int, default=0)
    sp.add_argument("--simple", action="store_true", help="reject until the multigraph is simple")
    sp = sub.add_parser("decompose", parents=[common], help="find an S3-decomposition")
    sp.add_argument("--graph", help="edge list file, one 'u v' per line, 0-indexed")
    sp.add_argument("--random", action="store_true", help="fraction decomposable over random simple graphs")
    sp = sub.add_parser("count", parents=[common], help="count (3,0)-orientations")
    sp.add_argument("--pairing", help="pairing JSON {n, d, partner}")
    sp.add_argument("--exhaustive", action="store_true", help="average over every configuration")
    sub.add_parser("moments", parents=[common], help="exact and asymptotic moments of Y")
    sp = sub.add_parser("laplace", parents=[common], help="stationary points and Laplace estimate")
    sp.add_argument("--ns", type=int, nargs="+")
    sub.add_parser("cycles", parents=[common], help="Monte Carlo short-cycle means")
    sp = sub.add_parser("verify-conditioning", parents=[common], help="small subgraph conditioning checklist")
    sp.add_argument("--J", type=int)
    sp.add_argument("--cycles-n", type=int, default=3000)
    sp = sub.add_parser("gallery", parents=[common], help="verify the explicit graphs")
    sp.add_argument("--export", metavar="NAME")
    sp = sub.add_parser("experiment", parents=[common], help="run a config of invocations")
    sp.add_argument("config", nargs="?", help="config file, or 'paper-repro' for the bundled one")
    return parser


def execute(argv) -> ExperimentRecord:
    args = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "out", "threads")}
    payload, status = HANDLERS[args.command](args)
    return ExperimentRecord(timestamp=time.strftime("%Y-%m-%dT%H:%M:%S%z"), command=args.command,
                            parameters=params, results=payload, version=__version__, status=status)


def _emit(payload, fmt, stream):
    if isinstance(payload, dict) and "_text" in payload:
        stream.write(payload["_text"])
        return
    if fmt == "csv" and isinstance(payload, dict) and "_csv" in payload:
        rows = payload["_csv"]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _jsonable(v) for k, v in r.items()})
        stream.write(buf.getvalue())
        return
    if isinstance(payload, dict):
        payload = {k: v for k, v in payload.items() if k != "_csv"}
    stream.write(json.dumps(_jsonable(payload), indent=2) + "\n")


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        rec = execute(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    _emit(rec.results, args.format, stdout)
    if args.out and args.command != "experiment":
        append_record(args.out, rec)
    return 1 if rec.status in ("fail", "infeasible") else 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
