"""Command-line front end: ``symsystole <command> --config DOMAIN [options]``.

Every command prints (or writes to ``--out``) one JSON report embedding the
package version, the domain specification and its SHA-256, the tolerances
and the RNG seed. Trajectories go to CSV.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 property
violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .config import canonical_json, load_domain, load_schema, spec_hash
from .domains import ball_sandwich, convexity_check, domain_audit
from .errors import ConvergenceError, DomainError, FlowError, InvolutionError, SymmetryDiagnosticError
from .flow import DEFAULT_TOL, flow
from .orbits import SearchConfig, chord_shoot, close_chord, symmetric_ratio, symmetric_systole_estimate, systole_estimate
from .verify import verify_convex

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_PROPERTY = 0, 1, 2, 3
COMMANDS = ("info", "flow", "shoot", "systole", "ratio", "scan", "verify-convex")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="domain specification: JSON file or inline JSON object")
    common.add_argument("--out", help="output directory (default: report on stdout)")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tol", type=_positive(float), default=DEFAULT_TOL, help="integration tolerance")
    common.add_argument("--residual-tol", type=_positive(float), default=1e-9, help="closure residual tolerance")
    common.add_argument("--ceiling", type=_positive(float), default=None, help="period ceiling")
    common.add_argument("--seeds", type=_positive(int), default=None, help="number of search seeds")
    common.add_argument("--jobs", type=_positive(int), default=1, help="worker processes")

    parser = _Parser(prog="symsystole", description="Symmetric systoles of starshaped domains.")
    parser.add_argument("--version", action="version", version=f"symsystole {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("info", parents=[common], help="audit a domain")
    p = sub.add_parser("flow", parents=[common], help="integrate the Reeb flow and write a CSV trajectory")
    p.add_argument("--z0", type=float, nargs="+", help="start point (projected to the boundary); default: a fixed-locus point")
    p.add_argument("--time", type=float, required=True, help="flow time")
    p.add_argument("--samples", type=_positive(int), default=None, help="uniform output samples (default: integrator steps)")
    sub.add_parser("shoot", parents=[common], help="chords from a fixed-locus seed grid")
    sub.add_parser("systole", parents=[common], help="systole estimate")
    sub.add_parser("ratio", parents=[common], help="systole, symmetric systole and their ratio")
    p = sub.add_parser("scan", parents=[common], help="ratio along a one-parameter family")
    p.add_argument("--param", required=True, help="specification key to vary, e.g. epsilon")
    p.add_argument("--values", type=float, nargs="+", required=True)
    p = sub.add_parser("verify-convex", parents=[common], help="check 1 <= ratio <= 2 on random convex domains")
    p.add_argument("--samples", type=_positive(int), default=30)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--amplitude", type=_positive(float), default=0.25)
    p.add_argument("--ratio-tol", type=_positive(float), default=1e-6)
    return parser


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        ceiling=args.ceiling,
        seeds=args.seeds,
        rng_seed=args.seed,
        tol=args.tol,
        residual_tol=args.residual_tol,
        jobs=args.jobs,
    )


def _load(args):
    if not args.config:
        raise UsageError("--config is required for this command")
    text = args.config
    if not text.lstrip().startswith("{"):
        path = Path(text)
        if not path.is_file():
            raise UsageError(f"config file not found: {text}")
        text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from exc
    try:
        return doc, load_domain(doc)
    except (DomainError, InvolutionError) as exc:
        raise UsageError(str(exc)) from exc


def _report(args, doc, result) -> dict:
    report = {
        "tool": "symsystole",
        "version": __version__,
        "command": args.command,
        "rng_seed": args.seed,
        "domain_spec": doc,
        "domain_spec_sha256": spec_hash(doc) if doc is not None else None,
        "tolerances": {"integration": args.tol, "residual": args.residual_tol, "ceiling": args.ceiling},
        "result": result,
    }
    if hasattr(args, "ratio_tol"):
        report["tolerances"]["ratio"] = args.ratio_tol
    report = _jsonable(report)
    jsonschema.validate(report, load_schema("report"))
    return report


def _emit(args, report, csv_writers=()):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text)
        for name, write in csv_writers:
            write(out / name)
    else:
        sys.stdout.write(text)


def _orbit_csvs(certs: dict):
    writers = []
    for name, orbit in certs.items():
        if orbit is not None:
            ts = np.linspace(0.0, orbit.period, 513)
            writers.append((f"certificate_{name}.csv", lambda path, o=orbit, t=ts: o.trajectory.to_csv(path, t)))
    return writers


def cmd_info(args):
    doc, sd = _load(args)
    dom = sd.domain
    cc = convexity_check(dom, seed=args.seed)
    r_in, r_out = ball_sandwich(dom, seed=args.seed)
    result = {
        "label": dom.label,
        "dimension": 2 * dom.n,
        "involution": sd.involution.to_dict(),
        "invariance": sd.audit,
        "audit": domain_audit(dom, seed=args.seed),
        "convexity": cc.to_dict(),
        "ball_sandwich": {"r_in": r_in, "r_out": r_out, "capacity_bounds": [math.pi * r_in**2, math.pi * r_out**2]},
    }
    _emit(args, _report(args, doc, result))
    return EXIT_OK


def cmd_flow(args):
    doc, sd = _load(args)
    dom = sd.domain
    if args.z0 is None:
        z0 = sd.fixed_seeds(1, args.seed, structured=True)[0]
    else:
        if len(args.z0) != 2 * dom.n:
            raise UsageError(f"--z0 needs {2 * dom.n} coordinates")
        z0 = np.asarray(args.z0, dtype=float)
        if not np.any(z0):
            raise UsageError("--z0 must be nonzero")
        z0 = dom.project(z0)
    traj = flow(dom, z0, args.time, args.tol)
    times = None
    if args.samples:
        times = np.linspace(0.0, args.time, args.samples)
    result = {
        "start": traj.start,
        "end": traj.end,
        "time": args.time,
        "steps": traj.steps,
        "energy_drift": traj.energy_drift,
        "closure_gap": float(np.linalg.norm(traj.end - traj.start)),
        "csv": "trajectory.csv" if args.out else None,
    }
    report = _report(args, doc, result)
    if args.out:
        _emit(args, report, [("trajectory.csv", lambda path: traj.to_csv(path, times))])
    else:
        # no output directory: the CSV itself goes to stdout
        traj.to_csv(sys.stdout, times)
    return EXIT_OK


def cmd_shoot(args):
    doc, sd = _load(args)
    cfg = _search_config(args)
    dom = sd.domain
    _, r_out = ball_sandwich(dom, samples=1024, seed=args.seed)
    t_max = (args.ceiling or 3 * math.pi * r_out**2) / 2
    count = args.seeds or 8 * dom.n
    rows = []
    for k, seed in enumerate(sd.fixed_seeds(count, args.seed, structured=True)):
        for c in chord_shoot(sd, seed, t_max, min(args.residual_tol, 1e-10), cfg):
            row = {"seed_index": k, **c.to_dict()}
            try:
                row["closed_period"] = close_chord(c, sd, cfg).period
            except (ConvergenceError, ValueError):
                row["closed_period"] = None
            rows.append(row)
    rows.sort(key=lambda r: (r["duration"], r["seed_index"]))
    result = {"chord_time_ceiling": t_max, "seeds": count, "chords": rows}
    _emit(args, _report(args, doc, result))
    return EXIT_OK


def cmd_systole(args):
    doc, sd = _load(args)
    cfg = _search_config(args)
    est = systole_estimate(sd.domain, cfg, rho=sd.involution)
    sym = symmetric_systole_estimate(sd, cfg, orbits=[])
    result = {
        "systole_estimate": est.value,
        "symmetric_systole_estimate": sym.value,
        "estimate_kind": "upper bound from a heuristic multi-start search",
        "certificates": {
            "systole": None if est.certificate is None else est.certificate.to_dict(),
            "symmetric_systole": None if sym.certificate is None else sym.certificate.to_dict(),
        },
        "search_coverage": {"orbit_search": est.coverage, "chord_search": sym.coverage},
    }
    _emit(args, _report(args, doc, result), _orbit_csvs({"systole": est.certificate}))
    return EXIT_OK if math.isfinite(est.value) else EXIT_NUMERIC


def cmd_ratio(args):
    doc, sd = _load(args)
    report = symmetric_ratio(sd, _search_config(args))
    result = report.to_dict()
    _emit(args, _report(args, doc, result), _orbit_csvs(report.certificates))
    if not math.isfinite(report.ratio):
        return EXIT_NUMERIC
    if report.ratio < 1 - 1e-9 or report.ratio_within_bounds is False:
        return EXIT_PROPERTY
    return EXIT_OK


def cmd_scan(args):
    doc, _ = _load(args)
    rows = []
    for value in args.values:
        spec = {**doc, args.param: value}
        try:
            sd = load_domain(spec)
        except (DomainError, InvolutionError) as exc:
            raise UsageError(f"{args.param}={value}: {exc}") from exc
        rep = symmetric_ratio(sd, _search_config(args))
        sys_cert = rep.certificates.get("systole")
        rows.append(
            {
                args.param: value,
                "systole": rep.systole_estimate,
                "symmetric_systole": rep.symmetric_systole_estimate,
                "ratio": rep.ratio,
                "systole_orbit_symmetric": None if sys_cert is None else sys_cert.symmetric,
                "convex": rep.convex,
                "domain_spec_sha256": spec_hash(spec),
            }
        )
    ratios = [r["ratio"] for r in rows]
    result = {
        "parameter": args.param,
        "rows": rows,
        "ratio_increasing": bool(all(b > a for a, b in zip(ratios, ratios[1:]))),
    }
    _emit(args, _report(args, doc, result))
    return EXIT_OK


def cmd_verify_convex(args):
    cfg = _search_config(args)
    if cfg.seeds is None:
        cfg.seeds = 16 * args.n
    results, hist = verify_convex(args.samples, args.n, args.seed, cfg, args.amplitude, args.ratio_tol)
    violations = [r for r in results if not (r.ratio_ok and r.sandwich_ok and r.convex)]
    result = {
        "samples": args.samples,
        "n": args.n,
        "amplitude": args.amplitude,
        "ratios": [r.ratio for r in results],
        "histogram": hist,
        "all_within_bounds": not violations,
        "results": [r.to_dict() for r in results],
        "violations": [r.to_dict() for r in violations],
    }
    _emit(args, _report(args, None, result))
    for v in violations:
        sys.stderr.write(f"violation in sample {v.index}: {canonical_json(_jsonable(v.spec))}\n")
    return EXIT_PROPERTY if violations else EXIT_OK


HANDLERS = {
    "info": cmd_info,
    "flow": cmd_flow,
    "shoot": cmd_shoot,
    "systole": cmd_systole,
    "ratio": cmd_ratio,
    "scan": cmd_scan,
    "verify-convex": cmd_verify_convex,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"symsystole: error: {exc}\n")
        return EXIT_USAGE
    except (FlowError, ConvergenceError, SymmetryDiagnosticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"symsystole: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
