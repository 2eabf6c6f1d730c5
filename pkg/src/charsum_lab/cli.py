"""Command-line entry point: ``charsum-lab <subcommand> ...``.

JSON goes to stdout (CSV for path and grid dumps); every run also writes a
manifest with the full argument set and a digest of the output.  Exit codes:
0 success, 1 numeric failure, 2 argument error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2
SUBCOMMANDS = ("charsum", "process", "mahler", "cover", "lq", "primescan", "repro")
DEFAULT_SEED = 1
MANIFEST_DIR_ENV = "CHARSUM_LAB_MANIFEST_DIR"
THREADS_ENV = "CHARSUM_LAB_THREADS"


# JSON output schema per (command, action); files live in charsum_lab/schemas
SCHEMAS = {
    ("charsum", "eval"): "charsum_eval",
    ("charsum", "poisson-check"): "charsum_poisson_check",
    ("process", "moments"): "process_moments",
    ("mahler", "finite-q"): "mahler_finite_q",
    ("mahler", "limit"): "mahler_limit",
    ("cover", "verify"): "cover_report",
    ("lq", "phi"): "lq_phi",
    ("lq", "argmin"): "lq_argmin",
    ("primescan", None): "primescan",
    ("repro", None): "repro",
}


def load_schema(name: str) -> dict:
    from importlib import resources

    return json.loads(resources.files("charsum_lab").joinpath("schemas", f"{name}.json")
                      .read_text(encoding="utf-8"))


class NumericFailure(RuntimeError):
    """Raised by a command whose computation ran but did not certify."""


# ---------------------------------------------------------------- output

def fmt_float(x: float) -> str:
    return format(x, ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits (NaN/inf as null)."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent, _level + 1) for v in seq) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj)) if math.isfinite(obj) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json({"re": obj.real, "im": obj.imag}, indent, _level)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_text(path: str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


@dataclass
class Outcome:
    stdout: str
    files: dict = field(default_factory=dict)   # path -> text
    seed: int | None = None


def json_outcome(obj, seed=None) -> Outcome:
    return Outcome(to_json(obj) + "\n", seed=seed)


# ---------------------------------------------------------------- commands

def cmd_charsum(args) -> Outcome:
    from .arith import character_table, gauss_sum
    from .charsum import MixedSumParams, f_normalized, poisson_truncated

    table = character_table(args.q)
    j = table.quadratic_index if args.chi == "quadratic" else int(args.chi)
    table.check_index(j)
    tau = gauss_sum(table, j).value
    K = args.K if args.K is not None else 20 * args.q
    if args.action == "eval":
        params = MixedSumParams(args.q, args.k, args.alpha, args.beta)
        direct = f_normalized(table, j, params, args.t)
        approx, bound = poisson_truncated(table, j, params, args.t, K, tau)
        return json_outcome({"q": args.q, "chi": j, "k": args.k, "alpha": args.alpha,
                             "beta": args.beta, "t": args.t, "K": K,
                             "value_re": direct.real, "value_im": direct.imag,
                             "poisson_re": approx.real, "poisson_im": approx.imag,
                             "error_bound": bound, "error": abs(approx - direct)})
    rng = np.random.default_rng(args.seed)
    points = []
    for _ in range(args.points):
        k = int(rng.integers(0, args.q))
        t = float(rng.uniform(0, 1))
        params = MixedSumParams(args.q, k, args.alpha, args.beta)
        direct = f_normalized(table, j, params, t)
        approx, bound = poisson_truncated(table, j, params, t, K, tau)
        points.append({"k": k, "t": t, "value_re": approx.real, "value_im": approx.imag,
                       "direct_re": direct.real, "direct_im": direct.imag,
                       "error": abs(approx - direct), "error_bound": bound})
    worst = max(points, key=lambda p: p["error"])
    within = all(p["error"] <= p["error_bound"] for p in points)
    return json_outcome({"q": args.q, "chi": j, "K": K, "alpha": args.alpha, "beta": args.beta,
                         "value_re": worst["value_re"], "value_im": worst["value_im"],
                         "error_bound": worst["error_bound"], "max_error": worst["error"],
                         "within_bound": within, "points": points}, seed=args.seed)


def _model_k(model: str, k):
    return k if model == "steinhaus_k" else None


def cmd_process(args) -> Outcome:
    from .processes import MomentSpec, empirical_moment, finite_q_moment, sample_paths, \
        theoretical_moment

    k = _model_k(args.model, args.k)
    if args.action == "sample":
        grid = np.linspace(0.0, 1.0, args.grid_size)
        paths = sample_paths(args.model, k, args.alpha, args.beta, args.n_trunc, grid,
                             args.seed, args.samples)
        rows = ((p.index, t, v.real, v.imag) for p in paths for t, v in zip(p.grid, p.values))
        text = csv_text(["sample", "t", "re", "im"], rows)
        if args.csv:
            return Outcome("", {args.csv: text}, seed=args.seed)
        return Outcome(text, seed=args.seed)
    raw = args.spec_json
    if raw.startswith("@"):
        raw = Path(raw[1:]).read_text(encoding="utf-8")
    try:
        spec = MomentSpec.from_dict(json.loads(raw))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"bad --spec-json: {exc}") from exc
    th = theoretical_moment(args.model, k, args.alpha, args.beta, spec, args.L)
    out = {"model": args.model, "k": k, "alpha": args.alpha, "beta": args.beta,
           "spec": spec.to_dict(), "L": args.L, "theoretical": th,
           "empirical": None, "stderr": None, "finite_q": None}
    if args.samples > 0:
        grid = np.array(sorted(set(spec.points)))
        paths = sample_paths(args.model, k, args.alpha, args.beta, args.n_trunc, grid,
                             args.seed, args.samples)
        est, se = empirical_moment(paths, spec)
        out["empirical"], out["stderr"] = est, se
    if args.q is not None:
        fk = args.k if args.finite_model == "vary_chi" else None
        out["finite_q"] = finite_q_moment(args.q, args.finite_model, fk, args.alpha, args.beta,
                                          spec, args.L)
    return json_outcome(out, seed=args.seed)


FIX_NAMES = {"none": "none", "+": "plus", "-": "minus", "plus": "plus", "minus": "minus"}


def cmd_mahler(args) -> Outcome:
    from .logint import mahler_finite_q, mahler_limit_estimate

    if args.action == "finite-q":
        fix = FIX_NAMES[args.fix]
        log_value = mahler_finite_q(args.q, args.alpha, args.beta, fix)
        return json_outcome({"q": args.q, "alpha": args.alpha, "beta": args.beta, "fix": fix,
                             "log_value": log_value, "value": math.exp(log_value)})
    est = mahler_limit_estimate(args.alpha, args.beta, n_trunc=args.n_trunc,
                                n_samples=args.samples, epsilon=args.eps, seed=args.seed)
    out = json_outcome(est.to_dict(), seed=args.seed)
    if args.csv:
        out.files[args.csv] = csv_text(["sample", "log_integral"], enumerate(est.per_sample))
    return out


def cmd_cover(args) -> Outcome:
    from .diffcover import verify_all_patterns

    case = {"generic": "generic_M2", "special": "special_M28"}[args.case]
    report = verify_all_patterns(case, args.alpha, args.beta)
    summary = report.summary()
    out = json_outcome(summary)
    if args.csv:
        rows = ((c.pattern.label(), iv.lo, iv.hi, iv.part, iv.margin)
                for c in report.certificates for iv in c.intervals)
        out.files[args.csv] = csv_text(["pattern", "lo", "hi", "part", "margin"], rows)
    if report.n_certified != len(report.certificates):
        raise NumericFailure(out.stdout)
    return out


def cmd_lq(args) -> Outcome:
    from .lqnorms import argmin_scan, m2r, phi_k_detailed

    if args.action == "phi":
        res = phi_k_detailed(args.alpha, args.k, args.L)
        return json_outcome(res.__dict__)
    if args.action == "argmin":
        res = argmin_scan(args.k, args.grid, args.L)
        return json_outcome({"k": res.k, "alpha_star": res.alpha_star, "flat": res.flat,
                             "alphas": res.alphas, "values": res.values})
    alphas = np.linspace(0.0, 0.5, args.grid)
    rows = []
    for r in args.r:
        for t in args.t:
            rows.extend(("m2r", r, t, a, m2r(a, t, r)) for a in alphas)
    for k in args.phi_k:
        rows.extend(("phi", k, "", a, phi_k_detailed(a, k, args.L).value) for a in alphas)
    text = csv_text(["quantity", "order", "t", "alpha", "value"], rows)
    if args.csv:
        return Outcome("", {args.csv: text})
    return Outcome(text)


def cmd_primescan(args) -> Outcome:
    from .primescan import ScanConfig, parse_theta, uniformity_report

    cfg = ScanConfig(int(args.xmax), parse_theta(args.theta), degree=args.deg,
                     coeff_bound=args.coeff_bound)
    rep = uniformity_report(cfg, threads=args.threads)
    out = json_outcome(rep.to_dict())
    rows = zip(rep.lo, rep.hi, rep.max_hits, rep.mean_hits)
    text = csv_text(["lo", "hi", "max_hits", "mean_hits"], rows)
    out.files[args.csv or "primescan.csv"] = text
    if rep.partial:
        raise NumericFailure(out.stdout)
    return out


def cmd_repro(args) -> Outcome:
    from .acceptance import run_all

    only = {int(x) for x in args.only.split(",")} if args.only else None
    results = run_all(quick=args.quick, only=only,
                      report=lambda r: print(r.line(), file=sys.stderr, flush=True))
    table = "\n".join(r.line() for r in results)
    n_pass = sum(r.passed for r in results)
    text = f"{table}\n{n_pass}/{len(results)} criteria pass\n"
    out = Outcome(text, seed=DEFAULT_SEED)
    if args.json:
        out.files[args.json] = to_json({"quick": args.quick, "passed": n_pass,
                                        "total": len(results),
                                        "criteria": [r.to_dict() for r in results]}) + "\n"
    if n_pass != len(results):
        raise NumericFailure(text)
    return out


# ---------------------------------------------------------------- parser

def _positive_int(s: str) -> int:
    v = int(float(s))
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x]


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="charsum-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help=f"worker cap (default: ${THREADS_ENV} or 1)")
    p.add_argument("--manifest", default=None,
                   help=f"manifest path (default: ${MANIFEST_DIR_ENV} or ./manifests)")
    sub = p.add_subparsers(dest="command", required=True)

    # charsum
    cs = sub.add_parser("charsum", help="normalized mixed character sums")
    cs_sub = cs.add_subparsers(dest="action", required=True)
    for name in ("eval", "poisson-check"):
        a = cs_sub.add_parser(name)
        a.add_argument("--q", type=int, required=True)
        a.add_argument("--chi", default="quadratic", help="character index or 'quadratic'")
        a.add_argument("--alpha", type=float, default=0.2)
        a.add_argument("--beta", type=float, default=1.1)
        a.add_argument("--K", type=_positive_int, default=None, help="Poisson truncation (20q)")
        if name == "eval":
            a.add_argument("--k", type=int, required=True)
            a.add_argument("--t", type=float, required=True)
        else:
            a.add_argument("--points", type=_positive_int, default=20)
            a.add_argument("--seed", type=int, default=DEFAULT_SEED)
        a.set_defaults(func=cmd_charsum)

    # process
    pr = sub.add_parser("process", help="limiting random processes")
    pr_sub = pr.add_subparsers(dest="action", required=True)
    for name in ("sample", "moments"):
        a = pr_sub.add_parser(name)
        a.add_argument("--model", choices=("steinhaus_k", "steinhaus_iid", "rademacher"),
                       default="rademacher")
        a.add_argument("--k", type=int, default=0)
        a.add_argument("--alpha", type=float, default=0.2)
        a.add_argument("--beta", type=float, default=1.1)
        a.add_argument("--n-trunc", type=_positive_int, default=10_000)
        a.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if name == "sample":
            a.add_argument("--samples", type=_positive_int, default=10)
            a.add_argument("--grid-size", type=_positive_int, default=257)
            a.add_argument("--csv", default=None)
        else:
            a.add_argument("--spec-json", required=True,
                           help='e.g. {"points": [0.3], "r": [1], "s": [1]} or @file')
            a.add_argument("--L", type=_positive_int, default=30)
            a.add_argument("--samples", type=int, default=0)
            a.add_argument("--q", type=int, default=None)
            a.add_argument("--finite-model", choices=("vary_chi", "vary_k_quadratic"),
                           default="vary_k_quadratic")
        a.set_defaults(func=cmd_process)

    # mahler
    mh = sub.add_parser("mahler", help="normalized Mahler measures")
    mh_sub = mh.add_subparsers(dest="action", required=True)
    a = mh_sub.add_parser("finite-q")
    a.add_argument("--q", type=int, required=True)
    a.add_argument("--alpha", type=float, default=0.2)
    a.add_argument("--beta", type=float, default=1.1)
    a.add_argument("--fix", choices=("none", "+", "-"), default="none")
    a.set_defaults(func=cmd_mahler)
    a = mh_sub.add_parser("limit")
    a.add_argument("--alpha", type=float, default=0.2)
    a.add_argument("--beta", type=float, default=1.1)
    a.add_argument("--samples", type=_positive_int, default=20_000)
    a.add_argument("--n-trunc", type=_positive_int, default=10_000)
    a.add_argument("--eps", type=float, default=1e-4)
    a.add_argument("--seed", type=int, default=DEFAULT_SEED)
    a.add_argument("--csv", default=None, help="per-sample log integrals")
    a.set_defaults(func=cmd_mahler)

    # cover
    cv = sub.add_parser("cover", help="cover certificates for the differential operator")
    cv_sub = cv.add_subparsers(dest="action", required=True)
    a = cv_sub.add_parser("verify")
    a.add_argument("--case", choices=("generic", "special"), required=True)
    a.add_argument("--alpha", type=float, default=0.2)
    a.add_argument("--beta", type=float, default=1.1)
    a.add_argument("--csv", default=None, help="per-pattern certificate intervals")
    a.set_defaults(func=cmd_cover)

    # lq
    lq = sub.add_parser("lq", help="limiting L^{2k} norms")
    lq_sub = lq.add_subparsers(dest="action", required=True)
    a = lq_sub.add_parser("phi")
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--alpha", type=float, required=True)
    a.add_argument("--L", type=int, default=30)
    a.set_defaults(func=cmd_lq)
    a = lq_sub.add_parser("argmin")
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--grid", type=int, default=33)
    a.add_argument("--L", type=int, default=30)
    a.set_defaults(func=cmd_lq)
    a = lq_sub.add_parser("m2r-grid")
    a.add_argument("--grid", type=int, default=33)
    a.add_argument("--r", type=_ints, default=[1, 2])
    a.add_argument("--t", type=_floats, default=[0.1, 0.3, 0.5])
    a.add_argument("--phi-k", type=_ints, default=[], help="also tabulate phi_k")
    a.add_argument("--L", type=int, default=30)
    a.add_argument("--csv", default=None)
    a.set_defaults(func=cmd_lq)

    # primescan
    ps = sub.add_parser("primescan", help="prime counts for f(k_p) = 0 mod p")
    ps.add_argument("--theta", default="sqrt2", help="sqrt2, golden, e or a number")
    ps.add_argument("--deg", type=int, default=2)
    ps.add_argument("--coeff-bound", type=int, default=10)
    ps.add_argument("--xmax", type=float, default=1e6)
    ps.add_argument("--csv", default=None, help="dyadic table (default primescan.csv)")
    ps.set_defaults(func=cmd_primescan)

    # repro
    rp = sub.add_parser("repro", help="run the acceptance suite")
    rp.add_argument("--quick", action="store_true", help="fewer Monte Carlo samples")
    rp.add_argument("--only", default=None, help="comma-separated criterion numbers")
    rp.add_argument("--json", default=None, help="write the full report here")
    rp.set_defaults(func=cmd_repro)
    return p


# ---------------------------------------------------------------- manifest

def _clean_params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "manifest")}


def manifest_path(args, digest: str) -> Path:
    if args.manifest:
        return Path(args.manifest)
    base = Path(os.environ.get(MANIFEST_DIR_ENV, "manifests"))
    name = args.command + (f"-{args.action}" if getattr(args, "action", None) else "")
    return base / f"{name}-{digest[:12]}.json"


def write_manifest(args, argv, outcome: Outcome, wall: float, status: int) -> Path:
    digest = hashlib.sha256(outcome.stdout.encode("utf-8"))
    for path in sorted(outcome.files):
        digest.update(outcome.files[path].encode("utf-8"))
    hexd = digest.hexdigest()
    manifest = {
        "command": args.command,
        "argv": list(argv),
        "parameters": _clean_params(args),
        "seed": outcome.seed,
        "version": __version__,
        "wall_time": wall,
        "output_digest": hexd,
        "exit_code": status,
    }
    path = manifest_path(args, hexd)
    write_text(str(path), to_json(manifest) + "\n")
    return path


def resolve_threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:       # argparse has printed usage already
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    args.threads = resolve_threads(args.threads)
    start = time.perf_counter()
    status = EXIT_OK
    try:
        outcome = args.func(args)
    except NumericFailure as exc:
        outcome, status = Outcome(str(exc)), EXIT_NUMERIC
    except (ValueError, IndexError, KeyError, OSError) as exc:
        print(f"charsum-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, ArithmeticError) as exc:
        print(f"charsum-lab: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path, text in outcome.files.items():
        write_text(path, text)
    sys.stdout.write(outcome.stdout)
    sys.stdout.flush()
    write_manifest(args, argv, outcome, time.perf_counter() - start, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
