"""Command-line driver.

Exit codes: 0 when every checked residual is under tolerance, 1 on a residual
failure, 2 on usage or config errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import ConfigError, resolve_manifold, spec_to_dict
from .expr import ExprDomainError
from .family import PRESETS, CoeffVector, Preset, coefficients, preset_coefficients
from .geometry import (fd_christoffel, frame, metric_compatibility_residual,
                       riemann_symmetry_residuals, sample_points)
from .nk import LEMMA_TAGS, kenmotsu_residual, lemma_residuals, verify_nullity
from .pseudosym import ConditionSpec, dichotomy_check, fit_L, summarize_fits
from .tables import TABLES, build_table
from .tensors import max_abs

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# default tolerance per suite family; --tol overrides all of them
DEFAULT_TOL = {"geometry": 1e-9, "fd": 1e-5, "nullity": 1e-9, "lemma": 1e-8, "structure": 1e-9}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _threads() -> int:
    raw = os.environ.get("NULLITY_FORGE_THREADS", "")
    try:
        return max(1, int(raw)) if raw else min(8, os.cpu_count() or 1)
    except ValueError:
        raise UsageError(f"NULLITY_FORGE_THREADS must be an integer, got {raw!r}") from None


def _pmap(fn, items):
    """Ordered parallel map over a work list."""
    items = list(items)
    workers = min(_threads(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- verify ---------------------------------------------------------------------------

def _point_suites(spec, p):
    """Every residual at one sample point: ``{suite id: (equation tag, family, value)}``."""
    fr = frame(spec, p)
    out = {}
    for key, v in riemann_symmetry_residuals(fr).items():
        out[f"geometry/{key}"] = (None, "geometry", v)
    out["geometry/metric-compatibility"] = (None, "geometry",
                                            metric_compatibility_residual(spec, p))
    fd = fd_christoffel(spec, p)
    scale = max(1.0, max_abs(fd))
    out["geometry/christoffel-fd"] = (None, "fd", max_abs(fr.gamma - fd) / scale)
    out["geometry/ricci-symmetry"] = (None, "geometry", max_abs(fr.S.data - fr.S.data.T))
    if spec.has_xi:
        for tag, v in verify_nullity(fr).items():
            base = tag.split("[")[0]
            out[f"nullity/{tag}"] = (base, "nullity", v)
        worst = {tag: 0.0 for tag in LEMMA_TAGS}
        if spec.n >= 3:
            for preset in PRESETS:
                res = lemma_residuals(fr, preset_coefficients(preset, spec.n))
                for tag in LEMMA_TAGS:
                    worst[tag] = max(worst[tag], res[tag])
            for tag in LEMMA_TAGS:
                out[f"lemma/{tag}"] = (tag, "lemma", worst[tag])
        if spec.class_tag == "kenmotsu":
            out["structure/eq-str-9"] = ("eq-str-9", "structure", kenmotsu_residual(fr))
    return out


def run_verify(spec, points: int = 20, seed: int = 0, tol: float | None = None) -> dict:
    pts = sample_points(spec, points, seed)
    per_point = _pmap(lambda p: _point_suites(spec, p), pts)
    suites = []
    for sid in sorted(per_point[0]):
        tag, family, _ = per_point[0][sid]
        worst = max(pp[sid][2] for pp in per_point)
        limit = DEFAULT_TOL[family] if tol is None else tol
        suites.append({"id": sid, "paper_tag": tag, "max_residual": float(worst),
                       "tolerance": limit, "pass": bool(worst <= limit)})
    return {"manifold": spec_to_dict(spec), "points": [list(map(float, p)) for p in pts],
            "suites": suites, "fits": [], "tables": []}


# -- fit ------------------------------------------------------------------------------

def run_fit(spec, ta: str, tb: str, sigma: str, ell: int, ricci: bool, points: int = 20,
            seed: int = 0, dichotomy: bool = False, free=(1.0, -0.5),
            tol: float | None = None) -> dict:
    if spec.n < 3:
        raise UsageError("conditions need dimension at least 3")
    if sigma == "s":
        ell = max(ell, 1)
        kind = "T-RicciT-Sl" if ricci else "TT-Sl"
    else:
        ell = 0
        kind = "T-RicciT-g" if ricci else "TT-g"
    cond = ConditionSpec.from_presets(kind, ta, tb, spec.n, ell, free)
    pts = sample_points(spec, points, seed)

    def one(p):
        fr = frame(spec, p, max(3, ell))
        rep = fit_L(cond, fr)
        verdict = None
        if dichotomy:
            if fr.k is None:
                raise UsageError("--dichotomy needs a manifold with declared k and epsilon")
            verdict = dichotomy_check(fr, cond.tb, rep.L).as_dict()
        return rep, verdict

    results = _pmap(one, pts)
    reports = [r for r, _ in results]
    limit = 1e-8 if tol is None else tol
    failed = [i for i, r in enumerate(reports)
              if not r.degenerate and (r.L is None or r.residual > limit * max(1.0, r.rhs_norm))]
    fit = {
        "condition": cond.label(), "kind": kind, "ta": cond.ta_name, "tb": cond.tb_name,
        "ell": ell, "summary": summarize_fits(reports), "tolerance": limit,
        "per_point": [r.as_dict() for r in reports], "failed_points": failed,
        "pass": not failed,
    }
    if dichotomy:
        fit["dichotomy"] = [v for _, v in results]
        fit["pass"] = fit["pass"] and all(v["verdict"] != "violation" for _, v in results)
    return {"manifold": spec_to_dict(spec), "points": [list(map(float, p)) for p in pts],
            "suites": [], "fits": [fit], "tables": []}


# -- rendering ------------------------------------------------------------------------

def _num(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return format(x, ".3e") if x != 0 and (abs(x) < 1e-3 or abs(x) >= 1e6) else format(x, ".6f")
    return str(x)


def render_markdown(report: dict) -> str:
    lines = []
    m = report.get("manifold")
    if m:
        lines.append(f"# {m['name']} (n = {m['dimension']}, {len(report['points'])} points)")
        lines.append("")
    if report["suites"]:
        lines += ["| suite | tag | max residual | tolerance | pass |",
                  "|---|---|---|---|---|"]
        for s in report["suites"]:
            lines.append(f"| {s['id']} | {s['paper_tag'] or '-'} | {s['max_residual']:.1e} "
                         f"| {s['tolerance']:.0e} | {'yes' if s['pass'] else 'NO'} |")
        lines.append("")
    for f in report["fits"]:
        s = f["summary"]
        lines.append(f"## {f['condition']}")
        if s["mean_L"] is not None:
            lines.append(f"mean L = {s['mean_L']:.6f}, max deviation {_num(s['max_deviation'])}")
        lines.append(f"max residual {s['max_residual']:.1e}; degenerate: {s['degenerate']}/{s['points']} points")
        if "dichotomy" in f:
            verdicts = sorted({v["verdict"] for v in f["dichotomy"]})
            lines.append(f"dichotomy verdicts: {', '.join(verdicts)}")
        lines.append(f"pass: {'yes' if f['pass'] else 'NO'}")
        lines.append("")
    for t in report["tables"]:
        head = f"## {t['name']}: {t['title']} (n = {t['n']}"
        head += f", l = {t['ell']})" if "ell" in t else ")"
        lines += [head, "", "| M | L = | S = | mark | witnesses |", "|---|---|---|---|---|"]
        for row in t["rows"]:
            wit = "; ".join(
                f"{w['entry']}: " + (f"{w['residual']:.1e}" if w["applicable"] else w["reason"])
                for w in row["witnesses"]) or "-"
            lines.append(f"| {row['class']} | {row['L']} | {row['S']} | {row['mark']} | {wit} |")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def render_presets(n: int, free, fmt: str) -> str:
    rows = []
    for p in PRESETS:
        c = coefficients(p, n, *free) if p.parametric else coefficients(p, n)
        rows.append((p.value, c))
    if fmt == "json":
        return _dumps({"n": n, "free": list(free),
                       "presets": [{"name": name, **dict(zip(CoeffVector.names(), c.as_tuple()))}
                                   for name, c in rows]})
    width = max(len(name) for name, _ in rows)
    lines = [" ".join([f"{'preset':<{width}}"] + [f"{a:>16}" for a in CoeffVector.names()])]
    for name, c in rows:
        lines.append(" ".join([f"{name:<{width}}"] + [f"{format(v + 0.0, '.12g'):>16}"
                                                      for v in c.as_tuple()]))
    return "\n".join(lines) + "\n"


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _clean(obj):
    """Replace non-finite floats (JSON has none) by ``None``."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


# -- argument parsing ----------------------------------------------------------------

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nullity-forge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--manifold", required=True, help="built-in name or JSON config path")
        p.add_argument("--points", type=_positive_int, default=20)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=_positive_float, default=None,
                       help="override every residual tolerance")
        p.add_argument("--format", choices=("json", "markdown"), default="markdown")
        p.add_argument("--output", help="write the report here instead of stdout")

    p = sub.add_parser("presets", help="coefficients of all twenty presets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a0", type=float, default=1.0, help="free a0 of the parametric presets")
    p.add_argument("--a1", type=float, default=-0.5, help="free a1 of the parametric presets")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("verify", help="curvature, nullity and closed-form residual suites")
    common(p)

    p = sub.add_parser("fit", help="fit L in a pseudosymmetry condition")
    common(p)
    names = [x.value for x in PRESETS]
    p.add_argument("--ta", default="r", choices=names)
    p.add_argument("--tb", default="r", choices=names)
    p.add_argument("--sigma", choices=("g", "s"), default="g")
    p.add_argument("--ell", type=int, default=1, help="Ricci power when --sigma s")
    p.add_argument("--ricci", action="store_true", help="use S_{T_b} instead of T_b")
    p.add_argument("--dichotomy", action="store_true", help="also run the dichotomy verdict")
    p.add_argument("--a0", type=float, default=1.0)
    p.add_argument("--a1", type=float, default=-0.5)

    p = sub.add_parser("table", help="predicted corollary table with witness marks")
    p.add_argument("--name", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=_positive_int, default=1)
    p.add_argument("--preset", default="r", help="T_a for the t-ricci table")
    p.add_argument("--points", type=_positive_int, default=5)
    p.add_argument("--format", choices=("json", "markdown"), default="markdown")
    p.add_argument("--output")
    return parser


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_text(report: dict, fmt: str) -> str:
    report = _clean(report)
    return _dumps(report) if fmt == "json" else render_markdown(report)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "presets":
            if args.n < 3:
                raise UsageError("presets need --n >= 3")
            _emit(render_presets(args.n, (args.a0, args.a1), args.format), None)
            return EXIT_OK
        if args.command == "table":
            if args.name not in TABLES:
                raise UsageError(f"unknown table {args.name!r}; known: {', '.join(sorted(TABLES))}")
            if args.n < 3:
                raise UsageError("tables need --n >= 3")
            Preset.from_name(args.preset)
            table = build_table(args.name, args.n, args.ell, args.preset, args.points)
            report = {"manifold": None, "points": [], "suites": [], "fits": [], "tables": [table]}
            _emit(_report_text(report, args.format), args.output)
            return EXIT_OK
        spec = resolve_manifold(args.manifold)
        if args.command == "verify":
            report = run_verify(spec, args.points, args.seed, args.tol)
            ok = all(s["pass"] for s in report["suites"])
        else:
            report = run_fit(spec, args.ta, args.tb, args.sigma, args.ell, args.ricci,
                             args.points, args.seed, args.dichotomy, (args.a0, args.a1), args.tol)
            ok = all(f["pass"] for f in report["fits"])
        _emit(_report_text(report, args.format), args.output)
        if not ok:
            failing = [s["id"] for s in report["suites"] if not s["pass"]]
            failing += [f["condition"] for f in report["fits"] if not f["pass"]]
            print("residual failure: " + ", ".join(failing), file=sys.stderr)
            return EXIT_FAIL
        return EXIT_OK
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"nullity-forge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ExprDomainError, np.linalg.LinAlgError) as exc:
        print(f"nullity-forge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
