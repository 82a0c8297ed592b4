"""Command line: ``metrika <command> ...``.

Exit codes: 0 success, 1 a requested verdict Fails or an expectation is
violated, 2 malformed input.  Settings resolve as flags > --config file > defaults.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from metrika import __version__
from metrika import scalars as S
from metrika.contraction import (BoxDomain, BoxSample, IndexMap, MultiMap, NumericMap,
                                 establish_local_radial_contraction, establish_multival_contraction)
from metrika.errors import AnyStartDiverged, MetrikaError
from metrika.fixpoint import (check_fix_interval_property, check_sup_rule, classify_fix_shape,
                              compute_fix_set, nadler_pipeline, picard_iterate, solve_unique_fixed_point,
                              tan_iterate)
from metrika.functions import CATALOG, FunctionSpec, catalog_names
from metrika.grids import default_grid, pair_grid, uniform_grid
from metrika.metricspace import (FiniteMetricSpace, check_hausdorff_axioms, epsilon_chainable, hausdorff,
                                 transform_metric, validate_metric)
from metrika.properties import analyze, check_metric_transform, estimate_derivative_at_zero
from metrika.report import RunReport

DEFAULTS = {
    "tol": S.DEFAULT_TOL,
    "grid_max": None,        # None: default probe grid
    "grid_step": None,
    "pair_step": None,
    "irrational": True,
    "depth": 40,
    "xmax": "12",
    "step": "1/64",
    "max_iter": 10000,
    "format": "text",
}


class InputError(Exception):
    """Malformed input; maps to exit code 2."""


def _load_json(text: str):
    """A path to a JSON file, or inline JSON."""
    src = text.strip()
    try:
        if src.startswith(("{", "[", '"')):
            return json.loads(src)
        return json.loads(Path(src).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {text!r}: {exc}") from exc


def _fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not an exact rational: {text!r}") from exc


def _exact(text):
    try:
        return S.parse_scalar(str(text))
    except (ValueError, ZeroDivisionError, KeyError) as exc:
        raise InputError(f"not a scalar: {text!r}") from exc


def _spec(text) -> FunctionSpec:
    obj = _load_json(text)
    return FunctionSpec.from_json(obj)


def _space(obj) -> FiniteMetricSpace:
    return FiniteMetricSpace.from_json(obj)


def _floats(text) -> np.ndarray | float:
    try:
        vals = [float(v) for v in str(text).split(",")]
    except ValueError as exc:
        raise InputError(f"not a comma-separated point: {text!r}") from exc
    return vals[0] if len(vals) == 1 else np.array(vals)


# ---------------------------------------------------------------------------
# commands; each returns (results, failed)
# ---------------------------------------------------------------------------

def _grids(cfg, spec):
    if cfg["grid_max"] is None and cfg["grid_step"] is None:
        grid = default_grid(spec, cfg["irrational"])
    else:
        grid = uniform_grid(_fraction(cfg["grid_max"] or 100), _fraction(cfg["grid_step"] or "1/16"))
    if cfg["pair_step"] is None:
        pgrid = pair_grid(spec, cfg["irrational"])
    else:
        top = _fraction(cfg["grid_max"] or 12)
        pgrid = uniform_grid(top, _fraction(cfg["pair_step"]))
    return grid, pgrid


def cmd_analyze(args, cfg):
    spec = _spec(args.fn)
    grid, pgrid = _grids(cfg, spec)
    verdicts = analyze(spec, grid, pgrid, cfg["tol"])
    failed = verdicts["metric-preserving"].fails
    for prop in args.require or []:
        if prop not in verdicts:
            raise InputError(f"unknown property {prop!r}; known: {sorted(verdicts)}")
        failed = failed or not verdicts[prop].holds
    results = {"function": spec.to_json(), "label": spec.label, "verdicts": verdicts}
    if verdicts["amenable"].holds:
        results["derivative_at_zero"] = estimate_derivative_at_zero(spec, depth=cfg["depth"])
    return results, failed


def cmd_derivative(args, cfg):
    spec = _spec(args.fn)
    rep = estimate_derivative_at_zero(spec, depth=cfg["depth"])
    return {"function": spec.to_json(), "derivative_at_zero": rep}, rep.agreement is False


def cmd_metric(args, cfg):
    D = _space(_load_json(args.matrix))
    if args.action == "validate":
        v = validate_metric(D, cfg["tol"])
        return {"validation": v, "n": D.n}, not v.valid
    if not args.fn:
        raise InputError("metric transform needs --fn")
    spec = _spec(args.fn)
    base = validate_metric(D, cfg["tol"])
    if not base.valid:
        return {"input_validation": base}, True
    out = transform_metric(D, spec)
    v = validate_metric(out, cfg["tol"])
    return {"function": spec.to_json(), "transformed": out, "validation": v}, not v.valid


def cmd_hausdorff(args, cfg):
    obj = _load_json(args.sets)
    if not isinstance(obj, dict) or "space" not in obj or "sets" not in obj:
        raise InputError("sets file needs 'space' and 'sets'")
    D = _space(obj["space"])
    sets = obj["sets"]
    if len(sets) < 2:
        raise InputError("need at least two sets")
    pairs = []
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            ab, ba, h = hausdorff(sets[i], sets[j], D)
            pairs.append({"sets": [i, j], "rho_ab": ab, "rho_ba": ba, "H": h})
    axioms = check_hausdorff_axioms(sets, D, cfg["tol"])
    return {"pairs": pairs, "axioms": axioms}, not axioms.valid


def cmd_chainable(args, cfg):
    D = _space(_load_json(args.matrix))
    eps = _exact(args.eps)
    pair = tuple(args.pair) if args.pair else None
    res = epsilon_chainable(D, eps, pair)
    return {"chain": res}, not res.chainable


def _sample_and_map(obj):
    if "numeric" in obj:
        box = obj.get("box", {})
        g = NumericMap.from_json(obj["numeric"])
        dom = BoxDomain(float(box.get("lo", 0)), float(box.get("hi", 1)), int(box.get("dim", g.dim or 1)),
                        int(box.get("per_axis", 33)))
        return BoxSample(dom, g), None
    D = _space(obj["space"])
    return D, IndexMap(obj["map"])


def cmd_contraction(args, cfg):
    spec = _spec(args.fn)
    k = _exact(args.k)
    obj = _load_json(args.mapfile)
    if args.mode == "single":
        space, g = _sample_and_map(obj)
        c = _exact(args.c) if args.b_prime and args.c else None
        if args.b_prime and c is None:
            raise InputError("--b-prime needs --c")
        rep = establish_local_radial_contraction(g, spec, k, space, b_prime_c=c, tol=cfg["tol"])
    else:
        D = _space(obj["space"])
        rep = establish_multival_contraction(MultiMap(obj["images"]), spec, k, D, cfg["tol"])
    failed = rep.conclusion.value == "NotEstablished" or not rep.consistent
    return {"function": spec.to_json(), "report": rep}, failed


def _numeric_map(text) -> NumericMap:
    if text == "cosine":
        return NumericMap.cosine()
    return NumericMap.from_json(_load_json(text))


def cmd_iterate(args, cfg):
    g = _numeric_map(args.map)
    tol, max_iter = cfg["tol"], cfg["max_iter"]
    if args.starts:
        starts = [_floats(s) for s in args.starts]
        try:
            limit, uniq = solve_unique_fixed_point(g, starts, tol, max_iter)
        except AnyStartDiverged as exc:
            return {"error": str(exc), "traces": exc.traces}, True
        return {"map": g, "limit": limit, "uniqueness": uniq}, not uniq.verdict.holds
    x0 = _floats(args.x0)
    if args.power and args.power > 1:
        res = tan_iterate(g, args.power, x0, tol, max_iter)
        return {"map": g, "power": args.power, "result": res}, not res.g_fixed.holds
    trace = picard_iterate(g, x0, tol, max_iter)
    return {"map": g, "trace": trace}, not trace.converged


def _parse_expect(text):
    return sorted((_exact(t) for t in text.split(",") if t.strip()), key=float)


def cmd_fixset(args, cfg):
    spec = _spec(args.fn)
    xmax, step = _fraction(cfg["xmax"]), _fraction(cfg["step"])
    fs = compute_fix_set(spec, xmax, step, cfg["tol"])
    results = {"function": spec.to_json(), "fixset": fs}
    failed = False
    mt = check_metric_transform(spec, tol=cfg["tol"])
    results["metric_transform"] = mt
    if mt.holds:
        results["shape"] = classify_fix_shape(fs)
        results["interval_property"] = check_fix_interval_property(spec, fs, tol=cfg["tol"])
        results["sup_rule"] = check_sup_rule(spec, fs, cfg["tol"])
        failed = results["interval_property"].fails or results["sup_rule"].fails
    if args.expect is not None:
        want = _parse_expect(args.expect)
        got = fs.points
        ok = not fs.intervals and len(want) == len(got) and all(S.close(a, b) for a, b in zip(want, got))
        results["expectation"] = {"expected": [S.scalar_to_json(x) for x in want], "met": ok}
        failed = failed or not ok
    return results, failed


def cmd_nadler(args, cfg):
    obj = _load_json(args.multimap)
    D = _space(obj["space"])
    rep = nadler_pipeline(MultiMap(obj["images"]), D, _exact(args.eps), _exact(args.k), cfg["tol"])
    return {"report": rep}, not rep.consistent or not rep.hypotheses_hold


def cmd_catalog(args, cfg):
    rows = []
    for name in catalog_names():
        e = CATALOG[name]
        rows.append({"name": name, "summary": e.summary,
                     "params": {k: S.format_fraction(v) if isinstance(v, Fraction) else [S.format_fraction(x) for x in v]
                                for k, v in e.defaults.items()},
                     "rationality_sensitive": e.rationality_sensitive, "continuous": e.continuous})
    return {"catalog": rows}, False


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of default settings")
    common.add_argument("--format", choices=["text", "json"], default=None)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--tol", type=float, default=None, help=f"comparison slack (default {S.DEFAULT_TOL})")

    p = argparse.ArgumentParser(prog="metrika", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"metrika {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="all function properties and the classification")
    a.add_argument("fn")
    a.add_argument("--grid-max", dest="grid_max", default=None)
    a.add_argument("--grid-step", dest="grid_step", default=None)
    a.add_argument("--pair-step", dest="pair_step", default=None)
    a.add_argument("--no-irrational", dest="irrational", action="store_false", default=None)
    a.add_argument("--require", action="append", help="exit 1 unless this property Holds")
    a.add_argument("--depth", type=int, default=None)
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("derivative", parents=[common], help="f'(0) estimate against inf K_f")
    d.add_argument("fn")
    d.add_argument("--depth", type=int, default=None)
    d.set_defaults(func=cmd_derivative)

    m = sub.add_parser("metric", parents=[common], help="validate or transform a distance table")
    m.add_argument("action", choices=["validate", "transform"])
    m.add_argument("matrix")
    m.add_argument("--fn")
    m.set_defaults(func=cmd_metric)

    h = sub.add_parser("hausdorff", parents=[common], help="Hausdorff distances between index sets")
    h.add_argument("sets")
    h.set_defaults(func=cmd_hausdorff)

    c = sub.add_parser("chainable", parents=[common], help="eps-chainability with witness chain or cut")
    c.add_argument("matrix")
    c.add_argument("--eps", required=True)
    c.add_argument("--pair", type=int, nargs=2)
    c.set_defaults(func=cmd_chainable)

    ct = sub.add_parser("contraction", parents=[common], help="contraction hypothesis pipelines")
    ct.add_argument("mode", choices=["single", "multi"])
    ct.add_argument("fn")
    ct.add_argument("mapfile")
    ct.add_argument("--k", required=True)
    ct.add_argument("--b-prime", dest="b_prime", action="store_true")
    ct.add_argument("--c")
    ct.set_defaults(func=cmd_contraction)

    it = sub.add_parser("iterate", parents=[common], help="Picard iteration of a numeric map")
    it.add_argument("map", help="numeric map JSON (file or inline) or 'cosine'")
    it.add_argument("--x0", default="0")
    it.add_argument("--power", type=int, default=None, help="iterate g^N and check g fixes the limit")
    it.add_argument("--starts", nargs="+", help="several starts: uniqueness check")
    it.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    it.set_defaults(func=cmd_iterate)

    fx = sub.add_parser("fixset", parents=[common], help="fixed-point set of f on [0, xmax]")
    fx.add_argument("fn")
    fx.add_argument("--xmax", default=None)
    fx.add_argument("--step", default=None)
    fx.add_argument("--expect", default=None, help="comma-separated isolated fixed points, e.g. 0,pi,2*pi/1")
    fx.set_defaults(func=cmd_fixset)

    n = sub.add_parser("nadler", parents=[common], help="chainability + uniform local contraction => fixed point")
    n.add_argument("multimap")
    n.add_argument("--eps", required=True)
    n.add_argument("--k", required=True)
    n.set_defaults(func=cmd_nadler)

    cl = sub.add_parser("catalog", parents=[common], help="built-in functions")
    cl.add_argument("action", choices=["list"])
    cl.set_defaults(func=cmd_catalog)
    return p


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        obj = _load_json(args.config)
        if not isinstance(obj, dict):
            raise InputError("config must be a JSON object")
        unknown = set(obj) - set(DEFAULTS)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(obj)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _file_digests(argv, output) -> dict:
    """Content hashes of file arguments, so the digest changes when an input file does."""
    out = {}
    for a in argv:
        if a == output or a.startswith(("-", "{", "[")):
            continue
        path = Path(a)
        if path.is_file():
            out[a] = hashlib.sha256(path.read_bytes()).hexdigest()
    return out


def run(argv=None):
    """Parse, dispatch and render.

    Returns (exit code, report or None, rendered text, output path or None).
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None, "", None
    try:
        cfg = resolve_config(args)
        results, failed = args.func(args, cfg)
    except (InputError, MetrikaError, KeyError, TypeError, ValueError) as exc:
        return 2, None, f"metrika: error: {exc.__class__.__name__}: {exc}", None
    inputs = {"argv": argv, "config": {k: str(v) for k, v in sorted(cfg.items())},
              "files": _file_digests(argv, args.output)}
    report = RunReport(argv, inputs, results, 1 if failed else 0)
    text = report.render_json() if cfg["format"] == "json" else report.render_text()
    return report.exit_code, report, text, args.output


def main(argv=None) -> int:
    code, report, text, output = run(argv)
    if report is None:
        if text:
            print(text, file=sys.stderr)
        return code
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
