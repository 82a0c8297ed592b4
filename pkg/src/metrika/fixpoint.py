"""Fixed points: Picard iteration, the g^N variant, multivalued fixed points and fix-set scans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from metrika import scalars as S
from metrika.contraction import MultiMap, check_uniform_local_multival
from metrika.errors import AnyStartDiverged
from metrika.functions import FunctionSpec
from metrika.metricspace import ChainResult, FiniteMetricSpace, epsilon_chainable
from metrika.properties import SAMPLED, Counterexample, PropertyVerdict, Status
from metrika.scalars import DEFAULT_TOL, PI, SQRT2, Exact, as_scalar

OVERFLOW = 1e12


# ---------------------------------------------------------------------------
# Picard iteration
# ---------------------------------------------------------------------------

class Outcome(str, Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIterExceeded"
    DIVERGED = "Diverged"


@dataclass
class IterationTrace:
    start: object
    iterates: list
    steps: list
    outcome: Outcome
    limit: object = None
    iterations: int = 0

    @property
    def converged(self) -> bool:
        return self.outcome is Outcome.CONVERGED

    def to_json(self, keep: int = 50) -> dict:
        enc = lambda x: np.asarray(x).tolist() if not isinstance(x, (int, float)) else x
        out = {"start": enc(self.start), "outcome": self.outcome.value, "iterations": self.iterations,
               "steps": [float(s) for s in self.steps[-keep:]],
               "iterates_tail": [enc(x) for x in self.iterates[-keep:]]}
        if self.limit is not None:
            out["limit"] = enc(self.limit)
        return out


def _as_point(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    arr = np.asarray(x, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


def _metric(space):
    if space is None:
        return lambda a, b: float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    return lambda a, b: float(space(a, b))


def _magnitude(x) -> float:
    return float(np.max(np.abs(x))) if np.ndim(x) else abs(float(x))


def picard_iterate(g, x0, tol: float = DEFAULT_TOL, max_iter: int = 10000, space=None) -> IterationTrace:
    """x_{n+1} = g(x_n) until the step is <= tol, max_iter is reached, or |x| > 1e12.

    ``g`` is a callable on floats/arrays, or an :class:`IndexMap` together with
    the finite ``space`` that measures its steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    dist = _metric(space)
    x = _as_point(x0)
    iterates, steps = [x], []
    for n in range(1, max_iter + 1):
        y = _as_point(g(x))
        if space is None and not (np.all(np.isfinite(y)) and _magnitude(y) <= OVERFLOW):
            return IterationTrace(x0, iterates, steps, Outcome.DIVERGED, None, n)
        step = dist(x, y)
        iterates.append(y)
        steps.append(step)
        x = y
        if step <= tol:
            return IterationTrace(x0, iterates, steps, Outcome.CONVERGED, y, n)
    return IterationTrace(x0, iterates, steps, Outcome.MAX_ITER, None, max_iter)


@dataclass
class UniquenessReport:
    verdict: PropertyVerdict
    limits: list
    traces: list

    def to_json(self) -> dict:
        return {"verdict": self.verdict.to_json(),
                "limits": [np.asarray(v).tolist() for v in self.limits],
                "traces": [t.to_json(keep=5) for t in self.traces]}


def solve_unique_fixed_point(g, starts, tol: float = DEFAULT_TOL, max_iter: int = 10000, space=None):
    """Iterate from every start; uniqueness Holds when all limits agree within 10 tol."""
    starts = list(starts)
    if len(starts) < 2:
        raise ValueError("need at least two starts")
    dist = _metric(space)
    traces = [picard_iterate(g, s, tol, max_iter, space) for s in starts]
    bad = [t for t in traces if not t.converged]
    if bad:
        raise AnyStartDiverged(f"{len(bad)} of {len(traces)} starts did not converge "
                               f"(first: start {np.asarray(bad[0].start).tolist()}, {bad[0].outcome.value})", traces)
    limits = [t.limit for t in traces]
    for i in range(len(limits)):
        for j in range(i + 1, len(limits)):
            if dist(limits[i], limits[j]) > 10 * tol:
                ce = Counterexample((i, j), (as_scalar(dist(limits[i], limits[j])),),
                                    "limits agree within 10 tol")
                verdict = PropertyVerdict("unique-fixed-point", Status.FAILS, SAMPLED, None, ce,
                                          {"starts": [np.asarray(s).tolist() for s in starts]})
                return limits[0], UniquenessReport(verdict, limits, traces)
    verdict = PropertyVerdict("unique-fixed-point", Status.HOLDS, SAMPLED, None, None, {"starts": len(starts)})
    return limits[0], UniquenessReport(verdict, limits, traces)


@dataclass
class PowerIteration:
    trace: IterationTrace
    g_fixed: PropertyVerdict
    residual: float | None

    def to_json(self) -> dict:
        return {"trace": self.trace.to_json(), "g_fixed": self.g_fixed.to_json(), "residual": self.residual}


def tan_iterate(g, N: int, x0, tol: float = DEFAULT_TOL, max_iter: int = 10000, space=None) -> PowerIteration:
    """Picard iteration of g^N, then check that the limit is fixed by g itself (within 10 tol)."""
    if N < 1:
        raise ValueError("N must be >= 1")

    def gN(x):
        for _ in range(N):
            x = g(x)
        return x

    trace = picard_iterate(gN, x0, tol, max_iter, space)
    if not trace.converged:
        return PowerIteration(trace, PropertyVerdict("g-fixed", Status.UNKNOWN), None)
    x = trace.limit
    residual = _metric(space)(_as_point(g(x)), x)
    if residual <= 10 * tol:
        verdict = PropertyVerdict("g-fixed", Status.HOLDS, SAMPLED, None, None, {"residual": residual})
    else:
        ce = Counterexample((np.asarray(x).tolist(),), (as_scalar(residual),), "d(g(x), x) <= 10 tol")
        verdict = PropertyVerdict("g-fixed", Status.FAILS, SAMPLED, None, ce, {"residual": residual})
    return PowerIteration(trace, verdict, residual)


# ---------------------------------------------------------------------------
# multivalued maps
# ---------------------------------------------------------------------------

def multival_fixed_points(T: MultiMap, D: FiniteMetricSpace) -> list:
    """Exact enumeration of {x : x in T(x)} over the domain of T."""
    T.check_into(D)
    return [x for x in T.domain if x in T(x)]


@dataclass
class NadlerReport:
    chainable: ChainResult
    contraction: PropertyVerdict | None
    self_map: bool
    fixed_points: list | None = None
    labels: tuple | None = None

    @property
    def hypotheses_hold(self) -> bool:
        return self.self_map and self.chainable.chainable and self.contraction is not None and self.contraction.holds

    @property
    def witness(self):
        return self.fixed_points[0] if self.fixed_points else None

    @property
    def consistent(self) -> bool:
        """False only if the hypotheses held and no fixed point exists."""
        return not self.hypotheses_hold or bool(self.fixed_points)

    def failed_hypotheses(self) -> list:
        out = []
        if not self.self_map:
            out.append("self-map")
        if not self.chainable.chainable:
            out.append("eps-chainable")
        if self.contraction is None or not self.contraction.holds:
            out.append("uniform-local-contraction")
        return out

    def to_json(self) -> dict:
        lab = (lambda i: i) if self.labels is None else (lambda i: self.labels[i])
        out = {"hypotheses_hold": self.hypotheses_hold,
               "failed_hypotheses": self.failed_hypotheses(),
               "chainable": self.chainable.to_json(),
               "contraction": None if self.contraction is None else self.contraction.to_json(),
               "consistent": self.consistent}
        if self.fixed_points is not None:
            out["fixed_points"] = [lab(i) for i in self.fixed_points]
            out["witness"] = None if self.witness is None else lab(self.witness)
        return out


def nadler_pipeline(T: MultiMap, D: FiniteMetricSpace, eps, k, tol: float = DEFAULT_TOL) -> NadlerReport:
    """Chainability plus uniform local contraction imply a fixed point on a (complete) finite space."""
    T.check_into(D)
    chain = epsilon_chainable(D, eps)
    if not T.is_total:
        return NadlerReport(chain, None, False, labels=D.labels)
    contraction = check_uniform_local_multival(T, D, eps, k, tol)
    report = NadlerReport(chain, contraction, True, labels=D.labels)
    if report.hypotheses_hold:
        report.fixed_points = multival_fixed_points(T, D)
    return report


# ---------------------------------------------------------------------------
# fix-set scans
# ---------------------------------------------------------------------------

@dataclass
class FixSet:
    xmax: Fraction
    step: Fraction
    points: list                 # isolated fixed points, ScalarValue, ascending
    intervals: list              # closed intervals (a, b) of exact values
    touches_xmax: bool
    rational_runs: list = field(default_factory=list)   # fixed on the rationals of (a, b) only
    caveats: list = field(default_factory=list)

    def values(self) -> list:
        """Isolated points and interval endpoints, ascending."""
        vals = list(self.points)
        for a, b in self.intervals:
            vals += [a, b]
        return sorted(set(vals), key=float)

    def __contains__(self, x) -> bool:
        x = as_scalar(x)
        if any(S.close(x, p) for p in self.points):
            return True
        return any(S.leq(a, x) and S.leq(x, b) for a, b in self.intervals)

    def to_json(self) -> dict:
        enc = S.scalar_to_json
        return {"window": [0, S.format_fraction(self.xmax)],
                "step": S.format_fraction(self.step),
                "points": [enc(p) for p in self.points],
                "intervals": [[enc(a), enc(b)] for a, b in self.intervals],
                "rational_runs": [[enc(a), enc(b)] for a, b in self.rational_runs],
                "touches_xmax": self.touches_xmax,
                "caveats": list(self.caveats)}


def _symbolic_probes(xmax: Fraction) -> list:
    out = []
    for unit, uf in ((PI, math.pi), (SQRT2, math.sqrt(2))):
        j = 1
        while j / 4 * uf <= float(xmax):
            out.append(unit * Fraction(j, 4))
            j += 1
    return out


def _is_fixed(spec, x, tol) -> bool:
    return S.is_zero(spec(x) - x, tol)


def _residual_float(spec):
    return lambda t: float(spec.evaluate_float(np.array([t]))[0]) - t


def compute_fix_set(spec: FunctionSpec, xmax=12, step=Fraction(1, 64), tol: float = DEFAULT_TOL) -> FixSet:
    """Scan r(x) = f(x) - x on [0, xmax].

    Exact zeros on the rational grid, the breakpoints and the symbolic probes
    (multiples of pi/4 and sqrt2/4) are fixed points.  Runs of consecutive
    fixed grid points whose midpoints are also fixed become intervals.  Sign
    changes are bisected and local minima of |r| are polished; either kind of
    root is snapped to a nearby simple exact value when one is exactly fixed.
    """
    xmax, step = Fraction(xmax), Fraction(step)
    if xmax <= 0 or step <= 0:
        raise ValueError("xmax and step must be positive")
    n = int(xmax / step)
    grid = [Exact._rat(step * j) for j in range(n + 1)]
    if grid[-1].r != xmax:
        grid.append(Exact._rat(xmax))
    rational = {x for x in grid}
    rational |= {Exact._rat(b) for b in spec.breakpoints() if 0 <= b <= xmax}
    probes = _symbolic_probes(xmax)
    pts = sorted(rational | set(probes), key=float)
    res = [spec(x) - x for x in pts]
    fixed = [S.is_zero(r, tol) for r in res]

    # runs on the rational grid, confirmed at midpoints
    rat_pts = [(i, x) for i, x in enumerate(pts) if x in rational]
    runs, cur = [], None
    for (i, x), (j, y) in zip(rat_pts, rat_pts[1:]):
        if fixed[i] and fixed[j] and _is_fixed(spec, (x + y) * Fraction(1, 2), tol):
            cur = [x, y] if cur is None else [cur[0], y]
        else:
            if cur is not None:
                runs.append(tuple(cur))
            cur = None
    if cur is not None:
        runs.append(tuple(cur))

    intervals, rational_runs, caveats = [], [], []
    for a, b in runs:
        misses = [p for p in probes if a < p < b and not _is_fixed(spec, p, tol)]
        if misses:
            rational_runs.append((a, b))
            caveats.append(f"[{S.format_exact(a)}, {S.format_exact(b)}]: every rational grid point is fixed "
                           f"but {S.format_exact(misses[0])} is not")
        else:
            intervals.append((a, b))

    def covered(x) -> bool:
        return any(S.leq(a, x) and S.leq(x, b) for a, b in intervals + rational_runs)

    points = [x for x, ok in zip(pts, fixed) if ok and not covered(x)]

    # roots between scan points
    if spec.continuous and not spec.rationality_sensitive:
        r = _residual_float(spec)
        fl = np.array([float(x) for x in pts])
        rv = np.array([float(v) for v in res])
        candidates = []
        for i in range(len(pts) - 1):
            if fixed[i] or fixed[i + 1]:
                continue
            if rv[i] * rv[i + 1] < 0:
                candidates.append(brentq(r, fl[i], fl[i + 1], xtol=tol))
        av = np.abs(rv)
        for i in range(1, len(pts) - 1):
            if not fixed[i] and av[i] <= av[i - 1] and av[i] <= av[i + 1] and av[i] < float(step):
                m = minimize_scalar(lambda t: abs(r(t)), bounds=(fl[i - 1], fl[i + 1]),
                                    method="bounded", options={"xatol": 1e-12})
                if abs(r(m.x)) <= 1e-9:
                    candidates.append(float(m.x))
        for c in candidates:
            snapped = next((e for e in S.snap_candidates(c) if 0 <= e <= xmax and _is_fixed(spec, e, tol)), None)
            x = snapped if snapped is not None else S.Approx(c, tol, S.Rationality.UNKNOWN)
            if snapped is None and abs(r(c)) > tol:
                continue
            if covered(x) or any(S.close(x, p, 1e-6) for p in points):
                continue
            points.append(x)
            if snapped is None:
                caveats.append(f"approximate fixed point near {c:.12g}")
    elif spec.rationality_sensitive:
        caveats.append("rationality-sensitive function: only exact probes (rational grid, pi and sqrt2 multiples) "
                       "were examined")

    points.sort(key=float)
    touches = any(S.close(p, xmax) for p in points) or any(S.close(b, xmax) for _, b in intervals + rational_runs)
    return FixSet(xmax, step, points, intervals, touches, rational_runs, caveats)


class FixShape(str, Enum):
    ZERO_ONLY = "ZeroOnly"
    ZERO_AND_POINT = "ZeroAndPoint"
    INTERVAL = "Interval"
    UNBOUNDED = "UnboundedWithinScan"
    OTHER = "Other"


@dataclass
class ShapeReport:
    shape: FixShape
    a: object = None

    def to_json(self) -> dict:
        out = {"shape": self.shape.value}
        if self.a is not None:
            out["a"] = S.scalar_to_json(self.a)
        return out


def classify_fix_shape(fs: FixSet) -> ShapeReport:
    """{0}, {0, a}, [0, a], or a fixed region from 0 through the end of the window."""
    if fs.rational_runs:
        return ShapeReport(FixShape.OTHER)
    zero_pt = [p for p in fs.points if S.is_zero(p)]
    rest = [p for p in fs.points if not S.is_zero(p)]
    if not fs.intervals:
        if zero_pt and not rest:
            return ShapeReport(FixShape.ZERO_ONLY)
        if zero_pt and len(rest) == 1:
            return ShapeReport(FixShape.ZERO_AND_POINT, rest[0])
        return ShapeReport(FixShape.OTHER)
    if len(fs.intervals) == 1 and not fs.points:
        a, b = fs.intervals[0]
        if S.is_zero(a):
            if S.close(b, fs.xmax):
                return ShapeReport(FixShape.UNBOUNDED, b)
            return ShapeReport(FixShape.INTERVAL, b)
    return ShapeReport(FixShape.OTHER)


def _interval_samples(fs: FixSet) -> list:
    vals = list(fs.points)
    for a, b in fs.intervals:
        vals += [a + (b - a) * Fraction(j, 4) for j in range(5)]
    return sorted({v for v in vals if v > 0}, key=float)


def check_fix_interval_property(spec: FunctionSpec, fs: FixSet, samples: int = 16,
                                tol: float = DEFAULT_TOL, pairs=None) -> PropertyVerdict:
    """For fixed 0 < a < b, every sampled point of [a, b] is fixed."""
    if pairs is None:
        vals = _interval_samples(fs)
        pairs = [(a, b) for i, a in enumerate(vals) for b in vals[i + 1:]]
    checked = 0
    for a, b in pairs:
        a, b = as_scalar(a), as_scalar(b)
        for j in range(1, samples):
            x = a + (b - a) * Fraction(j, samples)
            checked += 1
            fx = spec(x)
            if not S.close(fx, x, tol):
                ce = Counterexample((a, b, x), (fx,), "f(x) == x on [a, b] for fixed a < b")
                return PropertyVerdict("fix-interval", Status.FAILS, SAMPLED, None, ce)
    return PropertyVerdict("fix-interval", Status.HOLDS, SAMPLED, None, None,
                           {"pairs": len(pairs), "samples": checked})


def check_sup_rule(spec: FunctionSpec, fs: FixSet, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """Window form of: Fix f is all of [0, inf) iff it is unbounded.

    If the largest fixed value reaches xmax, every grid point must be fixed;
    otherwise the window end itself witnesses that Fix f is not everything.
    """
    vals = fs.values()
    top = vals[-1] if vals else S.ZERO
    xmax = Exact._rat(fs.xmax)
    if float(top) >= float(xmax) - tol:
        n = int(fs.xmax / fs.step)
        for j in range(n + 1):
            x = Exact._rat(fs.step * j)
            fx = spec(x)
            if not S.close(fx, x, tol):
                ce = Counterexample((top, x), (fx,), "sup Fix f >= xmax implies every grid point is fixed")
                return PropertyVerdict("sup-rule", Status.FAILS, SAMPLED, None, ce, {"sup": top})
        return PropertyVerdict("sup-rule", Status.HOLDS, SAMPLED, None, None, {"sup": top, "unbounded": True})
    fx = spec(xmax)
    if S.close(fx, xmax, tol):
        ce = Counterexample((top, xmax), (fx,), "a bounded Fix f leaves xmax unfixed")
        return PropertyVerdict("sup-rule", Status.FAILS, SAMPLED, None, ce, {"sup": top})
    return PropertyVerdict("sup-rule", Status.HOLDS, SAMPLED, None, None, {"sup": top, "unbounded": False})
