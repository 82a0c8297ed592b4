"""Property checkers for f: [0, inf) -> [0, inf) and the metric-preservation classifier.

Every checker answers with a three-valued :class:`PropertyVerdict`.  ``Holds``
with a sampled basis speaks only about the probe grid; ``Fails`` carries a
counterexample that :func:`recheck` confirms by re-evaluating f.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from metrika import scalars as S
from metrika.errors import InvalidBounds, NonAmenable, NumericalOverflow
from metrika.functions import FunctionSpec
from metrika.grids import ProbeGrid, as_grid
from metrika.scalars import DEFAULT_TOL, Exact, as_scalar, leq


class Status(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Basis:
    kind: str = "Sampled"  # Sampled | SufficientLemma | Declared
    name: str = ""

    def to_json(self):
        return {"kind": self.kind, "name": self.name} if self.name else {"kind": self.kind}


SAMPLED = Basis()


@dataclass(frozen=True)
class Counterexample:
    inputs: tuple
    values: tuple
    relation: str

    def to_json(self) -> dict:
        return {"inputs": [_enc(x) for x in self.inputs],
                "values": [_enc(v) for v in self.values],
                "relation": self.relation}


def _enc(x):
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    if hasattr(x, "tolist"):
        return x.tolist()
    return S.scalar_to_json(x)


@dataclass
class PropertyVerdict:
    property: str
    status: Status
    basis: Basis = SAMPLED
    certificate: object = None
    counterexample: Counterexample | None = None
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    def to_json(self) -> dict:
        out = {"property": self.property, "status": self.status.value, "basis": self.basis.to_json()}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json()
        if self.details:
            out["details"] = _json_details(self.details)
        return out


def _json_details(obj):
    if isinstance(obj, PropertyVerdict):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _json_details(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_details(v) for v in obj]
    if isinstance(obj, S.ScalarValue):
        return S.scalar_to_json(obj)
    if isinstance(obj, Fraction):
        return S.format_fraction(obj)
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, Enum):
        return obj.value
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


def holds(prop, grid: ProbeGrid, **details) -> PropertyVerdict:
    return PropertyVerdict(prop, Status.HOLDS, SAMPLED, grid.descriptor(), None, details)


def fails(prop, inputs, values, relation, basis=SAMPLED, **details) -> PropertyVerdict:
    return PropertyVerdict(prop, Status.FAILS, basis, None,
                           Counterexample(tuple(inputs), tuple(values), relation), details)


def _values(spec: FunctionSpec, grid: ProbeGrid):
    return [spec(x) for x in grid]


# ---------------------------------------------------------------------------
# single-property checks
# ---------------------------------------------------------------------------

def check_amenable(spec: FunctionSpec, grid=None, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """f^{-1}({0}) = {0} on the grid."""
    grid = as_grid(grid, spec)
    if not len(grid):
        raise ValueError("probe grid is empty")
    f0 = spec(S.ZERO)
    if not S.is_zero(f0, tol):
        return fails("amenable", [S.ZERO], [f0], "f(0) == 0")
    for x in grid:
        if x > 0:
            fx = spec(x)
            if S.is_zero(fx, tol):
                return fails("amenable", [x], [fx], "f(x) != 0 for x > 0")
    return holds("amenable", grid)


def check_monotone(spec: FunctionSpec, grid=None, strict: bool = False,
                   tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """Adjacent-pair order check along the sorted grid."""
    grid = as_grid(grid, spec)
    prop = "strictly-increasing" if strict else "increasing"
    pts = grid.points
    vals = _values(spec, grid)
    for i in range(len(pts) - 1):
        a, b = vals[i], vals[i + 1]
        if strict:
            bad = leq(b, a, tol)
        else:
            bad = not leq(a, b, tol)
        if bad:
            return fails(prop, [pts[i], pts[i + 1]], [a, b],
                         "f(x) < f(y) for x < y" if strict else "f(x) <= f(y) for x < y")
    return holds(prop, grid)


def check_concave(spec: FunctionSpec, grid=None, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """Midpoint concavity f((x+y)/2) >= (f(x)+f(y))/2 - tol over all grid pairs."""
    grid = as_grid(grid, spec, pairwise=True)
    if len(grid) < 3:
        raise ValueError("concavity check needs at least 3 grid points")
    pts = grid.points
    vals = _values(spec, grid)
    half = Fraction(1, 2)
    for i, x in enumerate(pts):
        fx = vals[i]
        for j in range(i + 2, len(pts)):
            y = pts[j]
            mid = (x + y) * half
            fm = spec(mid)
            avg = (fx + vals[j]) * half
            if not leq(avg, fm, tol):
                return fails("concave", [x, y], [fx, vals[j], fm], "f((x+y)/2) >= (f(x)+f(y))/2")
    return holds("concave", grid)


def check_subadditive(spec: FunctionSpec, grid=None, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """f(a+b) <= f(a)+f(b) over all grid pairs (the relation is symmetric in a, b)."""
    grid = as_grid(grid, spec, pairwise=True)
    pts = grid.points
    vals = _values(spec, grid)
    for i, a in enumerate(pts):
        fa = vals[i]
        for j in range(i, len(pts)):
            b = pts[j]
            fab = spec(a + b)
            if not leq(fab, fa + vals[j], tol):
                return fails("subadditive", [a, b], [fa, vals[j], fab], "f(a+b) <= f(a)+f(b)")
    return holds("subadditive", grid)


def check_tightly_bounded(spec: FunctionSpec, grid=None, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """Search the witness u = min f over the positive grid; Holds iff max f <= 2u and u > 0."""
    grid = as_grid(grid, spec).positive()
    if not len(grid):
        raise ValueError("tight-boundedness needs positive grid points")
    pts = grid.points
    vals = _values(spec, grid)
    lo = min(range(len(pts)), key=lambda i: vals[i])
    hi = max(range(len(pts)), key=lambda i: vals[i])
    m, M = vals[lo], vals[hi]
    if S.is_zero(m, tol):
        return fails("tightly-bounded", [pts[lo]], [m], "f(x) > 0 for x > 0")
    if not leq(M, m * 2, tol):
        return fails("tightly-bounded", [pts[lo], pts[hi]], [m, M], "max f <= 2 min f")
    return holds("tightly-bounded", grid, u=m)


def check_doubling(spec: FunctionSpec, grid=None, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """f(a) <= 2 f(b) whenever 0 <= a <= 2b.

    A failure shows f is not metric-preserving.  Scans b upward keeping the
    running maximum of f over {a <= 2b}, so the cost is linear in the grid.
    """
    grid = as_grid(grid, spec)
    pts = grid.points
    vals = _values(spec, grid)
    best = None
    a = 0
    for j, b in enumerate(pts):
        bound = b * 2
        while a < len(pts) and pts[a] <= bound:
            if best is None or vals[a] > vals[best]:
                best = a
            a += 1
        if best is not None and not leq(vals[best], vals[j] * 2, tol):
            return fails("doubling", [pts[best], b], [vals[best], vals[j]], "f(a) <= 2 f(b) for a <= 2b")
    return holds("doubling", grid)


def check_ratio_decreasing(spec: FunctionSpec, grid=None, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    grid = as_grid(grid, spec).positive()
    pts = grid.points
    ratios = [spec(x) / x for x in pts]
    for i in range(len(pts) - 1):
        if not leq(ratios[i + 1], ratios[i], tol):
            return fails("ratio-decreasing", [pts[i], pts[i + 1]],
                         [spec(pts[i]), spec(pts[i + 1])], "f(y)/y <= f(x)/x for x < y")
    return holds("ratio-decreasing", grid)


def check_periodic_form(spec: FunctionSpec, period, grid=None, pair_grid=None,
                        tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """Check f(x) - x is periodic with the given period, then classify f.

    Under that form f is metric-preserving exactly when it is amenable,
    increasing and subadditive; the classification lands in
    ``details["metric_preserving"]``.
    """
    period = as_scalar(period)
    if not period > 0:
        raise ValueError("period must be positive")
    grid = as_grid(grid, spec)
    for x in grid:
        shifted = x + period
        g0 = spec(x) - x
        g1 = spec(shifted) - shifted
        if not S.close(g0, g1, tol):
            return fails("periodic-form", [x, shifted], [spec(x), spec(shifted)],
                         "f(x+T)-(x+T) == f(x)-x", period=period,
                         metric_preserving=PropertyVerdict("metric-preserving", Status.UNKNOWN))
    parts = {
        "amenable": check_amenable(spec, grid, tol),
        "increasing": check_monotone(spec, grid, False, tol),
        "subadditive": check_subadditive(spec, pair_grid, tol),
    }
    basis = Basis("SufficientLemma", "periodic-form")
    if all(v.holds for v in parts.values()):
        mp = PropertyVerdict("metric-preserving", Status.HOLDS, basis, grid.descriptor(), details=parts)
    elif parts["amenable"].fails:
        mp = PropertyVerdict("metric-preserving", Status.FAILS, Basis("SufficientLemma", "amenability-necessary"),
                             counterexample=parts["amenable"].counterexample, details=parts)
    else:
        bad = parts["increasing"] if parts["increasing"].fails else parts["subadditive"]
        mp = PropertyVerdict("metric-preserving", Status.FAILS, basis,
                             counterexample=bad.counterexample, details=parts)
    return PropertyVerdict("periodic-form", Status.HOLDS, basis, grid.descriptor(),
                           details={"period": period, "metric_preserving": mp})


# ---------------------------------------------------------------------------
# derivative at zero vs inf K_f
# ---------------------------------------------------------------------------

@dataclass
class DerivativeAtZeroReport:
    estimate: float                      # math.inf encodes +inf
    sample_ratios: list                  # [(y, f(y)/y)] for strictly decreasing y
    inf_kf_estimate: float
    agreement: bool | None               # None when not asserted
    agreement_checked: bool = False

    @property
    def infinite(self) -> bool:
        return math.isinf(self.estimate)

    def to_json(self) -> dict:
        enc = lambda v: "inf" if math.isinf(v) else v
        return {"estimate": enc(self.estimate),
                "inf_kf_estimate": enc(self.inf_kf_estimate),
                "agreement": self.agreement,
                "agreement_checked": self.agreement_checked,
                "sample_ratios": [[S.format_fraction(y), r] for y, r in self.sample_ratios]}


def _extrapolate(ratios: list[float], tail: int = 6) -> float:
    """Limit of a sequence that is either (nearly) constant, geometrically convergent or divergent."""
    r = ratios[-tail:]
    d = [b - a for a, b in zip(r, r[1:])]
    scale = max(1.0, abs(r[-1]))
    if all(abs(x) <= 1e-13 * scale for x in d[-3:]):
        return r[-1]
    if all(x > 0 for x in d) and all(d[i + 1] >= 0.999 * d[i] for i in range(len(d) - 1)):
        return math.inf
    if d[-2] != 0:
        q = d[-1] / d[-2]
        if abs(q) < 1:
            return r[-1] + d[-1] * q / (1 - q)
    return r[-1]


def estimate_derivative_at_zero(spec: FunctionSpec, depth: int = 40, y0=1,
                                overflow: float = 1e12, tol: float = 1e-6) -> DerivativeAtZeroReport:
    """One-sided f'(0) from f(y)/y along y = y0 * 2^-i, compared with sup f(x)/x over a wide grid."""
    y0 = Fraction(y0)
    samples = []
    for i in range(depth + 1):
        y = y0 / 2 ** i
        fy = spec(Exact._rat(y))
        # absolute tolerance is meaningless at y ~ 1e-12; only a true zero counts
        if S.is_zero(fy, 0.0):
            raise NonAmenable(f"f({S.format_fraction(y)}) = 0")
        ratio = float(fy) / float(y)
        if math.isnan(ratio):
            raise NumericalOverflow(f"f(y)/y is not a number at y = {y}")
        samples.append((y, ratio))
    ratios = [r for _, r in samples]
    if max(ratios) > overflow or math.isinf(max(ratios)):
        estimate = math.inf
    else:
        estimate = _extrapolate(ratios)

    if math.isinf(estimate):
        # K_f is empty when f'(0) = +inf
        inf_kf = math.inf
    else:
        wide = [Fraction(2) ** i for i in range(-depth, depth + 1)]
        wide += [Fraction(j, 16) for j in range(1, 1601)]
        inf_kf = max(float(spec(Exact._rat(x))) / float(x) for x in wide)

    checked = "concave" in spec.declared_properties()
    agreement = None
    if checked:
        if math.isinf(estimate) or math.isinf(inf_kf):
            agreement = math.isinf(estimate) and math.isinf(inf_kf)
        else:
            agreement = abs(estimate - inf_kf) <= tol
    return DerivativeAtZeroReport(estimate, samples, inf_kf, agreement, checked)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def classify_metric_preserving(spec: FunctionSpec, grid=None, pair_grid=None,
                               tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """Try the sufficient bundles; fail on a necessity violation; else Unknown.

    Bundles, in order: amenable + concave; amenable + subadditive + increasing;
    amenable + tightly bounded.  Necessary conditions: amenability and doubling.
    """
    grid = as_grid(grid, spec)
    pgrid = as_grid(pair_grid, spec, pairwise=True)
    parts = {"amenable": check_amenable(spec, grid, tol)}
    if parts["amenable"].fails:
        return PropertyVerdict("metric-preserving", Status.FAILS,
                               Basis("SufficientLemma", "amenability-necessary"),
                               counterexample=parts["amenable"].counterexample, details=parts)
    parts["doubling"] = check_doubling(spec, grid, tol)
    if parts["doubling"].fails:
        return PropertyVerdict("metric-preserving", Status.FAILS,
                               Basis("SufficientLemma", "doubling-necessary"),
                               counterexample=parts["doubling"].counterexample, details=parts)

    parts["concave"] = check_concave(spec, pgrid, tol)
    if parts["concave"].holds:
        return _classified("amenable-concave", grid, parts)
    parts["increasing"] = check_monotone(spec, grid, False, tol)
    if parts["increasing"].holds:
        parts["subadditive"] = check_subadditive(spec, pgrid, tol)
        if parts["subadditive"].holds:
            return _classified("amenable-subadditive-increasing", grid, parts)
    parts["tightly-bounded"] = check_tightly_bounded(spec, grid, tol)
    if parts["tightly-bounded"].holds:
        return _classified("amenable-tightly-bounded", grid, parts)
    return PropertyVerdict("metric-preserving", Status.UNKNOWN, SAMPLED, grid.descriptor(), details=parts)


def _classified(route, grid, parts):
    return PropertyVerdict("metric-preserving", Status.HOLDS, Basis("SufficientLemma", route),
                           grid.descriptor(), details=parts)


def check_metric_transform(spec: FunctionSpec, grid=None, pair_grid=None,
                           tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """f(0) = 0, strictly increasing and concave on the grids."""
    grid = as_grid(grid, spec)
    f0 = spec(S.ZERO)
    if not S.is_zero(f0, tol):
        return fails("metric-transform", [S.ZERO], [f0], "f(0) == 0")
    parts = {"strictly-increasing": check_monotone(spec, grid, True, tol),
             "concave": check_concave(spec, pair_grid, tol)}
    for name, verdict in parts.items():
        if verdict.fails:
            out = PropertyVerdict("metric-transform", Status.FAILS, SAMPLED, None,
                                  verdict.counterexample, details=parts)
            out.details["failed"] = name
            return out
    return PropertyVerdict("metric-transform", Status.HOLDS, SAMPLED, grid.descriptor(), details=parts)


def build_tight_bounded_fixset_function(A, u) -> FunctionSpec:
    """f(0)=0, f=x on A, f=u elsewhere, and f(u)=2u when u is not in A; Fix f = A u {0}."""
    u = Fraction(u)
    A = tuple(sorted({Fraction(a) for a in A}))
    if u <= 0:
        raise InvalidBounds("u must be positive")
    outside = [a for a in A if not (u <= a <= 2 * u)]
    if outside:
        raise InvalidBounds(f"A must lie in [u, 2u]; offending {[S.format_fraction(a) for a in outside]}")
    return FunctionSpec.catalog("tight_fixset", A=A, u=u)


def declared_verdict(spec: FunctionSpec, prop: str) -> PropertyVerdict:
    if prop in spec.declared:
        return PropertyVerdict(prop, Status.HOLDS, Basis("Declared", spec.declared[prop] or "user"))
    if prop in spec.declared_properties():
        return PropertyVerdict(prop, Status.HOLDS, Basis("Declared", "catalog"))
    return PropertyVerdict(prop, Status.UNKNOWN)


def analyze(spec: FunctionSpec, grid=None, pair_grid=None, tol: float = DEFAULT_TOL) -> dict:
    """All property verdicts for one function, keyed by property name."""
    grid = as_grid(grid, spec)
    pgrid = as_grid(pair_grid, spec, pairwise=True)
    out = {
        "amenable": check_amenable(spec, grid, tol),
        "increasing": check_monotone(spec, grid, False, tol),
        "strictly-increasing": check_monotone(spec, grid, True, tol),
        "concave": check_concave(spec, pgrid, tol),
        "subadditive": check_subadditive(spec, pgrid, tol),
        "tightly-bounded": check_tightly_bounded(spec, grid, tol),
        "doubling": check_doubling(spec, grid, tol),
        "ratio-decreasing": check_ratio_decreasing(spec, grid, tol),
        "metric-transform": check_metric_transform(spec, grid, pgrid, tol),
        "metric-preserving": classify_metric_preserving(spec, grid, pgrid, tol),
    }
    if spec.period is not None:
        out["periodic-form"] = check_periodic_form(spec, spec.period, grid, pgrid, tol)
    return out


# ---------------------------------------------------------------------------
# counterexample re-check
# ---------------------------------------------------------------------------

def recheck(spec: FunctionSpec, verdict: PropertyVerdict, tol: float = DEFAULT_TOL) -> bool:
    """True when the verdict's counterexample still violates its relation under fresh evaluation."""
    ce = verdict.counterexample
    if ce is None:
        return False
    f = lambda x: spec(as_scalar(x))
    xs = ce.inputs
    rel = ce.relation
    if rel == "f(0) == 0":
        return not S.is_zero(f(xs[0]), tol)
    if rel == "f(x) != 0 for x > 0" or rel == "f(x) > 0 for x > 0":
        return xs[0] > 0 and S.is_zero(f(xs[0]), tol)
    if rel == "f(x) <= f(y) for x < y":
        return xs[0] < xs[1] and not leq(f(xs[0]), f(xs[1]), tol)
    if rel == "f(x) < f(y) for x < y":
        return xs[0] < xs[1] and leq(f(xs[1]), f(xs[0]), tol)
    if rel == "f((x+y)/2) >= (f(x)+f(y))/2":
        mid = (xs[0] + xs[1]) * Fraction(1, 2)
        return not leq((f(xs[0]) + f(xs[1])) * Fraction(1, 2), f(mid), tol)
    if rel == "f(a+b) <= f(a)+f(b)":
        return not leq(f(xs[0] + xs[1]), f(xs[0]) + f(xs[1]), tol)
    if rel == "max f <= 2 min f":
        return not leq(f(xs[1]), f(xs[0]) * 2, tol)
    if rel == "f(a) <= 2 f(b) for a <= 2b":
        return xs[0] <= xs[1] * 2 and not leq(f(xs[0]), f(xs[1]) * 2, tol)
    if rel == "f(y)/y <= f(x)/x for x < y":
        return not leq(f(xs[1]) / xs[1], f(xs[0]) / xs[0], tol)
    if rel == "f(x+T)-(x+T) == f(x)-x":
        return not S.close(f(xs[0]) - xs[0], f(xs[1]) - xs[1], tol)
    raise ValueError(f"unknown relation {rel!r}")
