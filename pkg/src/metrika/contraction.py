"""Hypothesis checkers for local radial and uniform local multivalued contractions.

The single-valued pipeline checks, for a self-map g and a function f,

    (a) f(d(gx, gu)) <= k d(x, u) near every x,
    (b) f'(0) > k              (or its sufficient form f(ct) >= kt for small t),

and then verifies the conclusion d(gx, gu) <= c d(x, u) near every x directly,
with c = (k/f'(0) + 1)/2.  Everything is decided on a finite sample: either an
exact finite metric space with an index map, or a float box grid with a numeric map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from metrika import scalars as S
from metrika.errors import HypothesisViolated, InvalidSpec, ShapeError
from metrika.functions import FunctionSpec
from metrika.metricspace import FiniteMetricSpace, as_subset, hausdorff_distance
from metrika.properties import (SAMPLED, Counterexample, PropertyVerdict, Status,
                                estimate_derivative_at_zero)
from metrika.scalars import DEFAULT_TOL, as_scalar, leq

SCHEDULE_DEPTH = 20
NEIGHBOUR_CAP = 4096


# ---------------------------------------------------------------------------
# maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexMap:
    """Map on the indices of a finite space: i -> targets[i].

    A ``None`` target leaves i outside the map's domain, which lets a sample
    X sit inside a larger space that also holds g(X).  With no ``None`` entries
    the map is a total self-map.
    """

    targets: tuple

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(None if t is None else int(t) for t in self.targets))

    def __call__(self, i: int) -> int:
        t = self.targets[i]
        if t is None:
            raise ShapeError(f"point {i} is outside the map's domain")
        return t

    def __len__(self):
        return len(self.targets)

    @property
    def domain(self) -> tuple:
        return tuple(i for i, t in enumerate(self.targets) if t is not None)

    @property
    def is_total(self) -> bool:
        return None not in self.targets

    def check_into(self, n: int):
        if len(self.targets) != n or any(t is not None and not 0 <= t < n for t in self.targets):
            raise ShapeError(f"index map needs {n} entries, each None or in range(0, {n})")
        if not self.domain:
            raise ShapeError("index map has an empty domain")


@dataclass(frozen=True)
class NumericMap:
    """Catalog self-map of R^m: linear, affine, swap_scale or cosine."""

    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("linear", "affine", "swap_scale", "cosine")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidSpec(f"unknown numeric map {self.kind!r}; expected one of {self.KINDS}")
        p = dict(self.params)
        if self.kind in ("linear", "affine"):
            p["matrix"] = np.atleast_2d(np.asarray(p["matrix"], dtype=float))
            if self.kind == "affine":
                p["offset"] = np.atleast_1d(np.asarray(p.get("offset", 0.0), dtype=float))
        elif self.kind == "swap_scale":
            p["a"], p["b"] = float(p["a"]), float(p["b"])
        object.__setattr__(self, "params", p)

    @classmethod
    def linear(cls, matrix):
        return cls("linear", {"matrix": matrix})

    @classmethod
    def affine(cls, matrix, offset):
        return cls("affine", {"matrix": matrix, "offset": offset})

    @classmethod
    def scale(cls, factor, dim=1):
        return cls("linear", {"matrix": np.eye(dim) * factor})

    @classmethod
    def swap_scale(cls, a, b):
        """(x, y) -> (a y, b x)."""
        return cls("swap_scale", {"a": a, "b": b})

    @classmethod
    def cosine(cls):
        return cls("cosine")

    @property
    def dim(self) -> int | None:
        if self.kind in ("linear", "affine"):
            return self.params["matrix"].shape[1]
        return 2 if self.kind == "swap_scale" else None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind in ("linear", "affine"):
            scalar = x.ndim == 0
            y = np.atleast_1d(x) @ p["matrix"].T
            if self.kind == "affine":
                y = y + p["offset"]
            return float(y[0]) if scalar else y
        if self.kind == "swap_scale":
            return np.stack([p["a"] * x[..., 1], p["b"] * x[..., 0]], axis=-1)
        return np.cos(x)

    def power(self, N: int):
        """The N-fold composition as a plain callable."""
        if N < 1:
            raise ValueError("N must be >= 1")

        def gN(x):
            for _ in range(N):
                x = self(x)
            return x
        return gN

    def to_json(self) -> dict:
        p = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.params.items()}
        return {"kind": self.kind, "params": p}

    @classmethod
    def from_json(cls, obj: dict) -> "NumericMap":
        try:
            return cls(obj["kind"], obj.get("params", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed numeric map: {exc}") from exc


@dataclass(frozen=True)
class MultiMap:
    """x -> nonempty subset of indices of a finite space.

    As with :class:`IndexMap`, a ``None`` image leaves x outside the domain.
    """

    images: tuple

    def __post_init__(self):
        imgs = tuple(None if img is None else tuple(sorted(set(int(i) for i in img))) for img in self.images)
        if any(img is not None and not img for img in imgs):
            raise ShapeError("every image of a multivalued map must be nonempty")
        object.__setattr__(self, "images", imgs)

    def __call__(self, i: int) -> tuple:
        img = self.images[i]
        if img is None:
            raise ShapeError(f"point {i} is outside the map's domain")
        return img

    def __len__(self):
        return len(self.images)

    @property
    def domain(self) -> tuple:
        return tuple(i for i, img in enumerate(self.images) if img is not None)

    @property
    def is_total(self) -> bool:
        return None not in self.images

    @classmethod
    def from_index_map(cls, g: IndexMap) -> "MultiMap":
        return cls(tuple(None if t is None else (t,) for t in g.targets))

    def check_into(self, D: FiniteMetricSpace):
        if len(self.images) != D.n:
            raise ShapeError(f"multivalued map has {len(self.images)} entries for {D.n} points")
        if not self.domain:
            raise ShapeError("multivalued map has an empty domain")
        for img in self.images:
            if img is not None:
                as_subset(img, D)


@dataclass(frozen=True)
class BoxDomain:
    lo: float
    hi: float
    dim: int = 1
    per_axis: int = 33

    def __post_init__(self):
        if not 1 <= self.dim <= 3:
            raise ShapeError("box samples support dimension 1 to 3")
        if not self.hi > self.lo:
            raise ShapeError("box needs hi > lo")

    def points(self) -> np.ndarray:
        axis = np.linspace(self.lo, self.hi, self.per_axis)
        mesh = np.meshgrid(*([axis] * self.dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


# ---------------------------------------------------------------------------
# samples: a common face for exact finite spaces and float box grids
# ---------------------------------------------------------------------------

class FiniteSample:
    """Exact sample: the domain points of g in D, neighbours listed by increasing distance.

    Positions 0..size-1 index ``points``; labels and distances come from D.
    """

    exact = True

    def __init__(self, D: FiniteMetricSpace, g: IndexMap | None = None):
        self.D = D
        self.g = g
        if g is not None:
            g.check_into(D.n)
            self.points = g.domain
        else:
            self.points = tuple(range(D.n))
        self.size = len(self.points)
        self._order = []
        for x in self.points:
            others = sorted((u for u in self.points if u != x), key=lambda u: float(D(x, u)))
            self._order.append(others)

    def diameter(self):
        best = S.ZERO
        for x in self.points:
            for u in self.points:
                best = S.smax(best, self.D(x, u))
        return best

    def label(self, x):
        return self.D.label(x)

    def nearest(self, pos):
        others = self._order[pos]
        return self.D(self.points[pos], others[0]) if others else None

    def neighbours(self, pos, eps):
        """u with 0 < d(x, u) < eps, and their distances."""
        x = self.points[pos]
        us, ds = [], []
        for u in self._order[pos]:
            d = self.D(x, u)
            if S.compare(d, eps) >= 0:
                if float(d) > float(eps) + 1e-9:
                    break
                continue
            us.append(u)
            ds.append(d)
        return us, ds

    def image_distances(self, pos, us):
        gx = self.g(self.points[pos])
        return [self.D(gx, self.g(u)) for u in us]


class BoxSample:
    """Float sample of a numeric map on a box grid with euclidean distances."""

    exact = False

    def __init__(self, box: BoxDomain, g: NumericMap | None = None):
        self.box = box
        self.g = g
        self.pts = box.points()
        self.size = len(self.pts)
        self.tree = cKDTree(self.pts)
        self.images = g(self.pts) if g is not None else None
        if self.images is not None:
            self.images = np.asarray(self.images, dtype=float).reshape(self.pts.shape)

    def diameter(self):
        return as_scalar(float((self.box.hi - self.box.lo) * math.sqrt(self.box.dim)))

    def label(self, x):
        return tuple(self.pts[x].tolist())

    def nearest(self, x):
        d, _ = self.tree.query(self.pts[x], k=2)
        return as_scalar(float(d[1]))

    def neighbours(self, x, eps):
        idx = np.asarray(self.tree.query_ball_point(self.pts[x], float(eps)), dtype=int)
        d = np.linalg.norm(self.pts[idx] - self.pts[x], axis=1)
        keep = (d > 0) & (d < float(eps))
        return idx[keep], d[keep]

    def image_distances(self, x, us):
        return np.linalg.norm(self.images[us] - self.images[x], axis=1)


def as_sample(space, g=None):
    if isinstance(space, (FiniteSample, BoxSample)):
        return space
    if isinstance(space, FiniteMetricSpace):
        return FiniteSample(space, g if g is None or isinstance(g, IndexMap) else IndexMap(g))
    if isinstance(space, BoxDomain):
        return BoxSample(space, g)
    raise TypeError(f"cannot sample {type(space).__name__}")


def default_schedule(sample, depth: int = SCHEDULE_DEPTH) -> list:
    """diameter * 2^-i for i = 0..depth, exact when the diameter is."""
    diam = sample.diameter()
    return [diam * Fraction(1, 2 ** i) for i in range(depth + 1)]


# ---------------------------------------------------------------------------
# per-point epsilon search
# ---------------------------------------------------------------------------

def _first_violation(sample, lhs, rhs, tol):
    """Index of the first lhs > rhs (with tolerance), or None."""
    if sample.exact:
        for i, (a, b) in enumerate(zip(lhs, rhs)):
            if not leq(a, b, tol):
                return i
        return None
    bad = np.nonzero(np.asarray(lhs, dtype=float) > np.asarray(rhs, dtype=float) + tol)[0]
    return int(bad[0]) if len(bad) else None


def _per_point(sample, name, lhs_of, k, schedule, tol):
    """Search each point's schedule for an eps_x making lhs(x, u) <= k d(x, u) for all d(x, u) < eps_x.

    Scales at which x has no neighbour are skipped; a point with no neighbour
    at any scale is recorded as vacuous.  Neighbour sets grow with eps, so the
    smallest non-vacuous scale decides existence and the scan then climbs to
    the largest scale that still works.
    """
    k = as_scalar(k)
    scales = sorted(schedule, key=float)       # increasing
    witnesses = {}
    vacuous = []
    for x in range(sample.size):
        nn = sample.nearest(x)
        name_x = sample.label(sample.points[x]) if sample.exact else sample.label(x)
        live = [e for e in scales if nn is not None and S.compare(nn, e) < 0]
        if not live:
            vacuous.append(x)
            witnesses[name_x] = None
            continue
        best = None
        for e in live:
            us, ds = sample.neighbours(x, e)
            if len(us) > NEIGHBOUR_CAP and best is not None:
                break
            lhs = lhs_of(x, us)
            rhs = [k * d for d in ds] if sample.exact else float(k) * ds
            bad = _first_violation(sample, lhs, rhs, tol)
            if bad is not None:
                if best is None:
                    u = us[bad]
                    ce = Counterexample((name_x, sample.label(u)),
                                        (lhs[bad], rhs[bad]), f"{name}: lhs <= k d(x,u) for d(x,u) < eps")
                    return PropertyVerdict(name, Status.FAILS, SAMPLED, None, ce,
                                           {"point": name_x, "deepest_eps": e, "k": k})
                break
            best = e
        witnesses[name_x] = best
    details = {"k": k, "vacuous_points": len(vacuous), "points": sample.size}
    if sample.size <= 256:
        details["eps"] = {str(x): ("vacuous" if e is None else e) for x, e in witnesses.items()}
    return PropertyVerdict(name, Status.HOLDS, SAMPLED, None, None, details)


def _f_values(spec: FunctionSpec, sample, vals):
    if sample.exact:
        return [spec(v) for v in vals]
    return spec.evaluate_float(np.asarray(vals, dtype=float))


def _check_k(k, name="k"):
    k = as_scalar(k)
    if not (k > 0 and k < 1):
        raise HypothesisViolated(f"{name} must lie in (0, 1), got {S.scalar_to_json(k)}")
    return k


def check_condition_a(g, spec: FunctionSpec, k, D, schedule=None, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """f(d(gx, gu)) <= k d(x, u) for all u within a per-point eps_x."""
    k = _check_k(k)
    sample = as_sample(D, g)
    schedule = schedule or default_schedule(sample)
    return _per_point(sample, "condition-a",
                      lambda x, us: _f_values(spec, sample, sample.image_distances(x, us)),
                      k, schedule, tol)


def check_local_radial_contraction(g, D, c, schedule=None, tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """d(gx, gu) <= c d(x, u) for all u within a per-point eps_x."""
    c = _check_k(c, "c")
    sample = as_sample(D, g)
    schedule = schedule or default_schedule(sample)
    return _per_point(sample, "local-radial-contraction", sample.image_distances, c, schedule, tol)


# ---------------------------------------------------------------------------
# conditions on f
# ---------------------------------------------------------------------------

def _to_fraction(x) -> Fraction:
    """Exact value of a rational input; floats are read as the decimal they print as."""
    if isinstance(x, float):
        return Fraction(repr(x))
    x = as_scalar(x)
    if x.is_exact and x.is_rational:
        return x.r
    return Fraction(repr(float(x)))


def derive_contraction_constant(k, fprime0):
    """c = (k/f'(0) + 1)/2, with k/f'(0) read as 0 when f'(0) is infinite.

    Exact for rational inputs; k/f'(0) < c < 1 whenever f'(0) > k.
    """
    kk = _to_fraction(k)
    if not 0 < kk < 1:
        raise HypothesisViolated(f"k must lie in (0, 1), got {k}")
    if isinstance(fprime0, float) and math.isinf(fprime0):
        if fprime0 < 0:
            raise HypothesisViolated("f'(0) = -inf")
        return Fraction(1, 2)
    fp = _to_fraction(fprime0)
    if fp <= kk:
        raise HypothesisViolated(f"f'(0) = {fprime0} does not exceed k = {k}")
    return (kk / fp + 1) / 2


def check_condition_b(spec: FunctionSpec, k, depth: int = 40) -> PropertyVerdict:
    """f'(0) > k, using the ratio-sequence estimate (+inf passes)."""
    k = _check_k(k)
    rep = estimate_derivative_at_zero(spec, depth=depth)
    est = rep.estimate
    margin = math.inf if math.isinf(est) else est - float(k)
    ok = math.isinf(est) or est > float(k)
    status = Status.HOLDS if ok else Status.FAILS
    ce = None if ok else Counterexample((k,), (as_scalar(est),), "f'(0) > k")
    return PropertyVerdict("condition-b", status, SAMPLED, None, ce,
                           {"fprime0": est, "margin": margin, "k": k})


def check_condition_b_prime(spec: FunctionSpec, k, c, schedule=None, t0=1,
                            tol: float = DEFAULT_TOL) -> PropertyVerdict:
    """f(c t) >= k t for every t in the schedule t0 * 2^-i, i <= 20."""
    k = _check_k(k)
    c = _check_k(c, "c")
    t0 = as_scalar(t0)
    schedule = schedule or [t0 * Fraction(1, 2 ** i) for i in range(SCHEDULE_DEPTH + 1)]
    for t in schedule:
        t = as_scalar(t)
        lhs = spec(c * t)
        if not leq(k * t, lhs, tol):
            ce = Counterexample((t,), (lhs, k * t), "f(c t) >= k t")
            return PropertyVerdict("condition-b-prime", Status.FAILS, SAMPLED, None, ce, {"k": k, "c": c})
    return PropertyVerdict("condition-b-prime", Status.HOLDS, SAMPLED, None, None,
                           {"k": k, "c": c, "t0": t0, "samples": len(schedule)})


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

class Conclusion(str, Enum):
    LOCAL_RADIAL = "LocalRadialContraction"
    UNIFORM_MULTIVAL = "UniformLocalMultivaluedContraction"
    NOT_ESTABLISHED = "NotEstablished"


@dataclass
class HypothesisReport:
    condition_a: PropertyVerdict
    condition_b: PropertyVerdict | None
    derived_c: Fraction | None
    conclusion: Conclusion
    cross_check: PropertyVerdict | None = None
    eps: object = None
    notes: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        """False only when the hypotheses held but the direct conclusion check failed."""
        if self.conclusion is Conclusion.NOT_ESTABLISHED or self.cross_check is None:
            return True
        return self.cross_check.holds

    def to_json(self) -> dict:
        out = {"condition_a": self.condition_a.to_json(),
               "condition_b": None if self.condition_b is None else self.condition_b.to_json(),
               "derived_c": None if self.derived_c is None else S.format_fraction(self.derived_c),
               "conclusion": self.conclusion.value,
               "consistent": self.consistent}
        if self.cross_check is not None:
            out["cross_check"] = self.cross_check.to_json()
        if self.eps is not None:
            out["eps"] = S.scalar_to_json(self.eps)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def establish_local_radial_contraction(g, spec: FunctionSpec, k, D, schedule=None,
                                       b_prime_c=None, tol: float = DEFAULT_TOL) -> HypothesisReport:
    """Check (a) and (b) (or the f(ct) >= kt form when ``b_prime_c`` is given), derive c, cross-check."""
    k = _check_k(k)
    sample = as_sample(D, g)
    schedule = schedule or default_schedule(sample)
    cond_a = check_condition_a(g, spec, k, sample, schedule, tol)
    if b_prime_c is not None:
        cond_b = check_condition_b_prime(spec, k, b_prime_c, tol=tol)
    else:
        cond_b = check_condition_b(spec, k)
    if not (cond_a.holds and cond_b.holds):
        return HypothesisReport(cond_a, cond_b, None, Conclusion.NOT_ESTABLISHED)
    fp = estimate_derivative_at_zero(spec).estimate
    try:
        c = derive_contraction_constant(k, fp)
    except HypothesisViolated as exc:
        return HypothesisReport(cond_a, cond_b, None, Conclusion.NOT_ESTABLISHED, notes=[str(exc)])
    cross = check_local_radial_contraction(g, sample, _as_constant(c, sample), schedule, tol)
    return HypothesisReport(cond_a, cond_b, c, Conclusion.LOCAL_RADIAL, cross)


def _as_constant(c: Fraction, sample):
    return S.q(c) if sample.exact else as_scalar(float(c))


# ---------------------------------------------------------------------------
# multivalued maps
# ---------------------------------------------------------------------------

def _pairs_within(D: FiniteMetricSpace, eps, domain):
    for i, x in enumerate(domain):
        for y in domain[i + 1:]:
            if eps is None or S.compare(D(x, y), eps) < 0:
                yield x, y


class _HCache:
    def __init__(self, T: MultiMap, D: FiniteMetricSpace):
        self.T, self.D, self._c = T, D, {}

    def __call__(self, x, y):
        key = (min(x, y), max(x, y))
        if key not in self._c:
            self._c[key] = hausdorff_distance(self.T(x), self.T(y), self.D)
        return self._c[key]


def check_uniform_local_multival(T: MultiMap, D: FiniteMetricSpace, eps, k,
                                 tol: float = DEFAULT_TOL, H=None) -> PropertyVerdict:
    """H(Tx, Ty) <= k d(x, y) for every pair with d(x, y) < eps."""
    k = _check_k(k)
    eps = as_scalar(eps)
    if not eps > 0:
        raise ValueError("eps must be positive")
    T.check_into(D)
    H = H or _HCache(T, D)
    checked = 0
    for x, y in _pairs_within(D, eps, T.domain):
        checked += 1
        h = H(x, y)
        if not leq(h, k * D(x, y), tol):
            ce = Counterexample((D.label(x), D.label(y)), (h, D(x, y)), "H(Tx,Ty) <= k d(x,y) for d(x,y) < eps")
            return PropertyVerdict("uniform-local-multival", Status.FAILS, SAMPLED, None, ce, {"eps": eps, "k": k})
    return PropertyVerdict("uniform-local-multival", Status.HOLDS, SAMPLED, None, None,
                           {"eps": eps, "k": k, "pairs_checked": checked})


def check_multival_condition_a(T: MultiMap, spec: FunctionSpec, k, D: FiniteMetricSpace,
                               tol: float = DEFAULT_TOL, H=None) -> PropertyVerdict:
    """f(H(Tx, Ty)) <= k d(x, y) for every pair."""
    k = _check_k(k)
    T.check_into(D)
    H = H or _HCache(T, D)
    for x, y in _pairs_within(D, None, T.domain):
        fh = spec(H(x, y))
        if not leq(fh, k * D(x, y), tol):
            ce = Counterexample((D.label(x), D.label(y)), (fh, D(x, y)), "f(H(Tx,Ty)) <= k d(x,y)")
            return PropertyVerdict("multival-condition-a", Status.FAILS, SAMPLED, None, ce, {"k": k})
    return PropertyVerdict("multival-condition-a", Status.HOLDS, SAMPLED, None, None, {"k": k})


def _ratio_exceeds(spec, z, bound):
    """f(z) > bound * z, strictly."""
    return not leq(spec(z), bound * z, 0.0)


def estimate_delta(spec: FunctionSpec, bound, D: FiniteMetricSpace, extra: Sequence = (),
                   depth: int = SCHEDULE_DEPTH):
    """Largest delta = diam * 2^i (i = 4 down to -depth) with f(z) > bound z on sampled z <= delta.

    Sampled z: delta * j/64 for j = 1..64, plus every positive distance of D
    and every value in ``extra`` not exceeding delta.
    """
    bound = as_scalar(bound)
    diam = D.diameter()
    known = sorted({v for row in D.d for v in row if v > 0} | {as_scalar(v) for v in extra if v > 0}, key=float)
    for i in range(4, -depth - 1, -1):
        delta = diam * (Fraction(2) ** i)
        zs = [delta * Fraction(j, 64) for j in range(1, 65)] + [v for v in known if leq(v, delta, 0.0)]
        if all(_ratio_exceeds(spec, z, bound) for z in zs):
            return delta
    return None


def establish_multival_contraction(T: MultiMap, spec: FunctionSpec, k, D: FiniteMetricSpace,
                                   tol: float = DEFAULT_TOL) -> HypothesisReport:
    """Condition (a) for T plus f'(0) > k give an (eps, c) uniform local contraction; verify it."""
    k = _check_k(k)
    T.check_into(D)
    H = _HCache(T, D)
    cond_a = check_multival_condition_a(T, spec, k, D, tol, H)
    cond_b = check_condition_b(spec, k)
    if not (cond_a.holds and cond_b.holds):
        return HypothesisReport(cond_a, cond_b, None, Conclusion.NOT_ESTABLISHED)
    try:
        c = derive_contraction_constant(k, cond_b.details["fprime0"])
    except HypothesisViolated as exc:
        return HypothesisReport(cond_a, cond_b, None, Conclusion.NOT_ESTABLISHED, notes=[str(exc)])
    hs = [H(x, y) for x, y in _pairs_within(D, None, T.domain)]
    delta = estimate_delta(spec, k / S.q(c), D, hs)
    if delta is None:
        return HypothesisReport(cond_a, cond_b, c, Conclusion.NOT_ESTABLISHED,
                                notes=["no delta in the schedule with f(z) > (k/c) z on sampled z <= delta"])
    eps = delta * Fraction(1, 4)      # largest schedule value strictly below delta/2
    cross = check_uniform_local_multival(T, D, eps, S.q(c), tol, H)
    return HypothesisReport(cond_a, cond_b, c, Conclusion.UNIFORM_MULTIVAL, cross, eps=eps)
