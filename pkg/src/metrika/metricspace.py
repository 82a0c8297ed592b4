"""Finite metric spaces, transformed metrics, Hausdorff distance, chainability and path length."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from metrika import scalars as S
from metrika.errors import EmptySubset, InvalidSpec, ShapeError
from metrika.functions import FunctionSpec
from metrika.scalars import DEFAULT_TOL, ScalarValue, as_scalar, leq

# float screen margin below which a triangle is re-checked in exact arithmetic
_SCREEN = 1e-7


@dataclass(eq=False)
class FiniteMetricSpace:
    """An n x n distance table of scalars, optionally labelled.

    ``validated`` is only ever set by :func:`validate_metric`.
    """

    d: tuple
    labels: tuple | None = None
    validated: bool = False
    _arr: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        rows = [tuple(as_scalar(v) for v in row) for row in self.d]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ShapeError(f"distance table is not square ({n} rows, row lengths {[len(r) for r in rows]})")
        self.d = tuple(rows)
        if self.labels is not None:
            self.labels = tuple(self.labels)
            if len(self.labels) != n:
                raise ShapeError("label count differs from the number of points")

    @property
    def n(self) -> int:
        return len(self.d)

    def __len__(self):
        return self.n

    def __call__(self, i: int, j: int) -> ScalarValue:
        return self.d[i][j]

    @property
    def is_exact(self) -> bool:
        return all(v.is_exact for row in self.d for v in row)

    def array(self) -> np.ndarray:
        if self._arr is None:
            self._arr = np.array([[float(v) for v in row] for row in self.d], dtype=float).reshape(self.n, self.n)
        return self._arr

    def label(self, i: int):
        return i if self.labels is None else self.labels[i]

    def diameter(self) -> ScalarValue:
        best = S.ZERO
        for row in self.d:
            for v in row:
                best = S.smax(best, v)
        return best

    # -- constructors --------------------------------------------------
    @classmethod
    def line(cls, points: Iterable) -> "FiniteMetricSpace":
        """Points on the real line with d(x, y) = |x - y|; labels are the points themselves."""
        pts = [as_scalar(p) for p in points]
        d = [[abs(a - b) for b in pts] for a in pts]
        return cls(d, labels=tuple(_label_of(p) for p in pts))

    @classmethod
    def from_points(cls, points: Sequence[Sequence], metric="euclidean") -> "FiniteMetricSpace":
        """Distance table of a point cloud under euclidean, l1, linf, or f applied to euclidean."""
        pts = [[as_scalar(c) for c in p] for p in points]
        dims = {len(p) for p in pts}
        if len(dims) > 1:
            raise ShapeError("points have differing dimensions")
        spec = None
        if isinstance(metric, FunctionSpec):
            spec, metric = metric, "euclidean"
        n = len(pts)
        d = [[S.ZERO] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                diffs = [abs(a - b) for a, b in zip(pts[i], pts[j])]
                if metric == "l1":
                    v = sum(diffs, S.ZERO)
                elif metric == "linf":
                    v = S.ZERO
                    for x in diffs:
                        v = S.smax(v, x)
                elif metric == "euclidean":
                    v = S.sqrt(sum((x * x for x in diffs), S.ZERO))
                else:
                    raise InvalidSpec(f"unknown metric {metric!r}")
                if spec is not None:
                    v = spec(v)
                d[i][j] = d[j][i] = v
        return cls(d)

    # -- serialization -------------------------------------------------
    def to_json(self) -> dict:
        out = {"n": self.n, "d": [[S.scalar_to_json(v) for v in row] for row in self.d]}
        if self.labels is not None:
            out["labels"] = [S.scalar_to_json(x) if isinstance(x, ScalarValue) else x for x in self.labels]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteMetricSpace":
        """Read either the distance-table format or the point-cloud format."""
        if not isinstance(obj, dict):
            raise InvalidSpec("metric space must be a JSON object")
        try:
            if "points" in obj:
                metric = obj.get("metric", "euclidean")
                if isinstance(metric, dict):
                    if "transformed" not in metric:
                        raise InvalidSpec(f"unknown metric {metric!r}")
                    metric = FunctionSpec.from_json(metric["transformed"])
                pts = obj["points"]
                if "dim" in obj and any(len(p) != obj["dim"] for p in pts):
                    raise ShapeError("point dimension disagrees with 'dim'")
                return cls.from_points(pts, metric)
            d = obj["d"]
            if "n" in obj and obj["n"] != len(d):
                raise ShapeError("'n' disagrees with the table size")
            return cls([[S.scalar_from_json(v) for v in row] for row in d], labels=obj.get("labels"))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, (ShapeError, InvalidSpec)):
                raise
            raise InvalidSpec(f"malformed metric space: {exc}") from exc


def _label_of(p: ScalarValue):
    if p.is_exact and p.is_rational:
        r = p.r
        return int(r) if r.denominator == 1 else S.format_fraction(r)
    return S.scalar_to_json(p)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class MetricValidation:
    valid: bool
    violation: str | None = None     # nonzero-diagonal | asymmetry | zero-off-diagonal | negative | triangle
    witness: tuple | None = None     # labels of the offending points
    indices: tuple | None = None
    values: tuple = ()

    def to_json(self) -> dict:
        out = {"valid": self.valid}
        if not self.valid:
            out.update(violation=self.violation, witness=list(self.witness),
                       indices=list(self.indices), values=[S.scalar_to_json(v) for v in self.values])
        return out


def validate_metric(D: FiniteMetricSpace, tol: float = DEFAULT_TOL) -> MetricValidation:
    """Check the metric axioms; the triangle inequality is checked over every ordered triple.

    The first violation in lexicographic (i, j, k) order is reported, where the
    triple means d(i, k) > d(i, j) + d(j, k).
    """
    if not isinstance(D, FiniteMetricSpace):
        raise ShapeError("expected a FiniteMetricSpace")
    n = D.n

    def bad(kind, idx, vals):
        return MetricValidation(False, kind, tuple(D.label(i) for i in idx), tuple(idx), tuple(vals))

    for i in range(n):
        if not S.is_zero(D(i, i), tol):
            return bad("nonzero-diagonal", (i, i), (D(i, i),))
    for i in range(n):
        for j in range(i + 1, n):
            a, b = D(i, j), D(j, i)
            if not S.close(a, b, tol):
                return bad("asymmetry", (i, j), (a, b))
            if a < 0:
                return bad("negative", (i, j), (a,))
            if S.is_zero(a, tol):
                return bad("zero-off-diagonal", (i, j), (a,))

    arr = D.array()
    if n >= 3:
        # margin[i, j, k] = d(i,j) + d(j,k) - d(i,k)
        margin = arr[:, :, None] + arr[None, :, :] - arr[:, None, :]
        scale = max(1.0, float(np.abs(arr).max()))
        suspects = np.argwhere(margin < _SCREEN * scale)  # row-major: lexicographic
        for i, j, k in suspects:
            i, j, k = int(i), int(j), int(k)
            if i == j or j == k:
                continue
            lhs, rhs = D(i, k), D(i, j) + D(j, k)
            if not leq(lhs, rhs, tol):
                return bad("triangle", (i, j, k), (D(i, j), D(j, k), D(i, k)))
    D.validated = True
    return MetricValidation(True)


def transform_metric(D: FiniteMetricSpace, spec: FunctionSpec) -> FiniteMetricSpace:
    """Entrywise f(d); the result is deliberately left unvalidated."""
    cache = {}
    rows = []
    for row in D.d:
        out = []
        for v in row:
            if v not in cache:
                cache[v] = spec(v)
            out.append(cache[v])
        rows.append(out)
    return FiniteMetricSpace(rows, labels=D.labels)


# ---------------------------------------------------------------------------
# Hausdorff distance
# ---------------------------------------------------------------------------

def as_subset(A, D: FiniteMetricSpace) -> tuple:
    idx = tuple(sorted(set(int(i) for i in A)))
    if not idx:
        raise EmptySubset("subset is empty")
    if idx[0] < 0 or idx[-1] >= D.n:
        raise ShapeError(f"subset index out of range for a {D.n}-point space")
    return idx


def directed_distance(A, B, D: FiniteMetricSpace) -> ScalarValue:
    """rho(A, B) = max over a in A of min over b in B of d(a, b)."""
    worst = S.ZERO
    for a in A:
        near = None
        for b in B:
            v = D(a, b)
            near = v if near is None else S.smin(near, v)
        worst = S.smax(worst, near)
    return worst


def hausdorff(A, B, D: FiniteMetricSpace):
    """(rho(A,B), rho(B,A), H(A,B)) for nonempty index subsets A, B of D."""
    A, B = as_subset(A, D), as_subset(B, D)
    ab = directed_distance(A, B, D)
    ba = directed_distance(B, A, D)
    return ab, ba, S.smax(ab, ba)


def hausdorff_distance(A, B, D: FiniteMetricSpace) -> ScalarValue:
    return hausdorff(A, B, D)[2]


def check_hausdorff_axioms(subsets: Sequence, D: FiniteMetricSpace, tol: float = DEFAULT_TOL) -> MetricValidation:
    """Metric axioms of H over every pair and triple of the given subsets.

    Witnesses are positions in ``subsets``.
    """
    sets = [as_subset(A, D) for A in subsets]
    if len(sets) < 2:
        raise ValueError("need at least two subsets")
    m = len(sets)
    H = [[hausdorff_distance(sets[i], sets[j], D) for j in range(m)] for i in range(m)]
    for i in range(m):
        for j in range(m):
            same = set(sets[i]) == set(sets[j])
            if same != S.is_zero(H[i][j], tol):
                return MetricValidation(False, "identity", (i, j), (i, j), (H[i][j],))
            if not S.close(H[i][j], H[j][i], tol):
                return MetricValidation(False, "asymmetry", (i, j), (i, j), (H[i][j], H[j][i]))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                if not leq(H[i][k], H[i][j] + H[j][k], tol):
                    return MetricValidation(False, "triangle", (i, j, k), (i, j, k), (H[i][j], H[j][k], H[i][k]))
    return MetricValidation(True)


# ---------------------------------------------------------------------------
# chainability
# ---------------------------------------------------------------------------

@dataclass
class ChainResult:
    chainable: bool
    eps: ScalarValue
    chain: list | None = None        # indices from source to target
    cut: tuple | None = None         # (side containing source, rest)
    labels: tuple | None = None

    def _lab(self, i):
        return i if self.labels is None else self.labels[i]

    def to_json(self) -> dict:
        out = {"chainable": self.chainable, "eps": S.scalar_to_json(self.eps)}
        if self.chain is not None:
            out["chain"] = [self._lab(i) for i in self.chain]
        if self.cut is not None:
            out["cut"] = [[self._lab(i) for i in side] for side in self.cut]
        return out


def eps_graph(D: FiniteMetricSpace, eps) -> nx.Graph:
    """Graph on the points with an edge wherever d < eps (strict)."""
    eps = as_scalar(eps)
    G = nx.Graph()
    G.add_nodes_from(range(D.n))
    for i in range(D.n):
        for j in range(i + 1, D.n):
            if S.compare(D(i, j), eps) < 0:
                G.add_edge(i, j)
    return G


def epsilon_chainable(D: FiniteMetricSpace, eps, pair: tuple | None = None) -> ChainResult:
    """Every two points joined by steps shorter than eps; chain for ``pair`` or a separating cut."""
    eps = as_scalar(eps)
    if not eps > 0:
        raise ValueError("eps must be positive")
    G = eps_graph(D, eps)
    src, dst = pair if pair is not None else (0, D.n - 1)
    if nx.is_connected(G):
        return ChainResult(True, eps, chain=nx.shortest_path(G, src, dst), labels=D.labels)
    side = nx.node_connected_component(G, src)
    if pair is not None and dst in side:
        side = set(G) - nx.node_connected_component(G, next(v for v in G if v not in side))
    rest = sorted(set(G) - side)
    return ChainResult(False, eps, cut=(sorted(side), rest), labels=D.labels)


# ---------------------------------------------------------------------------
# path length
# ---------------------------------------------------------------------------

@dataclass
class PathPolyline:
    points: np.ndarray
    metric: object = "euclidean"     # "euclidean" or a FunctionSpec applied to euclidean distance

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if len(pts) == 0:
            raise ShapeError("a path needs at least one point")
        self.points = pts

    def distances(self, pts: np.ndarray) -> np.ndarray:
        steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if isinstance(self.metric, FunctionSpec):
            return self.metric.evaluate_float(steps)
        return steps


@dataclass
class PathLength:
    length: float
    converged: bool
    history: list


def refine(points: np.ndarray, depth: int) -> np.ndarray:
    """Subdivide every segment 2^depth-fold by linear interpolation."""
    if depth == 0 or len(points) < 2:
        return points
    k = 2 ** depth
    t = np.arange(k)[:, None] / k
    a, b = points[:-1], points[1:]
    inner = (a[:, None, :] + t[None] * (b - a)[:, None, :]).reshape(-1, points.shape[1])
    return np.vstack([inner, points[-1:]])


def path_length(path: PathPolyline, depth: int = 0, tol: float = DEFAULT_TOL) -> PathLength:
    """Partition sum at the given refinement depth.

    ``converged`` compares depth r with r - 1; at depth 0 it compares with one
    further refinement.
    """
    if depth < 0:
        raise ValueError("refinement depth must be >= 0")
    top = max(depth, 1)
    history = [float(np.sum(path.distances(refine(path.points, r)))) for r in range(top + 1)]
    if depth == 0:
        converged = abs(history[1] - history[0]) <= tol
    else:
        converged = abs(history[depth] - history[depth - 1]) <= tol
    return PathLength(history[depth], converged, history[:depth + 1])
