"""Random instances: rational metric spaces, concave transforms, contraction and multivalued set-ups.

All generators draw from a numpy Generator; :func:`rng` seeds it from the
METRIKA_SEED environment variable so suites are reproducible.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np

from metrika import scalars as S
from metrika.contraction import IndexMap, MultiMap, derive_contraction_constant
from metrika.errors import HypothesisViolated
from metrika.functions import FunctionSpec, affine, catalog, piecewise
from metrika.metricspace import FiniteMetricSpace, validate_metric
from metrika.properties import estimate_derivative_at_zero
from metrika.scalars import Exact

DEFAULT_SEED = 20240607


def rng(seed=None) -> np.random.Generator:
    if seed is None:
        seed = int(os.environ.get("METRIKA_SEED", DEFAULT_SEED))
    return np.random.default_rng(seed)


def _frac(r: np.random.Generator, lo: int, hi: int, den: int) -> Fraction:
    return Fraction(int(r.integers(lo * den, hi * den + 1)), den)


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------

def _distinct_points(r, n, dim, hi=16, den=1):
    pts = set()
    while len(pts) < n:
        pts.add(tuple(_frac(r, 0, hi, den) for _ in range(dim)))
    return sorted(pts)


def _l1(p, q):
    return sum((abs(a - b) for a, b in zip(p, q)), Fraction(0))


def _linf(p, q):
    return max(abs(a - b) for a, b in zip(p, q))


def space_from_points(points, metric: str = "l1", labels=None) -> FiniteMetricSpace:
    dist = _l1 if metric == "l1" else _linf
    d = [[dist(p, q) for q in points] for p in points]
    return FiniteMetricSpace(d, labels=labels)


def random_rational_space(r: np.random.Generator, n_max: int = 12, n_min: int = 2) -> FiniteMetricSpace:
    """n <= n_max distinct rational points in Q^m (m <= 3) under the l1 or l-inf metric; validated."""
    n = int(r.integers(n_min, n_max + 1))
    dim = int(r.integers(1, 4))
    den = int(r.choice([1, 2, 3, 4, 8]))
    while (8 * den + 1) ** dim < 2 * n:      # leave room for n distinct lattice points
        den *= 2
    pts = _distinct_points(r, n, dim, hi=8, den=den)
    D = space_from_points(pts, "l1" if r.random() < 0.5 else "linf")
    if not validate_metric(D).valid:  # pragma: no cover - l1/linf on distinct points is a metric
        raise AssertionError("generated space is not a metric")
    return D


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def random_concave_transform(r: np.random.Generator, max_pieces: int = 4) -> FunctionSpec:
    """f(0) = 0, strictly increasing, concave and piecewise affine with rational data.

    The first slope is 1 a third of the time (fixed interval from 0), above 1
    with a later slope below 1 a third of the time (a single crossing), and
    below 1 otherwise.
    """
    m = int(r.integers(1, max_pieces + 1))
    mode = r.integers(0, 3)
    if mode == 0:
        first = Fraction(1)
    elif mode == 1:
        first = Fraction(1) + _frac(r, 0, 2, 8) + Fraction(1, 8)
    else:
        first = Fraction(int(r.integers(1, 8)), 8)
    slopes = [first]
    for _ in range(m - 1):
        slopes.append(slopes[-1] * Fraction(int(r.integers(1, 8)), 8))
    if mode == 1 and m == 1:
        slopes.append(Fraction(int(r.integers(1, 8)), 8))
    if mode == 1 and slopes[-1] >= 1:
        slopes[-1] = Fraction(int(r.integers(1, 8)), 8) * min(slopes[-2] if len(slopes) > 1 else 1, 1)
    cuts = sorted({_frac(r, 0, 8, 8) for _ in range(len(slopes) - 1)} - {Fraction(0)})
    slopes = slopes[:len(cuts) + 1]
    rows, lo, y = [], Fraction(0), Fraction(0)
    for i, s in enumerate(slopes):
        rows.append((lo, affine(s, y - s * lo)))
        if i < len(cuts):
            y = y + s * (cuts[i] - lo)
            lo = cuts[i]
    return piecewise(*rows)


def metric_preserving_pool() -> list:
    """Catalog entries classified metric-preserving, with a few parameter variants."""
    return [catalog("identity"), catalog("half"), catalog("sqrt_ax", a=2), catalog("clamp", a=2),
            catalog("kirk_f"), catalog("kirk_g"), catalog("kirk_h"), catalog("f_ab"),
            catalog("f_ab", a=3, b=Fraction(1, 2)), catalog("ceiling"), catalog("floor_sqrt"),
            catalog("x_plus_abs_sin"), catalog("example5_g"), catalog("example5_h"),
            catalog("tight_fixset"), catalog("power", p=Fraction(1, 2))]


# ---------------------------------------------------------------------------
# contraction instances
# ---------------------------------------------------------------------------

@dataclass
class ContractionInstance:
    D: FiniteMetricSpace
    spec: FunctionSpec
    k: Fraction
    kind: str
    g: IndexMap | None = None
    T: MultiMap | None = None


def _contraction_pool() -> list:
    return [catalog("identity"), catalog("f_ab"), catalog("f_ab", a=3, b=Fraction(1, 2)),
            catalog("clamp", a=2), catalog("kirk_g"), catalog("kirk_h"), catalog("half"),
            catalog("sqrt_ax", a=2), catalog("ceiling"), catalog("kirk_f"), catalog("x_plus_abs_sin"),
            catalog("floor_sqrt")]


_FP_CACHE: dict = {}


def _fprime0(spec: FunctionSpec) -> float:
    key = spec.to_json().__repr__()
    if key not in _FP_CACHE:
        _FP_CACHE[key] = estimate_derivative_at_zero(spec).estimate
    return _FP_CACHE[key]


def _small_scale(spec: FunctionSpec, k: Fraction, fp: float) -> Fraction:
    """A diameter below which f(t) > (k/c) t on a fine sample, c the derived constant."""
    try:
        c = derive_contraction_constant(k, fp)
    except HypothesisViolated:
        return Fraction(1)
    bound = Exact._rat(k / c)
    for i in range(0, 31):
        delta = Fraction(1, 2 ** i)
        zs = [Exact._rat(delta * Fraction(j, 64)) for j in range(1, 65)]
        if all(not S.leq(spec(z), bound * z, 0.0) for z in zs):
            return delta
    return Fraction(1, 2 ** 30)


def _scaled_points(r, n, dim, diam):
    raw = _distinct_points(r, n, dim, hi=16)
    scale = diam / (16 * dim)
    return [tuple(c * scale for c in p) for p in raw]


def contraction_instance(r: np.random.Generator, n_max: int = 10, multivalued: bool = False) -> ContractionInstance:
    """A random (space, map, f, k) with small diameter; hypotheses may or may not hold."""
    pool = _contraction_pool()
    spec = pool[int(r.integers(len(pool)))]
    if r.random() < 0.25:
        spec = random_concave_transform(r)
    k = Fraction(int(r.integers(2, 20)), 20)
    fp = _fprime0(spec)
    diam = _small_scale(spec, k, fp)
    dim = int(r.integers(1, 3))
    n = int(r.integers(2, max(3, n_max // 2) + 1))
    P = _scaled_points(r, n, dim, diam)
    kind = str(r.choice(["scaling", "constant", "clustered"]))
    if kind == "scaling":
        # lambda * f'(0) < k keeps f(lambda d) <= k d for concave f
        top = k / Fraction(fp).limit_denominator(1000) if math.isfinite(fp) and fp > 0 else k
        lam = min(top, Fraction(7, 8)) * Fraction(int(r.integers(1, 8)), 8)
        lam = max(lam, Fraction(1, 64))
        amb = sorted(set(P) | {tuple(c * lam for c in p) for p in P})
        D = space_from_points(amb)
        images = [None] * len(amb)
        extra = [amb.index(tuple(c * lam for c in p)) for p in P if r.random() < 0.3] if multivalued else []
        for p in P:
            t = amb.index(tuple(c * lam for c in p))
            images[amb.index(p)] = (t,) + tuple(extra)
    else:
        D = space_from_points(P)
        if kind == "constant":
            target = tuple(int(v) for v in r.choice(n, size=int(r.integers(1, 3)) if multivalued else 1, replace=False))
            images = [target] * n
        else:
            hub = int(r.integers(n))
            near = sorted(range(n), key=lambda u: float(D(hub, u)))[:2]
            images = [tuple(int(v) for v in r.choice(near, size=1 + int(multivalued and r.random() < 0.5),
                                                     replace=False)) for _ in range(n)]
    validate_metric(D)
    if multivalued:
        return ContractionInstance(D, spec, k, kind, T=MultiMap(images))
    g = IndexMap([None if img is None else img[0] for img in images])
    return ContractionInstance(D, spec, k, kind, g=g)


# ---------------------------------------------------------------------------
# Nadler instances
# ---------------------------------------------------------------------------

@dataclass
class NadlerInstance:
    D: FiniteMetricSpace
    T: MultiMap
    eps: Fraction
    k: Fraction
    kind: str


def chain_threshold(D: FiniteMetricSpace) -> Fraction:
    """Largest edge of a minimum spanning tree: the space is eps-chainable iff eps exceeds it."""
    G = nx.Graph()
    for i in range(D.n):
        for j in range(i + 1, D.n):
            G.add_edge(i, j, weight=float(D(i, j)), exact=D(i, j))
    tree = nx.minimum_spanning_tree(G)
    return max((e["exact"] for _, _, e in tree.edges(data=True)), key=float, default=S.ZERO).r


def nadler_instance(r: np.random.Generator, n_max: int = 10) -> NadlerInstance:
    """A chainable space with a multivalued map; half clustered constructions, half random draws."""
    k = Fraction(int(r.integers(10, 19)), 20)
    if r.random() < 0.5:
        # clusters far apart relative to their size; T constant on clusters, images in one cluster
        n_clusters = int(r.integers(2, 4))
        gap = Fraction(4)
        pts, cluster_of = [], []
        for c in range(n_clusters):
            size = int(r.integers(1, max(2, n_max // n_clusters) + 1))
            members = {(gap * c + _frac(r, 0, 1, 8),) for _ in range(size)}
            for p in sorted(members):
                pts.append(p)
                cluster_of.append(c)
        D = space_from_points(pts)
        eps = chain_threshold(D) + Fraction(1, 16)
        home = int(r.integers(n_clusters))
        zone = [i for i, c in enumerate(cluster_of) if c == home]
        per_cluster = {}
        for c in range(n_clusters):
            size = int(r.integers(1, len(zone) + 1))
            per_cluster[c] = tuple(int(v) for v in r.choice(zone, size=size, replace=False))
        T = MultiMap([per_cluster[c] for c in cluster_of])
        return NadlerInstance(D, T, eps, k, "clustered")
    n = int(r.integers(2, min(6, n_max) + 1))
    P = _distinct_points(r, n, 1, hi=6)
    D = space_from_points(P)
    eps = chain_threshold(D) + Fraction(int(r.integers(1, 4)), 4)
    images = []
    for _ in range(n):
        size = int(r.integers(1, 3))
        images.append(tuple(int(v) for v in r.choice(n, size=min(size, n), replace=False)))
    return NadlerInstance(D, MultiMap(images), eps, k, "random")
