import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metrika import scalars as S
from metrika.errors import EmptySubset, ShapeError
from metrika.functions import catalog
from metrika.generators import metric_preserving_pool, random_rational_space, rng, space_from_points
from metrika.metricspace import (FiniteMetricSpace, PathPolyline, check_hausdorff_axioms,
                                 epsilon_chainable, hausdorff, path_length, transform_metric,
                                 validate_metric)
from strategies import concave_transforms

q = S.q


def brute_triangle(D):
    """First (i, j, k) in lexicographic order with d(i,k) > d(i,j) + d(j,k)."""
    for i, j, k in itertools.product(range(D.n), repeat=3):
        if D(i, k) > D(i, j) + D(j, k):
            return (i, j, k)
    return None


@st.composite
def rational_spaces(draw, n_max=8):
    pts = draw(st.lists(st.tuples(*[st.integers(0, 12)] * 2), min_size=2, max_size=n_max, unique=True))
    return space_from_points(pts, draw(st.sampled_from(["l1", "linf"])))


# -- validation -----------------------------------------------------------

def test_equilateral_is_valid():
    assert validate_metric(FiniteMetricSpace([[0, 1, 1], [1, 0, 1], [1, 1, 0]])).valid


def test_squared_line_violates_triangle():
    D = transform_metric(FiniteMetricSpace.line([0, 1, 3]), catalog("power", p=2))
    v = validate_metric(D)
    assert not v.valid and v.violation == "triangle"
    assert v.indices == (0, 1, 2) == brute_triangle(D)
    assert v.witness == (0, 1, 3)


def test_zero_off_diagonal_is_identity_violation():
    v = validate_metric(FiniteMetricSpace([[0, 0, 1], [0, 0, 1], [1, 1, 0]]))
    assert v.violation == "zero-off-diagonal" and v.indices == (0, 1)


def test_other_axiom_failures():
    assert validate_metric(FiniteMetricSpace([[1, 1], [1, 0]])).violation == "nonzero-diagonal"
    assert validate_metric(FiniteMetricSpace([[0, 1], [2, 0]])).violation == "asymmetry"


def test_non_square_table_is_shape_error():
    with pytest.raises(ShapeError):
        FiniteMetricSpace([[0, 1], [1]])


@given(st.lists(st.lists(st.integers(0, 5), min_size=4, max_size=4), min_size=4, max_size=4))
def test_triangle_report_matches_brute_force(rows):
    # symmetric, zero diagonal, positive off-diagonal
    d = [[0 if i == j else 1 + rows[min(i, j)][max(i, j)] for j in range(4)] for i in range(4)]
    D = FiniteMetricSpace(d)
    v = validate_metric(D)
    expected = brute_triangle(D)
    assert v.valid == (expected is None)
    if expected is not None:
        assert v.indices == expected


@given(rational_spaces(), concave_transforms())
def test_concave_transform_of_valid_space_is_valid(D, f):
    assert validate_metric(D).valid
    assert validate_metric(transform_metric(D, f)).valid


def test_pool_on_random_spaces_exactly():
    r = rng(7)
    for _ in range(20):
        D = random_rational_space(r)
        for f in metric_preserving_pool():
            assert validate_metric(transform_metric(D, f), tol=0.0).valid, f.label


def test_transform_of_equilateral_via_sqrt():
    D = transform_metric(FiniteMetricSpace([[0, 1, 1], [1, 0, 1], [1, 1, 0]]), catalog("sqrt_ax"))
    assert D.d == ((q(0), q(1), q(1)), (q(1), q(0), q(1)), (q(1), q(1), q(0)))
    assert not D.validated


def test_json_round_trip_and_point_cloud():
    D = FiniteMetricSpace.line([0, Fraction(1, 2), 3])
    E = FiniteMetricSpace.from_json(D.to_json())
    assert E.d == D.d
    P = FiniteMetricSpace.from_json({"dim": 2, "points": [[0, 0], [3, 4]], "metric": "euclidean"})
    assert P(0, 1) == q(5)
    T = FiniteMetricSpace.from_json({"dim": 1, "points": [[0], [4]],
                                     "metric": {"transformed": {"kind": "catalog", "name": "sqrt_ax"}}})
    assert T(0, 1) == q(2)


# -- Hausdorff --------------------------------------------------------------

def test_hausdorff_of_set_with_itself():
    D = FiniteMetricSpace.line(range(5))
    assert hausdorff([0, 3], [0, 3], D)[2] == q(0)


def test_hausdorff_directed_values():
    D = FiniteMetricSpace.line([0, 1, 2])
    assert hausdorff([0, 1], [2], D) == (q(2), q(1), q(2))


def test_hausdorff_symmetric():
    D = FiniteMetricSpace.line([0, 5])
    assert hausdorff([0], [1], D)[2] == hausdorff([1], [0], D)[2] == q(5)


def test_empty_subset_raises():
    with pytest.raises(EmptySubset):
        hausdorff([], [0], FiniteMetricSpace.line([0, 1]))


@given(rational_spaces())
def test_singleton_hausdorff_is_distance(D):
    for a in range(D.n):
        for b in range(D.n):
            assert hausdorff([a], [b], D)[2] == D(a, b)


@given(rational_spaces())
def test_singletons_satisfy_axioms(D):
    assert check_hausdorff_axioms([[i] for i in range(D.n)], D).valid


def test_random_subsets_satisfy_axioms():
    r = np.random.default_rng(3)
    for _ in range(10):
        D = random_rational_space(r, n_max=8, n_min=8)
        subsets = [sorted(set(r.choice(8, size=int(r.integers(1, 5)))))
                   for _ in range(5)]
        assert check_hausdorff_axioms(subsets, D).valid


def test_duplicated_subset_has_zero_distance():
    D = FiniteMetricSpace.line([0, 1, 4])
    assert check_hausdorff_axioms([[0, 2], [0, 2], [1]], D).valid
    assert hausdorff([0, 2], [2, 0], D)[2] == q(0)


# -- chainability ------------------------------------------------------------

def test_unit_gaps_chainable():
    res = epsilon_chainable(FiniteMetricSpace.line(range(10)), Fraction(3, 2))
    assert res.chainable and res.chain[0] == 0 and res.chain[-1] == 9


def test_far_pair_not_chainable_with_cut():
    res = epsilon_chainable(FiniteMetricSpace.line([0, 10]), 1)
    assert not res.chainable and res.cut == ([0], [1])


def test_chain_steps_are_strictly_below_eps():
    D = FiniteMetricSpace.line(range(4))
    assert not epsilon_chainable(D, 1).chainable
    res = epsilon_chainable(D, Fraction(11, 10))
    assert all(D(a, b) < Fraction(11, 10) for a, b in zip(res.chain, res.chain[1:]))


@given(st.lists(st.fractions(0, 1, max_denominator=64), min_size=2, max_size=20, unique=True))
def test_fine_samples_of_an_interval_are_chainable(xs):
    pts = sorted(set(xs) | {Fraction(0), Fraction(1)})
    D = FiniteMetricSpace.line(pts)
    gap = max(b - a for a, b in zip(pts, pts[1:]))
    for eps in (gap + Fraction(1, 128), Fraction(1, 2) + gap, Fraction(2)):
        assert epsilon_chainable(D, eps).chainable


@given(rational_spaces())
def test_chainability_monotone_in_eps(D):
    eps_grid = [Fraction(j, 2) for j in range(1, 40)]
    flags = [epsilon_chainable(D, e).chainable for e in eps_grid]
    first = flags.index(True) if True in flags else len(flags)
    assert all(flags[first:])


@given(rational_spaces())
def test_cut_separates_by_at_least_eps(D):
    res = epsilon_chainable(D, 3)
    if not res.chainable:
        left, right = res.cut
        assert all(D(a, b) >= 3 for a in left for b in right)


# -- path length --------------------------------------------------------------

def test_segment_length_converges_at_depth_zero():
    res = path_length(PathPolyline([[0, 0], [3, 4]]), 0)
    assert res.length == pytest.approx(5) and res.converged


def test_half_circle_length():
    t = np.linspace(0, math.pi, 64)
    path = PathPolyline(np.column_stack([np.cos(t), np.sin(t)]))
    # inscribed polygon with 63 equal chords: 126 sin(pi / 126)
    assert path_length(path, 0).length == pytest.approx(126 * math.sin(math.pi / 126), abs=1e-12)
    assert abs(path_length(path, 4).length - math.pi) <= 1e-3


def test_single_point_has_zero_length():
    assert path_length(PathPolyline([[1.0, 2.0]]), 3).length == 0


paths = st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=1, max_size=8)


@given(paths, concave_transforms())
def test_refinement_never_shortens(pts, f):
    for metric in ("euclidean", f):
        hist = path_length(PathPolyline(np.array(pts, dtype=float).reshape(-1, 2), metric), 5).history
        assert all(b >= a - 1e-12 for a, b in zip(hist, hist[1:]))
