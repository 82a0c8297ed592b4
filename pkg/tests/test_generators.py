from fractions import Fraction

from metrika import scalars as S
from metrika.generators import (chain_threshold, contraction_instance, metric_preserving_pool,
                                nadler_instance, random_concave_transform, random_rational_space, rng)
from metrika.metricspace import epsilon_chainable, validate_metric
from metrika.properties import check_concave, check_metric_transform, classify_metric_preserving
from metrika.grids import uniform_grid


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("METRIKA_SEED", "99")
    a = random_rational_space(rng()).d
    b = random_rational_space(rng(99)).d
    assert a == b


def test_same_seed_same_instances():
    xs = [random_concave_transform(rng(4)) for _ in range(2)]
    assert xs[0] == xs[1]


def test_random_spaces_are_valid_and_small():
    r = rng(1)
    for _ in range(50):
        D = random_rational_space(r)
        assert 2 <= D.n <= 12 and D.is_exact and validate_metric(D).valid


def test_random_transforms_are_metric_transforms():
    r = rng(2)
    grid = uniform_grid(12, Fraction(1, 16))
    pgrid = uniform_grid(12, Fraction(1, 4))
    for _ in range(30):
        f = random_concave_transform(r)
        assert check_metric_transform(f, grid, pgrid).holds


def test_pool_is_classified_metric_preserving():
    for f in metric_preserving_pool():
        assert classify_metric_preserving(f).holds, f.label


def test_chain_threshold_is_the_chainability_boundary():
    r = rng(3)
    for _ in range(30):
        D = random_rational_space(r)
        t = chain_threshold(D)
        assert not epsilon_chainable(D, t).chainable
        assert epsilon_chainable(D, t + Fraction(1, 1000)).chainable


def test_instances_are_well_formed():
    r = rng(8)
    for multivalued in (False, True):
        for _ in range(20):
            inst = contraction_instance(r, multivalued=multivalued)
            assert 0 < inst.k < 1
            (inst.T if multivalued else inst.g).check_into(inst.D if multivalued else inst.D.n)
    for _ in range(20):
        inst = nadler_instance(r)
        assert inst.T.is_total and epsilon_chainable(inst.D, inst.eps).chainable
