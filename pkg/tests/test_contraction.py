import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from metrika import scalars as S
from metrika.contraction import (BoxDomain, Conclusion, IndexMap, MultiMap, NumericMap,
                                 check_condition_a, check_condition_b, check_condition_b_prime,
                                 check_local_radial_contraction, check_multival_condition_a,
                                 check_uniform_local_multival, derive_contraction_constant,
                                 establish_local_radial_contraction, establish_multival_contraction)
from metrika.errors import HypothesisViolated
from metrika.functions import affine, catalog, catalog_names, piecewise
from metrika.generators import contraction_instance, rng
from metrika.metricspace import FiniteMetricSpace

F = Fraction


def quarter_map():
    """x -> x/4 on {0, 1/4, 1/2, 1} inside the line space that also holds the images."""
    dom = [F(0), F(1, 4), F(1, 2), F(1)]
    amb = sorted(set(dom) | {x / 4 for x in dom})
    D = FiniteMetricSpace.line(amb)
    g = IndexMap([amb.index(x / 4) if x in dom else None for x in amb])
    return D, g


# -- derived constant -------------------------------------------------------

@pytest.mark.parametrize("k,fp,c", [(F(1, 2), 2, F(5, 8)), (F(1, 2), math.inf, F(1, 2)),
                                    (F(9, 10), 1, F(19, 20)), (0.5, 2.0, F(5, 8))])
def test_derived_constant(k, fp, c):
    assert derive_contraction_constant(k, fp) == c


def test_derived_constant_rejects_small_derivative():
    with pytest.raises(HypothesisViolated):
        derive_contraction_constant(F(1, 2), F(1, 2))
    with pytest.raises(HypothesisViolated):
        derive_contraction_constant(F(3, 2), 2)


@given(k=st.fractions(0, 1, max_denominator=1000).filter(lambda k: 0 < k < 1),
       extra=st.fractions(0, 100, max_denominator=1000).filter(lambda x: x > 0))
def test_derived_constant_brackets(k, extra):
    fp = k + extra
    c = derive_contraction_constant(k, fp)
    assert isinstance(c, Fraction)
    assert k / fp < c < 1


# -- condition (a) ------------------------------------------------------------

def test_identity_map_fails_condition_a():
    D = FiniteMetricSpace.line(range(4))
    v = check_condition_a(IndexMap(range(4)), catalog("identity"), F(1, 2), D)
    assert v.fails


def test_constant_map_holds_condition_a():
    D = FiniteMetricSpace.line([0, 1, 3, 7])
    for name in ("identity", "ceiling", "sqrt_ax"):
        assert check_condition_a(IndexMap([2] * 4), catalog(name), F(1, 10), D).holds


def test_quarter_map_condition_a():
    D, g = quarter_map()
    v = check_condition_a(g, catalog("f_ab"), F(9, 10), D)
    assert v.holds
    # oracle: f(d(gx, gu)) = 2 d/4 <= 0.9 d on every pair
    for x in g.domain:
        for u in g.domain:
            assert catalog("f_ab")(D(g(x), g(u))) <= D(x, u) * F(9, 10)


def test_isolated_point_is_vacuous():
    D = FiniteMetricSpace.line([0, 1000])
    schedule = [F(1, 2 ** i) for i in range(5)]
    v = check_condition_a(IndexMap([1, 0]), catalog("identity"), F(1, 2), D, schedule)
    assert v.holds and v.details["vacuous_points"] == 2


# -- condition (b) and (b') -----------------------------------------------------

def test_condition_b_examples():
    v = check_condition_b(catalog("f_ab"), F(9, 10))
    assert v.holds and v.details["margin"] == pytest.approx(1.1)
    assert check_condition_b(catalog("sqrt_ax"), F(99, 100)).holds
    assert check_condition_b(catalog("half"), F(7, 10)).fails


def test_condition_b_prime_examples():
    assert check_condition_b_prime(catalog("kirk_g"), F(1, 2), F(1, 2)).holds
    v = check_condition_b_prime(catalog("half"), F(1, 2), F(1, 2))
    assert v.fails
    t = v.counterexample.inputs[0]
    assert catalog("half")(t / 2) < t / 2


reduction_specs = [n for n in catalog_names() if n not in ("kirk_f", "example5_g", "example5_h", "tight_fixset")]


@pytest.mark.parametrize("name", reduction_specs)
def test_b_prime_implies_b(name):
    f = catalog(name)
    grid = [F(j, 8) for j in range(1, 8)]
    for k in grid:
        for c in grid:
            if check_condition_b_prime(f, k, c).holds:
                assert check_condition_b(f, k).holds, (k, c)


# -- local radial contraction -----------------------------------------------------

def test_half_map_on_line_is_local_radial():
    pts = [F(j, 8) for j in range(9)]
    D = FiniteMetricSpace.line(pts)
    g = IndexMap([pts.index(x / 2) if x / 2 in pts else None for x in pts])
    assert check_local_radial_contraction(g, D, F(3, 5)).holds


def test_identity_is_not_local_radial():
    D = FiniteMetricSpace.line([0, F(1, 10 ** 6), 1])
    assert check_local_radial_contraction(IndexMap([0, 1, 2]), D, F(99, 100)).fails


def test_numeric_scaling_on_box():
    box = BoxDomain(0.0, 1.0, dim=2)
    assert check_local_radial_contraction(NumericMap.scale(0.5, 2), box, 0.6).holds
    assert check_local_radial_contraction(NumericMap.scale(1.0, 2), box, 0.9).fails


def test_pipeline_on_quarter_map():
    D, g = quarter_map()
    rep = establish_local_radial_contraction(g, catalog("f_ab"), F(9, 10), D)
    assert rep.conclusion is Conclusion.LOCAL_RADIAL
    assert rep.derived_c == F(29, 40) and rep.cross_check.holds


def test_pipeline_with_b_prime():
    D, g = quarter_map()
    rep = establish_local_radial_contraction(g, catalog("kirk_g"), F(1, 2), D, b_prime_c=F(1, 2))
    assert rep.condition_b.property == "condition-b-prime"
    assert rep.consistent


def test_generated_single_valued_instances_are_sound():
    r = rng(11)
    held = 0
    for _ in range(40):
        inst = contraction_instance(r)
        rep = establish_local_radial_contraction(inst.g, inst.spec, inst.k, inst.D)
        if rep.conclusion is Conclusion.LOCAL_RADIAL:
            held += 1
            assert rep.cross_check.holds
    assert held > 0


# -- multivalued ----------------------------------------------------------------

def test_constant_multimap_is_uniform_local():
    D = FiniteMetricSpace.line(range(5))
    T = MultiMap([(1, 3)] * 5)
    assert check_uniform_local_multival(T, D, 10, F(1, 100)).holds


def test_singleton_identity_multimap_fails():
    D = FiniteMetricSpace.line(range(5))
    T = MultiMap([(i,) for i in range(5)])
    assert check_uniform_local_multival(T, D, F(3, 2), F(9, 10)).fails


def test_two_level_multimap():
    D = FiniteMetricSpace.line(range(5))
    T = MultiMap([(0,), (0,), (0,), (0, 1), (0, 1)])
    v = check_uniform_local_multival(T, D, F(3, 2), F(9, 10))
    assert v.fails and v.counterexample.inputs == (2, 3)
    assert check_uniform_local_multival(T, D, 1, F(9, 10)).holds


def test_multival_condition_a_examples():
    D = FiniteMetricSpace.line(range(4))
    assert check_multival_condition_a(MultiMap([(2,)] * 4), catalog("sqrt_ax"), F(1, 2), D).holds
    ident = MultiMap([(i,) for i in range(4)])
    assert check_multival_condition_a(ident, catalog("f_ab"), F(1, 2), D).fails
    Dq, g = quarter_map()
    assert check_multival_condition_a(MultiMap.from_index_map(g), catalog("f_ab"), F(9, 10), Dq).holds


def test_multival_pipeline_on_quarter_map():
    D, g = quarter_map()
    rep = establish_multival_contraction(MultiMap.from_index_map(g), catalog("f_ab"), F(9, 10), D)
    assert rep.conclusion is Conclusion.UNIFORM_MULTIVAL
    assert rep.derived_c == F(29, 40) and rep.cross_check.holds


def test_multival_pipeline_not_established():
    D = FiniteMetricSpace.line(range(4))
    ident = MultiMap([(i,) for i in range(4)])
    assert establish_multival_contraction(ident, catalog("f_ab"), F(1, 2), D).conclusion \
        is Conclusion.NOT_ESTABLISHED
    slow = piecewise((0, affine(F(3, 10))))
    rep = establish_multival_contraction(MultiMap([(0,)] * 4), slow, F(1, 2), D)
    assert rep.conclusion is Conclusion.NOT_ESTABLISHED and rep.condition_b.fails


def test_generated_multivalued_instances_are_sound():
    r = rng(12)
    held = 0
    for _ in range(30):
        inst = contraction_instance(r, multivalued=True)
        rep = establish_multival_contraction(inst.T, inst.spec, inst.k, inst.D)
        if rep.conclusion is Conclusion.UNIFORM_MULTIVAL:
            held += 1
            assert rep.cross_check.holds
    assert held > 0


@given(st.lists(st.integers(0, 4), min_size=5, max_size=5))
def test_uniform_check_matches_pair_scan(targets):
    D = FiniteMetricSpace.line(range(5))
    T = MultiMap([(t,) for t in targets])
    k = F(1, 2)
    expected = all(abs(targets[x] - targets[y]) <= k * abs(x - y)
                   for x in range(5) for y in range(5) if 0 < abs(x - y) < 2)
    assert check_uniform_local_multival(T, D, 2, k).holds == expected
