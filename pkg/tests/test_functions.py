from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metrika import scalars as S
from metrika.errors import DomainError, InvalidSpec, RationalityRequired
from metrika.functions import (FunctionSpec, affine, catalog, catalog_names, constant,
                               piecewise, sqrt_piece)
from metrika.scalars import Approx


def test_half_at_four():
    assert catalog("half")(S.q(4)) == S.q(2)


def test_kirk_h_on_middle_piece():
    # x - 9 on (10, 11)
    assert catalog("kirk_h")(S.q(Fraction(21, 2))) == S.q(Fraction(3, 2))


def test_example5_g_fixes_sqrt2():
    assert catalog("example5_g")(S.SQRT2) == S.SQRT2


def test_negative_input_is_a_domain_error():
    with pytest.raises(DomainError):
        catalog("half")(S.q(-1))


def test_rationality_sensitive_rejects_unknown_tag():
    for name in ("kirk_f", "example5_g", "example5_h"):
        with pytest.raises(RationalityRequired):
            catalog(name)(Approx(0.5))


def test_rationality_sensitive_accepts_tagged_floats():
    f = catalog("kirk_f")
    assert f(Approx(0.5, 0.0, "rational")) == S.q(1)
    assert f(Approx(0.5, 0.0, "irrational")) == S.q(2)


def test_catalog_parameter_constraints():
    with pytest.raises(InvalidSpec):
        catalog("f_ab", a=Fraction(1, 2))
    with pytest.raises(InvalidSpec):
        catalog("f_ab", b=0)
    with pytest.raises(InvalidSpec):
        catalog("nope")
    with pytest.raises(InvalidSpec):
        catalog("half", a=1)


def test_pieces_must_start_at_zero_and_not_overlap():
    with pytest.raises(InvalidSpec):
        piecewise((1, affine(1)))
    with pytest.raises(InvalidSpec):
        piecewise((0, affine(1)), (2, constant(2)), (1, constant(3)))


def test_exact_output_for_exact_pieces():
    f = piecewise((0, affine(2)), (1, sqrt_piece(1, 1, 2)))
    assert f(S.q(Fraction(1, 3))) == S.q(Fraction(2, 3))
    assert f(S.q(3)) == S.SQRT2 + 2


@pytest.mark.parametrize("name", catalog_names())
def test_catalog_json_round_trip(name):
    f = catalog(name)
    assert FunctionSpec.from_json(f.to_json()) == f


def test_piecewise_json_round_trip():
    f = piecewise((0, affine(3)), (Fraction(1, 2), affine(1, 1)), (2, constant(3)))
    g = FunctionSpec.from_json(f.to_json())
    assert g == f
    assert g(S.q(5)) == S.q(3)


def test_malformed_json_is_invalid_spec():
    with pytest.raises(InvalidSpec):
        FunctionSpec.from_json({"kind": "catalog"})
    with pytest.raises(InvalidSpec):
        FunctionSpec.from_json({"kind": "spline"})


continuous = [n for n in catalog_names() if catalog(n).continuous and not catalog(n).rationality_sensitive]


@pytest.mark.parametrize("name", continuous)
@given(x=st.fractions(min_value=0, max_value=30, max_denominator=97))
def test_float_path_matches_exact_path(name, x):
    f = catalog(name)
    assert abs(f.evaluate_float(np.array([float(x)]))[0] - float(f(S.q(x)))) <= 1e-9


@given(x=st.fractions(min_value=0, max_value=20, max_denominator=50))
def test_floor_sqrt_matches_direct_formula(x):
    import math
    expected = math.floor(x) + math.sqrt(float(x - math.floor(x)))
    assert abs(float(catalog("floor_sqrt")(S.q(x))) - expected) < 1e-12
