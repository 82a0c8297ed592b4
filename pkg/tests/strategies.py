"""Hypothesis strategies shared by the test modules."""
from fractions import Fraction

from hypothesis import strategies as st

from metrika.functions import affine, piecewise


@st.composite
def concave_transforms(draw, max_pieces=4):
    """f(0)=0, piecewise affine with positive nonincreasing rational slopes."""
    m = draw(st.integers(1, max_pieces))
    slopes = sorted((draw(st.fractions(Fraction(1, 16), 4, max_denominator=16)) for _ in range(m)),
                    reverse=True)
    cuts = sorted(set(draw(st.lists(st.fractions(Fraction(1, 8), 10, max_denominator=8),
                                    min_size=m - 1, max_size=m - 1))))
    slopes = slopes[:len(cuts) + 1]
    rows, lo, y = [], Fraction(0), Fraction(0)
    for i, s in enumerate(slopes):
        rows.append((lo, affine(s, y - s * lo)))
        if i < len(cuts):
            y += s * (cuts[i] - lo)
            lo = cuts[i]
    return piecewise(*rows)


@st.composite
def piecewise_functions(draw, max_pieces=4):
    """Arbitrary nonnegative piecewise-affine functions with f(0) >= 0 (not necessarily concave)."""
    m = draw(st.integers(1, max_pieces))
    cuts = sorted(set(draw(st.lists(st.fractions(Fraction(1, 4), 8, max_denominator=4),
                                    min_size=m - 1, max_size=m - 1))))
    rows = [(0, affine(draw(st.fractions(0, 3, max_denominator=4)),
                       draw(st.fractions(0, 1, max_denominator=4))))]
    for c in cuts:
        a = draw(st.fractions(0, 3, max_denominator=4))
        b = draw(st.fractions(0, 4, max_denominator=4))
        rows.append((c, affine(a, b)))
    return piecewise(*rows)


rational_points = st.fractions(0, 16, max_denominator=16)
