"""Scalar kernel: exact values in Q + Q*sqrt2 + Q*pi, and tolerance-carrying floats.

Exact values are closed under addition, subtraction and rational scaling, so
grid arithmetic (midpoints, pair sums, period shifts) never loses exactness and
the rationality of every exact value is known: 1, sqrt(2) and pi are linearly
independent over Q, so an exact value is rational iff both irrational
coefficients vanish.
"""
from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from numbers import Rational

import mpmath

from metrika.errors import DomainError

DEFAULT_TOL = 1e-9
_ULP = 2.0 ** -52
_ZERO = Fraction(0)
_SQRT2_F = math.sqrt(2.0)
_PI_F = math.pi

_MP_DPS = 60


class Rationality(str, Enum):
    RATIONAL = "rational"
    IRRATIONAL = "irrational"
    UNKNOWN = "unknown"


class ScalarValue:
    """Common base of :class:`Exact` and :class:`Approx`."""

    __slots__ = ()
    is_exact = False

    @property
    def rationality(self) -> Rationality:  # pragma: no cover - overridden
        raise NotImplementedError

    @property
    def tol(self) -> float:
        return 0.0

    # ordering is numeric; exact-vs-exact never rounds
    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def __radd__(self, other):
        return as_scalar(other) + self

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __rmul__(self, other):
        return as_scalar(other) * self

    def __rtruediv__(self, other):
        return as_scalar(other) / self


class Exact(ScalarValue):
    """r + s*sqrt(2) + p*pi with rational r, s, p."""

    __slots__ = ("r", "s", "p", "_h")
    is_exact = True

    def __init__(self, r=0, s=0, p=0):
        self.r = r if type(r) is Fraction else Fraction(r)
        self.s = s if type(s) is Fraction else Fraction(s)
        self.p = p if type(p) is Fraction else Fraction(p)
        self._h = None

    @classmethod
    def _rat(cls, r: Fraction) -> "Exact":
        obj = object.__new__(cls)
        obj.r = r
        obj.s = _ZERO
        obj.p = _ZERO
        obj._h = None
        return obj

    @property
    def is_rational(self) -> bool:
        return not self.s and not self.p

    @property
    def rationality(self) -> Rationality:
        return Rationality.RATIONAL if self.is_rational else Rationality.IRRATIONAL

    @property
    def kind(self) -> str:
        if self.is_rational:
            return "exact-rational"
        if not self.r and (not self.s or not self.p):
            return "irrational-constant"
        return "exact-combination"

    def __float__(self) -> float:
        if self.is_rational:
            return float(self.r)
        return float(self.r) + float(self.s) * _SQRT2_F + float(self.p) * _PI_F

    def mp(self):
        with mpmath.workdps(_MP_DPS):
            return mpmath.mpf(self.r.numerator) / self.r.denominator + \
                mpmath.mpf(self.s.numerator) / self.s.denominator * mpmath.sqrt(2) + \
                mpmath.mpf(self.p.numerator) / self.p.denominator * mpmath.pi

    def sign(self) -> int:
        if self.is_rational:
            return (self.r > 0) - (self.r < 0)
        approx = float(self)
        scale = abs(float(self.r)) + 2 * abs(float(self.s)) + 4 * abs(float(self.p)) + 1.0
        if abs(approx) > 1e-12 * scale:
            return 1 if approx > 0 else -1
        with mpmath.workdps(_MP_DPS):
            v = self.mp()
        return 1 if v > 0 else -1

    def __add__(self, other):
        if type(other) is Exact:
            if not self.s and not self.p and not other.s and not other.p:
                return Exact._rat(self.r + other.r)
            return Exact(self.r + other.r, self.s + other.s, self.p + other.p)
        if isinstance(other, (int, Fraction)):
            return Exact(self.r + other, self.s, self.p)
        if isinstance(other, Approx):
            return other + self
        return NotImplemented

    def __neg__(self):
        return Exact(-self.r, -self.s, -self.p)

    def __sub__(self, other):
        if type(other) is Exact:
            if not self.s and not self.p and not other.s and not other.p:
                return Exact._rat(self.r - other.r)
            return Exact(self.r - other.r, self.s - other.s, self.p - other.p)
        if isinstance(other, (int, Fraction)):
            return Exact(self.r - other, self.s, self.p)
        if isinstance(other, Approx):
            return (-other) + self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Exact(self.r * other, self.s * other, self.p * other)
        if type(other) is Exact:
            if other.is_rational:
                q = other.r
                if self.is_rational:
                    return Exact._rat(self.r * q)
                return Exact(self.r * q, self.s * q, self.p * q)
            if self.is_rational:
                return other * self.r
            cross = self.s * other.p + self.p * other.s
            if not cross and not (self.p * other.p):
                return Exact(self.r * other.r + 2 * self.s * other.s,
                             self.r * other.s + self.s * other.r,
                             self.r * other.p + self.p * other.r)
            return Approx(float(self) * float(other), _rounding(float(self) * float(other)),
                          Rationality.UNKNOWN)
        if isinstance(other, Approx):
            return other * self
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by exact zero")
            return self * (Fraction(1) / Fraction(other))
        if type(other) is Exact:
            if other.is_rational:
                if not other.r:
                    raise ZeroDivisionError("division by exact zero")
                return self * (1 / other.r)
            if not other.r and not other.p:
                # x / (s*sqrt2) = x * sqrt2 / (2s)
                return self * Exact(0, 1 / (2 * other.s), 0)
            q = float(self) / float(other)
            return Approx(q, _rounding(q), Rationality.UNKNOWN)
        if isinstance(other, Approx):
            return Approx(float(self), 0.0, self.rationality) / other
        return NotImplemented

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        if type(other) is Exact:
            return self.r == other.r and self.s == other.s and self.p == other.p
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self.r == other
        return False

    def __hash__(self):
        h = self._h
        if h is None:
            h = hash(self.r) if self.is_rational else hash((self.r, self.s, self.p))
            self._h = h
        return h

    def __repr__(self):
        return f"Exact({format_exact(self)})"

    def __str__(self):
        return format_exact(self)


class Approx(ScalarValue):
    """A float together with an absolute error bound and a rationality tag."""

    __slots__ = ("value", "_tol", "_rationality")

    def __init__(self, value: float, tol: float = 0.0, rationality=Rationality.UNKNOWN):
        if tol < 0:
            raise ValueError("tolerance must be nonnegative")
        self.value = float(value)
        self._tol = float(tol)
        self._rationality = Rationality(rationality)

    @property
    def tol(self) -> float:
        return self._tol

    @property
    def rationality(self) -> Rationality:
        return self._rationality

    kind = "approximate"

    def __float__(self):
        return self.value

    def _parts(self, other):
        if isinstance(other, Approx):
            return other.value, other.tol, other.rationality
        if isinstance(other, Exact):
            return float(other), 0.0, other.rationality
        if isinstance(other, (int, Fraction)):
            return float(other), 0.0, Rationality.RATIONAL
        return None

    def __add__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        v, t, rat = parts
        out = self.value + v
        return Approx(out, self.tol + t + _rounding(out), _add_rationality(self.rationality, rat))

    def __sub__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        v, t, rat = parts
        out = self.value - v
        return Approx(out, self.tol + t + _rounding(out), _add_rationality(self.rationality, rat))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Approx(-self.value, self.tol, self.rationality)

    def __mul__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        v, t, rat = parts
        out = self.value * v
        tol = abs(self.value) * t + abs(v) * self.tol + self.tol * t + _rounding(out)
        return Approx(out, tol, _mul_rationality(self.rationality, rat, out))

    def __truediv__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        v, t, rat = parts
        if v == 0:
            raise ZeroDivisionError("division by zero")
        out = self.value / v
        if t >= abs(v):
            tol = math.inf
        else:
            tol = (self.tol + abs(out) * t) / (abs(v) - t) + _rounding(out)
        return Approx(out, tol, _mul_rationality(self.rationality, rat, out))

    def __rtruediv__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        return Approx(parts[0], parts[1], parts[2]) / self

    def __abs__(self):
        return Approx(abs(self.value), self.tol, self.rationality)

    def __eq__(self, other):
        return (isinstance(other, Approx) and self.value == other.value
                and self.tol == other.tol and self.rationality == other.rationality)

    def __hash__(self):
        return hash(("approx", self.value, self.tol, self.rationality))

    def __repr__(self):
        return f"Approx({self.value!r}, tol={self.tol:.3g}, {self.rationality.value})"

    def __str__(self):
        return f"~{self.value!r}"


def _rounding(x: float) -> float:
    return 4 * _ULP * abs(x)


def _add_rationality(a: Rationality, b: Rationality) -> Rationality:
    if a is Rationality.RATIONAL and b is Rationality.RATIONAL:
        return Rationality.RATIONAL
    if Rationality.UNKNOWN in (a, b):
        return Rationality.UNKNOWN
    if a is not b:
        return Rationality.IRRATIONAL
    return Rationality.UNKNOWN


def _mul_rationality(a: Rationality, b: Rationality, out: float) -> Rationality:
    if a is Rationality.RATIONAL and b is Rationality.RATIONAL:
        return Rationality.RATIONAL
    return Rationality.UNKNOWN


ZERO = Exact(0)
ONE = Exact(1)
SQRT2 = Exact(0, 1, 0)
PI = Exact(0, 0, 1)


def as_scalar(x) -> ScalarValue:
    """Coerce ints, Fractions, floats and strings to a ScalarValue.

    Floats become :class:`Approx` with unknown rationality: a binary float says
    nothing about membership in Q.
    """
    if isinstance(x, ScalarValue):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Exact._rat(Fraction(x))
    if isinstance(x, Fraction):
        return Exact._rat(x)
    if isinstance(x, Rational):
        return Exact._rat(Fraction(x.numerator, x.denominator))
    if isinstance(x, float):
        return Approx(x, 0.0, Rationality.UNKNOWN)
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, dict):
        return scalar_from_json(x)
    raise TypeError(f"cannot interpret {x!r} as a scalar")


def q(x) -> Exact:
    """Shorthand for an exact rational scalar."""
    return Exact._rat(Fraction(x))


def compare(a, b) -> int:
    a = as_scalar(a)
    b = as_scalar(b)
    if a.is_exact and b.is_exact:
        return (a - b).sign()
    x, y = float(a), float(b)
    return (x > y) - (x < y)


def leq(a, b, tol: float = DEFAULT_TOL) -> bool:
    """a <= b: exact when both sides are exact, else with slack tol plus carried errors."""
    a = as_scalar(a)
    b = as_scalar(b)
    if a.is_exact and b.is_exact:
        return (a - b).sign() <= 0
    return float(a) <= float(b) + tol + a.tol + b.tol


def is_zero(a, tol: float = DEFAULT_TOL) -> bool:
    a = as_scalar(a)
    if a.is_exact:
        return a.r == 0 and a.is_rational
    return abs(a.value) <= tol + a.tol


def close(a, b, tol: float = DEFAULT_TOL) -> bool:
    return is_zero(as_scalar(a) - as_scalar(b), tol)


# ---------------------------------------------------------------------------
# elementary functions
# ---------------------------------------------------------------------------

def _rational_sqrt(x: Fraction):
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def sqrt(x) -> ScalarValue:
    x = as_scalar(x)
    if x.is_exact:
        if x.sign() < 0:
            raise DomainError(f"sqrt of negative value {x}")
        if x.is_rational:
            root = _rational_sqrt(x.r)
            if root is not None:
                return Exact._rat(root)
            half_root = _rational_sqrt(x.r / 2)
            if half_root is not None:
                return Exact(0, half_root, 0)
            v = math.sqrt(float(x.r))
            return Approx(v, _rounding(v), Rationality.IRRATIONAL)
        v = math.sqrt(float(x))
        return Approx(v, _rounding(v) + 1e-15, Rationality.UNKNOWN)
    if x.value < -x.tol:
        raise DomainError(f"sqrt of negative value {x.value}")
    v = math.sqrt(max(x.value, 0.0))
    if x.tol == 0:
        tol = _rounding(v)
    elif v > 0:
        tol = min(x.tol / v, math.sqrt(x.tol)) + _rounding(v)
    else:
        tol = math.sqrt(x.tol)
    return Approx(v, tol, Rationality.UNKNOWN)


def sin(x) -> ScalarValue:
    x = as_scalar(x)
    if x.is_exact and not x.r and not x.s:
        m = x.p * 6
        if m.denominator == 1:
            k = int(m) % 12  # x = (k/6) * pi mod 2pi
            table = {0: 0, 1: Fraction(1, 2), 3: 1, 5: Fraction(1, 2), 6: 0,
                     7: Fraction(-1, 2), 9: -1, 11: Fraction(-1, 2)}
            if k in table:
                return Exact._rat(Fraction(table[k]))
    if x.is_exact:
        xf = float(x)
        rat = Rationality.UNKNOWN
        if x.is_rational and x.r != 0:
            rat = Rationality.IRRATIONAL  # sin of a nonzero rational is transcendental
        return Approx(math.sin(xf), _rounding(1.0) + _rounding(xf), rat)
    v = math.sin(x.value)
    return Approx(v, x.tol + _rounding(1.0), Rationality.UNKNOWN)


def floor(x) -> ScalarValue:
    x = as_scalar(x)
    if x.is_exact:
        if x.is_rational:
            return Exact._rat(Fraction(math.floor(x.r)))
        approx = float(x)
        n = math.floor(approx)
        if abs(approx - round(approx)) < 1e-9:
            with mpmath.workdps(_MP_DPS):
                n = int(mpmath.floor(x.mp()))
        return Exact._rat(Fraction(n))
    return Approx(float(math.floor(x.value)), 0.0, Rationality.RATIONAL)


def ceil(x) -> ScalarValue:
    x = as_scalar(x)
    if x.is_exact:
        if x.is_rational:
            return Exact._rat(Fraction(math.ceil(x.r)))
        return floor(x) + 1
    return Approx(float(math.ceil(x.value)), 0.0, Rationality.RATIONAL)


def smin(a, b):
    return a if a <= b else b


def smax(a, b):
    return a if a >= b else b


# ---------------------------------------------------------------------------
# text / JSON representation
# ---------------------------------------------------------------------------

def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _format_term(coef: Fraction, base: str) -> str:
    if coef == 1:
        return base
    return f"{coef.numerator}*{base}/{coef.denominator}"


def format_exact(x: Exact) -> str:
    parts = []
    if x.r or x.is_rational:
        parts.append(format_fraction(x.r))
    if x.s:
        parts.append(_format_term(x.s, "sqrt2"))
    if x.p:
        parts.append(_format_term(x.p, "pi"))
    return " + ".join(parts)


def _parse_term(term: str) -> Exact:
    term = term.strip()
    for base, unit in (("sqrt2", SQRT2), ("pi", PI)):
        if base in term:
            if term == base:
                return unit
            head, _, den = term.partition("/")
            num, _, b = head.partition("*")
            if b.strip() != base:
                raise ValueError(f"cannot parse symbolic term {term!r}")
            coef = Fraction(num.strip()) / Fraction(den.strip() or 1)
            return unit * coef
    return Exact._rat(Fraction(term))


def parse_scalar(text: str) -> ScalarValue:
    """Parse "3/2", "0.25", "sqrt2", "3*pi/1", "1/2 + 3*sqrt2/4" or "~0.73"."""
    text = text.strip()
    if text.startswith("~"):
        return Approx(float(text[1:]), 0.0, Rationality.UNKNOWN)
    total = ZERO
    for term in text.split("+"):
        term = term.strip()
        neg = term.startswith("-") and ("pi" in term or "sqrt2" in term)
        if neg:
            term = term[1:]
        value = _parse_term(term)
        total = total - value if neg else total + value
    return total


def scalar_to_json(x):
    x = as_scalar(x)
    if x.is_exact:
        return format_exact(x)
    return {"approx": x.value, "tol": x.tol, "rationality": x.rationality.value}


def scalar_from_json(obj) -> ScalarValue:
    if isinstance(obj, dict):
        return Approx(obj["approx"], obj.get("tol", 0.0), obj.get("rationality", "unknown"))
    if isinstance(obj, (int, str)):
        return as_scalar(obj)
    if isinstance(obj, float):
        return Approx(obj)
    raise TypeError(f"cannot decode scalar from {obj!r}")


def snap_candidates(x: float, tol: float = 1e-6, max_den: int = 64):
    """Simple exact values within tol of x: rationals and rational multiples of sqrt2 and pi."""
    out = []
    r = Fraction(x).limit_denominator(10 ** 6)
    if abs(float(r) - x) <= tol:
        out.append(Exact._rat(r))
    for unit, uf in ((PI, _PI_F), (SQRT2, _SQRT2_F)):
        c = Fraction(x / uf).limit_denominator(max_den)
        if c and abs(float(c) * uf - x) <= tol:
            out.append(unit * c)
    out.sort(key=lambda e: abs(float(e) - x))
    return out
