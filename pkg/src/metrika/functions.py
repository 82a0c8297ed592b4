"""Function specs for maps [0, inf) -> [0, inf): the named catalog and user piece tables.

A :class:`FunctionSpec` is plain data (JSON round-trippable).  Evaluation comes
in two flavours: ``spec(x)`` on :class:`~metrika.scalars.ScalarValue` (exact
whenever the formula allows it) and ``spec.evaluate_float(xs)`` on numpy arrays
for bulk work on sampled real domains.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from metrika import scalars as S
from metrika.errors import DomainError, InvalidSpec, RationalityRequired
from metrika.scalars import Exact, Rationality, ScalarValue, as_scalar

# ---------------------------------------------------------------------------
# piece tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Formula:
    """affine a*x+b, sqrt a*sqrt(x-s)+b, or constant c."""

    type: str
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    s: Fraction = Fraction(0)
    c: Fraction = Fraction(0)

    def __post_init__(self):
        if self.type not in ("affine", "sqrt", "constant"):
            raise InvalidSpec(f"unknown formula type {self.type!r}")

    def __call__(self, x: ScalarValue) -> ScalarValue:
        if self.type == "affine":
            return x * self.a + self.b
        if self.type == "constant":
            return Exact._rat(self.c)
        return S.sqrt(x - self.s) * self.a + self.b

    def evaluate_float(self, xs: np.ndarray) -> np.ndarray:
        if self.type == "affine":
            return float(self.a) * xs + float(self.b)
        if self.type == "constant":
            return np.full_like(xs, float(self.c), dtype=float)
        return float(self.a) * np.sqrt(np.maximum(xs - float(self.s), 0.0)) + float(self.b)

    def to_json(self) -> dict:
        keys = {"affine": ("a", "b"), "sqrt": ("a", "s", "b"), "constant": ("c",)}[self.type]
        out = {"type": self.type}
        out.update({k: S.format_fraction(getattr(self, k)) for k in keys})
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Formula":
        kw = {k: Fraction(str(v)) for k, v in obj.items() if k != "type"}
        return cls(obj["type"], **kw)


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction | None  # None = +inf; the interval is [lo, hi)
    formula: Formula

    def to_json(self) -> dict:
        return {"from": S.format_fraction(self.lo),
                "to": None if self.hi is None else S.format_fraction(self.hi),
                "formula": self.formula.to_json()}


def _validate_pieces(pieces: tuple[Piece, ...]):
    if not pieces:
        raise InvalidSpec("piecewise spec needs at least one piece")
    if pieces[0].lo != 0:
        raise InvalidSpec("first piece must start at 0")
    for prev, nxt in zip(pieces, pieces[1:]):
        if prev.hi is None or prev.hi != nxt.lo:
            raise InvalidSpec(f"pieces must tile [0, inf): gap or overlap at {prev.hi}")
    for p in pieces:
        if p.hi is not None and p.hi <= p.lo:
            raise InvalidSpec(f"empty piece [{p.lo}, {p.hi})")
        if p.formula.type == "sqrt" and p.formula.s > p.lo:
            raise InvalidSpec("sqrt piece shifted past its left endpoint")
    if pieces[-1].hi is not None:
        raise InvalidSpec("last piece must be unbounded")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    defaults: dict
    exact: Callable            # (params, x: ScalarValue) -> ScalarValue
    floating: Callable | None  # (params, xs: ndarray) -> ndarray; None if rationality-sensitive
    breakpoints: Callable = lambda p: ()
    check: Callable = lambda p: None
    declared: Callable = lambda p: frozenset()
    rationality_sensitive: bool = False
    continuous: bool = True
    period: ScalarValue | None = None
    summary: str = ""


def _need_rationality(x: ScalarValue) -> Rationality:
    rat = x.rationality
    if rat is Rationality.UNKNOWN:
        raise RationalityRequired(f"rationality of {x!r} is unknown")
    return rat


def _is_zero_point(x: ScalarValue) -> bool:
    if x.is_exact:
        return x.is_rational and x.r == 0
    return x.value == 0.0


def _kirk_f(p, x):
    if _is_zero_point(x):
        return S.ZERO
    return S.ONE if _need_rationality(x) is Rationality.RATIONAL else Exact(2)


def _example5_g(p, x):
    if _is_zero_point(x):
        return S.ZERO
    return S.ONE if _need_rationality(x) is Rationality.RATIONAL else S.SQRT2


def _example5_h(p, x):
    if _is_zero_point(x):
        return S.ZERO
    if x < 1:
        return S.ONE
    if x <= 2:
        return x if _need_rationality(x) is Rationality.RATIONAL else Exact(2)
    return Exact(2)


def _kirk_h(p, x):
    if x <= 1:
        return x
    if x <= 10:
        return S.ONE
    if x < 11:
        return x - 9
    return Exact(2)


def _kirk_h_float(p, xs):
    return np.select([xs <= 1, xs <= 10, xs < 11], [xs, 1.0, xs - 9.0], 2.0)


def _power(p, x):
    e = p["p"]
    if e.denominator == 1:
        out = S.ONE
        for _ in range(int(e)):
            out = out * x
        return out
    v = float(x) ** float(e)
    return S.Approx(v, 1e-15 * max(1.0, v), Rationality.UNKNOWN)


def _polynomial(p, x):
    out = S.ZERO
    for k in range(4):
        c = p.get(f"c{k}", Fraction(0))
        if c:
            term = S.ONE
            for _ in range(k):
                term = term * x
            out = out + term * c
    return out


def _poly_float(p, xs):
    return sum(float(p.get(f"c{k}", 0)) * xs ** k for k in range(4))


def _tight(p, x):
    if _is_zero_point(x):
        return S.ZERO
    A, u = p["A"], p["u"]
    if x.is_exact:
        if x.is_rational and x.r in A:
            return x
        if x.is_rational and x.r == u:
            return Exact._rat(2 * u)
        return Exact._rat(u)
    # approximate inputs are matched against A at their nominal value
    for a in A:
        if x.value == float(a):
            return x
    if x.value == float(u):
        return Exact._rat(2 * u)
    return Exact._rat(u)


def _tight_float(p, xs):
    A, u = p["A"], p["u"]
    out = np.full_like(xs, float(u), dtype=float)
    out[xs == float(u)] = 2 * float(u)
    for a in A:
        out[xs == float(a)] = float(a)
    out[xs == 0] = 0.0
    return out


def _check_tight(p):
    u, A = p["u"], p["A"]
    if u <= 0:
        raise InvalidSpec("tight_fixset needs u > 0")
    for a in A:
        if not (u <= a <= 2 * u):
            raise InvalidSpec(f"tight_fixset needs A inside [u, 2u]; {a} is not")


def _require(cond, msg):
    if not cond:
        raise InvalidSpec(msg)


_CONCAVE = frozenset({"amenable", "concave", "metric-preserving"})
_TRANSFORM = _CONCAVE | {"metric-transform", "increasing", "strictly-increasing"}

CATALOG: dict[str, CatalogEntry] = {}


def _register(entry: CatalogEntry):
    CATALOG[entry.name] = entry


_register(CatalogEntry(
    "identity", {}, lambda p, x: x, lambda p, xs: xs.astype(float),
    declared=lambda p: _TRANSFORM, summary="x"))
_register(CatalogEntry(
    "half", {}, lambda p, x: x * Fraction(1, 2), lambda p, xs: xs / 2.0,
    declared=lambda p: _TRANSFORM, summary="x/2"))
_register(CatalogEntry(
    "power", {"p": Fraction(2)}, _power, lambda p, xs: xs ** float(p["p"]),
    check=lambda p: _require(p["p"] > 0, "power needs p > 0"),
    declared=lambda p: _TRANSFORM if p["p"] <= 1 else frozenset(),
    summary="x**p"))
_register(CatalogEntry(
    "polynomial", {"c1": Fraction(1), "c2": Fraction(1)}, _polynomial, _poly_float,
    check=lambda p: _require(set(p) <= {"c0", "c1", "c2", "c3"} and all(v >= 0 for v in p.values()),
                             "polynomial takes nonnegative c0..c3"),
    summary="c0 + c1 x + c2 x^2 + c3 x^3"))
_register(CatalogEntry(
    "sqrt_ax", {"a": Fraction(1)}, lambda p, x: S.sqrt(x * p["a"]),
    lambda p, xs: np.sqrt(float(p["a"]) * xs),
    check=lambda p: _require(p["a"] > 0, "sqrt_ax needs a > 0"),
    declared=lambda p: _TRANSFORM, summary="sqrt(a x)"))
_register(CatalogEntry(
    "clamp", {"a": Fraction(1)},
    lambda p, x: x if x <= p["a"] else (x + p["a"]) * Fraction(1, 2),
    lambda p, xs: np.where(xs <= float(p["a"]), xs, (xs + float(p["a"])) / 2.0),
    breakpoints=lambda p: (p["a"],),
    check=lambda p: _require(p["a"] > 0, "clamp needs a > 0"),
    declared=lambda p: _TRANSFORM, summary="x on [0,a], (x+a)/2 beyond"))
_register(CatalogEntry(
    "kirk_f", {}, _kirk_f, None, rationality_sensitive=True, continuous=False,
    declared=lambda p: frozenset({"amenable", "tightly-bounded", "metric-preserving"}),
    summary="0 at 0, 1 on positive rationals, 2 on irrationals"))
_register(CatalogEntry(
    "kirk_g", {}, lambda p, x: S.smin(x, S.ONE), lambda p, xs: np.minimum(xs, 1.0),
    breakpoints=lambda p: (Fraction(1),),
    declared=lambda p: _CONCAVE | {"increasing"}, summary="min(x, 1)"))
_register(CatalogEntry(
    "kirk_h", {}, _kirk_h, _kirk_h_float,
    breakpoints=lambda p: (Fraction(1), Fraction(10), Fraction(11)),
    declared=lambda p: frozenset({"amenable", "increasing", "metric-preserving"}),
    summary="x on [0,1], 1 on [1,10], x-9 on (10,11), 2 beyond"))
_register(CatalogEntry(
    "f_ab", {"a": Fraction(2), "b": Fraction(1)},
    lambda p, x: x * p["a"] if x <= p["b"] else Exact._rat(p["a"] * p["b"]),
    lambda p, xs: float(p["a"]) * np.minimum(xs, float(p["b"])),
    breakpoints=lambda p: (p["b"],),
    check=lambda p: _require(p["a"] >= 1 and p["b"] > 0, "f_ab needs a >= 1 and b > 0"),
    declared=lambda p: _CONCAVE | {"increasing"}, summary="a x on [0,b], a b beyond"))
_register(CatalogEntry(
    "ceiling", {}, lambda p, x: S.ceil(x), lambda p, xs: np.ceil(xs),
    breakpoints=lambda p: tuple(Fraction(k) for k in range(1, 13)),
    continuous=False,
    declared=lambda p: frozenset({"amenable", "increasing", "subadditive", "metric-preserving"}),
    summary="ceil(x)"))
_register(CatalogEntry(
    "example5_g", {}, _example5_g, None, rationality_sensitive=True, continuous=False,
    declared=lambda p: frozenset({"amenable", "tightly-bounded", "metric-preserving"}),
    summary="0 at 0, 1 on nonzero rationals, sqrt2 on irrationals"))
_register(CatalogEntry(
    "example5_h", {}, _example5_h, None, rationality_sensitive=True, continuous=False,
    breakpoints=lambda p: (Fraction(1), Fraction(2)),
    declared=lambda p: frozenset({"amenable", "tightly-bounded", "metric-preserving"}),
    summary="1 on (0,1), x on rationals of [1,2], 2 elsewhere"))
_register(CatalogEntry(
    "floor_sqrt", {}, lambda p, x: S.floor(x) + S.sqrt(x - S.floor(x)),
    lambda p, xs: np.floor(xs) + np.sqrt(xs - np.floor(xs)),
    breakpoints=lambda p: tuple(Fraction(k) for k in range(1, 13)),
    period=S.ONE,
    declared=lambda p: frozenset({"amenable", "increasing", "subadditive", "metric-preserving"}),
    summary="floor(x) + sqrt(x - floor(x))"))
_register(CatalogEntry(
    "x_plus_abs_sin", {}, lambda p, x: x + abs(S.sin(x)),
    lambda p, xs: xs + np.abs(np.sin(xs)),
    period=S.PI,
    declared=lambda p: frozenset({"amenable", "increasing", "subadditive", "metric-preserving"}),
    summary="x + |sin x|"))
_register(CatalogEntry(
    "tight_fixset", {"u": Fraction(1), "A": (Fraction(1), Fraction(3, 2), Fraction(2))},
    _tight, _tight_float,
    breakpoints=lambda p: tuple(sorted(set(p["A"]) | {p["u"]})),
    check=_check_tight, continuous=False,
    declared=lambda p: frozenset({"amenable", "tightly-bounded", "metric-preserving"}),
    summary="0 at 0, x on A, u elsewhere (2u at u when u is not in A)"))


# ---------------------------------------------------------------------------
# FunctionSpec
# ---------------------------------------------------------------------------

def _parse_param(key, value):
    if key == "A":
        return tuple(sorted({Fraction(str(v)) for v in value}))
    return Fraction(str(value))


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """A named catalog function with exact parameters, or a user piece table."""

    kind: str
    name: str = ""
    params: dict = field(default_factory=dict)
    pieces: tuple = ()
    declared: dict = field(default_factory=dict)  # property name -> citation text

    def __post_init__(self):
        if self.kind == "catalog":
            if self.name not in CATALOG:
                raise InvalidSpec(f"unknown catalog function {self.name!r}")
            entry = CATALOG[self.name]
            merged = dict(entry.defaults)
            merged.update({k: _parse_param(k, v) if not isinstance(v, (Fraction, tuple)) else v
                           for k, v in self.params.items()})
            if self.name != "polynomial":
                unknown = set(merged) - set(entry.defaults)
                if unknown:
                    raise InvalidSpec(f"{self.name} has no parameter(s) {sorted(unknown)}")
            entry.check(merged)
            object.__setattr__(self, "params", merged)
        elif self.kind == "piecewise":
            pieces = tuple(self.pieces)
            _validate_pieces(pieces)
            object.__setattr__(self, "pieces", pieces)
            object.__setattr__(self, "_los", [float(p.lo) for p in pieces])
        else:
            raise InvalidSpec(f"unknown function kind {self.kind!r}")
        object.__setattr__(self, "_cache", {})

    # -- construction -----------------------------------------------------
    @classmethod
    def catalog(cls, name: str, **params) -> "FunctionSpec":
        return cls("catalog", name, params)

    @classmethod
    def piecewise(cls, pieces) -> "FunctionSpec":
        return cls("piecewise", "piecewise", pieces=tuple(pieces))

    # -- metadata ---------------------------------------------------------
    @property
    def entry(self) -> CatalogEntry | None:
        return CATALOG.get(self.name) if self.kind == "catalog" else None

    @property
    def label(self) -> str:
        if self.kind == "piecewise":
            return f"piecewise[{len(self.pieces)}]"
        shown = {k: v for k, v in self.params.items()}
        if not shown:
            return self.name
        args = ",".join(f"{k}={_fmt_param(v)}" for k, v in sorted(shown.items()))
        return f"{self.name}({args})"

    @property
    def rationality_sensitive(self) -> bool:
        return self.entry is not None and self.entry.rationality_sensitive

    @property
    def continuous(self) -> bool:
        if self.entry is not None:
            return self.entry.continuous
        for prev, nxt in zip(self.pieces, self.pieces[1:]):
            at = Exact._rat(nxt.lo)
            if not S.close(prev.formula(at), nxt.formula(at)):
                return False
        return True

    @property
    def period(self) -> ScalarValue | None:
        return self.entry.period if self.entry is not None else None

    def declared_properties(self) -> frozenset:
        base = self.entry.declared(self.params) if self.entry is not None else frozenset()
        return frozenset(base) | frozenset(self.declared)

    def breakpoints(self) -> tuple[Fraction, ...]:
        if self.entry is not None:
            return tuple(self.entry.breakpoints(self.params))
        return tuple(p.lo for p in self.pieces[1:])

    # -- evaluation -------------------------------------------------------
    def __call__(self, x) -> ScalarValue:
        x = as_scalar(x)
        if x.is_exact:
            cached = self._cache.get(x)
            if cached is not None:
                return cached
            if x.sign() < 0:
                raise DomainError(f"{self.label} is defined on [0, inf); got {x}")
        elif x.value < -x.tol:
            raise DomainError(f"{self.label} is defined on [0, inf); got {x.value}")
        if self.entry is not None:
            if self.entry.rationality_sensitive:
                _need_rationality(x)
            out = self.entry.exact(self.params, x)
        else:
            out = self._piece_at(x).formula(x)
            if out < 0 and not S.is_zero(out):
                raise DomainError(f"piecewise function is negative at {x}")
        if x.is_exact and len(self._cache) < 200_000:
            self._cache[x] = out
        return out

    def _piece_at(self, x: ScalarValue) -> Piece:
        i = bisect.bisect_right(self._los, float(x)) - 1
        i = max(i, 0)
        # float bisection can be off by one at an exact endpoint
        while i + 1 < len(self.pieces) and x >= self.pieces[i + 1].lo:
            i += 1
        while i > 0 and x < self.pieces[i].lo:
            i -= 1
        return self.pieces[i]

    def evaluate_float(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if np.any(xs < 0):
            raise DomainError(f"{self.label} is defined on [0, inf)")
        if self.entry is not None:
            if self.entry.floating is None:
                raise RationalityRequired(f"{self.name} cannot be evaluated on floats")
            return np.asarray(self.entry.floating(self.params, xs), dtype=float)
        out = np.empty_like(xs)
        for p in self.pieces:
            mask = xs >= float(p.lo)
            if p.hi is not None:
                mask &= xs < float(p.hi)
            out[mask] = p.formula.evaluate_float(xs[mask])
        return out

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        if self.kind == "catalog":
            out = {"kind": "catalog", "name": self.name,
                   "params": {k: _param_json(v) for k, v in sorted(self.params.items())}}
        else:
            out = {"kind": "piecewise", "pieces": [p.to_json() for p in self.pieces]}
        if self.declared:
            out["declared"] = dict(sorted(self.declared.items()))
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "FunctionSpec":
        try:
            kind = obj["kind"]
            declared = obj.get("declared", {})
            if isinstance(declared, list):
                declared = {name: "" for name in declared}
            if kind == "catalog":
                params = {k: _parse_param(k, v) for k, v in obj.get("params", {}).items()}
                return cls("catalog", obj["name"], params, declared=declared)
            if kind == "piecewise":
                pieces = tuple(
                    Piece(Fraction(str(p["from"])),
                          None if p.get("to") is None else Fraction(str(p["to"])),
                          Formula.from_json(p["formula"]))
                    for p in obj["pieces"])
                return cls("piecewise", "piecewise", pieces=pieces, declared=declared)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, InvalidSpec):
                raise
            raise InvalidSpec(f"malformed function spec: {exc}") from exc
        raise InvalidSpec(f"unknown function kind {obj.get('kind')!r}")

    def __eq__(self, other):
        return isinstance(other, FunctionSpec) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))

    def __repr__(self):
        return f"FunctionSpec({self.label})"


def _fmt_param(v):
    if isinstance(v, tuple):
        return "{" + ",".join(S.format_fraction(a) for a in v) + "}"
    return S.format_fraction(v)


def _param_json(v):
    if isinstance(v, tuple):
        return [S.format_fraction(a) for a in v]
    return S.format_fraction(v)


def catalog_names() -> list[str]:
    return sorted(CATALOG)


def catalog(name: str, **params) -> FunctionSpec:
    return FunctionSpec.catalog(name, **params)


def affine(a, b=0) -> Formula:
    return Formula("affine", a=Fraction(a), b=Fraction(b))


def constant(c) -> Formula:
    return Formula("constant", c=Fraction(c))


def sqrt_piece(a, s=0, b=0) -> Formula:
    return Formula("sqrt", a=Fraction(a), s=Fraction(s), b=Fraction(b))


def piecewise(*rows) -> FunctionSpec:
    """Build a piece table from (lo, formula) rows; each piece runs to the next lo."""
    rows = [(Fraction(lo), f) for lo, f in rows]
    pieces = [Piece(lo, rows[i + 1][0] if i + 1 < len(rows) else None, f)
              for i, (lo, f) in enumerate(rows)]
    return FunctionSpec.piecewise(pieces)

