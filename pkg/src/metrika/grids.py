"""Exact probe grids on [0, inf)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from metrika.scalars import PI, SQRT2, Exact, as_scalar, format_fraction

BREAKPOINT_OFFSET = Fraction(1, 1024)

# Irrational probes: rational-only grids can never see the irrational branch of
# a rationality-sensitive function.  The "n - sqrt2" points give rational
# midpoints and sums between two irrational probes.
IRRATIONAL_PROBES = tuple(
    [SQRT2 * Fraction(k, 2) for k in (1, 2, 3, 4, 6)]
    + [Exact(n, -1, 0) for n in (2, 3, 4)]
    + [PI * Fraction(k, 2) for k in (1, 2, 3, 4, 6)]
    + [Exact(4, 0, -1)]
)


@dataclass(frozen=True)
class GridDescriptor:
    lo: float
    hi: float
    step: Fraction | None
    count: int

    def to_json(self) -> dict:
        return {"window": [self.lo, self.hi],
                "step": None if self.step is None else format_fraction(self.step),
                "count": self.count}


@dataclass(frozen=True)
class ProbeGrid:
    """Sorted, duplicate-free exact probe points."""

    points: tuple
    step: Fraction | None = None

    @classmethod
    def of(cls, values: Iterable, step=None) -> "ProbeGrid":
        pts = {as_scalar(v) for v in values}
        return cls(tuple(sorted(pts, key=float)), step)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def positive(self) -> "ProbeGrid":
        return ProbeGrid(tuple(p for p in self.points if p > 0), self.step)

    def descriptor(self) -> GridDescriptor:
        if not self.points:
            return GridDescriptor(0.0, 0.0, self.step, 0)
        return GridDescriptor(float(self.points[0]), float(self.points[-1]), self.step, len(self.points))


def _breakpoint_points(breakpoints) -> list:
    out = []
    for b in breakpoints:
        b = Fraction(b)
        out += [b, b - BREAKPOINT_OFFSET, b + BREAKPOINT_OFFSET]
    return [x for x in out if x >= 0]


def uniform_grid(hi, step, lo=0) -> ProbeGrid:
    step = Fraction(step)
    n = int((Fraction(hi) - Fraction(lo)) / step)
    return ProbeGrid.of((Fraction(lo) + j * step for j in range(n + 1)), step)


def default_grid(spec=None, irrational: bool = True) -> ProbeGrid:
    """{j/16 : j <= 1600} u {2^i : i <= 10} u breakpoints (+-1/1024) u irrational probes."""
    pts = [Fraction(j, 16) for j in range(1601)]
    pts += [Fraction(2) ** i for i in range(11)]
    if spec is not None:
        pts += _breakpoint_points(spec.breakpoints())
    values = [Exact._rat(p) for p in pts]
    if irrational:
        values += list(IRRATIONAL_PROBES)
    return ProbeGrid.of(values, Fraction(1, 16))


def pair_grid(spec=None, irrational: bool = True) -> ProbeGrid:
    """Coarser default for all-pairs checks (concavity, subadditivity).

    {j/8 : j <= 96} u {2^i : i <= 10} u breakpoints (+-1/1024) u irrational probes.
    """
    pts = [Fraction(j, 8) for j in range(97)]
    pts += [Fraction(2) ** i for i in range(11)]
    if spec is not None:
        pts += _breakpoint_points(spec.breakpoints())
    values = [Exact._rat(p) for p in pts]
    if irrational:
        values += list(IRRATIONAL_PROBES)
    return ProbeGrid.of(values, Fraction(1, 8))


def as_grid(grid, spec=None, pairwise: bool = False) -> ProbeGrid:
    if grid is None:
        return pair_grid(spec) if pairwise else default_grid(spec)
    if isinstance(grid, ProbeGrid):
        return grid
    return ProbeGrid.of(grid)
