"""Rectangle instances, norms, and exact distance predicates.

Raw input rectangles carry arbitrary nonnegative integer corner
coordinates.  :func:`ingest` doubles every coordinate so that corners and
centres are integers (centres of even-coordinate rectangles are integral),
records the coordinate bound D and flags duplicate single-point
rectangles, which force the optimum down to zero.  All library-level
geometry works in these scaled coordinates; only the CLI undoes the
scaling on output.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .scalars import scalar_max, sign_of_diff


@dataclass(frozen=True)
class Rect:
    """Axis-aligned closed rectangle; degenerate segments/points allowed."""

    left: int
    right: int
    bottom: int
    top: int

    def is_point(self) -> bool:
        return self.left == self.right and self.bottom == self.top

    def contains(self, x, y) -> bool:
        return (
            sign_of_diff(x, self.left) >= 0
            and sign_of_diff(self.right, x) >= 0
            and sign_of_diff(y, self.bottom) >= 0
            and sign_of_diff(self.top, y) >= 0
        )


@dataclass(frozen=True)
class Point:
    x: object
    y: object


@dataclass(frozen=True)
class Instance:
    """An ingested instance: scaled rectangles plus metadata."""

    rects: tuple[Rect, ...]
    D: int
    identical_pair: Optional[tuple[int, int]]

    @property
    def n(self) -> int:
        return len(self.rects)


def ingest(raw_rects: Sequence[Sequence[int]]) -> Instance:
    """Validate and scale raw (left, right, bottom, top) integer tuples.

    Coordinates are doubled so rectangle centres land on integers.  Raises
    ValueError naming the first offending rectangle index on malformed
    input.
    """
    rects = []
    for idx, tup in enumerate(raw_rects):
        if len(tup) != 4:
            raise ValueError(f"expected 4 coordinates at index {idx}, got {len(tup)}")
        l, r, b, t = tup
        for c in (l, r, b, t):
            if not isinstance(c, int):
                raise ValueError(f"non-integer coordinate at index {idx}")
            if c < 0:
                raise ValueError(f"negative coordinate at index {idx}")
        if l > r:
            raise ValueError(f"left > right at index {idx}")
        if b > t:
            raise ValueError(f"bottom > top at index {idx}")
        rects.append(Rect(2 * l, 2 * r, 2 * b, 2 * t))

    max_coord = max((c for rc in rects for c in (rc.right, rc.top)), default=0)
    D = max(2, max_coord)

    seen: dict[tuple[int, int], int] = {}
    pair = None
    for idx, rc in enumerate(rects):
        if rc.is_point():
            key = (rc.left, rc.bottom)
            if key in seen:
                pair = (seen[key], idx)
                break
            seen[key] = idx
    return Instance(rects=tuple(rects), D=D, identical_pair=pair)


def rect_center(r: Rect) -> Point:
    """Centre point; integer-valued because corners are even."""
    return Point((r.left + r.right) // 2, (r.bottom + r.top) // 2)


class Norm:
    """One of the three supported norms with its approximation constant.

    ``f`` is 5 for L1 and 6 for Linf; for L2 the constant sqrt(34) is
    carried as f^2 = 34 and every comparison involving it is done on
    squares.  The grid unit is delta/2 (L1), delta/sqrt(2) (L2, tracked
    through delta^2), and delta (Linf).
    """

    __slots__ = ("name",)

    def __init__(self, name: str):
        if name not in ("l1", "l2", "linf"):
            raise ValueError(f"unknown norm {name!r}")
        object.__setattr__(self, "name", name)

    def __setattr__(self, name, value):
        raise AttributeError("Norm is immutable")

    def __repr__(self):
        return f"Norm({self.name})"

    def __eq__(self, other):
        return isinstance(other, Norm) and other.name == self.name

    def __hash__(self):
        return hash(("Norm", self.name))

    @property
    def is_l2(self) -> bool:
        return self.name == "l2"

    @property
    def f(self) -> Fraction:
        """Approximation factor for L1/Linf; L2 carries f^2 instead."""
        if self.name == "l1":
            return Fraction(5)
        if self.name == "linf":
            return Fraction(6)
        raise ValueError("L2 approximation factor is irrational; use f_squared")

    @property
    def f_squared(self) -> Fraction:
        return {"l1": Fraction(25), "l2": Fraction(34), "linf": Fraction(36)}[self.name]

    @staticmethod
    def from_name(name: str) -> "Norm":
        return {"l1": L1, "l2": L2, "linf": LINF}[name]


L1 = Norm("l1")
L2 = Norm("l2")
LINF = Norm("linf")
NORMS = (L1, L2, LINF)


def distance(p: Point, q: Point, norm: Norm):
    """Exact distance between two points; for L2 the squared distance.

    Coordinates may be ints, Fractions, QuadScalars or DualScalars; the
    result lives in whatever field the inputs span.  Comparisons against a
    radius must use the matching power (delta for L1/Linf, delta^2 for L2).
    """
    dx = p.x - q.x
    dy = p.y - q.y
    if norm.is_l2:
        return dx * dx + dy * dy
    adx = abs(dx)
    ady = abs(dy)
    if norm.name == "l1":
        return adx + ady
    return scalar_max(adx, ady)


def instance_to_json(inst_raw_rects: Sequence[Sequence[int]]) -> str:
    """Canonical JSON text for an instance given in input (unscaled) units."""
    payload = {"rects": [list(map(int, rc)) for rc in inst_raw_rects]}
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def instance_from_json(text: str) -> list[tuple[int, int, int, int]]:
    data = json.loads(text)
    if not isinstance(data, dict) or "rects" not in data:
        raise ValueError('instance JSON must be an object with a "rects" array')
    out = []
    for rc in data["rects"]:
        out.append((int(rc[0]), int(rc[1]), int(rc[2]), int(rc[3])))
    return out
