"""The delta-parameterized grid of blocker shapes.

Grid lines are spaced ``gamma`` apart, where gamma is delta/2 (L1),
delta/sqrt(2) (L2, tracked through the rational delta^2) and delta
(Linf).  Plus-shapes (L1, L2) occupy the four unit grid segments around
an anchor with ``i`` even and ``i = j (mod 4)``; L-shapes (Linf) occupy
the two segments above and to the right of an anchor with
``i = j (mod 3)``.  By this spacing any two shapes are at least delta
apart in the relevant norm.

The grid is never materialized: anchors are enumerated lazily around a
query rectangle, and every predicate is decided exactly.  A context may
carry an infinitesimal perturbation of the grid parameter (eps = +1 or
-1), in which case all predicates report their value in the right or
left limit; the big/small classification and the critical-value probe
are built on this.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator

from .geometry import Norm, Point, Rect
from .scalars import (
    DualScalar,
    QuadScalar,
    approx_float,
    rational_sqrt,
    scalar_floor,
    scalar_max,
    scalar_min,
    sign,
    sign_of_diff,
)

PLUS = "plus"
ELL = "ell"

# A centre owns only a bounded constant number of shapes; exceeding this
# cap indicates a geometry bug, not a large input.
OWNERSHIP_CAP = 13


def shape_kind(norm: Norm) -> str:
    return ELL if norm.name == "linf" else PLUS


def is_anchor(i: int, j: int, norm: Norm) -> bool:
    """Anchor rule: plus-shapes need i even and i = j (mod 4); L-shapes i = j (mod 3)."""
    if shape_kind(norm) == PLUS:
        return i % 2 == 0 and (i - j) % 4 == 0
    return (i - j) % 3 == 0


class BlockerShape:
    __slots__ = ("i", "j", "kind")

    def __init__(self, i: int, j: int, kind: str):
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, name, value):
        raise AttributeError("BlockerShape is immutable")

    @property
    def key(self) -> tuple[int, int, str]:
        return (self.i, self.j, self.kind)

    def __eq__(self, other):
        return isinstance(other, BlockerShape) and other.key == self.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"BlockerShape({self.i}, {self.j}, {self.kind})"


class GridContext:
    """Immutable bundle of (grid parameter, norm, infinitesimal sign).

    ``param`` is delta for L1/Linf and delta^2 for L2, always a positive
    rational.  ``eps`` in {-1, 0, +1} selects exact evaluation or the
    left/right limit.  Exposes exact integer fast paths for the hot line
    comparisons plus generic-scalar views of the same quantities.
    """

    __slots__ = (
        "norm",
        "param",
        "eps",
        "kind",
        "_rational",
        "_P",
        "_Q",
        "gamma",
        "delta_cmp",
        "own_radius",
        "own_norm",
        "_line_cache",
    )

    def __init__(self, param: Fraction, norm: Norm, eps: int = 0):
        param = Fraction(param)
        if param <= 0:
            raise ValueError(f"grid parameter must be positive, got {param}")
        if eps not in (-1, 0, 1):
            raise ValueError("eps must be -1, 0 or +1")
        self_set = lambda k, v: object.__setattr__(self, k, v)
        self_set("norm", norm)
        self_set("param", param)
        self_set("eps", eps)
        self_set("kind", shape_kind(norm))
        self_set("_line_cache", {})

        if norm.name == "l1":
            g0 = param / 2
            rational, P, Q = True, g0.numerator, g0.denominator
            gderiv = Fraction(1, 2)
        elif norm.name == "linf":
            g0 = param
            rational, P, Q = True, g0.numerator, g0.denominator
            gderiv = Fraction(1)
        else:  # l2: gamma = sqrt(param / 2)
            m = param / 2
            root = rational_sqrt(m)
            if root is not None:
                g0 = root
                rational, P, Q = True, g0.numerator, g0.denominator
                gderiv = 1 / (4 * root)
            else:
                g0 = QuadScalar.sqrt_of(m)
                rational, P, Q = False, m.numerator, m.denominator
                gderiv = QuadScalar(0, Fraction(1, 4) / m, m)
        self_set("_rational", rational)
        self_set("_P", P)
        self_set("_Q", Q)

        if eps == 0:
            gamma = g0
            delta_cmp = param
        else:
            gamma = DualScalar(g0, gderiv * eps)
            delta_cmp = DualScalar(param, Fraction(eps))
        self_set("gamma", gamma)
        self_set("delta_cmp", delta_cmp)
        if norm.name == "linf":
            self_set("own_radius", gamma)
            self_set("own_norm", "linf")
        else:
            # L1 ownership ball has radius delta = 2*gamma; the enlarged L2
            # rule uses the L1 ball of radius sqrt(2)*delta = 2*gamma as well.
            self_set("own_radius", 2 * gamma)
            self_set("own_norm", "l1")

    def __setattr__(self, name, value):
        raise AttributeError("GridContext is immutable")

    def shrunk(self) -> "GridContext":
        """Context for the robust (big/small) classification.

        At an exact parameter the classification looks infinitesimally to
        the left; at a perturbed parameter the closed intersection already
        reports the generic (event-free) pattern, so the context is reused.
        """
        if self.eps == 0:
            return GridContext(self.param, self.norm, eps=-1)
        return self

    # -- exact integer predicates ------------------------------------------

    def cmp_line(self, k: int, c) -> int:
        """Exact sign of k*gamma - c for integer k and integer/rational c."""
        P, Q = self._P, self._Q
        if isinstance(c, Fraction):
            cn, cd = c.numerator, c.denominator
        else:
            cn, cd = c, 1
        if self._rational:
            s = _isign(k * P * cd - cn * Q)
        else:
            # gamma = sqrt(P/Q): compare k*sqrt(P/Q) with c by squaring,
            # with explicit sign bookkeeping.
            if k == 0:
                s = -_isign(cn)
            elif k > 0:
                s = 1 if cn < 0 else _isign(k * k * P * cd * cd - cn * cn * Q)
            else:
                s = -1 if cn > 0 else -_isign(k * k * P * cd * cd - cn * cn * Q)
        if s != 0 or self.eps == 0:
            return s
        # tie on the value part: gamma grows with the parameter, so the
        # derivative of k*gamma has the sign of k
        return _isign(k) * self.eps

    def grid_index(self, x) -> int:
        """Largest i with i*gamma <= x (x >= 0), honoring the eps limit."""
        if sign(x) < 0:
            raise ValueError(f"grid_index requires x >= 0, got {x!r}")
        if isinstance(x, QuadScalar):
            if x.is_rational:
                x = x.a
            else:
                return self._grid_index_quad(x)
        if isinstance(x, Fraction):
            xn, xd = x.numerator, x.denominator
        else:
            xn, xd = int(x), 1
        P, Q = self._P, self._Q
        if self._rational:
            i = (xn * Q) // (xd * P)
            on_line = i * P * xd == xn * Q
        else:
            # largest i with i^2 * (P/Q) <= x^2
            i = _int_isqrt_floor(xn * xn * Q, xd * xd * P)
            on_line = i * i * P * xd * xd == xn * xn * Q
        # at parameter + eps the grid lines sit infinitesimally further out,
        # so a coordinate exactly on line i > 0 drops below it
        if self.eps == 1 and i > 0 and on_line:
            i -= 1
        return i

    def _grid_index_quad(self, x: QuadScalar) -> int:
        gamma0 = Fraction(self._P, self._Q) if self._rational else QuadScalar.sqrt_of(
            Fraction(self._P, self._Q)
        )
        i = scalar_floor(x / gamma0)
        if self.eps == 1 and i > 0 and x == i * gamma0:
            i -= 1
        return i

    # -- generic scalar views ------------------------------------------------

    def line_pos(self, k: int):
        """Coordinate of grid line k as an exact scalar (possibly dual)."""
        cache = self._line_cache
        v = cache.get(k)
        if v is None:
            v = k * self.gamma
            cache[k] = v
        return v


def _isign(v: int) -> int:
    return -1 if v < 0 else (1 if v > 0 else 0)


def _int_isqrt_floor(num: int, den: int) -> int:
    """floor(sqrt(num/den)) for nonnegative integers, exactly."""
    return math.isqrt(num // den)


def make_context(param, norm: Norm, eps: int = 0) -> GridContext:
    return GridContext(Fraction(param), norm, eps)


def grid_index(x, ctx: GridContext) -> int:
    return ctx.grid_index(x)


# -- shape/rectangle predicates ------------------------------------------


def shape_touches_rect(i: int, j: int, r: Rect, ctx: GridContext) -> bool:
    """Closed intersection test between the shape at anchor (i, j) and r."""
    cl = ctx.cmp_line
    if ctx.kind == PLUS:
        # vertical bar x = i*gamma, y in [(j-1)*gamma, (j+1)*gamma]
        if (
            cl(i, r.left) >= 0
            and cl(i, r.right) <= 0
            and cl(j - 1, r.top) <= 0
            and cl(j + 1, r.bottom) >= 0
        ):
            return True
        # horizontal bar y = j*gamma, x in [(i-1)*gamma, (i+1)*gamma]
        return (
            cl(j, r.bottom) >= 0
            and cl(j, r.top) <= 0
            and cl(i - 1, r.right) <= 0
            and cl(i + 1, r.left) >= 0
        )
    # L-shape: segments above and to the right of the anchor
    if (
        cl(i, r.left) >= 0
        and cl(i, r.right) <= 0
        and cl(j, r.top) <= 0
        and cl(j + 1, r.bottom) >= 0
    ):
        return True
    return (
        cl(j, r.bottom) >= 0
        and cl(j, r.top) <= 0
        and cl(i, r.right) <= 0
        and cl(i + 1, r.left) >= 0
    )


def iter_blockers_touching(r: Rect, ctx: GridContext) -> Iterator[BlockerShape]:
    """All blocker shapes intersecting r, lazily, in row-major anchor order.

    Rows (j) ascend, anchors within a row ascend in i; rows whose shapes
    cannot reach the rectangle vertically are skipped in O(1).
    """
    kind = ctx.kind
    cl = ctx.cmp_line
    ilo = ctx.grid_index(r.left) - 1
    ihi = ctx.grid_index(r.right) + 1
    jlo = ctx.grid_index(r.bottom) - 1
    jhi = ctx.grid_index(r.top) + 1
    step = 4 if kind == PLUS else 3
    for j in range(jlo, jhi + 1):
        if kind == PLUS:
            if j % 2 != 0:
                continue
            if cl(j - 1, r.top) > 0 or cl(j + 1, r.bottom) < 0:
                continue
        else:
            if cl(j, r.top) > 0 or cl(j + 1, r.bottom) < 0:
                continue
        i0 = ilo + ((j - ilo) % step)
        for i in range(i0, ihi + 1, step):
            if shape_touches_rect(i, j, r, ctx):
                yield BlockerShape(i, j, kind)


def blockers_touching(r: Rect, ctx: GridContext, limit: int) -> list[BlockerShape]:
    """Up to ``limit`` shapes intersecting r, in deterministic order."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    out = []
    for shape in iter_blockers_touching(r, ctx):
        out.append(shape)
        if len(out) >= limit:
            break
    return out


def classify_big(r: Rect, ctx: GridContext) -> bool:
    """True iff r intersects a blocker shape robustly as the grid shrinks.

    Boundary contacts that vanish when the parameter decreases
    infinitesimally classify the rectangle as small.
    """
    sctx = ctx.shrunk()
    return next(iter_blockers_touching(r, sctx), None) is not None


# -- point/shape metric helpers -------------------------------------------


def _interval_gap(v, lo, hi):
    """distance from value v to the closed interval [lo, hi] (one axis)."""
    return scalar_max(0, scalar_max(lo - v, v - hi))


def _segments(shape: BlockerShape, ctx: GridContext):
    """The two maximal segments of a shape as ((xlo, xhi), (ylo, yhi))."""
    i, j = shape.i, shape.j
    lp = ctx.line_pos
    if shape.kind == PLUS:
        return (
            ((lp(i), lp(i)), (lp(j - 1), lp(j + 1))),
            ((lp(i - 1), lp(i + 1)), (lp(j), lp(j))),
        )
    return (
        ((lp(i), lp(i)), (lp(j), lp(j + 1))),
        ((lp(i), lp(i + 1)), (lp(j), lp(j))),
    )


def point_shape_distance(p: Point, shape: BlockerShape, ctx: GridContext, norm_name: str):
    """Exact distance from p to the shape in the L1 or Linf norm."""
    best = None
    for (xlo, xhi), (ylo, yhi) in _segments(shape, ctx):
        dx = _interval_gap(p.x, xlo, xhi)
        dy = _interval_gap(p.y, ylo, yhi)
        d = dx + dy if norm_name == "l1" else scalar_max(dx, dy)
        best = d if best is None else scalar_min(best, d)
    return best


def shape_distance(s1: BlockerShape, s2: BlockerShape, ctx: GridContext):
    """Exact shape-to-shape distance in the context's norm (squared for L2)."""
    best = None
    l2 = ctx.norm.is_l2
    for (ax, ay) in _segments(s1, ctx):
        for (bx, by) in _segments(s2, ctx):
            gx = _box_gap(ax, bx)
            gy = _box_gap(ay, by)
            if l2:
                d = gx * gx + gy * gy
            elif ctx.norm.name == "l1":
                d = gx + gy
            else:
                d = scalar_max(gx, gy)
            best = d if best is None else scalar_min(best, d)
    return best


def _box_gap(iv1, iv2):
    lo1, hi1 = iv1
    lo2, hi2 = iv2
    return scalar_max(0, scalar_max(lo2 - hi1, lo1 - hi2))


def owned_blockers(center: Point, ctx: GridContext) -> list[BlockerShape]:
    """Shapes owned by a small rectangle's centre.

    Ownership is strict: distance < delta for L1/Linf, and for L2 the
    enlarged rule d1(centre, shape) < sqrt(2)*delta, i.e. < 2*gamma.
    Scans a fixed anchor window around the centre's cell (ball radius at
    most two cells plus one cell of slack) and enforces the constant cap.
    """
    ic = ctx.grid_index(center.x)
    jc = ctx.grid_index(center.y)
    owned = []
    for j in range(jc - 4, jc + 5):
        for i in range(ic - 4, ic + 5):
            if not is_anchor(i, j, ctx.norm):
                continue
            shape = BlockerShape(i, j, ctx.kind)
            d = point_shape_distance(center, shape, ctx, ctx.own_norm)
            if sign_of_diff(d, ctx.own_radius) < 0:
                owned.append(shape)
    if len(owned) > OWNERSHIP_CAP:
        raise RuntimeError(
            f"ownership cap exceeded: centre ({center.x}, {center.y}) owns "
            f"{len(owned)} shapes at parameter {ctx.param} ({ctx.norm.name})"
        )
    return owned


def blocker_debug_json(r: Rect, ctx: GridContext, limit: int = 512) -> list[dict]:
    """Shapes near a rectangle as JSON-able dicts (debug / rendering aid).

    Coordinates are float approximations; the exact geometry stays in the
    library.
    """
    out = []
    for shape in blockers_touching(r, ctx, limit):
        segs = []
        for (xlo, xhi), (ylo, yhi) in _segments(shape, ctx):
            segs.append(
                [
                    [approx_float(xlo), approx_float(ylo)],
                    [approx_float(xhi), approx_float(yhi)],
                ]
            )
        out.append({"i": shape.i, "j": shape.j, "kind": shape.kind, "segments": segs})
    return out


def point_in_intersection(b: BlockerShape, r: Rect, ctx: GridContext) -> Point:
    """A deterministic point of (shape intersect rectangle).

    Clamps the anchor into the rectangle along each arm in the fixed order
    up, right, down, left (plus) / up, right (L), returning the first
    nonempty clamp.  Raises if the sets do not actually intersect.
    """
    i, j = b.i, b.j
    cl = ctx.cmp_line
    lp = ctx.line_pos

    # up arm: x = i*gamma, y in [j, j+1]*gamma
    if cl(i, r.left) >= 0 and cl(i, r.right) <= 0:
        if cl(j, r.top) <= 0 and cl(j + 1, r.bottom) >= 0:
            return Point(lp(i), scalar_max(r.bottom, lp(j)))
    # right arm: y = j*gamma, x in [i, i+1]*gamma
    if cl(j, r.bottom) >= 0 and cl(j, r.top) <= 0:
        if cl(i, r.right) <= 0 and cl(i + 1, r.left) >= 0:
            return Point(scalar_max(r.left, lp(i)), lp(j))
    if b.kind == PLUS:
        # down arm: x = i*gamma, y in [j-1, j]*gamma
        if cl(i, r.left) >= 0 and cl(i, r.right) <= 0:
            if cl(j - 1, r.top) <= 0 and cl(j, r.bottom) >= 0:
                return Point(lp(i), scalar_min(r.top, lp(j)))
        # left arm: y = j*gamma, x in [i-1, i]*gamma
        if cl(j, r.bottom) >= 0 and cl(j, r.top) <= 0:
            if cl(i - 1, r.right) <= 0 and cl(i, r.left) >= 0:
                return Point(scalar_min(r.right, lp(i)), lp(j))
    raise RuntimeError(
        f"point_in_intersection called on non-intersecting shape {b!r} and {r!r}"
    )
