"""Desk-scale ground truth: an exact Linf optimizer for tiny instances and
a certified feasible lower-bound search for all norms.

The exact optimizer leans on the structure of optimal Linf solutions:
some optimum is "tight", with every x-coordinate of the form
left(R') + k*delta and every y-coordinate of the form bottom(R') + k*delta
(k < n), and the optimum itself lies in the finite candidate set
{(t - b)/k}.  Feasibility at a fixed delta is decided exactly by
backtracking over those structured coordinate sets.  This is exponential
and gated to n <= 4.

The lower-bound search is heuristic but its output is always verified
exactly, so whatever it returns is a true feasible value.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .geometry import Instance, Norm, Point, distance, rect_center
from .optimize import candidate_set_explicit, fallback_one_over_n
from .placement import check_points
from .scalars import sign_of_diff

MAX_ORACLE_N = 4
MAX_ORACLE_D = 32


@dataclass(frozen=True)
class OracleResult:
    """Either the exact optimum (delta_star) or a certified feasible value.

    ``value`` is delta for L1/Linf and delta^2 for L2, scaled coordinates;
    the witness points are pairwise >= value apart, verified exactly.
    """

    value: Fraction
    points: tuple[Point, ...]
    method: str
    seed: Optional[int] = None


def _verify(inst: Instance, points, value: Fraction, norm: Norm) -> None:
    violations = check_points(inst, points, value, norm)
    if violations:
        raise RuntimeError("oracle produced an invalid witness: " + "; ".join(violations))


def exact_linf_optimum(inst: Instance) -> OracleResult:
    """Exact Linf optimum by descending sweep over the candidate set.

    Refuses instances beyond n=4 or scaled coordinates beyond 32: the
    decision subroutine backtracks over structured coordinate sets and is
    exponential by design.
    """
    n = inst.n
    if not 2 <= n <= MAX_ORACLE_N:
        raise ValueError(f"exact oracle supports 2 <= n <= {MAX_ORACLE_N}, got {n}")
    if inst.D > MAX_ORACLE_D:
        raise ValueError(
            f"exact oracle supports scaled coordinates <= {MAX_ORACLE_D}, got D={inst.D}"
        )
    if inst.identical_pair is not None:
        centers = tuple(rect_center(r) for r in inst.rects)
        return OracleResult(Fraction(0), centers, "exact-linf")

    for delta in reversed(candidate_set_explicit(inst)):
        witness = _linf_feasible(inst, delta)
        if witness is not None:
            _verify(inst, witness, delta, Norm.from_name("linf"))
            return OracleResult(delta, witness, "exact-linf")
    raise RuntimeError("no feasible candidate value; candidate set is incomplete")


def _linf_feasible(inst: Instance, delta: Fraction):
    """Exact decision: is there a placement with pairwise Linf >= delta?

    Searches coordinate sets {left(R') + k*delta} and {bottom(R') + k*delta}
    per rectangle; if any feasible placement exists, one exists on these
    sets.
    """
    n = inst.n
    lefts = [r.left for r in inst.rects]
    bottoms = [r.bottom for r in inst.rects]
    domains = []
    for r in inst.rects:
        xs = sorted(
            {
                base + k * delta
                for base in lefts
                for k in range(n)
                if r.left <= base + k * delta <= r.right
            }
        )
        ys = sorted(
            {
                base + k * delta
                for base in bottoms
                for k in range(n)
                if r.bottom <= base + k * delta <= r.top
            }
        )
        if not xs or not ys:
            return None
        domains.append((xs, ys))

    order = sorted(range(n), key=lambda i: (len(domains[i][0]) * len(domains[i][1]), i))
    assigned: list[Optional[tuple[Fraction, Fraction]]] = [None] * n

    def ok_against(idx, x, y) -> bool:
        for other in range(n):
            p = assigned[other]
            if p is None or other == idx:
                continue
            if max(abs(x - p[0]), abs(y - p[1])) < delta:
                return False
        return True

    def backtrack(pos: int) -> bool:
        if pos == len(order):
            return True
        idx = order[pos]
        xs, ys = domains[idx]
        for x in xs:
            for y in ys:
                if ok_against(idx, x, y):
                    assigned[idx] = (x, y)
                    if backtrack(pos + 1):
                        return True
                    assigned[idx] = None
        return False

    if not backtrack(0):
        return None
    return tuple(Point(x, y) for x, y in assigned)


def _min_pairwise(points, norm: Norm, cap: Fraction):
    best = cap
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            d = distance(points[a], points[b], norm)
            if sign_of_diff(d, best) < 0:
                best = d
    return best


def _sorted_distance_vector(points, norm: Norm):
    out = []
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            out.append(distance(points[a], points[b], norm))
    out.sort()
    return out


def lower_bound_search(
    inst: Instance, norm: Norm, effort: int, seed: int = 0
) -> OracleResult:
    """Best certified feasible value found by fallback + hill climbing.

    effort 0 returns the verified 1/n fallback.  Higher effort adds
    multi-start coordinate/diagonal hill climbing with rational steps
    halved down to D / 2^effort, using the lexicographic sorted-distance
    vector as objective (plain min-distance greedy stalls on plateaus),
    plus a coarse grid seed on tiny instances.  Every comparison is exact,
    so the result is always a true lower bound on the optimum.
    """
    if inst.identical_pair is not None:
        centers = tuple(rect_center(r) for r in inst.rects)
        return OracleResult(Fraction(0), centers, "identical-points", seed)
    n = inst.n
    cap = Fraction(4 * inst.D * inst.D) if norm.is_l2 else Fraction(2 * inst.D)
    if n == 1:
        pts = (rect_center(inst.rects[0]),)
        return OracleResult(cap, pts, "single-rectangle", seed)

    _, fb_points = fallback_one_over_n(inst)
    best_points = fb_points
    best_value = _min_pairwise(fb_points, norm, cap)

    if effort >= 1:
        rng = random.Random(seed)
        starts = [fb_points, tuple(rect_center(r) for r in inst.rects)]
        for _ in range(max(2, min(effort, 6))):
            starts.append(
                tuple(
                    Point(
                        Fraction(rng.randint(r.left, r.right)),
                        Fraction(rng.randint(r.bottom, r.top)),
                    )
                    for r in inst.rects
                )
            )
        if n <= 3 and effort >= 2:
            g = _grid_seed(inst, norm, grid=4)
            if g is not None:
                starts.append(g)
        for start in starts:
            pts = _hill_climb(inst, norm, start, effort)
            val = _min_pairwise(pts, norm, cap)
            if sign_of_diff(val, best_value) > 0:
                best_value = val
                best_points = pts

    _verify(inst, best_points, best_value, norm)
    return OracleResult(best_value, best_points, f"lower-bound[effort={effort}]", seed)


def _grid_seed(inst: Instance, norm: Norm, grid: int):
    """Best combination of coarse per-rectangle grid points (tiny n only)."""
    candidates = []
    for r in inst.rects:
        pts = sorted(
            {
                (
                    Fraction(r.left) + Fraction((r.right - r.left) * tx, grid),
                    Fraction(r.bottom) + Fraction((r.top - r.bottom) * ty, grid),
                )
                for tx in range(grid + 1)
                for ty in range(grid + 1)
            }
        )
        candidates.append(pts)
    best = None
    best_vec = None

    def rec(idx, chosen):
        nonlocal best, best_vec
        if idx == len(candidates):
            pts = tuple(Point(x, y) for x, y in chosen)
            vec = _sorted_distance_vector(pts, norm)
            if best_vec is None or vec > best_vec:
                best_vec = vec
                best = pts
            return
        for cand in candidates[idx]:
            chosen.append(cand)
            rec(idx + 1, chosen)
            chosen.pop()

    rec(0, [])
    return best


def _hill_climb(inst: Instance, norm: Norm, start, effort: int):
    points = list(start)
    vec = _sorted_distance_vector(points, norm)
    step = Fraction(max(inst.D, 1))
    for _ in range(effort + 1):
        moved = True
        while moved:
            moved = False
            for i, r in enumerate(inst.rects):
                base = points[i]
                for dx, dy in (
                    (step, 0),
                    (-step, 0),
                    (0, step),
                    (0, -step),
                    (step, step),
                    (step, -step),
                    (-step, step),
                    (-step, -step),
                ):
                    x = min(max(base.x + dx, r.left), r.right)
                    y = min(max(base.y + dy, r.bottom), r.top)
                    if x == base.x and y == base.y:
                        continue
                    points[i] = Point(x, y)
                    cand_vec = _sorted_distance_vector(points, norm)
                    if cand_vec > vec:
                        vec = cand_vec
                        base = points[i]
                        moved = True
                    else:
                        points[i] = base
        step = step / 2
    return tuple(points)
