"""The delta-parameterized approximate decision procedure.

Given an instance and a positive parameter (delta for L1/Linf, delta^2
for L2), either produce one representative point per rectangle with all
pairwise distances >= delta, or certify that delta exceeds the optimum
divided by the norm's approximation constant (5, sqrt(34), 6).

Steps: classify rectangles big/small by robust blocker intersection;
represent small ones by their centres and fail if two centres are closer
than delta; remove blocker shapes owned by small centres; match big
rectangles to remaining intersecting shapes through a degree-capped
bipartite graph with Hopcroft-Karp; fail if some big rectangle is
unmatched; otherwise pick a point in each matched (shape, rectangle)
intersection.

Running the same procedure on an infinitesimally perturbed parameter
(``symbolic=True``) yields the outcome in the right limit, which is what
the critical-value probe needs.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .geometry import Instance, Norm, Point, distance, rect_center
from .grid import (
    GridContext,
    BlockerShape,
    classify_big,
    iter_blockers_touching,
    owned_blockers,
    point_in_intersection,
)
from .scalars import sign_of_diff


@dataclass(frozen=True)
class SmallPairTooClose:
    i: int
    j: int


@dataclass(frozen=True)
class MatchingUncovered:
    uncovered: tuple[int, ...]


@dataclass(frozen=True)
class PlacementSuccess:
    points: tuple[Point, ...]
    matching_size: int

    @property
    def ok(self) -> bool:
        return True


@dataclass(frozen=True)
class PlacementFailure:
    reason: object  # SmallPairTooClose | MatchingUncovered
    matching_size: int = 0

    @property
    def ok(self) -> bool:
        return False


PlacementOutcome = PlacementSuccess | PlacementFailure


@dataclass(frozen=True)
class MatchGraph:
    """Degree-capped bipartite graph between big rectangles and shapes.

    ``adj`` holds, per big rectangle, positions into ``right`` in
    deterministic enumeration order, already filtered of shapes owned by
    small rectangles and capped at n entries.  Shapes with no incident
    edge never enter ``right``.
    """

    left: tuple[int, ...]
    right: tuple[BlockerShape, ...]
    adj: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class PlacementDetails:
    """Introspection bundle: partition, ownership, graph and outcome."""

    ctx: GridContext
    big: tuple[int, ...]
    small: tuple[int, ...]
    owned_keys: frozenset
    graph: MatchGraph
    outcome: PlacementOutcome


class ProbeTag(enum.Enum):
    FAILS_AT_DELTA = "fails-at-delta"
    SUCCEEDS_NOT_CRITICAL = "succeeds-not-critical"
    CRITICAL = "critical"


@dataclass(frozen=True)
class CriticalProbeResult:
    tag: ProbeTag
    witness: Optional[PlacementOutcome]


def _hk_matching(n_left: int, n_right: int, adj) -> list[int]:
    """Hopcroft-Karp maximum matching; returns right-position per left or -1.

    Deterministic: BFS layers and DFS both visit vertices in index order.
    """
    INF = float("inf")
    pair_u = [-1] * n_left
    pair_v = [-1] * n_right
    dist = [INF] * n_left

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if pair_u[u] == -1:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        reachable_free = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = pair_v[v]
                if w == -1:
                    reachable_free = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return reachable_free

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = pair_v[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                pair_u[u] = v
                pair_v[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in range(n_left):
            if pair_u[u] == -1:
                dfs(u)
    return pair_u


def hopcroft_karp(g: MatchGraph) -> dict:
    """Maximum-cardinality matching as {left id: right shape}."""
    pair_u = _hk_matching(len(g.left), len(g.right), g.adj)
    return {
        g.left[u]: g.right[v] for u, v in enumerate(pair_u) if v != -1
    }


def _build_graph(
    inst: Instance, ctx: GridContext, big: tuple[int, ...], owned_keys: frozenset
) -> MatchGraph:
    n = inst.n
    right_pos: dict = {}
    right: list[BlockerShape] = []
    adj: list[tuple[int, ...]] = []
    for idx in big:
        row: list[int] = []
        for shape in iter_blockers_touching(inst.rects[idx], ctx):
            if shape.key in owned_keys:
                continue
            pos = right_pos.get(shape.key)
            if pos is None:
                pos = len(right)
                right_pos[shape.key] = pos
                right.append(shape)
            row.append(pos)
            if len(row) >= n:
                break
        adj.append(tuple(row))
    return MatchGraph(left=tuple(big), right=tuple(right), adj=tuple(adj))


def placement_details(
    inst: Instance, delta, norm: Norm, symbolic: bool = False
) -> PlacementDetails:
    """Run the decision procedure and keep every intermediate artifact.

    ``delta`` is the norm's grid parameter: delta itself for L1/Linf and
    delta^2 for L2, as a positive rational in scaled coordinates.
    """
    param = Fraction(delta)
    ctx = GridContext(param, norm, eps=1 if symbolic else 0)
    empty_graph = MatchGraph((), (), ())

    if inst.identical_pair is not None:
        out = PlacementFailure(SmallPairTooClose(*inst.identical_pair))
        return PlacementDetails(ctx, (), tuple(range(inst.n)), frozenset(), empty_graph, out)

    big: list[int] = []
    small: list[int] = []
    for idx, r in enumerate(inst.rects):
        (big if classify_big(r, ctx) else small).append(idx)

    centers = {idx: rect_center(inst.rects[idx]) for idx in small}

    # small rectangles are represented by their centres; any two closer
    # than delta certify failure
    for a_pos in range(len(small)):
        for b_pos in range(a_pos + 1, len(small)):
            a, b = small[a_pos], small[b_pos]
            d = distance(centers[a], centers[b], norm)
            if sign_of_diff(d, ctx.delta_cmp) < 0:
                out = PlacementFailure(SmallPairTooClose(a, b))
                return PlacementDetails(
                    ctx, tuple(big), tuple(small), frozenset(), empty_graph, out
                )

    owned_keys: set = set()
    for idx in small:
        for shape in owned_blockers(centers[idx], ctx):
            owned_keys.add(shape.key)
    owned_keys = frozenset(owned_keys)

    graph = _build_graph(inst, ctx, tuple(big), owned_keys)
    pair_u = _hk_matching(len(graph.left), len(graph.right), graph.adj)
    matching_size = sum(1 for v in pair_u if v != -1)

    uncovered = tuple(graph.left[u] for u, v in enumerate(pair_u) if v == -1)
    if uncovered:
        out = PlacementFailure(MatchingUncovered(uncovered), matching_size)
        return PlacementDetails(ctx, tuple(big), tuple(small), owned_keys, graph, out)

    points: list[Optional[Point]] = [None] * inst.n
    for idx in small:
        points[idx] = centers[idx]
    for u, v in enumerate(pair_u):
        idx = graph.left[u]
        points[idx] = point_in_intersection(graph.right[v], inst.rects[idx], ctx)
    out = PlacementSuccess(tuple(points), matching_size)
    return PlacementDetails(ctx, tuple(big), tuple(small), owned_keys, graph, out)


def placement(
    inst: Instance, delta, norm: Norm, verify: bool = False
) -> PlacementOutcome:
    """Decision procedure entry point; see module docstring.

    With ``verify=True`` every success is re-checked post-hoc in exact
    arithmetic (all points inside their rectangles, pairwise >= delta).
    """
    details = placement_details(inst, delta, norm)
    out = details.outcome
    if verify and isinstance(out, PlacementSuccess):
        violations = check_points(inst, out.points, delta, norm)
        if violations:
            raise RuntimeError(
                "placement produced an invalid point set: " + "; ".join(violations)
            )
    return out


def check_points(inst: Instance, points, delta, norm: Norm) -> list[str]:
    """Exact verification of a point assignment against an instance.

    Returns human-readable violation descriptions (empty list = valid).
    ``delta`` is the grid parameter (delta^2 for L2), matching placement.
    """
    param = Fraction(delta)
    violations = []
    if len(points) != inst.n:
        return [f"expected {inst.n} points, got {len(points)}"]
    for idx, (p, r) in enumerate(zip(points, inst.rects)):
        if not r.contains(p.x, p.y):
            violations.append(f"point {idx} outside its rectangle")
    for a in range(inst.n):
        for b in range(a + 1, inst.n):
            d = distance(points[a], points[b], norm)
            if sign_of_diff(d, param) < 0:
                violations.append(f"points {a} and {b} closer than required")
    return violations


def critical_probe(inst: Instance, delta, norm: Norm) -> CriticalProbeResult:
    """Detect whether ``delta`` is a right endpoint of a success interval.

    Runs the procedure exactly at delta and symbolically at delta+eps
    (for L2 the perturbation is applied to delta^2, which is equivalent
    because squaring is increasing).  ``CRITICAL`` certifies success at
    delta together with failure immediately to the right.
    """
    at_delta = placement_details(inst, delta, norm).outcome
    if isinstance(at_delta, PlacementFailure):
        return CriticalProbeResult(ProbeTag.FAILS_AT_DELTA, at_delta)
    just_right = placement_details(inst, delta, norm, symbolic=True).outcome
    if isinstance(just_right, PlacementFailure):
        return CriticalProbeResult(ProbeTag.CRITICAL, at_delta)
    return CriticalProbeResult(ProbeTag.SUCCEEDS_NOT_CRITICAL, at_delta)
