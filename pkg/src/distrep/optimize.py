"""Optimization drivers: turn the decision procedure into approximators.

Linf searches the finite candidate set {(t-b)/k} through an implicit
sorted matrix: the sorted numerator array t against denominators 1..n,
with rank queries answered by exact selection, bracketing a candidate
where the decision procedure succeeds but fails at the next one.

L1 and L2 search for a critical value: a parameter where the procedure
succeeds but fails immediately to the right.  Success intervals are
closed on the right and every critical value is a rational with
numerator and denominator at most G = 4*D*n (L1, on delta) or
G = 8*D^2*n^2 (L2, on delta^2), so the driver bisects the initial bracket
[1/n, 2D] (squared for L2) probing criticality at each midpoint and, once
the bracket is narrower than 1/G^2, recovers the unique bounded-
denominator rational in it exactly.

Everything operates in scaled (doubled) coordinates; the CLI divides
reported values by two on output.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .geometry import Instance, Norm, Point, rect_center, LINF
from .placement import (
    CriticalProbeResult,
    PlacementSuccess,
    ProbeTag,
    critical_probe,
    placement_details,
)
from .scalars import format_rational

SEARCH_STRATEGY = "dyadic-bisection[critical-probe]+bounded-denominator-recovery"

# failsafe multiplier on the (log G)^2 probe budget; the search provably
# needs O(log(D*G)) probes, so tripping this indicates broken arithmetic
PROBE_BUDGET_FACTOR = 8


@dataclass(frozen=True)
class OptimizeResult:
    """A certified approximate optimum.

    ``delta_param_out`` is the grid parameter at which placement succeeded
    (delta for L1/Linf, delta^2 for L2), in scaled coordinates; the points
    witness it.  ``certificate`` is one of "upper-end-success",
    "bracket-found", "fallback-1-over-n", "identical-points-zero".
    """

    norm: Norm
    delta_param_out: Fraction
    points: tuple[Point, ...]
    certificate: str
    next_fail: Optional[Fraction]
    placement_calls: int
    probe_log: tuple[dict, ...]
    strategy: str = SEARCH_STRATEGY


class CandidateMatrix:
    """Implicit sorted matrix a[r, c] = numerators[r] / (n - c).

    Rows are the sorted, deduplicated nonnegative coordinate differences;
    columns correspond to denominators n, n-1, ..., 1, so entries grow
    along rows and columns.  Selection and counting never materialize the
    n*len(numerators) entries.
    """

    def __init__(self, numerators, n: int):
        nums = sorted(set(int(e) for e in numerators))
        if any(e <= 0 for e in nums):
            raise ValueError("numerators must be positive")
        if n < 1:
            raise ValueError("denominator range must be nonempty")
        self.numerators = tuple(nums)
        self.n = n

    @property
    def total(self) -> int:
        return len(self.numerators) * self.n

    def _idx_le(self, bound: int) -> int:
        """Number of numerators <= bound."""
        return bisect.bisect_right(self.numerators, bound)

    def count_le(self, v: Fraction) -> int:
        """Number of matrix entries <= v (duplicates counted)."""
        v = Fraction(v)
        if v <= 0:
            return 0
        a, b = v.numerator, v.denominator
        n = self.n
        total = 0
        prev = self._idx_le(0)
        for t in range(1, n + 1):
            cur = self._idx_le((a * t) // b)
            if cur > prev:
                total += (n - t + 1) * (cur - prev)
                prev = cur
            if prev == len(self.numerators):
                break
        return total

    def count_eq(self, v: Fraction) -> int:
        v = Fraction(v)
        if v <= 0:
            return 0
        a, b = v.numerator, v.denominator
        nums = set(self.numerators)
        hits = 0
        for k in range(1, self.n + 1):
            prod = a * k
            if prod % b == 0 and (prod // b) in nums:
                hits += 1
        return hits

    def count_lt(self, v: Fraction) -> int:
        return self.count_le(v) - self.count_eq(v)

    def min_above(self, lo: Fraction) -> Optional[Fraction]:
        """Smallest matrix value strictly greater than lo."""
        lo = Fraction(lo)
        if lo < 0:
            lo = Fraction(0)
        a, b = lo.numerator, lo.denominator
        best = None
        for e in self.numerators:
            if lo == 0:
                k_row = self.n
            else:
                # largest k with e/k > lo, i.e. a*k < e*b
                k_row = min((e * b - 1) // a, self.n)
            if k_row >= 1:
                cand = Fraction(e, k_row)
                if best is None or cand < best:
                    best = cand
        return best


def matrix_select(m: CandidateMatrix, rank: int) -> Fraction:
    """The rank-th smallest entry (1-based, duplicates counted).

    Bisects the value range with exact rational midpoints until at most
    one distinct entry remains in the half-open bracket, then recovers it
    exactly; entries with denominators <= n differ by at least 1/n^2.
    """
    if not 1 <= rank <= m.total:
        raise ValueError(f"rank {rank} out of range 1..{m.total}")
    vmin = Fraction(m.numerators[0], m.n)
    vmax = Fraction(m.numerators[-1], 1)
    if m.count_le(vmin) >= rank:
        return vmin
    lo, hi = vmin, vmax
    resolution = Fraction(1, m.n * m.n)
    while hi - lo > resolution:
        mid = (lo + hi) / 2
        if m.count_le(mid) >= rank:
            hi = mid
        else:
            lo = mid
    ans = m.min_above(lo)
    if ans is None or ans > hi or m.count_le(ans) < rank or m.count_lt(ans) >= rank:
        raise RuntimeError(
            f"matrix selection failed for rank {rank} in ({lo}, {hi}]"
        )
    return ans


def candidate_set_explicit(inst: Instance) -> list[Fraction]:
    """The full sorted candidate set {(t-b)/k}, clipped to [1/n, 2D].

    Intended for small instances (oracle support and tests); the
    optimizer itself only ever materializes the numerators.
    """
    diffs = _coordinate_diffs(inst)
    n = inst.n
    lo, hi = Fraction(1, n), Fraction(2 * inst.D)
    vals = {
        Fraction(d, k)
        for d in diffs
        for k in range(1, n + 1)
        if lo <= Fraction(d, k) <= hi
    }
    return sorted(vals)


def _coordinate_diffs(inst: Instance) -> list[int]:
    xs = sorted({c for r in inst.rects for c in (r.left, r.right)})
    ys = sorted({c for r in inst.rects for c in (r.bottom, r.top)})
    diffs = set()
    for arr in (xs, ys):
        for ai in range(len(arr)):
            for bi in range(ai + 1, len(arr)):
                diffs.add(arr[bi] - arr[ai])
    diffs.discard(0)
    return sorted(diffs)


def fallback_one_over_n(inst: Instance) -> tuple[Fraction, tuple[Point, ...]]:
    """Greedy assignment on the (1/n)-spaced grid; always at least 1/n apart.

    Rectangles are processed by ascending count of contained grid points,
    each taking its lexicographically smallest unused point.  Single-point
    rectangles take their own point; everything else contains at least
    n+1 grid points, so the greedy pass always completes.
    """
    if inst.identical_pair is not None:
        raise ValueError(
            "instance contains two identical point rectangles; optimum is zero"
        )
    n = inst.n
    counts = []
    for idx, r in enumerate(inst.rects):
        xc = (r.right - r.left) * n + 1
        yc = (r.top - r.bottom) * n + 1
        counts.append((xc * yc, idx))
    counts.sort()
    used: set[tuple[int, int]] = set()
    points: list[Optional[Point]] = [None] * n
    for _, idx in counts:
        r = inst.rects[idx]
        chosen = None
        for a in range(r.left * n, r.right * n + 1):
            for b in range(r.bottom * n, r.top * n + 1):
                if (a, b) not in used:
                    chosen = (a, b)
                    break
            if chosen is not None:
                break
        if chosen is None:
            raise RuntimeError(f"fallback grid assignment failed at rectangle {idx}")
        used.add(chosen)
        points[idx] = Point(Fraction(chosen[0], n), Fraction(chosen[1], n))
    return Fraction(1, n), tuple(points)


def _probe_record(param: Fraction, tag: str, matching_size: int) -> dict:
    return {
        "param": format_rational(param),
        "outcome": tag,
        "matching_size": matching_size,
    }


def optimize_linf(inst: Instance) -> OptimizeResult:
    """Candidate-set binary search for Linf (approximation factor 6)."""
    if inst.identical_pair is not None:
        raise ValueError("identical point pair must be handled by the caller")
    n = inst.n
    calls = 0
    log: list[dict] = []
    outcome_cache: dict[Fraction, object] = {}

    def probe(value: Fraction):
        nonlocal calls
        out = outcome_cache.get(value)
        if out is None:
            out = placement_details(inst, value / 6, LINF).outcome
            outcome_cache[value] = out
            calls += 1
            log.append(
                _probe_record(
                    value / 6,
                    "success" if out.ok else "failure",
                    out.matching_size,
                )
            )
        return out

    if n == 1:
        top = Fraction(2 * inst.D)
        out = probe(top * 6)  # placement at 2D itself
        if not out.ok:
            raise RuntimeError("placement failed on a single-rectangle instance")
        return OptimizeResult(
            LINF, top, out.points, "upper-end-success", None, calls, tuple(log)
        )

    diffs = _coordinate_diffs(inst)
    if not diffs:
        raise RuntimeError("no coordinate differences on a multi-rectangle instance")
    matrix = CandidateMatrix(diffs, n)
    S = matrix.total

    vmax = Fraction(matrix.numerators[-1])
    out = probe(vmax)
    if out.ok:
        return OptimizeResult(
            LINF, vmax / 6, out.points, "upper-end-success", None, calls, tuple(log)
        )

    lo_rank = max(1, matrix.count_le(Fraction(1, n)))
    hi_rank = S
    while hi_rank - lo_rank > 1:
        mid = (lo_rank + hi_rank) // 2
        v = matrix_select(matrix, mid)
        out = probe(v)
        if out.ok:
            lo_rank = matrix.count_le(v)
        else:
            hi_rank = matrix.count_lt(v) + 1
        if not lo_rank < hi_rank:
            raise RuntimeError(
                f"rank bracket collapsed to [{lo_rank}, {hi_rank}] during Linf search"
            )

    v_lo = matrix_select(matrix, lo_rank)
    v_hi = matrix_select(matrix, hi_rank)
    out = probe(v_lo)
    if not out.ok:
        raise RuntimeError(
            f"placement unexpectedly failed at the lowest bracketed candidate {v_lo}"
        )
    return OptimizeResult(
        LINF,
        v_lo / 6,
        out.points,
        "bracket-found",
        v_hi / 6,
        calls,
        tuple(log),
    )


def _bit_bound(inst: Instance, norm: Norm) -> int:
    if norm.name == "l1":
        return 4 * inst.D * inst.n
    if norm.name == "l2":
        return 8 * inst.D * inst.D * inst.n * inst.n
    raise ValueError("bit bounds apply to L1/L2 only")


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The smallest-denominator rational strictly inside (lo, hi), lo >= 0."""
    lo, hi = Fraction(lo), Fraction(hi)
    if not 0 <= lo < hi:
        raise ValueError(f"need 0 <= lo < hi, got ({lo}, {hi})")
    fl = lo.numerator // lo.denominator
    if fl + 1 < hi:
        return Fraction(fl + 1)
    a = lo - fl  # in [0, 1)
    b = hi - fl  # in (0, 1]
    if a == 0:
        q = (b.denominator // b.numerator) + 1  # smallest q with 1/q < b
        return fl + Fraction(1, q)
    return fl + 1 / simplest_between(1 / b, 1 / a)


def optimize_l1_l2(inst: Instance, norm: Norm) -> OptimizeResult:
    """Critical-value search for L1/L2 (factors 5 and sqrt(34)).

    The search variable is delta for L1 and delta^2 for L2 (critical
    values are rational there, with numerator and denominator at most G).
    """
    if norm.name not in ("l1", "l2"):
        raise ValueError("use optimize_linf for the Linf norm")
    if inst.identical_pair is not None:
        raise ValueError("identical point pair must be handled by the caller")
    n = inst.n
    calls = 0
    log: list[dict] = []
    G = _bit_bound(inst, norm)
    budget = PROBE_BUDGET_FACTOR * (math.ceil(math.log2(G)) + 1) ** 2

    def probe_plain(param: Fraction):
        nonlocal calls
        out = placement_details(inst, param, norm).outcome
        calls += 1
        log.append(
            _probe_record(param, "success" if out.ok else "failure", out.matching_size)
        )
        return out

    def probe_crit(param: Fraction) -> CriticalProbeResult:
        nonlocal calls
        cp = critical_probe(inst, param, norm)
        calls += 2
        ms = cp.witness.matching_size if cp.witness is not None else 0
        log.append(_probe_record(param, cp.tag.value, ms))
        return cp

    def finish_critical(param: Fraction, cp: CriticalProbeResult) -> OptimizeResult:
        if param.numerator > G or param.denominator > G:
            raise RuntimeError(
                f"critical value {param} violates the bit bound {G} "
                f"({norm.name}, D={inst.D}, n={n})"
            )
        assert isinstance(cp.witness, PlacementSuccess)
        return OptimizeResult(
            norm, param, cp.witness.points, "bracket-found", None, calls, tuple(log)
        )

    if norm.name == "l1":
        lo = Fraction(1, n)
        hi = Fraction(2 * inst.D)
    else:
        lo = Fraction(1, n * n)
        hi = Fraction(4 * inst.D * inst.D)

    out_hi = probe_plain(hi)
    if out_hi.ok:
        return OptimizeResult(
            norm, hi, out_hi.points, "upper-end-success", None, calls, tuple(log)
        )

    cp = probe_crit(lo)
    if cp.tag is ProbeTag.FAILS_AT_DELTA:
        _, pts = fallback_one_over_n(inst)
        return OptimizeResult(
            norm, lo, pts, "fallback-1-over-n", lo, calls, tuple(log)
        )
    if cp.tag is ProbeTag.CRITICAL:
        return finish_critical(lo, cp)

    width_limit = Fraction(1, G * G)
    while hi - lo > width_limit:
        if calls > budget:
            raise RuntimeError(
                f"probe budget {budget} exceeded while bracketing ({lo}, {hi}) "
                f"for {norm.name}"
            )
        mid = (lo + hi) / 2
        cp = probe_crit(mid)
        if cp.tag is ProbeTag.CRITICAL:
            return finish_critical(mid, cp)
        if cp.tag is ProbeTag.FAILS_AT_DELTA:
            hi = mid
        else:
            lo = mid

    s = simplest_between(lo, hi)
    cp = probe_crit(s)
    if cp.tag is not ProbeTag.CRITICAL:
        raise RuntimeError(
            f"expected exactly one critical value in the bracket ({lo}, {hi}) "
            f"but the recovered candidate {s} probed {cp.tag.value}"
        )
    return finish_critical(s, cp)


def optimize(inst: Instance, norm: Norm) -> OptimizeResult:
    """Front door: handles the zero-optimum case then dispatches by norm."""
    if inst.identical_pair is not None:
        centers = tuple(rect_center(r) for r in inst.rects)
        return OptimizeResult(
            norm, Fraction(0), centers, "identical-points-zero", None, 0, ()
        )
    if norm.name == "linf":
        return optimize_linf(inst)
    return optimize_l1_l2(inst, norm)
