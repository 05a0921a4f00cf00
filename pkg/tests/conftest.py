"""Shared helpers: seeded instance generators and exact test oracles."""
from __future__ import annotations

import random
from fractions import Fraction

from distrep import ingest


def make_raw_rects(rng: random.Random, n: int, d: int, allow_identical: bool = False):
    """Random raw rectangles mixing points, segments and boxes."""
    rects = []
    seen_points = set()

    def fresh_point():
        # bounded retries: tiny coordinate ranges can run out of free points
        for _ in range(40):
            x, y = rng.randint(0, d), rng.randint(0, d)
            if allow_identical or (x, y) not in seen_points:
                return x, y
        return None

    for _ in range(n):
        roll = rng.random()
        if roll < 0.2:
            pt = fresh_point()
            if pt is None:
                a = rng.randint(0, d - 1)
                rects.append((a, a + 1, rng.randint(0, d), rng.randint(0, d)))
                rects[-1] = (
                    rects[-1][0],
                    rects[-1][1],
                    min(rects[-1][2], rects[-1][3]),
                    max(rects[-1][2], rects[-1][3]),
                )
                continue
            seen_points.add(pt)
            rects.append((pt[0], pt[0], pt[1], pt[1]))
        elif roll < 0.4:
            a = rng.randint(0, d - 1)
            b = rng.randint(a + 1, d)
            c = rng.randint(0, d)
            if rng.random() < 0.5:
                rects.append((a, b, c, c))
            else:
                rects.append((c, c, a, b))
        else:
            x1 = rng.randint(0, d)
            x2 = rng.randint(x1, d)
            y1 = rng.randint(0, d)
            y2 = rng.randint(y1, d)
            if (x1, y1) == (x2, y2):
                if not allow_identical and (x1, y1) in seen_points:
                    x1 = max(0, x1 - 1)
                    x2 = min(d, x2 + 1)
                else:
                    seen_points.add((x1, y1))
            rects.append((x1, x2, y1, y2))
    return rects


def make_instance(rng: random.Random, n: int, d: int, allow_identical: bool = False):
    return ingest(make_raw_rects(rng, n, d, allow_identical))


def random_param(rng: random.Random, inst, norm) -> Fraction:
    """A random exact rational grid parameter in the meaningful range.

    delta in [1/n, 2D] for L1/Linf; delta^2 in [1/n^2, 4D^2] for L2
    (scaled coordinates).  Half the samples are drawn log-uniformly so
    the small-delta regime, where placement tends to succeed, is well
    covered alongside the large-delta failure regime.
    """
    n, D = inst.n, inst.D
    if norm.name == "l2":
        lo = Fraction(1, n * n)
        hi = Fraction(4 * D * D)
    else:
        lo = Fraction(1, n)
        hi = Fraction(2 * D)
    den = rng.randint(1, 2 * n + 3)
    if rng.random() < 0.5:
        # log-uniform: exact rational snap of lo * (hi/lo)^t
        t = rng.random()
        target = float(lo) * (float(hi) / float(lo)) ** t
        num = max(1, round(target * den))
    else:
        lo_num = (lo.numerator * den + lo.denominator - 1) // lo.denominator
        hi_num = max((hi.numerator * den) // hi.denominator, lo_num)
        num = rng.randint(max(lo_num, 1), max(hi_num, 1))
    val = Fraction(num, den)
    return min(max(val, lo), hi)
