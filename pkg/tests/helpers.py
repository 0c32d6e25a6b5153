"""Shared brute-force oracles and random generators for the test suite.

Everything here is deliberately dumb: itertools-driven enumerations that
mirror the definitions directly, used to compute expected values
independently of the library's own evaluation paths.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from spreadlab.vectors import ConvexBlockSeq, FinVec


def prefix_sums(t):
    out = [Fraction(0)]
    for c in t:
        out.append(out[-1] + c)
    return out


def consecutive_systems(n):
    """All (start, cut-pattern) consecutive interval systems on [1, n],
    as tuples of (lo, hi) pairs."""
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            positions = list(range(a, b))
            for r in range(len(positions) + 1):
                for cuts in itertools.combinations(positions, r):
                    bounds = [a] + [c + 1 for c in cuts] + [b + 1]
                    yield tuple(
                        (lo, hi - 1) for lo, hi in zip(bounds, bounds[1:])
                    )


def gap_systems(n):
    """All disjoint increasing interval systems within [1, n]."""
    intervals = [(lo, hi) for lo in range(1, n + 1) for hi in range(lo, n + 1)]

    def rec(min_lo):
        yield ()
        for lo, hi in intervals:
            if lo >= min_lo:
                for rest in rec(hi + 1):
                    yield ((lo, hi),) + rest

    for system in rec(1):
        if system:
            yield system


def lp_of(t, p):
    if not t:
        return Fraction(0)
    if p == math.inf:
        return max(abs(c) for c in t)
    if p == 1:
        return sum(abs(c) for c in t)
    if p == 2:
        return math.sqrt(float(sum(c * c for c in t)))
    return float(sum(abs(float(c)) ** p for c in t)) ** (1.0 / p)


def brute_jamesified(t, p, mode):
    """Interval-system norm of the coefficient tuple by sheer enumeration."""
    t = tuple(t)
    n = len(t)
    if n == 0:
        return Fraction(0)
    sums = prefix_sums(t)
    systems = consecutive_systems(n) if mode == "consecutive" else gap_systems(n)
    best = Fraction(0)
    for system in systems:
        tup = tuple(sums[hi] - sums[lo - 1] for lo, hi in system)
        v = lp_of(tup, p)
        if v > best:
            best = v
    return best


def brute_summing(t):
    t = tuple(t)
    n = len(t)
    sums = prefix_sums(t)
    best = Fraction(0)
    for lo in range(1, n + 1):
        for hi in range(lo, n + 1):
            best = max(best, abs(sums[hi] - sums[lo - 1]))
    return best


def random_fraction(rng: random.Random, denom_bits: int = 3, span: int = 2) -> Fraction:
    denom = 2 ** rng.randint(0, denom_bits)
    return Fraction(rng.randint(-span * denom, span * denom), denom)


def random_tuple(rng: random.Random, n: int, denom_bits: int = 3, span: int = 2):
    return tuple(random_fraction(rng, denom_bits, span) for _ in range(n))


def random_vector(rng: random.Random, n: int, spread: int = 3, **kw) -> FinVec:
    positions = sorted(rng.sample(range(1, n * spread + 1), n))
    return FinVec.make(zip(positions, random_tuple(rng, n, **kw)))


def random_convex_blocks(rng: random.Random, count: int, max_size: int = 3,
                         start: int = 1) -> ConvexBlockSeq:
    """Blocks with dyadic convex coefficients at randomly spread positions."""
    blocks = []
    pos = start
    for _ in range(count):
        size = rng.randint(1, max_size)
        positions = []
        for _ in range(size):
            pos += rng.randint(1, 2)
            positions.append(pos)
        weights = [Fraction(rng.randint(1, 8)) for _ in range(size)]
        total = sum(weights)
        blocks.append(FinVec.make(zip(positions, (w / total for w in weights))))
        pos += 1
    return ConvexBlockSeq(tuple(blocks))
