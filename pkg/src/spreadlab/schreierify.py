"""Admissibility-constrained norms: position-sensitive constructions whose
functionals may act on at most as many blocks as their first index allows.

Conditional variant.  Given a bimonotone equal-signs-additive base norm Z,
the functionals are ``sum_k a_k (sum of e*_i over [m_k, m_{k+1}))`` with
``n <= m_1 < ... < m_n < m_{n+1}`` and the coefficient tuple ``a`` drawn from
a subset of the dual ball of the span of the first n base coordinates.  Two
modes are provided:

* ``ideal``: the coefficients range over the full dual ball, which collapses
  the inner maximization to an exact base-norm evaluation of the tuple of
  interval sums (the base is bimonotone, so restricting a norming functional
  of the span to its first n coordinates keeps it in the ball).
* ``grid``: the coefficients range over an explicit finite family of
  piecewise-constant rational functionals (see ``grid_dual_max``).  The value
  never exceeds the ideal one and recovers at least a (2n-1)/(2n) fraction of
  it on admissibly placed vectors.

Unconditional variant.  Given a suppression-unconditional subsymmetric base
norm U, the value is the largest U-norm of a coordinate subtuple whose
cardinality does not exceed its first index.

The combined construction takes the pointwise maximum of the two variants;
its summing functional has norm one and its summing-zero blocks are
suppression unconditional, which is exactly what the saturation construction
requires of its base.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .config import DEFAULT, Config
from .jamesify import JamesifiedNorm
from .oracles import INF, ConfigurationError, LpNorm, NormFlags, NormOracle, Number
from .vectors import FinVec

Pairs = tuple[tuple[int, Number], ...]


def _support_pairs(x: FinVec | Pairs) -> Pairs:
    pairs = x.coords if isinstance(x, FinVec) else tuple(x)
    return tuple((i, c) for i, c in pairs if c != 0)


def _check_cap(support: Pairs, cfg: Config) -> None:
    if support and support[-1][0] > cfg.schreier_cap:
        raise ValueError(
            f"support reaches {support[-1][0]}, beyond the cap {cfg.schreier_cap}"
        )


# -- admissible window/grouping enumeration --------------------------------------


def _admissible_groupings(support: Pairs) -> Iterable[tuple[int, tuple[Number, ...]]]:
    """Yield ``(first_index, group_sums)`` over all contiguous support windows
    and consecutive groupings of the window into at most ``first_index``
    nonempty groups.

    Any admissible cut system induces such a grouping (empty intervals only
    contribute zero coordinates, which the 1-spreading base norm ignores, and
    the nonempty-interval count obeys the admissibility bound), while each
    grouping with at most ``first_index`` groups is realized by a system whose
    first cut sits at the window's first support index.  The enumeration is
    therefore exact for the ideal mode and indexes the grid families by
    ``first_index`` in grid mode.
    """
    s = len(support)
    prefix: list[Number] = [0]
    for _, c in support:
        prefix.append(prefix[-1] + c)

    for i in range(s):
        budget = support[i][0]  # first index of the window

        def rec(pos: int, groups: tuple[Number, ...]):
            for end in range(pos, s):
                cur = groups + (prefix[end + 1] - prefix[pos],)
                yield budget, cur
                if end + 1 < s and len(cur) < budget:
                    yield from rec(end + 1, cur)

        yield from rec(i, ())


def _schreier_c_support(
    z_norm: NormOracle,
    support: Pairs,
    mode: str,
    grid_levels: int,
    cfg: Config,
) -> Number:
    _check_cap(support, cfg)
    if not support:
        return 0
    best: Number = 0
    if mode == "grid":
        q = _grid_conjugate(z_norm)
        for k_first, sums in _admissible_groupings(support):
            v = grid_dual_max(sums, _grid_denominator(k_first, grid_levels), q)
            if v > best:
                best = v
    else:
        for _, sums in _admissible_groupings(support):
            v = z_norm._eval_tuple(tuple(c for c in sums if c != 0))
            if v > best:
                best = v
    return best


def schreier_c_eval(
    z_norm: NormOracle,
    x: FinVec,
    mode: str = "ideal",
    grid_levels: int = 2,
    cfg: Config = DEFAULT,
) -> Number:
    """Largest admissible-functional value against ``x`` (conditional variant)."""
    z_norm.flags.require("bimonotone", "esa")
    if mode not in ("ideal", "grid"):
        raise ValueError(f"mode must be 'ideal' or 'grid', got {mode!r}")
    return _schreier_c_support(z_norm, _support_pairs(x), mode, grid_levels, cfg)


def _schreier_u_support(u_norm: NormOracle, support: Pairs, cfg: Config) -> Number:
    _check_cap(support, cfg)
    if not support:
        return 0
    s = len(support)
    best: Number = 0

    def rec(pos: int, cap: int, chosen: tuple[Number, ...]) -> None:
        nonlocal best
        for t in range(pos, s):
            idx, coeff = support[t]
            limit = idx if cap == 0 else cap
            if len(chosen) + 1 > limit:
                continue
            cur = chosen + (coeff,)
            v = u_norm._eval_tuple(cur)
            if v > best:
                best = v
            rec(t + 1, limit, cur)

    rec(0, 0, ())
    return best


def schreier_u_eval(u_norm: NormOracle, x: FinVec, cfg: Config = DEFAULT) -> Number:
    """Largest base-norm value of an admissible coordinate subtuple: at most
    ``min(subset)`` coordinates, taken in index order (unconditional variant)."""
    u_norm.flags.require("unconditional_1", "spreading_1")
    return _schreier_u_support(u_norm, _support_pairs(x), cfg)


def combined_base_eval(
    u_norm: NormOracle,
    z_norm: NormOracle,
    x: FinVec,
    cfg: Config = DEFAULT,
) -> Number:
    """Pointwise maximum of the two admissibility-constrained constructions."""
    return max(
        schreier_u_eval(u_norm, x, cfg),
        schreier_c_eval(z_norm, x, "ideal", cfg=cfg),
    )


def spreading_profile(
    space: NormOracle,
    c: Sequence[Number],
    shifts: Sequence[int],
) -> list[float]:
    """Norms of ``c`` placed at consecutive positions starting at each shift
    (the first coefficient lands at index ``shift``); exhibits stabilization
    of position-sensitive norms."""
    out = []
    for shift in shifts:
        if shift < 1:
            raise ValueError("shifts are 1-based")
        out.append(space.value(FinVec.from_coeffs(c, start=shift)))
    return out


# -- the grid family ------------------------------------------------------------


def _grid_conjugate(z_norm: NormOracle) -> float:
    """Conjugate exponent for the grid certificates; needs a p-norm interval base.

    A piecewise-constant coefficient pattern with level vector w pairs with any
    vector y as sum_j w_j (interval sum of y), which Holder bounds by
    ||w||_q ||y|| under the p-norm interval base; that certificate is what
    keeps every family member inside the dual ball.
    """
    if isinstance(z_norm, JamesifiedNorm) and isinstance(z_norm.inner, LpNorm):
        p = z_norm.inner.p
        if p == 1:
            return INF
        if p == INF:
            return 1.0
        return p / (p - 1.0)
    raise ConfigurationError(
        "grid mode needs an interval-system base over a p-norm "
        "(its dual-ball certificates are explicit)"
    )


def _grid_denominator(n: int, levels: int = 2) -> int:
    """Smallest power of two >= 2*n*levels.

    Powers of two keep the families nested as n grows; at the default density
    the rounding loss on an n-part norming functional is at most sqrt(n)/D
    <= 1/(2n) of the value for n <= 4, which is the advertised fraction.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    return 1 << max(2, math.ceil(math.log2(2 * n * levels)))


@functools.lru_cache(maxsize=200_000)
def _grid_dual_max_key(abs_sums: tuple[Fraction, ...], D: int, q: float) -> Fraction:
    """Exact max of ``sum w_j s_j`` over ``w in (Z/D)^m`` with ``||w||_q <= 1``.

    ``abs_sums`` is sorted descending and positive.  q = inf saturates every
    coordinate and q = 1 spends the whole budget on the largest; finite q > 1
    runs a branch-and-bound over integer levels u_j = D w_j with the Holder
    relaxation as bound (padded before pruning, so no optimum is cut off).
    """
    if not abs_sums:
        return Fraction(0)
    if q == INF:
        return Fraction(sum(abs_sums))
    if q == 1:
        return Fraction(abs_sums[0])

    m = len(abs_sums)
    s_float = [float(c) for c in abs_sums]
    p = q / (q - 1.0)
    tail_norm = [0.0] * (m + 1)
    acc = 0.0
    for j in range(m - 1, -1, -1):
        acc += s_float[j] ** p
        tail_norm[j] = acc ** (1.0 / p)

    best = Fraction(0)
    pad = 1e-12

    def rec(j: int, budget: float, value: Fraction) -> None:
        nonlocal best
        if value > best:
            best = value
        if j == m or budget <= 0.0:
            return
        top = min(D, int(budget ** (1.0 / q) + 1e-9))
        fbest = float(best)
        fvalue = float(value)
        sj = s_float[j]
        for u in range(top, -1, -1):
            left = budget - float(u) ** q
            if left < -1e-9:
                continue
            # value reachable below this node, Holder-relaxed
            reach = fvalue + u * sj / D + tail_norm[j + 1] * max(left, 0.0) ** (1.0 / q) / D
            if reach <= fbest - pad:
                if u * sj >= tail_norm[j] * budget ** (1.0 / q):
                    break  # smaller u only shrink the reachable value
                continue
            rec(j + 1, left, value + Fraction(u, D) * abs_sums[j])
            fbest = float(best)

    rec(0, float(D) ** q, Fraction(0))
    return best


def grid_dual_max(sums: Sequence[Number], D: int, q: float) -> Fraction:
    """Best pairing of ``sums`` against the grid family with denominator D.

    Signs are absorbed by the family's symmetry and zeros dropped, so the
    value depends only on the multiset of |sums|.
    """
    key = tuple(sorted((abs(Fraction(c)) for c in sums if c != 0), reverse=True))
    return _grid_dual_max_key(key, D, q)


def materialize_family(
    p: float, n: int, levels: int = 2, max_n: int = 3
) -> list[tuple[Fraction, ...]]:
    """Explicit listing of the grid family on [1, n] for a p-norm interval base.

    Members are the piecewise-constant coefficient tuples over consecutive
    systems of [1, n] whose level vectors lie on the (Z/D)-grid inside the
    conjugate-exponent unit ball.  The family is symmetric, contains the unit
    coordinate functionals, is closed under interval projections and under
    coordinate deletion with shift, and the families are nested in n.  Sizes
    grow quickly, hence the cap; evaluation never materializes.
    """
    if n > max_n:
        raise ValueError(f"explicit materialization capped at n={max_n}")
    q = _grid_conjugate(JamesifiedNorm(LpNorm(p)))
    D = _grid_denominator(n, levels)

    def level_vectors(m: int) -> Iterable[tuple[Fraction, ...]]:
        def rec(j: int, acc: list[Fraction]) -> Iterable[tuple[Fraction, ...]]:
            if j == m:
                yield tuple(acc)
                return
            for u in range(-D, D + 1):
                acc.append(Fraction(u, D))
                if _q_norm_ok(acc, q):
                    yield from rec(j + 1, acc)
                acc.pop()

        yield from rec(0, [])

    members: set[tuple[Fraction, ...]] = set()
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            for cuts in _cut_patterns(a, b):
                bounds = [a] + [c + 1 for c in cuts] + [b + 1]
                parts = list(zip(bounds, bounds[1:]))
                for w in level_vectors(len(parts)):
                    coeffs = [Fraction(0)] * n
                    for (lo, hi), level in zip(parts, w):
                        for k in range(lo, hi):
                            coeffs[k - 1] = level
                    members.add(tuple(coeffs))
    return sorted(members)


def _q_norm_ok(w: Sequence[Fraction], q: float) -> bool:
    if q == INF:
        return all(abs(c) <= 1 for c in w)
    if q == 1:
        return sum(abs(c) for c in w) <= 1
    if q == 2:
        return sum(c * c for c in w) <= 1
    return sum(abs(float(c)) ** q for c in w) <= 1.0 + 1e-12


def _cut_patterns(a: int, b: int) -> Iterable[tuple[int, ...]]:
    positions = list(range(a, b))
    for r in range(len(positions) + 1):
        yield from itertools.combinations(positions, r)


def save_family(
    path: str | Path,
    z_name: str,
    n: int,
    levels: int,
    family: Sequence[tuple[Fraction, ...]],
) -> None:
    """Cache a materialized family keyed by (base expression, n, density levels)."""
    doc = {
        "z": z_name,
        "n": n,
        "levels": levels,
        "functionals": [
            [str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
             for c in row]
            for row in family
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=0) + "\n")


def load_family(path: str | Path) -> tuple[str, int, int, list[tuple[Fraction, ...]]]:
    doc = json.loads(Path(path).read_text())
    for field in ("z", "n", "levels", "functionals"):
        if field not in doc:
            raise ValueError(f"family cache missing field {field!r}")
    fam = [tuple(Fraction(c) for c in row) for row in doc["functionals"]]
    return doc["z"], int(doc["n"]), int(doc["levels"]), fam


# -- oracles ---------------------------------------------------------------------


class _CachedPairsNorm(NormOracle):
    def __init__(self):
        self._cache = functools.lru_cache(maxsize=65536)(self._eval_support)

    def _eval_support(self, support: Pairs) -> Number:
        raise NotImplementedError

    def _eval_pairs(self, pairs: Pairs) -> Number:
        return self._cache(_support_pairs(pairs))


class SchreierConditionalNorm(_CachedPairsNorm):
    """Admissible-cut norm over a bimonotone equal-signs-additive base.

    Bimonotone but *not* spreading: the admissibility constraint ties the
    number of blocks to the first index.  The summing functional has norm one
    (the single full interval is an admissible system), and summing-zero
    blocks are suppression unconditional.
    """

    def __init__(self, z_norm: NormOracle, mode: str = "ideal",
                 grid_levels: int = 2, cfg: Config = DEFAULT):
        super().__init__()
        z_norm.flags.require("bimonotone", "esa")
        if mode not in ("ideal", "grid"):
            raise ValueError(f"mode must be 'ideal' or 'grid', got {mode!r}")
        if mode == "grid":
            _grid_conjugate(z_norm)  # raises if unsupported
        self.z_norm = z_norm
        self.mode = mode
        self.grid_levels = grid_levels
        self.cfg = cfg
        suffix = ", grid" if mode == "grid" else ""
        self.name = f"schreier_c({z_norm.name}{suffix})"
        self.flags = NormFlags(bimonotone=True)
        self.summing_bound = 1.0
        self.szb_suppression = True

    def _eval_support(self, support: Pairs) -> Number:
        return _schreier_c_support(
            self.z_norm, support, self.mode, self.grid_levels, self.cfg
        )


class SchreierUnconditionalNorm(_CachedPairsNorm):
    """Admissible-subtuple norm over a suppression-unconditional subsymmetric
    base; suppression unconditional but not spreading, and its summing
    functional is unbounded."""

    def __init__(self, u_norm: NormOracle, cfg: Config = DEFAULT):
        super().__init__()
        u_norm.flags.require("unconditional_1", "spreading_1",
                             "suppression_unconditional")
        self.u_norm = u_norm
        self.cfg = cfg
        self.name = f"schreier_u({u_norm.name})"
        self.flags = NormFlags(
            unconditional_1=True,
            bimonotone=True,
            suppression_unconditional=True,
        )
        self.summing_bound = None
        self.szb_suppression = True

    def _eval_support(self, support: Pairs) -> Number:
        return _schreier_u_support(self.u_norm, support, self.cfg)


class CombinedBaseNorm(NormOracle):
    """Diagonal of the unconditional and conditional admissible-cut norms.

    Bimonotone, with summing functional of norm one and suppression
    unconditional summing-zero blocks: a valid base for the saturation
    construction.
    """

    def __init__(self, u_norm: NormOracle, z_norm: NormOracle, cfg: Config = DEFAULT):
        self.u_side = SchreierUnconditionalNorm(u_norm, cfg)
        self.z_side = SchreierConditionalNorm(z_norm, "ideal", cfg=cfg)
        self.cfg = cfg
        self.name = f"combined({u_norm.name}, {z_norm.name})"
        self.flags = NormFlags(bimonotone=True)
        self.summing_bound = 1.0
        self.szb_suppression = True

    def _eval_pairs(self, pairs: Pairs) -> Number:
        return max(self.u_side._eval_pairs(pairs), self.z_side._eval_pairs(pairs))
