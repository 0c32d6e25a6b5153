"""Saturated norms: the supremum over an implicitly defined norming set built
from a base norm by alternating averaging and weighting.

The norming set is the union of levels.  Level zero holds the coefficient
patterns of the base dual ball.  Each later level adds

* *averages*: ``(1/s)(f_1 + ... + f_k)`` with ``k <= s`` and the ``f_q``
  successive members of the previous level (the average's *size* is ``s``),
* *weighted functionals*: ``(1/m_j)(a_1 + ... + a_d)`` with ``d <= n_j`` and
  the ``a_q`` successive averages whose sizes grow very fast: each size must
  exceed both the previous size and ``2^(previous max support)``.

The weight and count sequences satisfy ``m_1 >= 2``, ``n_1 >= 4``,
``m_j < n_j < m_{j+1}`` and ``sum_j m_j / n_j < 1``.

Evaluation returns a certified bracket ``[value, value + eps]`` around the
true supremum:

* a per-level dynamic program over support windows computes the exact
  supremum over each level (sizes inside a weighted functional can be taken
  minimal, which makes the very-fast-growing constraint memoryless: the next
  average's size is exactly ``2^(end of previous average) + 1`` unless its
  own child count is larger);
* once the level values stabilize, a dominance pass certifies an upper bound:
  if inflating every window value by ``c`` cannot be improved upon by one
  more construction level, no functional of any depth exceeds ``value + c``.

Weights beyond the participation horizon contribute at most ``l1(x)/m_j``
and are absorbed into ``eps``, as is the float slack of the dominance pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .config import DEFAULT, Config
from .oracles import ConfigurationError, NormFlags, NormOracle, Number
from .vectors import FinVec, Interval


class NonConvergenceError(RuntimeError):
    """Raised when no certified bracket of the requested width was reached;
    carries the best bracket found."""

    def __init__(self, message: str, lower: float, upper: float):
        super().__init__(f"{message} (best bracket [{lower}, {upper}])")
        self.lower = lower
        self.upper = upper


# -- parameters -------------------------------------------------------------------


@dataclass(frozen=True)
class SaturationParams:
    """Weight denominators ``m_j`` and admissible counts ``n_j``.

    ``ratio_tail_bound`` is an exact upper bound for the sum of ``m_j/n_j``
    over *all* j, including the levels beyond the materialized ones.
    """

    weights: tuple[int, ...]
    counts: tuple[int, ...]
    ratio_tail_bound: Fraction

    def __post_init__(self):
        if not self.weights or len(self.weights) != len(self.counts):
            raise ValueError("need matching, nonempty weight and count sequences")
        if self.weights[0] < 2:
            raise ValueError("first weight must be >= 2")
        if self.counts[0] < 4:
            raise ValueError("first count must be >= 4")
        for j in range(len(self.weights)):
            if not self.weights[j] < self.counts[j]:
                raise ValueError(f"need weight < count at level {j + 1}")
            if j + 1 < len(self.weights) and not self.counts[j] < self.weights[j + 1]:
                raise ValueError(f"need count {j + 1} < weight {j + 2}")
        if self.ratio_tail_bound >= 1:
            raise ValueError("sum of weight/count ratios must stay below 1")

    @property
    def levels(self) -> int:
        return len(self.weights)


def default_params(levels: int = 8) -> SaturationParams:
    """The doubling-exponent generator ``m_j = 2^(j^2)``, ``n_j = 2^(j^2+j+1)``.

    Each ratio is exactly ``2^(-j-1)``, so the full series sums to 1/2; the
    materialized prefix plus the exact geometric tail witnesses the bound
    symbolically rather than numerically.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    weights = []
    counts = []
    total = Fraction(0)
    for j in range(1, levels + 1):
        m = 1 << (j * j)
        n = 1 << (j * j + j + 1)
        assert Fraction(m, n) == Fraction(1, 1 << (j + 1))
        total += Fraction(m, n)
        weights.append(m)
        counts.append(n)
    tail = Fraction(1, 1 << (levels + 1))  # geometric remainder, exact
    assert total + tail == Fraction(1, 2)
    return SaturationParams(tuple(weights), tuple(counts), total + tail)


# -- explicit norming-set members ---------------------------------------------------


@dataclass(frozen=True)
class BaseLeaf:
    """Level-zero member: either an explicit coefficient pattern (caller
    certifies it lies in the base dual ball) or the abstract norming
    functional of the base on an interval, which evaluates any vector to the
    base norm of its restriction."""

    coeffs: tuple[tuple[int, Fraction], ...] | None
    interval: tuple[int, int]
    oracle: NormOracle | None = field(default=None, compare=False)

    kind = "base"

    def __post_init__(self):
        if self.coeffs is None and self.oracle is None:
            raise ValueError("a base leaf needs coefficients or a base oracle")

    @property
    def size(self) -> int:
        return 1

    @property
    def span(self) -> tuple[int, int]:
        return self.interval

    def eval(self, x: FinVec) -> Number:
        if self.coeffs is not None:
            return sum((c * x[i] for i, c in self.coeffs), Fraction(0))
        lo, hi = self.interval
        return self.oracle.best_value(x.restrict(Interval(lo, hi)))

    def to_dict(self) -> dict:
        d = {"kind": "base", "span": list(self.interval)}
        if self.coeffs is not None:
            d["coeffs"] = [
                [i, str(c.numerator) if c.denominator == 1 else f"{c}"]
                for i, c in self.coeffs
            ]
        return d


@dataclass(frozen=True)
class AlphaNode:
    """An average ``(1/size)(children)`` of successive lower-level members."""

    children: tuple
    size_: int

    kind = "alpha"

    def __post_init__(self):
        if not self.children:
            raise ValueError("an average needs at least one child")
        if len(self.children) > self.size_:
            raise ValueError("average size must be at least the child count")
        _check_successive(self.children)

    @property
    def size(self) -> int:
        return self.size_

    @property
    def span(self) -> tuple[int, int]:
        return (self.children[0].span[0], self.children[-1].span[1])

    def eval(self, x: FinVec) -> Number:
        total = sum((child.eval(x) for child in self.children), Fraction(0))
        return total / self.size_

    def to_dict(self) -> dict:
        return {
            "kind": "alpha",
            "size": self.size_,
            "span": list(self.span),
            "children": [c.to_dict() for c in self.children],
        }


@dataclass(frozen=True)
class WeightedNode:
    """``(1/m_j)(alpha_1 + ... + alpha_d)`` over a very fast growing sequence
    of averages; ``weight_index`` is the 1-based j."""

    children: tuple
    weight_index: int
    params: SaturationParams = field(compare=False)

    kind = "weighted"

    def __post_init__(self):
        j = self.weight_index
        if not 1 <= j <= self.params.levels:
            raise ValueError(f"weight index {j} outside the parameter range")
        if not self.children:
            raise ValueError("a weighted functional needs at least one average")
        if len(self.children) > self.params.counts[j - 1]:
            raise ValueError("too many averages for this weight")
        for c in self.children:
            if not isinstance(c, AlphaNode):
                raise ValueError("weighted children must be averages")
        _check_successive(self.children)
        for a, b in zip(self.children, self.children[1:]):
            if not b.size > max(a.size, 2 ** a.span[1]):
                raise ValueError(
                    "average sizes must grow very fast: "
                    f"{b.size} <= max({a.size}, 2^{a.span[1]})"
                )

    @property
    def size(self) -> int:
        return 1

    @property
    def span(self) -> tuple[int, int]:
        return (self.children[0].span[0], self.children[-1].span[1])

    def eval(self, x: FinVec) -> Number:
        total = sum((child.eval(x) for child in self.children), Fraction(0))
        return total / self.params.weights[self.weight_index - 1]

    def to_dict(self) -> dict:
        return {
            "kind": "weighted",
            "weight": self.weight_index,
            "span": list(self.span),
            "children": [c.to_dict() for c in self.children],
        }


NormingTree = BaseLeaf | AlphaNode | WeightedNode


def _check_successive(children: Sequence) -> None:
    for a, b in zip(children, children[1:]):
        if not a.span[1] < b.span[0]:
            raise ValueError(f"children must be successive: {a.span} then {b.span}")


def tree_to_json(tree: NormingTree) -> str:
    return json.dumps(tree.to_dict(), indent=2)


def save_witness(path: str | Path, tree: NormingTree) -> None:
    Path(path).write_text(tree_to_json(tree) + "\n")


# -- the saturated norm -------------------------------------------------------------


@dataclass(frozen=True)
class SaturatedValue:
    value: float
    eps: float
    levels_used: int

    @property
    def upper(self) -> float:
        return self.value + self.eps

    def __iter__(self):
        return iter((self.value, self.eps))


class SaturatedNorm(NormOracle):
    """Supremum over the full norming set, evaluated to a certified bracket.

    The base must be bimonotone with a bounded summing functional and
    suppression-unconditional summing-zero blocks (the combined
    admissible-cut construction provides all three); these are taken from the
    base oracle's declared attributes, not re-proved.
    """

    def __init__(self, base: NormOracle, params: SaturationParams | None = None,
                 cfg: Config = DEFAULT):
        base.flags.require("bimonotone")
        if base.summing_bound is None:
            raise ConfigurationError("saturation base must have a bounded summing functional")
        if not base.szb_suppression:
            raise ConfigurationError(
                "saturation base must have suppression-unconditional summing-zero blocks"
            )
        self.base = base
        self.params = params or default_params()
        self.cfg = cfg
        self.name = f"saturate({base.name})"
        self.flags = NormFlags(bimonotone=True)
        self.summing_bound = base.summing_bound
        self.szb_suppression = False

    # Full evaluation with bracket.
    def evaluate(self, x: FinVec) -> SaturatedValue:
        return _saturated_dp(self, x)[0]

    def witness(self, x: FinVec) -> NormingTree | None:
        """A norming-set member achieving the reported value on ``x``."""
        return _saturated_dp(self, x, want_witness=True)[1]

    def _eval_pairs(self, pairs) -> Number:
        vec = FinVec.make((i, c) for i, c in pairs) if not isinstance(pairs, FinVec) else pairs
        return self.evaluate(vec).value


def saturated_eval(S: SaturatedNorm, x: FinVec) -> SaturatedValue:
    """Value and certified error bound: the true norm lies in [value, value+eps]."""
    return S.evaluate(x)


# -- evaluation internals -----------------------------------------------------------


def _saturated_dp(S: SaturatedNorm, x: FinVec, want_witness: bool = False):
    cfg = S.cfg
    if x.max_support is not None and x.max_support > cfg.saturate_cap:
        raise ValueError(
            f"support reaches {x.max_support}, beyond the cap {cfg.saturate_cap}"
        )
    if not x:
        return SaturatedValue(0.0, 0.0, 0), None

    pts = list(x.support)
    s = len(pts)
    l1 = float(x.l1_norm())
    windows = [(i, j) for i in range(s) for j in range(i, s)]

    # level-0 values: base norm of each support window restriction
    base_vals = {}
    for i, j in windows:
        base_vals[(i, j)] = S.base.value(x.restrict(Interval(pts[i], pts[j])))

    # participating weights: later ones contribute below resolution
    tol = cfg.saturate_tol
    horizon = S.params.levels
    weight_tail = 0.0
    for t in range(1, S.params.levels + 1):
        if l1 / S.params.weights[t - 1] < tol / 8.0:
            horizon = t - 1
            weight_tail = 2.0 * l1 / S.params.weights[t - 1]
            break
    else:
        # all materialized weights participate; bound the unmaterialized tail
        weight_tail = 2.0 * l1 / (S.params.weights[-1] ** 2)

    levels_history = [dict(base_vals)]
    V = dict(base_vals)
    increment = math.inf
    for _level in range(cfg.saturate_level_cap):
        newV = _improve(V, pts, S.params, horizon)
        increment = max(newV[w] - V[w] for w in windows)
        levels_history.append(newV)
        V = newV
        if increment <= 0.0:
            break

    # dominance certification: find c with F(V + c) <= V + c (+ float slack)
    slack = 1e-12 * (1.0 + max(V.values()))
    eps = None
    for c in (max(4.0 * increment, tol / 16.0), tol / 8.0, tol / 4.0, tol / 2.0, tol):
        if c <= 0.0 or not math.isfinite(c):
            continue
        inflated = {w: V[w] + c for w in windows}
        improved = _improve(inflated, pts, S.params, horizon)
        if all(improved[w] <= V[w] + c + slack for w in windows):
            eps = c + weight_tail + 2.0 * slack
            break
    full = (0, s - 1)
    if eps is None:
        raise NonConvergenceError(
            f"no certified bracket within {cfg.saturate_level_cap} levels",
            V[full],
            l1,
        )

    result = SaturatedValue(V[full], eps, len(levels_history) - 1)
    witness = _build_witness(S, x, pts, levels_history, horizon) if want_witness else None
    return result, witness


def _best_sums(V: dict, s: int) -> dict:
    """B[(i, j)][r]: best sum of V over at most r disjoint successive
    sub-windows of (i..j); index 0 unused."""
    B = {}
    for jj in range(s):
        # H[pos][r] for the fixed right end jj
        H = [[0.0] * (s + 1) for _ in range(jj + 2)]
        for pos in range(jj, -1, -1):
            row = H[pos]
            nxt = H[pos + 1]
            for r in range(1, s + 1):
                best = nxt[r]
                for e in range(pos, jj + 1):
                    cand = V[(pos, e)] + (H[e + 1][r - 1] if r > 1 else 0.0)
                    if cand > best:
                        best = cand
                row[r] = best
        for i in range(jj + 1):
            B[(i, jj)] = [0.0] + [H[i][r] for r in range(1, s + 1)]
    return B


def _chunk_value(B_win: list, width: int, low: int) -> float:
    """Best single-average value on a chunk: max over child count r of
    (best r-part sum) / max(low, r), ``low`` being the forced minimum size.

    Minimal sizes are optimal: a larger size only shrinks the average, and
    the forced minimum for the *next* average depends on this chunk's end
    position alone (the end position e gives 2^e, which dominates both the
    child count and any forced minimum carried into this chunk, so the very
    fast growing constraint is memoryless under minimal sizing).
    """
    best = 0.0
    for r in range(1, width + 1):
        v = B_win[r] / (low if low > r else r)
        if v > best:
            best = v
    return best


def _improve(V: dict, pts: Sequence[int], params: SaturationParams,
             horizon: int) -> dict:
    """One construction level: keep V, add weighted functionals built from it."""
    s = len(pts)
    B = _best_sums(V, s)
    maxd = s

    # cv[low_pos][(start, e)]: best average value of the chunk (start..e) when
    # the previous average ended at support index low_pos - 1 (low_pos == 0
    # marks the first chunk, whose size is unconstrained).
    cv = []
    for low_pos in range(s + 1):
        low = 1 if low_pos == 0 else (1 << pts[low_pos - 1]) + 1
        table = {}
        for start in range(s):
            for e in range(start, s):
                table[(start, e)] = _chunk_value(B[(start, e)], e - start + 1, low)
        cv.append(table)

    # REST[jj][pos][d]: best sum of at most d further averages confined to
    # support positions pos..jj, the previous average having ended at pos-1.
    REST = []
    for jj in range(s):
        table = [[0.0] * (maxd + 1) for _ in range(jj + 3)]
        for pos in range(jj, 0, -1):
            cvp = cv[pos]
            for d in range(1, maxd + 1):
                best = 0.0
                for start in range(pos, jj + 1):
                    for e in range(start, jj + 1):
                        cand = cvp[(start, e)]
                        if d > 1 and e + 1 <= jj:
                            cand += table[e + 1][d - 1]
                        if cand > best:
                            best = cand
                table[pos][d] = best
        REST.append(table)

    out = {}
    cv0 = cv[0]
    for (i, j) in ((i, j) for j in range(s) for i in range(j + 1)):
        rest_j = REST[j]
        # P[d]: best chunk-sequence sum with at most d averages inside (i..j)
        P = [0.0] * (maxd + 1)
        for d in range(1, maxd + 1):
            best = P[d - 1]
            for start in range(i, j + 1):
                for e in range(start, j + 1):
                    cand = cv0[(start, e)]
                    if d > 1 and e + 1 <= j:
                        cand += rest_j[e + 1][d - 1]
                    if cand > best:
                        best = cand
            P[d] = best
        val = V[(i, j)]
        for t in range(1, horizon + 1):
            cand = P[min(params.counts[t - 1], maxd)] / params.weights[t - 1]
            if cand > val:
                val = cand
        out[(i, j)] = val
    return out


def _build_witness(S: SaturatedNorm, x: FinVec, pts: Sequence[int],
                   history: list[dict], horizon: int):
    """Reconstruct a norming-set member achieving the final window values.

    Walks the level tables downward: a window value either survives from the
    previous level (recurse there), equals the base value (a base leaf), or
    was produced by a weighted functional, whose chunk sequence is recovered
    by re-deriving the argmax of the level transition.
    """
    s = len(pts)
    tol = 1e-9

    def leaf(win) -> BaseLeaf:
        i, j = win
        return BaseLeaf(None, (pts[i], pts[j]), S.base)

    def best_sum_trees(win, r: int, level: int) -> tuple[float, list]:
        """Best <= r disjoint successive sub-windows of win at `level`,
        together with their witness trees."""
        V = history[level]
        i, j = win

        def rec(pos: int, left: int) -> tuple[float, list]:
            if pos > j or left == 0:
                return 0.0, []
            best, picks = rec(pos + 1, left)  # skip support point pos
            for e in range(pos, j + 1):
                tail_v, tail_p = rec(e + 1, left - 1)
                cand = V[(pos, e)] + tail_v
                if cand > best + 1e-15:
                    best, picks = cand, [(pos, e)] + tail_p
            return best, picks

        value, picks = rec(i, r)
        return value, [build(w, level) for w in picks]

    def weighted_witness(win, level: int):
        """Find a weighted functional over level-(level-1) members matching
        history[level][win]."""
        i, j = win
        target = history[level][win]
        prev = history[level - 1]
        B = _best_sums(prev, s)

        def chunk_options(start, e, low):
            width = e - start + 1
            out = []
            for r in range(1, width + 1):
                out.append((B[(start, e)][r] / max(low, r), r, max(low, r)))
            return out

        def rec(pos: int, low_pos: int, d_left: int) -> tuple[float, list]:
            # best continuation and its chunk list [(start, e, r, size)]
            if pos > j or d_left == 0:
                return 0.0, []
            low = 1 if low_pos == 0 else (1 << pts[low_pos - 1]) + 1
            best, picks = 0.0, []
            for start in range(pos, j + 1):
                for e in range(start, j + 1):
                    for v, r, size in chunk_options(start, e, low):
                        tail_v, tail_p = rec(e + 1, e + 1, d_left - 1)
                        cand = v + tail_v
                        if cand > best + 1e-15:
                            best, picks = cand, [(start, e, r, size)] + tail_p
            return best, picks

        for t in range(1, horizon + 1):
            d_cap = min(S.params.counts[t - 1], s)
            value, picks = rec(i, 0, d_cap)
            if abs(value / S.params.weights[t - 1] - target) <= tol and picks:
                alphas = []
                for (start, e, r, size) in picks:
                    _, trees = best_sum_trees((start, e), r, level - 1)
                    alphas.append(AlphaNode(tuple(trees), size))
                return WeightedNode(tuple(alphas), t, S.params)
        return None

    def build(win, level: int):
        if level == 0:
            return leaf(win)
        if history[level][win] <= history[level - 1][win] + 1e-15:
            return build(win, level - 1)
        node = weighted_witness(win, level)
        return node if node is not None else leaf(win)

    full = (0, s - 1)
    top = len(history) - 1
    tree = build(full, top)
    return tree


# -- checks ---------------------------------------------------------------------


@dataclass(frozen=True)
class SaturateCheck:
    passed: bool
    lhs: float
    rhs: float
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def alpha_bound_check(
    alpha: AlphaNode,
    xs: Sequence[FinVec],
    S: SaturatedNorm,
    tol: float = 1e-9,
) -> SaturateCheck:
    """Check the averaging estimate: an average of size s applied to the mean
    of k successive unit-ball blocks stays below 1/s + 2/k.

    Unit-ball membership of each block is verified through the evaluation
    bracket (value + eps <= 1).
    """
    if not xs:
        raise ValueError("need at least one block")
    prev_max = 0
    mean = FinVec.zero()
    k = len(xs)
    for b in xs:
        if not b:
            raise ValueError("blocks must be nonzero")
        if b.min_support <= prev_max:
            raise ValueError("blocks must be successive")
        prev_max = b.max_support
        bracket = S.evaluate(b)
        if bracket.upper > 1.0 + 1e-9:
            raise ValueError(f"block {b} is not certified inside the unit ball")
        mean = mean + b.scale(Fraction(1, k))
    lhs = abs(float(alpha.eval(mean)))
    rhs = 1.0 / alpha.size + 2.0 / k
    ok = lhs < rhs + tol
    detail = "" if ok else f"average value {lhs} vs bound {rhs}"
    return SaturateCheck(ok, lhs, rhs, detail)


def schreier_equality_check(
    S: SaturatedNorm,
    c: Sequence[Number],
    indices: Sequence[int],
    tol: float = 1e-6,
) -> SaturateCheck:
    """Check that admissibly placed tuples keep exactly their base-norm value:
    for n < i_1 < ... < i_n, the saturated and base norms agree on
    ``sum_k c_k e_{i_k}`` within tol plus the evaluation bracket."""
    c = tuple(c)
    indices = tuple(indices)
    if len(c) != len(indices):
        raise ValueError("need one coefficient per index")
    n = len(indices)
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValueError("indices must be strictly increasing")
    if n == 0:
        return SaturateCheck(True, 0.0, 0.0)
    if not n < indices[0]:
        raise ValueError(f"inadmissible placement: {n} parts need first index > {n}")
    x = FinVec.make(zip(indices, c))
    got = S.evaluate(x)
    want = S.base.value(x)
    ok = abs(got.value - want) <= tol + got.eps
    detail = "" if ok else f"saturated {got.value}+/-{got.eps} vs base {want}"
    return SaturateCheck(ok, got.value, want, detail)
