"""Jamesification of a base norm over interval systems.

Given a norm with a subsymmetric unit vector basis, the *interval-system*
norm of a vector is the largest base-norm value of the tuple of its interval
sums, where the intervals range over

* ``consecutive`` mode: consecutive tilings of any sub-interval of the
  support range (no gaps between intervals), or
* ``gaps`` mode: arbitrary disjoint increasing interval systems.

The classical quadratic case (sup over interval systems of the Euclidean norm
of the interval sums) is ``JamesifiedNorm(LpNorm(2))``.  Both modes produce a
1-spreading bimonotone norm; in consecutive mode the norm is additionally
equal signs additive, and when the base norm is suppression unconditional the
two modes agree.

Evaluation is by exhaustive enumeration of interval systems (exact whenever
the base norm has an exact path), with an O(n^2) dynamic program as a fast
path for p-norm bases.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT, Config
from .oracles import INF, ConfigurationError, LpNorm, NormFlags, NormOracle, Number
from .vectors import ConvexBlockSeq, FinVec

Mode = str  # "consecutive" | "gaps"

_MODES = ("consecutive", "gaps")


def _check_mode(mode: Mode) -> None:
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")


def _prefix_sums(t: Sequence[Number]) -> list[Number]:
    sums: list[Number] = [0]
    for c in t:
        sums.append(sums[-1] + c)
    return sums


def _normalize_tuple(t: Sequence[Number]) -> tuple[Number, ...]:
    # Integer coefficients run much faster than Fractions in the inner loops.
    out = []
    for c in t:
        if isinstance(c, Fraction) and c.denominator == 1:
            out.append(int(c))
        else:
            out.append(c)
    return tuple(out)


# -- exhaustive enumeration ----------------------------------------------------


def _enum_generic(t: Sequence[Number], inner: NormOracle, mode: Mode) -> Number:
    """Max of ``inner`` over the interval-sum tuples of every admissible system."""
    n = len(t)
    sums = _prefix_sums(t)
    best: Number = 0
    acc: list[Number] = []

    if mode == "consecutive":
        def rec(start: int) -> None:
            nonlocal best
            for end in range(start, n + 1):
                acc.append(sums[end] - sums[start - 1])
                v = inner._eval_tuple(tuple(acc))
                if v > best:
                    best = v
                if end < n:
                    rec(end + 1)
                acc.pop()

        for a in range(1, n + 1):
            rec(a)
    else:
        def rec(start: int) -> None:
            nonlocal best
            for s0 in range(start, n + 1):
                for end in range(s0, n + 1):
                    acc.append(sums[end] - sums[s0 - 1])
                    v = inner._eval_tuple(tuple(acc))
                    if v > best:
                        best = v
                    if end < n:
                        rec(end + 1)
                    acc.pop()

        rec(1)
    return best


def _enum_lp(t: Sequence[Number], p: float, mode: Mode) -> Number:
    """Same enumeration with the p-norm aggregate carried incrementally."""
    n = len(t)
    sums = _prefix_sums(t)
    best: Number = 0

    if p == 1:
        def combine(agg, s):
            return agg + abs(s)
    elif p == 2:
        def combine(agg, s):
            return agg + s * s
    elif p == INF:
        def combine(agg, s):
            return max(agg, abs(s))
    else:
        def combine(agg, s):
            return agg + abs(float(s)) ** p

    if mode == "consecutive":
        def rec(start: int, agg: Number) -> None:
            nonlocal best
            for end in range(start, n + 1):
                a2 = combine(agg, sums[end] - sums[start - 1])
                if a2 > best:
                    best = a2
                if end < n:
                    rec(end + 1, a2)

        for a in range(1, n + 1):
            rec(a, 0)
    else:
        def rec(start: int, agg: Number) -> None:
            nonlocal best
            for s0 in range(start, n + 1):
                for end in range(s0, n + 1):
                    a2 = combine(agg, sums[end] - sums[s0 - 1])
                    if a2 > best:
                        best = a2
                    if end < n:
                        rec(end + 1, a2)

        rec(1, 0)

    if p == 2:
        return math.sqrt(float(best))
    if p in (1, INF):
        return best
    return float(best) ** (1.0 / p)


def jamesify_eval(
    inner: NormOracle,
    x: FinVec | Sequence[Number],
    mode: Mode = "consecutive",
    cfg: Config = DEFAULT,
) -> Number:
    """Exhaustive interval-system norm of ``x`` under the base norm ``inner``.

    Exact (a Fraction) whenever the base norm evaluates tuples exactly.  The
    support is compacted first, which is valid because the base norm is
    required to be 1-spreading.
    """
    inner.flags.require("spreading_1")
    _check_mode(mode)
    t = _normalize_tuple(x.compact() if isinstance(x, FinVec) else tuple(x))
    if not t:
        return 0
    if len(t) > cfg.jamesify_cap:
        raise ValueError(
            f"support {len(t)} exceeds the enumeration cap {cfg.jamesify_cap}"
        )
    if isinstance(inner, LpNorm):
        return _enum_lp(t, inner.p, mode)
    return _enum_generic(t, inner, mode)


# -- dynamic-programming fast path for p-norm bases ------------------------------


def _dp_lp_python(t: Sequence[Number], p: float, mode: Mode) -> Number:
    """O(n^2) cut-position DP; generic over the coefficient type."""
    n = len(t)
    sums = _prefix_sums(t)

    if p == INF:
        # Max over systems of the largest |interval sum| collapses to single
        # intervals, i.e. the summing norm, in both modes.
        best: Number = 0
        lo: Number = 0
        hi: Number = 0
        for s in sums[1:]:
            if s > hi:
                hi = s
            if s < lo:
                lo = s
            v = max(hi - s, s - lo)
            if v > best:
                best = v
        return best

    if p == 1:
        def w(s):
            return abs(s)
    elif p == 2:
        def w(s):
            return s * s
    else:
        def w(s):
            return abs(float(s)) ** p

    if mode == "consecutive":
        # f[b]: best over systems tiling some [a, b] that end exactly at b.
        f: list[Number] = [0] * (n + 1)
        best = 0
        for b in range(1, n + 1):
            sb = sums[b]
            fb = max(f[j] + w(sb - sums[j]) for j in range(b))
            f[b] = fb
            if fb > best:
                best = fb
    else:
        # g[b]: best over systems confined to [1, b]; position b may be unused.
        g: list[Number] = [0] * (n + 1)
        for b in range(1, n + 1):
            sb = sums[b]
            gb = g[b - 1]
            for j in range(b):
                c = g[j] + w(sb - sums[j])
                if c > gb:
                    gb = c
            g[b] = gb
        best = g[n]

    if p == 2:
        return math.sqrt(float(best))
    if p == 1:
        return best
    return float(best) ** (1.0 / p)


def _dp_lp_numpy(t: Sequence[float], p: float, mode: Mode) -> float:
    n = len(t)
    sums = np.empty(n + 1)
    sums[0] = 0.0
    np.cumsum(np.asarray(t, dtype=float), out=sums[1:])

    if p == INF:
        run_max = np.maximum.accumulate(sums)
        run_min = np.minimum.accumulate(sums)
        return float(np.max(np.maximum(run_max - sums, sums - run_min)))

    f = np.zeros(n + 1)
    best = 0.0
    for b in range(1, n + 1):
        seg = np.abs(sums[b] - sums[:b])
        if p == 1:
            cand = f[:b] + seg
        elif p == 2:
            cand = f[:b] + seg * seg
        else:
            cand = f[:b] + seg**p
        fb = float(cand.max())
        if mode == "gaps":
            fb = max(fb, float(f[b - 1]))
        f[b] = fb
        if fb > best:
            best = fb
    best = float(f[n]) if mode == "gaps" else best
    if p == 2:
        return math.sqrt(best)
    if p == 1:
        return best
    return best ** (1.0 / p)


_NUMPY_CUTOVER = 48


def james_dp_lp(
    p: float,
    x: FinVec | Sequence[Number],
    mode: Mode = "consecutive",
    exact: bool | None = None,
) -> Number:
    """Interval-system norm with p-norm base, by dynamic programming.

    Agrees with ``jamesify_eval(LpNorm(p), x, mode)`` for every input; runs in
    O(n^2).  With ``exact=True`` the DP is carried out in rational arithmetic
    (the p = 2 result is the correctly rounded square root of an exact value).
    """
    if p != INF and p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    _check_mode(mode)
    t = _normalize_tuple(x.compact() if isinstance(x, FinVec) else tuple(x))
    if not t:
        return 0
    if exact is None:
        exact = p in (1, INF) and len(t) <= 128 and all(
            isinstance(c, (int, Fraction)) for c in t
        )
    if exact:
        if p not in (1, 2, INF):
            raise ValueError(f"no exact path for p={p}")
        if not all(isinstance(c, (int, Fraction)) for c in t):
            raise ValueError("exact evaluation needs rational coefficients")
        return _dp_lp_python(t, p, mode)
    if len(t) >= _NUMPY_CUTOVER:
        return _dp_lp_numpy([float(c) for c in t], p, mode)
    return _dp_lp_python(t, p, mode)


# -- the norm oracle -------------------------------------------------------------


class JamesifiedNorm(NormOracle):
    """Interval-system norm as a reusable oracle.

    The base norm must be 1-spreading (so that the result is 1-spreading);
    composing over a 1-unconditional base is the standard use.  The result is
    bimonotone, and equal signs additive in consecutive mode (always) and in
    gaps mode when the base is suppression unconditional.  Tuple values are
    memoized; the cache is only ever extended, so sharing across threads is
    safe.
    """

    def __init__(self, inner: NormOracle, mode: Mode = "consecutive",
                 cfg: Config = DEFAULT):
        _check_mode(mode)
        inner.flags.require("spreading_1")
        self.inner = inner
        self.mode = mode
        self.cfg = cfg
        prefix = "cjames" if mode == "consecutive" else "james"
        self.name = f"{prefix}({inner.name})"
        self.flags = NormFlags(
            unconditional_1=False,
            spreading_1=True,
            bimonotone=True,
            esa=(mode == "consecutive") or inner.flags.suppression_unconditional,
            suppression_unconditional=False,
        )
        # The single-interval system shows |s(x)| <= value; blocks with zero
        # coefficient sums are suppression unconditional under any 1-spreading
        # conditional norm.
        self.summing_bound = 1.0
        self.szb_suppression = True
        self._cache = functools.lru_cache(maxsize=65536)(self._eval_tuple_impl)

    def _eval_tuple_impl(self, t: tuple[Number, ...]) -> Number:
        if not t:
            return 0
        if isinstance(self.inner, LpNorm):
            if all(isinstance(c, float) for c in t) and len(t) >= _NUMPY_CUTOVER:
                return _dp_lp_numpy(t, self.inner.p, self.mode)
            return _dp_lp_python(t, self.inner.p, self.mode)
        return _enum_generic(t, self.inner, self.mode)

    def _eval_tuple(self, t: tuple[Number, ...]) -> Number:
        if not isinstance(self.inner, LpNorm) and len(t) > self.cfg.jamesify_cap:
            raise ValueError(
                f"support {len(t)} exceeds the enumeration cap {self.cfg.jamesify_cap}"
            )
        return self._cache(_normalize_tuple(t))


def cjames(inner: NormOracle, cfg: Config = DEFAULT) -> JamesifiedNorm:
    return JamesifiedNorm(inner, "consecutive", cfg)


def james(inner: NormOracle, cfg: Config = DEFAULT) -> JamesifiedNorm:
    return JamesifiedNorm(inner, "gaps", cfg)


def james_space(cfg: Config = DEFAULT) -> JamesifiedNorm:
    """The quadratic interval-system norm (consecutive and gaps modes agree)."""
    return JamesifiedNorm(LpNorm(2), "consecutive", cfg)


# -- structural checks -------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    lhs: float
    rhs: float
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def _values(norm: NormOracle, t: Sequence[Number]) -> Number:
    return norm._dispatch(tuple((i + 1, c) for i, c in enumerate(t) if c != 0))


def esa_check(
    norm: NormOracle,
    a: Sequence[Number],
    k: int,
    tol: float = 1e-9,
) -> CheckResult:
    """Check that merging ``a_k`` and ``a_{k+1}`` into one coefficient preserves
    the norm (requires ``a_k * a_{k+1} >= 0``) or, with mixed signs, does not
    increase it.

    ``k`` is 1-based.  Returns the violating pair of values on failure.
    """
    a = tuple(a)
    if not 1 <= k < len(a):
        raise IndexError(f"k={k} out of range for a tuple of length {len(a)}")
    merged = a[: k - 1] + (a[k - 1] + a[k],) + a[k + 1 :]
    v_merged = _values(norm, merged)
    v_orig = _values(norm, a)
    same_sign = a[k - 1] * a[k] >= 0
    if same_sign:
        ok = abs(v_merged - v_orig) <= tol
        kind = "identity"
    else:
        ok = v_merged <= v_orig + tol
        kind = "subadditivity"
    detail = "" if ok else (
        f"{kind} violated at k={k}: merged {float(v_merged)!r} vs {float(v_orig)!r} for a={a}"
    )
    return CheckResult(ok, float(v_merged), float(v_orig), detail)


def cbh_check(
    norm: NormOracle,
    a: Sequence[Number],
    blocks: ConvexBlockSeq,
    tol: float = 1e-9,
) -> CheckResult:
    """Check that convex blocks of the basis reproduce the norm of the
    coefficient tuple, the isometric form of convex block homogeneity.

    Meaningful as a guarantee only for equal-signs-additive norms; running it
    against other norms exhibits counterexamples.
    """
    a = tuple(a)
    if len(blocks) < len(a):
        raise ValueError(f"need at least {len(a)} blocks, got {len(blocks)}")
    vec = blocks.combine(a)
    lhs = norm._dispatch(vec.coords)
    rhs = _values(norm, a)
    ok = abs(lhs - rhs) <= tol
    detail = "" if ok else f"block combination {float(lhs)!r} vs tuple {float(rhs)!r}"
    return CheckResult(ok, float(lhs), float(rhs), detail)


def cjames_idempotence_check(
    inner: NormOracle,
    x: FinVec,
    tol: float = 1e-9,
    cfg: Config = DEFAULT,
) -> CheckResult:
    """Check that applying the consecutive-mode construction twice gives the
    same value as applying it once."""
    once = JamesifiedNorm(inner, "consecutive", cfg)
    twice = JamesifiedNorm(once, "consecutive", cfg)
    v1 = once._dispatch(x.coords)
    v2 = twice._dispatch(x.coords)
    ok = abs(v2 - v1) <= tol
    detail = "" if ok else f"iterated {float(v2)!r} vs single {float(v1)!r} at x={x}"
    return CheckResult(ok, float(v2), float(v1), detail)
