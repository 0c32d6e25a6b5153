"""Norm oracles: evaluatable norms on finitely supported vectors.

An oracle owns a float evaluation, an optional exact rational evaluation, and
a set of structural flags (1-unconditional, 1-spreading, bimonotone, equal
signs additive, suppression unconditional) that downstream constructions
check before composing.

Implementation note: each oracle implements a single numeric kernel that is
generic over the coefficient type.  Feeding it Fractions yields exact values
(when the norm has an exact path); feeding it floats yields the fast path
used inside search loops.  Norms flagged 1-spreading evaluate on the
compacted coefficient tuple, so their value is independent of gap positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .vectors import FinVec

Number = Union[int, Fraction, float]
Pairs = tuple[tuple[int, Number], ...]

INF = math.inf


class ConfigurationError(ValueError):
    """A construction was asked to compose oracles whose flags do not permit it."""


@dataclass(frozen=True)
class NormFlags:
    unconditional_1: bool = False
    spreading_1: bool = False
    bimonotone: bool = False
    esa: bool = False
    suppression_unconditional: bool = False

    def require(self, *names: str) -> None:
        missing = [n for n in names if not getattr(self, n)]
        if missing:
            raise ConfigurationError(f"oracle lacks required flags: {', '.join(missing)}")


class NormOracle:
    """Base class; subclasses implement ``_eval_tuple`` or ``_eval_pairs``.

    Attributes beyond the flag set:

    ``summing_bound``
        known constant C with |sum of coefficients| <= C * norm, or None.
    ``szb_suppression``
        True when successive blocks with zero coefficient sum are known to be
        suppression unconditional under this norm.
    """

    name: str = "norm"
    flags: NormFlags = NormFlags()
    summing_bound: float | None = None
    szb_suppression: bool = False

    # -- numeric kernel ------------------------------------------------------

    def _eval_tuple(self, t: tuple[Number, ...]) -> Number:
        raise NotImplementedError

    def _eval_pairs(self, pairs: Pairs) -> Number:
        # Default: position-independent evaluation (valid for 1-spreading norms).
        return self._eval_tuple(tuple(c for _, c in pairs if c != 0))

    def _dispatch(self, pairs: Pairs) -> Number:
        if self.flags.spreading_1:
            return self._eval_tuple(tuple(c for _, c in pairs if c != 0))
        return self._eval_pairs(pairs)

    # -- public API ------------------------------------------------------------

    def value(self, x: FinVec) -> float:
        """Float evaluation (the fast kernel); see ``exact_value`` for rationals."""
        return float(self._dispatch(tuple((i, float(c)) for i, c in x.coords)))

    def exact_value(self, x: FinVec) -> Fraction | None:
        v = self._dispatch(x.coords)
        return Fraction(v) if isinstance(v, (int, Fraction)) else None

    def best_value(self, x: FinVec) -> Number:
        """Exact value when the norm has an exact path, float otherwise."""
        return self._dispatch(x.coords)

    def tuple_value(self, t: Sequence[Number]) -> float:
        return float(
            self._dispatch(tuple((i + 1, float(c)) for i, c in enumerate(t) if c != 0))
        )

    def exact_tuple_value(self, t: Sequence[Number]) -> Fraction | None:
        v = self._dispatch(tuple((i + 1, c) for i, c in enumerate(t) if c != 0))
        return Fraction(v) if isinstance(v, (int, Fraction)) else None

    def float_value(self, pairs: Sequence[tuple[int, float]]) -> float:
        """Fast float path; ``pairs`` are (index, float coefficient)."""
        return float(self._dispatch(tuple((i, c) for i, c in pairs if c != 0.0)))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def _abs_pow_sum(t: tuple[Number, ...], p: float) -> Number:
    if p == 1:
        return sum((abs(c) for c in t), 0)
    if p == 2:
        return sum((c * c for c in t), 0)
    return sum((abs(float(c)) ** p for c in t), 0.0)


class LpNorm(NormOracle):
    """The p-norm of the coefficient tuple; exact for p in {1, inf}."""

    def __init__(self, p: float, name: str | None = None):
        if p != INF and p < 1:
            raise ValueError(f"p must be >= 1 or inf, got {p}")
        self.p = p
        self.name = name or (f"lp({p:g})" if p != INF else "lp(inf)")
        self.flags = NormFlags(
            unconditional_1=True,
            spreading_1=True,
            bimonotone=True,
            esa=(p == 1),
            suppression_unconditional=True,
        )
        self.summing_bound = 1.0 if p == 1 else None
        self.szb_suppression = True

    def _eval_tuple(self, t: tuple[Number, ...]) -> Number:
        if not t:
            return 0
        if self.p == INF:
            return max(abs(c) for c in t)
        if self.p == 1:
            return _abs_pow_sum(t, 1)
        if self.p == 2:
            return math.sqrt(float(_abs_pow_sum(t, 2)))
        return float(_abs_pow_sum(t, self.p)) ** (1.0 / self.p)


def c0_norm() -> LpNorm:
    """Sup norm (the natural norm of eventually-zero sequences)."""
    return LpNorm(INF, name="c0")


def eval_lp(p: float, t: Sequence[Number]) -> float:
    """``(sum |t_i|^p)^(1/p)``, or ``max |t_i|`` for p = inf; p < 1 is a domain error."""
    return LpNorm(p).tuple_value(tuple(t))


class SummingNorm(NormOracle):
    """Largest absolute interval sum of the coefficients.

    This equals the conditional-jamesification of the sup norm, which is why
    the maximum over interval systems collapses to a maximum over single
    intervals.  The norm is 1-spreading, bimonotone and equal signs additive,
    but neither unconditional nor suppression unconditional.
    """

    def __init__(self):
        self.name = "summing"
        self.flags = NormFlags(spreading_1=True, bimonotone=True, esa=True)
        self.summing_bound = 1.0
        self.szb_suppression = True

    def _eval_tuple(self, t: tuple[Number, ...]) -> Number:
        if not t:
            return 0
        # max over intervals of |interval sum| = (max prefix sum) - (min prefix
        # sum), where the empty prefix contributes 0.
        run: Number = 0
        lo: Number = 0
        hi: Number = 0
        for c in t:
            run = run + c
            if run > hi:
                hi = run
            elif run < lo:
                lo = run
        return hi - lo


def eval_summing(x: FinVec) -> Fraction:
    """Exact max over all intervals I of |sum of coefficients in I|."""
    v = SummingNorm()._dispatch(x.coords)
    return Fraction(v)


class MaxNorm(NormOracle):
    """Pointwise maximum of two norms (the diagonal of their direct sum).

    Taking the maximum of a subsymmetric norm and a conditional spreading norm
    is the basic way to manufacture conditional spreading norms that are not
    equal signs additive, so the esa flag is never set here.
    """

    def __init__(self, left: NormOracle, right: NormOracle):
        self.left = left
        self.right = right
        self.name = f"max({left.name}, {right.name})"
        self.flags = NormFlags(
            unconditional_1=left.flags.unconditional_1 and right.flags.unconditional_1,
            spreading_1=left.flags.spreading_1 and right.flags.spreading_1,
            bimonotone=left.flags.bimonotone and right.flags.bimonotone,
            esa=False,
            suppression_unconditional=(
                left.flags.suppression_unconditional
                and right.flags.suppression_unconditional
            ),
        )
        bounds = [b for b in (left.summing_bound, right.summing_bound) if b is not None]
        self.summing_bound = min(bounds) if bounds else None
        self.szb_suppression = left.szb_suppression and right.szb_suppression

    def _eval_pairs(self, pairs: Pairs) -> Number:
        return max(self.left._dispatch(pairs), self.right._dispatch(pairs))

    def _eval_tuple(self, t: tuple[Number, ...]) -> Number:
        return max(self.left._eval_tuple(t), self.right._eval_tuple(t))
