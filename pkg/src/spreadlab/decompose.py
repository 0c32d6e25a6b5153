"""Splitting a conditional 1-spreading norm into unconditional and
convex-block-homogeneous parts.

The unconditional part of a coefficient tuple ``a`` is carried by the skipped
differences ``u_i = e_{2i} - e_{2i-1}``; the convex-block-homogeneous part is
the limit of ``a`` placed on ever flatter block averages.  The finite-N block
average is an overestimate of that limit (block averages are convex blocks,
and the limit is the infimum over convex block sequences), and every check
here is phrased so that the overestimate still yields a provable statement:

* ``z_N <= ||x||``           (convex blocks are dominated by the basis),
* ``||u-part|| <= 2 ||x||``  (half of the two-sided bound),
* ``||x|| <= 2 max(||u-part||, z_N)``  (valid because ``z_N`` overestimates).

The true limit norm is never computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .config import DEFAULT, Config
from .oracles import NormOracle, Number
from .vectors import FinVec


def u_part(a: Sequence[Number]) -> FinVec:
    """The skipped-difference carrier ``sum_i a_i (e_{2i} - e_{2i-1})``."""
    pairs = []
    for i, c in enumerate(a, start=1):
        if c != 0:
            pairs.append((2 * i, c))
            pairs.append((2 * i - 1, -c))
    return FinVec.make(pairs)


def z_block_vector(a: Sequence[Number], N: int) -> FinVec:
    """``sum_i a_i v_i`` where ``v_i`` is the flat average of the i-th block
    of ``N`` consecutive basis vectors."""
    if N < 1:
        raise ValueError("block length N must be >= 1")
    w = Fraction(1, N)
    pairs = []
    for i, c in enumerate(a):
        if c == 0:
            continue
        cw = Fraction(c) * w if isinstance(c, (int, Fraction)) else c / N
        for j in range(i * N + 1, (i + 1) * N + 1):
            pairs.append((j, cw))
    return FinVec.make(pairs)


def z_estimate(norm: NormOracle, a: Sequence[Number], N: int) -> float:
    """Norm of ``a`` placed on flat N-blocks; an upper estimate of the limit
    block-average norm, decreasing toward it as N grows."""
    norm.flags.require("spreading_1")
    return norm.value(z_block_vector(a, N))


def flat_average_norm(inner: NormOracle, n: int) -> float:
    """Norm of the flat convex combination ``(1/n, ..., 1/n)``."""
    inner.flags.require("unconditional_1", "spreading_1")
    if n < 1:
        raise ValueError("n must be >= 1")
    return inner.tuple_value((Fraction(1, n),) * n)


@dataclass(frozen=True)
class DecompositionReport:
    space: str
    a: tuple
    x_norm: float
    u_norm: float
    z_estimates: tuple[tuple[int, float], ...]
    lower_ok: bool
    upper_ok: bool
    converged: bool
    constants_used: tuple[float, float] = (0.5, 2.0)

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok

    @property
    def z_final(self) -> float:
        return self.z_estimates[-1][1]

    def rows(self) -> list[dict]:
        """Per-inequality rows in the shared report schema."""
        z = self.z_final
        return [
            dict(case_id="z_le_x", lhs=z, rhs=self.x_norm, constant=1.0,
                 passed=self.lower_ok),
            dict(case_id="u_le_2x", lhs=self.u_norm, rhs=self.x_norm, constant=2.0,
                 passed=self.lower_ok),
            dict(case_id="x_le_2max", lhs=self.x_norm, rhs=max(self.u_norm, z),
                 constant=2.0, passed=self.upper_ok),
        ]


def decomposition_check(
    norm: NormOracle,
    a: Sequence[Number],
    N: int,
    tol: float = 1e-9,
    cfg: Config = DEFAULT,
) -> DecompositionReport:
    """Verify the two-sided bound with constants (1/2, 2) at block length N.

    ``z`` estimates are computed at doubling block lengths 1, 2, 4, ..., N;
    the final one enters the inequalities.  The caller asserts that ``norm``
    is conditional; for unconditional norms the inequalities still hold but
    say nothing interesting.
    """
    norm.flags.require("spreading_1")
    if N < 1:
        raise ValueError("block length N must be >= 1")
    a = tuple(a)
    x_norm = norm.tuple_value(a)
    u_norm = norm.value(u_part(a))

    estimates = []
    length = 1
    while True:
        estimates.append((length, z_estimate(norm, a, length)))
        if length >= N:
            break
        length = min(2 * length, N)
    converged = len(estimates) < 2 or abs(estimates[-1][1] - estimates[-2][1]) < tol

    z = estimates[-1][1]
    lower_ok = (z <= x_norm + tol) and (u_norm <= 2.0 * x_norm + tol)
    upper_ok = x_norm <= 2.0 * max(u_norm, z) + tol
    return DecompositionReport(
        space=norm.name,
        a=a,
        x_norm=x_norm,
        u_norm=u_norm,
        z_estimates=tuple(estimates),
        lower_ok=lower_ok,
        upper_ok=upper_ok,
        converged=converged,
    )
