"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass/fail line
per criterion.  Every expected value is either computed by an independent
enumeration in-line or pinned by an exact closed form.
"""

import itertools
import math
import random
from fractions import Fraction

import pytest

from spreadlab.config import Config
from spreadlab.decompose import decomposition_check, u_part, z_block_vector
from spreadlab.jamesify import (
    JamesifiedNorm,
    cjames,
    cjames_idempotence_check,
    esa_check,
    james_dp_lp,
    james_space,
    jamesify_eval,
)
from spreadlab.oracles import INF, LpNorm, MaxNorm, SummingNorm
from spreadlab.projections import (
    AveragingProjection,
    james_dual_check,
    op_norm_lower,
    suppression_check_summing_zero,
)
from spreadlab.saturate import (
    AlphaNode,
    BaseLeaf,
    SaturatedNorm,
    alpha_bound_check,
    default_params,
    saturated_eval,
    schreier_equality_check,
)
from spreadlab.schreierify import CombinedBaseNorm, SchreierConditionalNorm, schreier_c_eval
from spreadlab.vectors import FinVec, Interval, IntervalPartition

SEED = 20240917
NONZERO = (-2, -1, 1, 2)


def report(criterion: int, label: str, detail: str = ""):
    suffix = f" ({detail})" if detail else ""
    print(f"criterion {criterion:2d} [{label}]: PASS{suffix}")


def nonzero_tuples(max_len: int):
    """Nonzero-entry tuples up to max_len, deduplicated by global negation.

    Both evaluation paths canonicalize a vector to its nonzero coefficient
    tuple and are invariant under negating it, so these representatives cover
    every vector with entries in {-2,...,2}: dropping zeros is the shared
    canonicalization, and the sign dedup halves the grid losslessly.
    """
    for n in range(0, max_len + 1):
        for t in itertools.product(NONZERO, repeat=n):
            if t and t[0] < 0:
                continue
            yield t


def test_criterion_01_dp_matches_enumeration():
    checked = 0
    for p in (1, INF, 2, 1.5):
        norm = LpNorm(p)
        for t in nonzero_tuples(8):
            enum = jamesify_eval(norm, t)
            dp = james_dp_lp(p, t)
            if p in (1, INF):
                assert dp == enum, (p, t)
            else:
                assert abs(float(dp) - float(enum)) <= 1e-9, (p, t)
            checked += 1
    # plumbing spot-check: vectors with interior zeros through the public API
    rng = random.Random(SEED)
    for _ in range(100):
        n = rng.randint(1, 8)
        positions = sorted(rng.sample(range(1, 20), n))
        x = FinVec.make(
            (pos, rng.choice((-2, -1, 0, 1, 2))) for pos in positions
        )
        for p in (1, 2):
            assert abs(float(james_dp_lp(p, x)) - float(jamesify_eval(LpNorm(p), x))) <= 1e-9
    report(1, "oracle equivalence", f"{checked} grid vectors x 4 exponents")


def test_criterion_02_esa_identity_and_subadditivity():
    rng = random.Random(SEED + 2)
    for p in (1, 1.5, 2, INF):
        norm = cjames(LpNorm(p))
        for _ in range(1000):
            n = rng.randint(2, 8)
            a = [Fraction(rng.randint(-8, 8), rng.choice([1, 2, 4])) for _ in range(n)]
            k = rng.randint(1, n - 1)
            if a[k - 1] * a[k] < 0:
                a[k] = -a[k]
            res = esa_check(norm, tuple(a), k, tol=1e-9)
            assert res.passed, (p, a, k, res)
            # subadditivity has no sign restriction
            b = tuple(Fraction(rng.randint(-8, 8), rng.choice([1, 2, 4])) for _ in range(n))
            sub = esa_check(norm, b, rng.randint(1, n - 1), tol=1e-9)
            assert sub.passed, (p, b, sub)
    report(2, "equal-signs merge identity", "1000 instances x 4 exponents")


def test_criterion_03_gaps_equals_consecutive():
    # exact equality for p-norm bases: exhaustive small grid + seeded n <= 8
    for p in (1, 1.5, 2, INF):
        norm = LpNorm(p)
        for t in nonzero_tuples(5):
            assert jamesify_eval(norm, t, "gaps") == jamesify_eval(norm, t, "consecutive")
    rng = random.Random(SEED + 3)
    for _ in range(800):
        n = rng.randint(0, 8)
        t = tuple(Fraction(rng.randint(-8, 8), rng.choice([1, 2, 4])) for _ in range(n))
        for p in (1, 1.5, 2, INF):
            assert jamesify_eval(LpNorm(p), t, "gaps") == jamesify_eval(
                LpNorm(p), t, "consecutive"
            ), (p, t)
    # systems with gaps dominate for every base; strictly for the summing base
    for _ in range(200):
        n = rng.randint(0, 6)
        t = tuple(Fraction(rng.randint(-8, 8), rng.choice([1, 2])) for _ in range(n))
        for base in (LpNorm(2), SummingNorm()):
            g = jamesify_eval(base, t, "gaps")
            c = jamesify_eval(base, t, "consecutive")
            assert float(g) >= float(c) - 1e-12
    assert jamesify_eval(SummingNorm(), (1, -1, 1), "gaps") == 2
    assert jamesify_eval(SummingNorm(), (1, -1, 1), "consecutive") == 1
    report(3, "mode coincidence", "exhaustive n<=5 grid + 800 seeded, exact")


DECOMP_SPACES = (
    ("cjames(lp(2))", lambda: cjames(LpNorm(2))),
    ("cjames(lp(1.5))", lambda: cjames(LpNorm(1.5))),
    ("max(lp(2), cjames(lp(1)))", lambda: MaxNorm(LpNorm(2), cjames(LpNorm(1)))),
)


def test_criterion_04_decomposition_bounds():
    rng = random.Random(SEED + 4)
    for label, make in DECOMP_SPACES:
        norm = make()
        is_esa = norm.flags.esa
        for _ in range(500):
            n = rng.randint(1, 8)
            a = tuple(Fraction(rng.randint(-8, 8), rng.choice([1, 2, 4])) for _ in range(n))
            rep = decomposition_check(norm, a, 64, tol=1e-9)
            x, u = rep.x_norm, rep.u_norm
            assert u <= 2.0 * x + 1e-9, (label, a)
            for N, z in rep.z_estimates:
                assert z <= x + 1e-9, (label, a, N)
                assert x <= 2.0 * max(u, z) + 1e-9, (label, a, N)
            if is_esa:
                vals = [z for _, z in rep.z_estimates]
                assert max(vals) - min(vals) <= 1e-9, (label, a, vals)
    report(4, "decomposition bounds (1/2, 2)", "500 tuples x 3 spaces, N up to 64")


def test_criterion_05_projection_norms():
    esa_ambient = cjames(LpNorm(2))
    spreading_ambient = MaxNorm(LpNorm(2), cjames(LpNorm(1)))
    partitions = [
        IntervalPartition.from_cuts(1, [3, 6], 10),
        IntervalPartition.from_cuts(1, [1, 4, 8], 10),
        IntervalPartition.from_cuts(1, [5], 10),
    ]
    for pi, partition in enumerate(partitions):
        P = AveragingProjection(partition, esa_ambient)
        v = op_norm_lower(P, 10, budget=10_000, seed=SEED + pi)
        assert 1.0 - 1e-12 <= v <= 1.0 + 1e-6, (pi, v)
        Q = AveragingProjection(partition, spreading_ambient)
        w = op_norm_lower(Q, 10, budget=10_000, seed=SEED + pi)
        assert w <= 3.0 + 1e-6, (pi, w)
    report(5, "projection norms", "3 full-cover partitions, >= 1e4 iterations each")


def _summing_zero_blocks(rng: random.Random, count: int) -> list[FinVec]:
    blocks = []
    pos = 1
    for _ in range(count):
        size = rng.randint(2, 3)
        positions = list(range(pos, pos + size))
        coeffs = [Fraction(rng.randint(1, 3)) for _ in range(size - 1)]
        coeffs.append(-sum(coeffs))
        blocks.append(FinVec.make(zip(positions, coeffs)))
        pos += size
    return blocks


def test_criterion_06_suppression_of_summing_zero_blocks():
    rng = random.Random(SEED + 6)
    spaces = [
        ("cjames(lp(2))", cjames(LpNorm(2))),
        ("schreier_c(cjames(lp(2)))", SchreierConditionalNorm(james_space())),
    ]
    for label, norm in spaces:
        for count in (2, 3, 4, 5):
            for family in range(3):
                blocks = _summing_zero_blocks(rng, count)
                coeffs = [
                    tuple(Fraction(rng.randint(-4, 4), rng.choice([1, 2]))
                          for _ in range(count))
                    for _ in range(6)
                ]
                for r in range(count + 1):
                    for subset in itertools.combinations(range(count), r):
                        assert suppression_check_summing_zero(
                            norm, blocks, subset, tol=1e-9, coeffs=coeffs
                        ), (label, count, subset)
    report(6, "summing-zero suppression", "exhaustive subsets, <= 5 blocks, 2 spaces")


def test_criterion_07_admissible_spreading_model():
    J = james_space()
    checked = 0
    for m in range(1, 5):
        for positions in itertools.combinations(range(m + 1, 15), m):
            for c in itertools.product(NONZERO, repeat=m):
                if c[0] < 0:
                    continue  # both modes are symmetric under negation
                x = FinVec.make(zip(positions, c))
                ideal = float(schreier_c_eval(J, x, "ideal"))
                want = float(J._eval_tuple(x.compact()))
                assert abs(ideal - want) <= 1e-9, (positions, c)
                grid = float(schreier_c_eval(J, x, "grid"))
                n_max = min(4, positions[0] - 1)
                frac = (2 * n_max - 1) / (2 * n_max)
                assert grid <= ideal + 1e-12, (positions, c)
                assert grid >= frac * ideal - 1e-6, (positions, c, grid, ideal)
                checked += 1
    report(7, "admissible-cut spreading model", f"{checked} admissible placements")


def test_criterion_08_saturated_norm():
    base = CombinedBaseNorm(LpNorm(2), james_space())
    S = SaturatedNorm(base, default_params())
    rng = random.Random(SEED + 8)

    # equality on admissible placements, exhaustively over position sets
    count = 0
    for n in (1, 2, 3):
        for positions in itertools.combinations(range(n + 1, 13), n):
            samples = [tuple(Fraction(rng.choice(NONZERO)) for _ in range(n))
                       for _ in range(2)]
            samples.append(tuple(Fraction((-1) ** i) for i in range(n)))
            for c in samples:
                res = schreier_equality_check(S, c, positions, tol=1e-6)
                assert res.passed, (positions, c, res)
                count += 1

    # averaging estimate on randomized explicit members
    for _ in range(100):
        k = rng.randint(2, 6)
        positions = sorted(rng.sample(range(1, 12), k))
        xs = [FinVec.basis(p).scale(Fraction(rng.randint(1, 2), 2)) for p in positions]
        size = rng.randint(1, 8)
        chosen = sorted(rng.sample(positions, rng.randint(1, min(size, k))))
        leaves = tuple(
            BaseLeaf(((p, Fraction(rng.choice([-1, 1]))),), (p, p)) for p in chosen
        )
        chk = alpha_bound_check(AlphaNode(leaves, size), xs, S, tol=1e-9)
        assert chk.passed, chk

    # base domination and interval monotonicity on random samples
    for _ in range(30):
        n = rng.randint(1, 6)
        positions = sorted(rng.sample(range(1, 13), n))
        x = FinVec.make(
            (p, Fraction(rng.randint(-4, 4), rng.choice([1, 2]))) for p in positions
        )
        if not x:
            continue
        res = saturated_eval(S, x)
        assert res.value >= base.value(x) - 1e-9
        lo = rng.randint(1, x.max_support)
        hi = rng.randint(lo, x.max_support)
        sub = saturated_eval(S, x.restrict(Interval(lo, hi)))
        assert sub.value <= res.upper + sub.eps + 1e-9
    report(8, "saturated norm", f"{count} admissible equalities + 100 trees")


def test_criterion_09_duality_witnesses():
    rng = random.Random(SEED + 9)
    rep = james_dual_check((1.0,), budget=500, seed=SEED)
    assert rep.certified_ratio == 1.0
    assert rep.sampled_upper <= 1.0 + 1e-6
    discrepancies = 0
    for _ in range(50):
        n = rng.randint(1, 6)
        raw = [rng.gauss(0.0, 1.0) for _ in range(n)]
        scale = math.sqrt(math.fsum(v * v for v in raw)) or 1.0
        a = [v / scale for v in raw]
        drift = math.fsum(v * v for v in a)
        a = tuple(v / math.sqrt(drift) for v in a)
        rep = james_dual_check(a, budget=2000, seed=SEED + n)
        assert rep.certified_ratio >= 0.5 - 1e-6, (a, rep)
        assert rep.sampled_upper <= 1.0 + 1e-6, (a, rep)
        # the telescoping pairing is 1 - sum a_i a_{i+1}, generally not 1;
        # the report flags this rather than asserting the claimed ratio
        if rep.telescope_discrepancy:
            discrepancies += 1
    report(9, "duality witnesses", f"50 unit tuples, {discrepancies} flagged pairings")


def test_criterion_10_idempotence():
    rng = random.Random(SEED + 10)
    for p in (1, 2):
        for _ in range(500):
            n = rng.randint(0, 6)
            positions = sorted(rng.sample(range(1, 14), n))
            x = FinVec.make(
                (pos, Fraction(rng.randint(-8, 8), rng.choice([1, 2, 4])))
                for pos in positions
            )
            res = cjames_idempotence_check(LpNorm(p), x, tol=1e-9)
            assert res.passed, (p, x, res)
    report(10, "iterated construction is stable", "500 vectors x 2 bases")
