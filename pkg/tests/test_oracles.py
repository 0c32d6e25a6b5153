import itertools
import math
import random
from fractions import Fraction

import pytest

from helpers import brute_summing, random_tuple, random_vector
from spreadlab.oracles import (
    ConfigurationError,
    LpNorm,
    MaxNorm,
    SummingNorm,
    c0_norm,
    eval_lp,
    eval_summing,
)
from spreadlab.vectors import FinVec


def test_eval_lp_examples():
    assert eval_lp(2, (3, 4)) == 5
    assert eval_lp(1, (1, -1, 1)) == 3
    assert eval_lp(math.inf, (1, -2)) == 2


def test_eval_lp_rejects_small_p():
    with pytest.raises(ValueError):
        eval_lp(0.5, (1,))


def test_lp_exact_paths():
    one = LpNorm(1)
    sup = LpNorm(math.inf)
    x = FinVec.from_coeffs([Fraction(1, 3), Fraction(-1, 2)])
    assert one.exact_value(x) == Fraction(5, 6)
    assert sup.exact_value(x) == Fraction(1, 2)
    assert LpNorm(2).exact_value(x) is None


def test_summing_norm_examples():
    assert eval_summing(FinVec.from_coeffs([1, 1, 1])) == 3
    assert eval_summing(FinVec.from_coeffs([1, -1])) == 1
    assert eval_summing(FinVec.from_coeffs([1, -2, 1])) == 2


def test_summing_matches_brute_force():
    rng = random.Random(11)
    for _ in range(100):
        t = random_tuple(rng, rng.randint(0, 7))
        assert eval_summing(FinVec.from_coeffs(t)) == brute_summing(t)


def test_spreading_invariance():
    rng = random.Random(5)
    norms = [LpNorm(1), LpNorm(2), LpNorm(1.5), c0_norm(), SummingNorm()]
    for _ in range(40):
        n = rng.randint(1, 10)
        x = random_vector(rng, n)
        positions = sorted(rng.sample(range(1, 40), len(x)))
        y = x.spread(positions)
        for norm in norms:
            assert norm.flags.spreading_1
            assert math.isclose(norm.value(x), norm.value(y), rel_tol=1e-9, abs_tol=1e-9)


def test_unconditional_sign_flips_exact():
    rng = random.Random(9)
    for norm in (LpNorm(1), c0_norm()):
        for _ in range(10):
            n = rng.randint(1, 8)
            t = random_tuple(rng, n)
            base = norm.exact_tuple_value(t)
            for signs in itertools.product((1, -1), repeat=n):
                flipped = tuple(s * c for s, c in zip(signs, t))
                assert norm.exact_tuple_value(flipped) == base


def test_summing_norm_is_not_unconditional():
    s = SummingNorm()
    assert not s.flags.unconditional_1
    assert s.exact_tuple_value((1, 1)) == 2
    assert s.exact_tuple_value((1, -1)) == 1


def test_max_norm_combines():
    m = MaxNorm(LpNorm(2), SummingNorm())
    x = FinVec.from_coeffs([1, 1])
    assert m.value(x) == 2.0
    assert m.flags.spreading_1 and m.flags.bimonotone
    assert not m.flags.esa and not m.flags.unconditional_1


def test_flag_requirement_error():
    with pytest.raises(ConfigurationError):
        SummingNorm().flags.require("unconditional_1")


def test_zero_vector_and_homogeneity():
    rng = random.Random(3)
    for norm in (LpNorm(2), LpNorm(1), SummingNorm(), MaxNorm(LpNorm(2), SummingNorm())):
        assert norm.value(FinVec.zero()) == 0.0
        for _ in range(20):
            x = random_vector(rng, rng.randint(1, 6))
            c = Fraction(rng.randint(-8, 8), rng.choice([1, 2, 4]))
            assert math.isclose(
                norm.value(x.scale(c)), abs(float(c)) * norm.value(x),
                rel_tol=1e-12, abs_tol=1e-12,
            )


def test_summing_bound_attribute():
    for norm in (LpNorm(1), SummingNorm()):
        assert norm.summing_bound == 1.0
    assert LpNorm(2).summing_bound is None
