"""Named verification suites and report emission.

Each suite exercises one family of structural facts on concrete spaces with
seeded randomness; mathematical failures never raise, they become failed
rows.  Reports are deterministic given (suite, seed, trials, tol): cases are
dispatched to a thread pool but assembled in case-id order, and every case
derives its randomness from the suite seed and its own index.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .config import DEFAULT, Config, default_seed
from .decompose import decomposition_check, z_estimate
from .jamesify import (
    JamesifiedNorm,
    cbh_check,
    cjames,
    cjames_idempotence_check,
    esa_check,
    james_space,
)
from .oracles import INF, LpNorm, MaxNorm, NormOracle
from .projections import (
    AveragingProjection,
    averaging_project,
    james_dual_check,
    kernel_check,
    op_norm_lower,
    suppression_check_summing_zero,
)
from .saturate import (
    AlphaNode,
    BaseLeaf,
    SaturatedNorm,
    alpha_bound_check,
    default_params,
    saturated_eval,
    schreier_equality_check,
)
from .schreierify import CombinedBaseNorm, SchreierConditionalNorm, schreier_c_eval
from .vectors import ConvexBlockSeq, FinVec, Interval, IntervalPartition


@dataclass(frozen=True)
class CaseRecord:
    case_id: str
    space: str
    input: str
    lhs: float
    rhs: float
    constant: float
    tol: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    suite: str
    seed: int
    trials: int
    tol: float
    description: str
    cases: tuple[CaseRecord, ...]
    wall_time_s: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)


SUITE_NAMES = (
    "esa",
    "cbh",
    "decomposition",
    "projections",
    "suppression",
    "schreier",
    "saturate",
    "james-dual",
    "idempotence",
)


def run_suite(
    name: str,
    seed: int | None = None,
    trials: int | None = None,
    tol: float | None = None,
    cfg: Config = DEFAULT,
    workers: int = 4,
) -> VerificationReport:
    """Execute a named suite; unknown names raise ValueError."""
    if name not in SUITE_NAMES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    seed = default_seed() if seed is None else seed
    builder = _BUILDERS[name]
    trials = builder.trials if trials is None else trials
    tol = (cfg.abs_tol if builder.tol is None else builder.tol) if tol is None else tol

    start = time.perf_counter()
    cases = builder.build(seed, trials, tol, cfg)

    def run_case(item):
        case_id, thunk = item
        try:
            return thunk()
        except Exception as exc:  # a math failure must become a row, not a crash
            return dict(space="-", input=f"error: {exc}", lhs=math.nan,
                        rhs=math.nan, constant=0.0, passed=False)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run_case, cases))
    records = []
    for (case_id, _), result in zip(cases, results):
        result.setdefault("tol", tol)
        records.append(CaseRecord(case_id=case_id, **result))
    records.sort(key=lambda r: r.case_id)
    wall = time.perf_counter() - start
    return VerificationReport(
        suite=name,
        seed=seed,
        trials=trials,
        tol=tol,
        description=builder.description,
        cases=tuple(records),
        wall_time_s=wall,
    )


# -- suite definitions ------------------------------------------------------------


class _Suite:
    def __init__(self, description: str, trials: int, build: Callable,
                 tol: float | None = None):
        self.description = description
        self.trials = trials
        self._build = build
        self.tol = tol

    def build(self, seed: int, trials: int, tol: float, cfg: Config):
        return self._build(seed, trials, tol, cfg)


def _rng(seed: int, index: int) -> random.Random:
    return random.Random((seed * 1_000_003 + index) & 0xFFFFFFFF)


def _rand_tuple(rng: random.Random, n: int, span: int = 2):
    return tuple(
        Fraction(rng.randint(-span * 4, span * 4), rng.choice([1, 2, 4]))
        for _ in range(n)
    )


def _rand_blocks(rng: random.Random, count: int) -> ConvexBlockSeq:
    blocks, pos = [], 0
    for _ in range(count):
        size = rng.randint(1, 3)
        positions = []
        for _ in range(size):
            pos += rng.randint(1, 2)
            positions.append(pos)
        weights = [Fraction(rng.randint(1, 8)) for _ in range(size)]
        total = sum(weights)
        blocks.append(FinVec.make(zip(positions, (w / total for w in weights))))
    return ConvexBlockSeq(tuple(blocks))


_ESA_SPACES = ((1, "cjames(lp(1))"), (1.5, "cjames(lp(1.5))"),
               (2, "cjames(lp(2))"), (INF, "cjames(lp(inf))"))


def _build_esa(seed, trials, tol, cfg):
    cases = []
    for s_idx, (p, label) in enumerate(_ESA_SPACES):
        norm = cjames(LpNorm(p), cfg)
        for k_case in range(trials):
            case_id = f"{label}/{k_case:04d}"

            def thunk(norm=norm, label=label, idx=s_idx * 100_000 + k_case):
                rng = _rng(seed, idx)
                n = rng.randint(2, 7)
                a = list(_rand_tuple(rng, n))
                k = rng.randint(1, n - 1)
                if a[k - 1] * a[k] < 0:
                    a[k] = -a[k]  # enforce the equal-sign hypothesis
                res = esa_check(norm, tuple(a), k, tol)
                sub = esa_check(norm, _rand_tuple(rng, n), rng.randint(1, n - 1), tol)
                return dict(space=label, input=f"a={tuple(map(str, a))} k={k}",
                            lhs=res.lhs, rhs=res.rhs, constant=1.0,
                            passed=res.passed and sub.passed)

            cases.append((case_id, thunk))
    return cases


def _build_cbh(seed, trials, tol, cfg):
    cases = []
    for s_idx, (p, label) in enumerate(((1, "cjames(lp(1))"), (2, "cjames(lp(2))"))):
        norm = cjames(LpNorm(p), cfg)
        for k_case in range(trials):
            case_id = f"{label}/{k_case:04d}"

            def thunk(norm=norm, label=label, idx=s_idx * 100_000 + k_case):
                rng = _rng(seed, idx)
                n = rng.randint(1, 4)
                a = _rand_tuple(rng, n)
                blocks = _rand_blocks(rng, n)
                res = cbh_check(norm, a, blocks, tol)
                return dict(space=label, input=f"a={tuple(map(str, a))}",
                            lhs=res.lhs, rhs=res.rhs, constant=1.0, passed=res.passed)

            cases.append((case_id, thunk))

    def counterexample():
        # a norm that is not equal signs additive must fail block homogeneity
        res = cbh_check(LpNorm(2), (1,), ConvexBlockSeq.averages([2]))
        return dict(space="lp(2)", input="a=(1) flat 2-block", lhs=res.lhs,
                    rhs=res.rhs, constant=1.0, passed=not res.passed)

    cases.append(("lp(2)/expected-violation", counterexample))
    return cases


_DECOMP_SPACES = (
    ("cjames(lp(2))", lambda cfg: cjames(LpNorm(2), cfg), True),
    ("cjames(lp(1.5))", lambda cfg: cjames(LpNorm(1.5), cfg), True),
    ("max(lp(2), cjames(lp(1)))",
     lambda cfg: MaxNorm(LpNorm(2), cjames(LpNorm(1), cfg)), False),
)


def _build_decomposition(seed, trials, tol, cfg):
    cases = []
    for s_idx, (label, make, is_esa) in enumerate(_DECOMP_SPACES):
        norm = make(cfg)
        for k_case in range(trials):
            case_id = f"{label}/{k_case:04d}"

            def thunk(norm=norm, label=label, idx=s_idx * 100_000 + k_case, is_esa=is_esa):
                rng = _rng(seed, idx)
                n = rng.randint(1, 8)
                a = _rand_tuple(rng, n)
                rep = decomposition_check(norm, a, 64, tol, cfg)
                ok = rep.passed
                if is_esa:
                    vals = [z for _, z in rep.z_estimates]
                    ok = ok and max(vals) - min(vals) <= tol
                return dict(space=label, input=f"a={tuple(map(str, a))}",
                            lhs=rep.x_norm, rhs=max(rep.u_norm, rep.z_final),
                            constant=2.0, passed=ok)

            cases.append((case_id, thunk))
    return cases


def _build_projections(seed, trials, tol, cfg):
    esa_space = ("cjames(lp(2))", cjames(LpNorm(2), cfg), 1.0)
    spreading_space = (
        "max(lp(2), cjames(lp(1)))",
        MaxNorm(LpNorm(2), cjames(LpNorm(1), cfg)),
        3.0,
    )
    partitions = [
        IntervalPartition.from_cuts(1, [2, 5], 8),
        IntervalPartition.from_cuts(1, [1, 3, 6], 8),
        IntervalPartition.from_cuts(1, [4], 8),
    ]
    cases = []
    for label, ambient, bound in (esa_space, spreading_space):
        for pi, partition in enumerate(partitions):
            case_id = f"{label}/partition{pi}"

            def thunk(ambient=ambient, label=label, partition=partition,
                      bound=bound, idx=pi):
                P = AveragingProjection(partition, ambient)
                v = op_norm_lower(P, 8, budget=max(2000, trials), seed=seed + idx,
                                  cfg=cfg)
                ok = v <= bound + 1e-6
                if bound == 1.0:
                    ok = ok and v >= 1.0 - 1e-9
                return dict(space=label, input=str([str(i) for i in partition]),
                            lhs=v, rhs=bound, constant=bound, passed=ok)

            cases.append((case_id, thunk))

    def kernel_case():
        P = AveragingProjection(partitions[0], esa_space[1])
        ok = kernel_check(P, 1) and kernel_check(P, 2)
        return dict(space=esa_space[0], input="skipped differences", lhs=1.0,
                    rhs=1.0, constant=0.0, passed=ok)

    def idempotent_case():
        rng = _rng(seed, 991)
        partition = partitions[1]
        ok = True
        for _ in range(20):
            x = FinVec.make((i, Fraction(rng.randint(-4, 4), 2)) for i in range(1, 9))
            once = averaging_project(x, partition)
            ok = ok and averaging_project(once, partition) == once
        return dict(space=esa_space[0], input="P(P(x)) = P(x)", lhs=1.0, rhs=1.0,
                    constant=0.0, passed=ok)

    cases.append(("kernel/skipped-differences", kernel_case))
    cases.append(("idempotence/exact", idempotent_case))
    return cases


def _suppression_blocks(rng: random.Random, count: int) -> list[FinVec]:
    blocks, pos = [], 0
    for _ in range(count):
        size = rng.randint(2, 3)
        positions = []
        for _ in range(size):
            pos += 1
            positions.append(pos)
        coeffs = [Fraction(rng.randint(1, 4)) for _ in range(size - 1)]
        coeffs.append(-sum(coeffs))
        blocks.append(FinVec.make(zip(positions, coeffs)))
    return blocks


def _build_suppression(seed, trials, tol, cfg):
    spaces = [
        ("cjames(lp(2))", cjames(LpNorm(2), cfg)),
        ("schreier_c(cjames(lp(2)))", SchreierConditionalNorm(james_space(cfg), cfg=cfg)),
    ]
    cases = []
    for s_idx, (label, norm) in enumerate(spaces):
        for k_case in range(max(1, trials // 4)):
            case_id = f"{label}/{k_case:04d}"

            def thunk(norm=norm, label=label, idx=s_idx * 100_000 + k_case):
                rng = _rng(seed, idx)
                count = rng.randint(2, 4)
                blocks = _suppression_blocks(rng, count)
                ok = True
                for r in range(count + 1):
                    for subset in itertools.combinations(range(count), r):
                        ok = ok and suppression_check_summing_zero(
                            norm, blocks, subset, tol,
                            seed=seed + idx, trials=4,
                        )
                return dict(space=label, input=f"{count} summing-zero blocks",
                            lhs=float(ok), rhs=1.0, constant=1.0, passed=ok)

            cases.append((case_id, thunk))
    return cases


def _build_schreier(seed, trials, tol, cfg):
    J = james_space(cfg)
    label = "schreier_c(cjames(lp(2)))"
    cases = []
    for k_case in range(trials):
        case_id = f"{label}/adm{k_case:04d}"

        def thunk(idx=k_case):
            rng = _rng(seed, idx)
            n = rng.randint(1, 4)
            positions = sorted(rng.sample(range(n + 1, 15), n))
            c = tuple(Fraction(rng.randint(-2, 2)) for _ in range(n))
            if all(v == 0 for v in c):
                c = (Fraction(1),) + c[1:]
            x = FinVec.make(zip(positions, c))
            ideal = float(schreier_c_eval(J, x, "ideal", cfg=cfg))
            want = float(J._eval_tuple(x.compact()))
            ok = abs(ideal - want) <= tol
            grid = float(schreier_c_eval(J, x, "grid", cfg=cfg))
            frac = (2 * n - 1) / (2 * n)
            ok = ok and grid <= ideal + 1e-12 and grid >= frac * ideal - 1e-6
            return dict(space=label, input=f"c={tuple(map(str, c))} at {positions}",
                        lhs=ideal, rhs=want, constant=frac, passed=ok)

        cases.append((case_id, thunk))

    def summing_norm_one():
        rng = _rng(seed, 7777)
        S = SchreierConditionalNorm(J, cfg=cfg)
        ok = True
        for _ in range(30):
            n = rng.randint(1, 5)
            positions = sorted(rng.sample(range(1, 13), n))
            x = FinVec.make(zip(positions, _rand_tuple(rng, n)))
            ok = ok and abs(float(x.total())) <= S.value(x) + 1e-12
        return dict(space=label, input="summing functional", lhs=1.0, rhs=1.0,
                    constant=1.0, passed=ok)

    cases.append((f"{label}/summing-norm-one", summing_norm_one))
    return cases


def _build_saturate(seed, trials, tol, cfg):
    base = CombinedBaseNorm(LpNorm(2), james_space(cfg), cfg)
    S = SaturatedNorm(base, default_params(), cfg)
    label = S.name
    cases = []

    def params_case():
        p = default_params()
        ok = p.ratio_tail_bound < 1 and p.weights[0] >= 2 and p.counts[0] >= 4
        return dict(space=label, input="weight/count generator",
                    lhs=float(p.ratio_tail_bound), rhs=1.0, constant=1.0, passed=ok)

    cases.append(("params/constraints", params_case))

    for k_case in range(trials):
        case_id = f"{label}/eq{k_case:04d}"

        def thunk(idx=k_case):
            rng = _rng(seed, idx)
            n = rng.randint(1, 3)
            positions = sorted(rng.sample(range(n + 1, 13), n))
            c = tuple(Fraction(rng.randint(-2, 2)) for _ in range(n))
            if all(v == 0 for v in c):
                c = (Fraction(1),) + c[1:]
            res = schreier_equality_check(S, c, positions, tol=1e-6)
            return dict(space=label, input=f"c={tuple(map(str, c))} at {positions}",
                        lhs=res.lhs, rhs=res.rhs, constant=1.0, passed=res.passed)

        cases.append((case_id, thunk))

    def domination_case():
        rng = _rng(seed, 31337)
        ok = True
        for _ in range(10):
            n = rng.randint(1, 4)
            positions = sorted(rng.sample(range(1, 11), n))
            x = FinVec.make(zip(positions, _rand_tuple(rng, n)))
            if not x:
                continue
            res = saturated_eval(S, x)
            ok = ok and res.value >= base.value(x) - 1e-9
            ok = ok and abs(float(x.total())) <= res.upper + 1e-9
        return dict(space=label, input="base domination + summing bound",
                    lhs=1.0, rhs=1.0, constant=1.0, passed=ok)

    def alpha_case():
        rng = _rng(seed, 4242)
        ok = True
        for _ in range(20):
            k = rng.randint(2, 5)
            positions = sorted(rng.sample(range(1, 12), k))
            xs = [FinVec.basis(p) for p in positions]
            size = rng.randint(1, 6)
            chosen = sorted(rng.sample(positions, rng.randint(1, min(size, k))))
            leaves = tuple(
                BaseLeaf(((p, Fraction(rng.choice([-1, 1]))),), (p, p)) for p in chosen
            )
            chk = alpha_bound_check(AlphaNode(leaves, size), xs, S, tol)
            ok = ok and chk.passed
        return dict(space=label, input="averaging estimate", lhs=1.0, rhs=1.0,
                    constant=2.0, passed=ok)

    cases.append(("domination/base-and-summing", domination_case))
    cases.append(("alpha/averaging-estimate", alpha_case))
    return cases


def _build_james_dual(seed, trials, tol, cfg):
    cases = []
    label = "cjames(lp(2)) dual"

    def exact_case():
        rep = james_dual_check((1.0,), budget=400, seed=seed, cfg=cfg)
        ok = rep.certified_ratio == 1.0 and rep.sampled_upper <= 1.0 + 1e-6
        return dict(space=label, input="a=(1)", lhs=rep.certified_ratio, rhs=1.0,
                    constant=1.0, passed=ok)

    cases.append(("a=(1)/exact", exact_case))
    for k_case in range(trials):
        case_id = f"unit/{k_case:04d}"

        def thunk(idx=k_case):
            rng = _rng(seed, idx)
            n = rng.randint(1, 6)
            raw = [rng.gauss(0.0, 1.0) for _ in range(n)]
            norm = math.sqrt(math.fsum(v * v for v in raw)) or 1.0
            a = tuple(v / norm for v in raw)
            drift = math.fsum(v * v for v in a) - 1.0
            a = tuple(v / math.sqrt(1.0 + drift) for v in a)
            rep = james_dual_check(a, budget=800, seed=seed + idx, cfg=cfg)
            ok = rep.certified_ratio >= 0.5 - 1e-6 and rep.sampled_upper <= 1.0 + 1e-6
            return dict(space=label, input=f"n={n}", lhs=rep.certified_ratio,
                        rhs=rep.sampled_upper, constant=0.5, passed=ok)

        cases.append((case_id, thunk))
    return cases


def _build_idempotence(seed, trials, tol, cfg):
    cases = []
    for s_idx, (p, label) in enumerate(((1, "cjames(lp(1))"), (2, "cjames(lp(2))"))):
        inner = LpNorm(p)
        for k_case in range(trials):
            case_id = f"{label}/{k_case:04d}"

            def thunk(inner=inner, label=label, idx=s_idx * 100_000 + k_case):
                rng = _rng(seed, idx)
                n = rng.randint(0, 6)
                positions = sorted(rng.sample(range(1, 14), n))
                x = FinVec.make(zip(positions, _rand_tuple(rng, n)))
                res = cjames_idempotence_check(inner, x, tol, cfg)
                return dict(space=label, input=str(x), lhs=res.lhs, rhs=res.rhs,
                            constant=1.0, passed=res.passed)

            cases.append((case_id, thunk))
    return cases


_BUILDERS = {
    "esa": _Suite("merging adjacent same-sign coefficients preserves the norm; "
                  "merging mixed signs never increases it", 250, _build_esa),
    "cbh": _Suite("equal-signs-additive norms are isometric on convex blocks, "
                  "and only they are", 120, _build_cbh),
    "decomposition": _Suite("two-sided bound via skipped differences and flat "
                            "block averages, constants (1/2, 2)", 150,
                            _build_decomposition),
    "projections": _Suite("averaging projections have norm one on equal-signs-"
                          "additive spaces and at most 3 on 1-spreading spaces",
                          10_000, _build_projections),
    "suppression": _Suite("summing-zero successive blocks are suppression "
                          "unconditional", 40, _build_suppression),
    "schreier": _Suite("admissibly placed tuples take the base-norm value; "
                       "the grid family recovers the (2n-1)/(2n) fraction", 120,
                       _build_schreier),
    "saturate": _Suite("saturation keeps admissible tuples at base value, "
                       "dominates the base and obeys the averaging estimate", 30,
                       _build_saturate),
    "james-dual": _Suite("even-coordinate functionals on the quadratic interval "
                         "norm: certified ratio >= 1/2, sampled ratios <= 1", 25,
                         _build_james_dual, tol=1e-6),
    "idempotence": _Suite("the consecutive-interval construction is idempotent",
                          250, _build_idempotence),
}


# -- emission ---------------------------------------------------------------------

CSV_COLUMNS = ("suite", "case_id", "space", "input", "lhs", "rhs", "constant",
               "tol", "pass")


def emit_report(report: VerificationReport, fmt: str, path: str | Path | None = None) -> str:
    """Render a report as CSV or structured JSON; optionally write to a file.

    The CSV columns are exactly ``suite,case_id,space,input,lhs,rhs,constant,
    tol,pass`` and carry no timing, so CSV output is bit-identical across runs
    with the same seed and configuration.
    """
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in report.cases:
            writer.writerow([
                report.suite, c.case_id, c.space, c.input,
                repr(c.lhs), repr(c.rhs), repr(c.constant), repr(c.tol),
                "true" if c.passed else "false",
            ])
        text = buf.getvalue()
    elif fmt == "structured":
        doc = {
            "suite": report.suite,
            "seed": report.seed,
            "trials": report.trials,
            "tol": report.tol,
            "description": report.description,
            "passed": report.passed,
            "wall_time_s": report.wall_time_s,
            "cases": [asdict(c) for c in report.cases],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def report_from_decomposition(rep, tol: float = 1e-9) -> VerificationReport:
    """Wrap a decomposition result in the shared report schema so the CLI can
    emit it as CSV or structured JSON."""
    cases = tuple(
        CaseRecord(
            case_id=row["case_id"],
            space=rep.space,
            input=f"a={tuple(map(str, rep.a))}",
            lhs=row["lhs"],
            rhs=row["rhs"],
            constant=row["constant"],
            tol=tol,
            passed=row["passed"],
        )
        for row in rep.rows()
    )
    return VerificationReport(
        suite="decomposition",
        seed=0,
        trials=1,
        tol=tol,
        description="two-sided bound via skipped differences and flat block "
                    "averages, constants (1/2, 2)",
        cases=cases,
        wall_time_s=0.0,
    )


def parse_report(text: str) -> VerificationReport:
    """Inverse of the structured emission."""
    doc = json.loads(text)
    cases = tuple(CaseRecord(**c) for c in doc["cases"])
    return VerificationReport(
        suite=doc["suite"],
        seed=doc["seed"],
        trials=doc["trials"],
        tol=doc["tol"],
        description=doc["description"],
        cases=cases,
        wall_time_s=doc["wall_time_s"],
    )
