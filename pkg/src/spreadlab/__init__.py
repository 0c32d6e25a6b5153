"""spreadlab: exact evaluation and property-based verification of
conditional spreading norms on finitely supported vectors.

The package builds norms from implicit norming sets -- interval-system norms
(the quadratic one being the classical example), admissibility-constrained
cut norms, and weighted-average saturations -- and verifies their structural
identities and two-sided bounds by exact enumeration, dynamic programming and
bounded fixed-point evaluation.
"""

from .config import Config, DEFAULT, default_seed, values_close
from .decompose import (
    DecompositionReport,
    decomposition_check,
    flat_average_norm,
    u_part,
    z_block_vector,
    z_estimate,
)
from .jamesify import (
    JamesifiedNorm,
    cbh_check,
    cjames,
    cjames_idempotence_check,
    esa_check,
    james,
    james_dp_lp,
    james_space,
    jamesify_eval,
)
from .oracles import (
    ConfigurationError,
    LpNorm,
    MaxNorm,
    NormFlags,
    NormOracle,
    SummingNorm,
    c0_norm,
    eval_lp,
    eval_summing,
)
from .projections import (
    AveragingProjection,
    JamesDualReport,
    averaging_project,
    dual_norm_lower,
    james_dual_check,
    kernel_check,
    op_norm_lower,
    suppression_check_summing_zero,
)
from .saturate import (
    AlphaNode,
    BaseLeaf,
    NonConvergenceError,
    NormingTree,
    SaturatedNorm,
    SaturatedValue,
    SaturationParams,
    WeightedNode,
    alpha_bound_check,
    default_params,
    saturated_eval,
    schreier_equality_check,
)
from .schreierify import (
    CombinedBaseNorm,
    SchreierConditionalNorm,
    SchreierUnconditionalNorm,
    combined_base_eval,
    grid_dual_max,
    load_family,
    materialize_family,
    save_family,
    schreier_c_eval,
    schreier_u_eval,
    spreading_profile,
)
from .spaces import ParseError, elaborate, parse_space, print_space, space_oracle
from .suites import (
    CaseRecord,
    SUITE_NAMES,
    VerificationReport,
    emit_report,
    parse_report,
    run_suite,
)
from .vectors import (
    ConvexBlockSeq,
    FinVec,
    Interval,
    IntervalPartition,
    IntervalSystem,
    SkippedDifferenceSpan,
    compact,
    difference_basis_vector,
    interval_sum,
    interval_sums,
    parse_vector_mapping,
    vector_to_mapping,
)

__version__ = "0.1.0"
