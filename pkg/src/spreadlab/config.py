"""Global numeric tolerances and enumeration caps.

All evaluators read their limits from a shared ``Config`` instance so that a
single object controls how far exhaustive enumerations are allowed to go and
how float results are compared.  The defaults are sized for desk-scale inputs
(supports of a dozen coordinates); raise the caps explicitly if you need more
and are willing to wait.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    # Float comparisons pass if within abs_tol OR rel_tol, whichever is looser.
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9

    # Largest compacted support accepted by the interval-system enumerator.
    jamesify_cap: int = 22
    # Largest support position accepted by the admissible-cut enumerator.
    schreier_cap: int = 15
    # Largest support position accepted by the saturated-norm evaluator.
    saturate_cap: int = 12
    # Saturated-norm evaluation: level iteration cap and target bracket width.
    saturate_level_cap: int = 8
    saturate_tol: float = 1e-8

    # Lower-bound searches (operator and dual norms).
    search_restarts: int = 200
    search_halvings: int = 9

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)


DEFAULT = Config()

SEED_ENV_VAR = "SPREADLAB_SEED"
DEFAULT_SEED = 20240917


def default_seed() -> int:
    """Seed used by the verification suites; ``SPREADLAB_SEED`` overrides."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


def values_close(a: float, b: float, cfg: Config = DEFAULT) -> bool:
    """Tolerance test used throughout: absolute or relative, whichever is looser."""
    diff = abs(a - b)
    return diff <= cfg.abs_tol or diff <= cfg.rel_tol * max(abs(a), abs(b))
