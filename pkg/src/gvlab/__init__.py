"""Gilbert-Varshamov numerics, random code ensembles, cumulative enumerators and threshold experiments."""

from __future__ import annotations

__version__ = "0.1.0"

from .codes import (
    CodeSample,
    EnumeratorProfile,
    code_rate,
    cumulative_enumerator,
    growth_rate,
    hamming_distance,
    hamming_weight,
    min_distance,
    pairwise_distance_distribution,
    relative_distance,
    weight_distribution,
)
from .field import FieldSpec, field_make, mat_apply, mat_rank
from .numerics import (
    Params,
    ball_volume_exact,
    beta_asymptotic,
    beta_exact,
    classify_region,
    entropy_q,
    gv_bound,
    gv_distance,
    kl_divergence,
    scaled_beta_limit,
)

__all__ = [
    "CodeSample", "EnumeratorProfile", "FieldSpec", "Params",
    "ball_volume_exact", "beta_asymptotic", "beta_exact", "classify_region", "code_rate",
    "cumulative_enumerator", "entropy_q", "field_make", "growth_rate", "gv_bound", "gv_distance",
    "hamming_distance", "hamming_weight", "kl_divergence", "mat_apply", "mat_rank", "min_distance",
    "pairwise_distance_distribution", "relative_distance", "scaled_beta_limit", "weight_distribution",
]
