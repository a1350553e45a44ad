"""scforge: QC-SC-LDPC design via Moser-Tardos resampling, with exact bounds and oracles."""

from __future__ import annotations

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    MtEntropyBounds,
    SupportBounds,
    activation_probability,
    activation_probability_closed_form,
    asymmetric_lll_bound,
    bound_comparison_check,
    clique_lll_bound,
    cluster_expansion_bound,
    corollary1_bound,
    count_lower_bound,
    default_clique_weights,
    event_probabilities,
    independence_polynomial,
    mt_entropy_lower_bound,
    mt_support_lower_bound,
    noneq_count_lower_bound,
    penalty_terms,
)
from .csp import CspInstance, build_csp_instance
from .entropy import alpha_factor, collision_entropy_estimate, h_alpha_product, renyi_entropy_exact
from .equivalence import CanonicalKey, are_equivalent, canonical_assignment, canonical_form, orbit, permute
from .errors import *  # noqa: F401,F403
from .model import (
    Assignment,
    BinaryMatrix,
    CodeParams,
    build_coupled_protograph,
    component_matrices,
    export_matrix,
    import_matrix,
    lift_to_parity_check,
    validate_params,
)
from .mt import MtBatchStats, MtRunStats, mt_batch_stats, run_artifact, run_many, run_mt
from .oracle import (
    OracleReport,
    check_bounds,
    empirical_support_and_entropy,
    exhaustive_count,
    exhaustive_noneq_count,
    survival_product_check,
)
from .structures import (
    CycleCandidate,
    check_absorbing_set,
    count_active_structures,
    cycle_active,
    enumerate_cycle_candidates,
    girth,
)
