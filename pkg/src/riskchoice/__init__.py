"""Rationality tests for repeated choice under risk.

Exact stochastic dominance, deterministic and stochastic choice axioms,
Houtman-Maks scoring over linear and weak orders, expected-utility
classification with an exact LP oracle, synthetic agents and the
significance tests used to compare rounds.
"""

from .axioms import DeferralPolicy, FosdMode, RiskAttitude
from .choices import (
    DEFER,
    ChoiceProbabilities,
    ChoiceRecord,
    Correspondence,
    RoundSlice,
    estimate_probabilities,
    load_choices,
    merge_correspondence,
    slice_rounds,
)
from .design import ExperimentDesign, Taxonomy, builtin_design, load_design, load_design_dir
from .eu import classify_eum, eu_rationalizable
from .hm import HmMode, HmPolicy, hm_score
from .lottery import (
    DominanceKind,
    Lottery,
    cdf_area_at,
    cdf_at,
    check_fosd,
    check_sosd,
    expected_value,
    mix,
    near_dominance_report,
    overlapping_range,
)
from .orders import enumerate_linear_orders, enumerate_weak_orders, ordered_bell
from .stats import fisher_exact_2x2, mann_whitney_u, spearman_rho

__version__ = "0.1.0"

__all__ = [
    "DEFER", "ChoiceProbabilities", "ChoiceRecord", "Correspondence", "DeferralPolicy",
    "DominanceKind", "ExperimentDesign", "FosdMode", "HmMode", "HmPolicy", "Lottery",
    "RiskAttitude", "RoundSlice", "Taxonomy", "builtin_design", "cdf_area_at", "cdf_at",
    "check_fosd", "check_sosd", "classify_eum", "enumerate_linear_orders",
    "enumerate_weak_orders", "estimate_probabilities", "eu_rationalizable", "expected_value",
    "fisher_exact_2x2", "hm_score", "load_choices", "load_design", "load_design_dir",
    "mann_whitney_u", "merge_correspondence", "mix", "near_dominance_report", "ordered_bell",
    "overlapping_range", "slice_rounds", "spearman_rho",
]
