"""Generalized Birnbaum-Saunders fatigue life under heavy-tailed damage.

Symmetric alpha-stable laws, the stable-driven Birnbaum-Saunders life
distribution, tail-index and scale estimation from damage data, Mallows
distances and a first-passage Monte Carlo engine.
"""

from .errors import (
    BandwidthError,
    BracketError,
    DegenerateLawError,
    DomainError,
    GbsError,
    InputError,
    QuadratureError,
    RunawayError,
    SampleSizeError,
    TailPositivityError,
)
from .estimation import (
    DamageSeries,
    EstimationConfig,
    EstimationReport,
    estimate_sigma,
    fit,
    hill_alpha,
)
from .gbs import (
    ClassicalBsParams,
    GbsParams,
    classical_bs_cdf,
    classical_bs_pdf,
    classical_bs_quantile,
    gbs_cdf,
    gbs_pdf,
    gbs_quantile,
    xi_alpha,
    xi_alpha_inv,
)
from .mallows import MallowsResult, mallows_empirical, mallows_to_quantile, mallows_to_stable
from .simulation import (
    DamageModel,
    FirstPassageReport,
    calibrate_gbs,
    damage_sample,
    first_passage_counts,
    ks_distance,
    simulate_first_passage,
    sum_law_check,
)
from .stable import (
    QuadratureConfig,
    StableParams,
    stable_cdf,
    stable_cf,
    stable_pdf,
    stable_quantile,
    stable_sample,
    stable_scale_shift_law,
    stable_sf,
)

__version__ = "0.1.0"
