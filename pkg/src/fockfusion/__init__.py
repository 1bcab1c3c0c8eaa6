"""Bootstrapped preparation of large photon-number Fock states.

Fock states are grown by iteratively fusing smaller ones on beamsplitters
and post-selecting on the detected photon number. The package computes the
exact fusion outcome probabilities, optimizes beamsplitter reflectivities
for several growth objectives, simulates the growth protocol under four
fusion strategies (with and without state recycling), and compares the
resulting preparation rates against SPDC, single-shot, and doubling
baselines.
"""

from .analytics import (
    PowerLawFit,
    fit_power_law,
    improvement_factor,
    spdc_crossover,
)
from .baselines import (
    LIMITED_RECYCLING_EXPONENT,
    DoublingEstimate,
    LadderEstimate,
    doubling_estimate,
    doubling_expected_fusions,
    doubling_expected_singles,
    limited_recycling_expected_singles,
    limited_recycling_scaling,
    limited_recycling_success,
    single_shot_pbunch,
    single_shot_rate,
    spdc_lambda_sq,
    spdc_pprep,
)
from .engine import JIT_ENABLED, derive_seed
from .errors import CapacityError, DomainError, FockFusionError, PrecisionError
from .manifest import RunManifest, build_manifest, manifest_digest, write_csv
from .optimize import (
    NONRECYCLED_ZERO_LOSS,
    RECYCLED_GROW,
    EtaObjective,
    EtaTableEntry,
    build_table,
    frugal_above,
    frugal_below,
    objective_value,
    optimize_eta,
)
from .oracle import (
    beamsplitter_unitary,
    convolution_distribution,
    oracle_distribution,
)
from .probabilities import (
    DEFAULT_POLICY,
    PrecisionPolicy,
    SubtractionDistribution,
    binomial,
    log_factorial,
    p_grow,
    p_sub,
    p_sub_equal_balanced,
    p_sub_exact,
    subtraction_distribution,
)
from .simulate import (
    STRATEGIES,
    Buckets,
    RateEstimate,
    ReductionTrace,
    SimConfig,
    StepOutcome,
    eta_table_for,
    fusion_step,
    rate_curve,
    reduce_state,
    run,
    select_pair,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "FockFusionError",
    "DomainError",
    "PrecisionError",
    "CapacityError",
    # probabilities
    "PrecisionPolicy",
    "DEFAULT_POLICY",
    "SubtractionDistribution",
    "p_sub",
    "p_sub_exact",
    "subtraction_distribution",
    "p_grow",
    "p_sub_equal_balanced",
    "binomial",
    "log_factorial",
    # oracle
    "beamsplitter_unitary",
    "oracle_distribution",
    "convolution_distribution",
    # optimize
    "EtaObjective",
    "EtaTableEntry",
    "RECYCLED_GROW",
    "NONRECYCLED_ZERO_LOSS",
    "frugal_above",
    "frugal_below",
    "objective_value",
    "optimize_eta",
    "build_table",
    # engine
    "JIT_ENABLED",
    "derive_seed",
    # simulate
    "STRATEGIES",
    "Buckets",
    "SimConfig",
    "StepOutcome",
    "RateEstimate",
    "ReductionTrace",
    "select_pair",
    "fusion_step",
    "eta_table_for",
    "run",
    "rate_curve",
    "reduce_state",
    # baselines
    "LIMITED_RECYCLING_EXPONENT",
    "DoublingEstimate",
    "LadderEstimate",
    "spdc_lambda_sq",
    "spdc_pprep",
    "single_shot_pbunch",
    "single_shot_rate",
    "doubling_expected_singles",
    "doubling_expected_fusions",
    "doubling_estimate",
    "limited_recycling_success",
    "limited_recycling_scaling",
    "limited_recycling_expected_singles",
    # analytics
    "PowerLawFit",
    "fit_power_law",
    "spdc_crossover",
    "improvement_factor",
    # manifest
    "RunManifest",
    "build_manifest",
    "manifest_digest",
    "write_csv",
]
