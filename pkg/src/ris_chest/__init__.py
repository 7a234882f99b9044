"""ris-chest: Monte-Carlo toolkit for RIS channel estimation with a few
active elements.

Synthesizes spatially correlated Rayleigh UE-RIS channels, simulates pilot
training at the active elements, and evaluates a correlation-weighted
linear-combination channel estimator against random-coefficient and OMP
baselines (rank-CDF and NMSE experiments).
"""

__version__ = "0.1.0"

from .analysis import NmseRecord, RankSample, nmse, numerical_rank, rank_cdf_experiment
from .channel import (
    ChannelMatrix,
    PathLossParams,
    extract_rows,
    large_scale_coefficient,
    sample_channels,
)
from .estimators import (
    ActiveSet,
    EstimatorParams,
    SelectionPlan,
    build_upa_dictionary,
    estimate_omp_baseline,
    estimate_proposed,
    estimate_random_baseline,
    plan_selection,
    select_active,
)
from .geometry import (
    CorrelationModel,
    NotPositiveSemidefiniteError,
    RisGeometry,
    build_correlation,
    build_covariance,
    element_position,
    matrix_sqrt_psd,
)
from .harness import (
    CampaignResult,
    ExperimentConfig,
    run_experiment,
    run_nmse_vs_active,
    run_nmse_vs_power,
    run_rank_cdf,
    write_csv,
)
from .training import (
    PilotMatrix,
    TrainingConfig,
    dbm_to_watts,
    generate_pilots,
    ls_estimate,
    simulate_reception,
)
