"""Beam training for single-RF-chain mmWave receivers.

Uniform exhaustive search versus successive-rejects allocation, with the
exact matched-filter statistic model and asymptotic error exponents.
"""

from .analysis import (
    GapProfile,
    HardnessSummary,
    adaptive_dominates,
    exponent_adaptive_bound,
    exponent_exhaustive,
    exponent_pairwise,
    gap_profile,
    hardness,
    logbar,
)
from .array_channel import (
    BeamCodebook,
    ChannelVector,
    GainProfile,
    SteeringVector,
    channel_vector,
    dft_codebook,
    effective_gains,
    steering_vector,
)
from .errors import (
    BeamTrainingError,
    DegenerateProfileError,
    InsufficientBudgetError,
    InsufficientDataError,
    InvalidArgumentError,
    InvalidStateError,
)
from .montecarlo import (
    MisalignmentEstimate,
    Scenario,
    SlopeFit,
    SweepResult,
    estimate_misalignment,
    fit_exponent,
    sweep,
)
from .statistic import (
    AccumulatorBank,
    BeamAccumulator,
    NoiseModel,
    TestStatistic,
    absorb_symbols,
    noncentrality,
    normalized_gain,
    sample_ncx2_2dof,
    statistic,
)
from .training import (
    PhaseSchedule,
    TrainingEnvironment,
    TrainingResult,
    phase_schedule,
    run_adaptive,
    run_exhaustive,
)

__version__ = "0.1.0"
