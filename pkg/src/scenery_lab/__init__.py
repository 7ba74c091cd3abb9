"""scenery-lab: random walks in random scenery, desk-scale limit-law checks.

Simulates lattice walks and their scenery functionals, computes exact
small-n laws by enumeration, evaluates strictly stable densities by Fourier
inversion, and estimates the limiting local-law constants for both the
straight and the randomly-oriented lattice models.
"""

from .errors import (
    BridgeRejectionError,
    BudgetExceededError,
    InsufficientPointsError,
    InvalidParameterError,
    NotLatticeError,
    QuadratureError,
    SceneryLabError,
    TruncationMassError,
    UnknownDistributionError,
    UnsupportedSkewError,
)
from .estimators import (
    Exponents,
    LimitConstants,
    ScalingSeries,
    estimate_C,
    estimate_D,
    estimate_interval_prob,
    estimate_point_prob,
    fit_series,
    slope_fit,
)
from .exact import (
    IntegerPmf,
    InversionReport,
    exact_cf,
    exact_pmf,
    exact_range_pmf,
    inversion_check,
)
from .montecarlo import MCEstimate, wilson_interval
from .oriented import (
    OrientedParams,
    OrientedSample,
    compute_d0_d1,
    estimate_E,
    estimate_return_prob,
    simulate_direct,
    simulate_repr,
)
from .presets import Preset, get_preset
from .rng import RngStream
from .scenery import (
    RwrsSample,
    SceneryModel,
    evaluate_Z,
    lattice_span,
    scenery_model,
    support_condition,
)
from .stable import (
    DistributionSpec,
    StableParams,
    catalog,
    stable_cf,
    stable_density,
    stable_sample,
)
from .walks import (
    LocalTimeProfile,
    WalkStats,
    estimate_p0,
    ntilde_moment,
    profile_from_steps,
    simulate_bridge,
    simulate_path,
    stats,
)

__version__ = "0.1.0"
