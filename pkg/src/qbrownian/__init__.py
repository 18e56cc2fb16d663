"""Time-dependent coefficients, Gaussian moments and positivity witnesses
for a damped quantum oscillator coupled to an Ohmic bath with a Drude
cutoff."""

from .errors import (
    ConfigError,
    DomainError,
    FactorizationError,
    IntegrationError,
    InternalConsistencyError,
    NoViolationError,
    NotDecomposableError,
    QBrownianError,
    RegimeError,
    ScopeError,
)
from .params import (
    DerivedConstants,
    OccupationModel,
    PhysicalParams,
    coupling_kappa,
    derived_constants,
    kernel_denominator,
    occupation_factor,
)
from .kernel import (
    ModeDecomposition,
    KernelValue,
    dissipation_R2,
    kernel_A,
    kernel_derivatives,
    kernel_value,
    mode_decomposition,
)
from .spectral import (
    CoefficientSet,
    InnerFourier,
    coefficient_X,
    coefficient_Xdot,
    coefficient_Y,
    coefficients,
    fluctuation_prefactor,
    inner_fourier,
    spectral_weight,
)
from .gaussian import (
    EvolvedMoments,
    GaussianState,
    MapParams,
    associate_theorem_params,
    propagate_moments,
    quadratic_form_I,
)
from .positivity import (
    ConditionMargin,
    CorollaryReport,
    TheoremReport,
    UncertaintyVerdict,
    associate_corollary_params,
    corollary_check,
    lindblad_decompose,
    theorem_check,
    uncertainty_violation,
    witness,
)
from .asymptotics import (
    AsymptoticSet,
    fit_log_leading,
    fit_loglog_exponent,
    gap31,
    hight_leading,
    leading_set,
    uniform_leading,
)
from .scenario import (
    ScanPoint,
    ScenarioResult,
    build_chi,
    default_grid,
    find_violation_time,
    run_scenario,
)
from .config import RunConfig, parse_config, read_config_file, resolve_grid

__version__ = "0.1.0"
