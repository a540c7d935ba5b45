"""ivlab: IV-curve toolkit for overdamped Josephson phase diffusion.

Analytic quantum and classical phase-diffusion IV models, capacitive
Gaussian broadening, a stochastic washboard simulator with an exact
stationary-diffusion cross-check, switching-current analysis and fitting,
all behind a JSON service and a file-based CLI.
"""

__version__ = "0.1.0"

from .analysis import (
    DeviationReport,
    FitResult,
    MeasuredIVC,
    ScanRow,
    SwitchingReport,
    deviation_qsm,
    extract_switching,
    fit_model,
    fit_powerlaw,
    regime_scan,
)
from .bessel import bessel_i_complex_order, bessel_i_ratio_next
from .broadening import BroadeningSpec, convolve_model, gaussian_density, sigma_capacitive
from .constants import PhysicalConstants, constants, thermal_beta
from .errors import (
    ConfigError,
    DomainError,
    ExtractionError,
    FitError,
    IvlabError,
    NumericError,
    UnitError,
)
from .iz import IZParams, iz_current, iz_lorentzian
from .langevin import (
    PhaseState,
    SimConfig,
    SimResult,
    fp_mean_velocity,
    junction_iv_from_sim,
    simulate,
)
from .qsm import (
    EnvironmentParams,
    IVCurve,
    JunctionParams,
    RegimeReport,
    classify_regime,
    cooper_pair_current_qsm,
    critical_current,
    default_voltage_grid,
    dimensionless_rho,
    ej_from_conductance,
    qsm_peak,
    renormalized_ej,
)
from .units import Quantity, convert, parse_quantity, si_value

__all__ = [
    "__version__",
    "BroadeningSpec", "ConfigError", "DeviationReport", "DomainError",
    "EnvironmentParams", "ExtractionError", "FitError", "FitResult",
    "IVCurve", "IZParams", "IvlabError", "JunctionParams", "MeasuredIVC",
    "NumericError", "PhaseState", "PhysicalConstants", "Quantity",
    "RegimeReport", "ScanRow", "SimConfig", "SimResult", "SwitchingReport",
    "UnitError",
    "bessel_i_complex_order", "bessel_i_ratio_next", "classify_regime",
    "constants", "convert", "convolve_model", "cooper_pair_current_qsm",
    "critical_current", "default_voltage_grid", "deviation_qsm",
    "dimensionless_rho", "ej_from_conductance", "extract_switching",
    "fit_model", "fit_powerlaw", "fp_mean_velocity", "gaussian_density",
    "iz_current", "iz_lorentzian", "junction_iv_from_sim", "parse_quantity",
    "qsm_peak", "regime_scan", "renormalized_ej", "si_value",
    "sigma_capacitive", "simulate", "thermal_beta",
]
