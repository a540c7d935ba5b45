"""Request models for the JSON service.

All quantities are plain SI floats (J, K, V, A, Ohm); unit handling happens
in the config layer before a request is built. Unknown fields are rejected
so client typos cannot silently change a run. Data arrives inline (voltage
and current arrays, conductance lists) rather than as server-side paths, so
a request is self-contained and its echo reproduces the run anywhere.
"""

import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

_MAX_POINTS = 2_000_001


class _Request(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CurveRequest(_Request):
    """Analytic IV curve evaluation, optionally Gaussian-broadened."""

    model: Literal["qsm", "iz", "lorentzian"] = "qsm"
    E_J: Optional[float] = Field(default=None, gt=0)
    delta_eff: Optional[float] = Field(default=None, gt=0)
    g_ratio: Optional[float] = Field(default=None, ge=0)
    E_C: Optional[float] = Field(default=None, gt=0)
    T: float = Field(gt=0)
    R_DC: float = Field(gt=0)
    V_min: float = -30e-6
    V_max: float = 30e-6
    points: int = Field(default=2001, ge=2, le=_MAX_POINTS)
    broadening: bool = False
    sigma: Optional[float] = Field(default=None, ge=0)
    half_range: Optional[float] = None
    quad_points: Optional[int] = None


class RegimeRequest(_Request):
    """Regime classification: one junction, or a conductance sweep."""

    E_J: Optional[float] = Field(default=None, gt=0)
    delta_eff: Optional[float] = Field(default=None, gt=0)
    g_ratio: Optional[float] = Field(default=None, ge=0)
    E_C: float = Field(gt=0)
    T: float = Field(gt=0)
    R_DC: float = Field(gt=0)
    g_ratios: Optional[list[float]] = None


class ScanRequest(_Request):
    """Regime table over a conductance sweep at fixed gap, E_C, T, R_DC."""

    delta_eff: float = Field(gt=0)
    E_C: float = Field(gt=0)
    T: float = Field(gt=0)
    R_DC: float = Field(gt=0)
    g_ratios: list[float] = Field(min_length=1)


class SimulateRequest(_Request):
    """Stochastic washboard runs over a bias grid.

    Noise strength comes either from g directly (the JSON-safe string
    "inf" switches the noise off) or from E_J and T as g = E_J/(k_B T).
    The junction critical current I_0 is derived from E_J when available
    and must be given explicitly otherwise.
    """

    g: Optional[Union[Literal["inf"], float]] = None
    E_J: Optional[float] = Field(default=None, gt=0)
    T: Optional[float] = Field(default=None, gt=0)
    R_DC: float = Field(gt=0)
    I_0: Optional[float] = Field(default=None, gt=0)
    x_values: list[float] = Field(min_length=1)
    dt: Optional[float] = None
    n_steps: Optional[int] = None
    burn_in: Optional[int] = None
    n_traj: Optional[int] = None
    seed: Optional[int] = None
    with_oracle: bool = False

    @field_validator("g")
    @classmethod
    def _finite_or_inf_word(cls, v):
        if isinstance(v, float) and not math.isfinite(v):
            raise ValueError("use the string 'inf' to switch the noise off")
        return v


class FitRequest(_Request):
    """Model fit against inline measured data."""

    V_V: list[float] = Field(min_length=1)
    I_A: list[float] = Field(min_length=1)
    g_ratio: float
    label: str = ""
    model: Literal["qsm", "iz", "lorentzian"] = "qsm"
    broadened: bool = False
    free: list[str] = Field(min_length=1)
    guesses: dict[str, float] = Field(default_factory=dict)
    E_J: Optional[float] = Field(default=None, gt=0)
    E_C: Optional[float] = Field(default=None, gt=0)
    T: Optional[float] = Field(default=None, gt=0)
    rho: Optional[float] = None
    R_DC: Optional[float] = Field(default=None, gt=0)
    window_lo: float = 0.0
    window_hi: float = 30e-6


class ExtractRequest(_Request):
    """Switching-current extraction from inline measured data."""

    V_V: list[float] = Field(min_length=1)
    I_A: list[float] = Field(min_length=1)
    g_ratio: float
    label: str = ""
    window_lo: float = 0.0
    window_hi: float = 30e-6
    I_model_max: Optional[float] = Field(default=None, gt=0)


REQUEST_MODELS = {
    "curve": CurveRequest,
    "regime": RegimeRequest,
    "simulate": SimulateRequest,
    "fit": FitRequest,
    "extract": ExtractRequest,
    "scan": ScanRequest,
}
