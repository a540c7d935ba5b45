"""Quantum-Smoluchowski phase-diffusion model of a small Josephson junction.

Closed-form IV characteristic for overdamped quantum phase diffusion in a
low-impedance ohmic environment: quantum fluctuations renormalize the
Josephson coupling E_J down to E_J*, and the supercurrent branch becomes

    I(V) = (e rho beta pi / hbar) * E_J*^2 * (beta e V) / ((beta e V)^2 + (pi rho)^2)

with rho = R_DC/R_Q and beta = 1/(k_B T). The same algebra with the bare
coupling is the classical small-coupling (Lorentzian) limit, provided by the
thermal-diffusion module for comparison.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import constants, thermal_beta
from .errors import DomainError

_TWO_PI_SQ = 2.0 * math.pi * math.pi


def _require_positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class JunctionParams:
    """Junction energy scales and temperature.

    Parameters
    ----------
    E_J : float
        Josephson coupling energy (J).
    E_C : float
        Charging energy (J). Treated as an opaque scale; no charge
        convention is imposed.
    T : float
        Temperature (K).
    """

    E_J: float
    E_C: float
    T: float

    def __post_init__(self):
        _require_positive("E_J", self.E_J)
        _require_positive("E_C", self.E_C)
        _require_positive("T", self.T)

    @property
    def beta(self) -> float:
        return thermal_beta(self.T)


@dataclass(frozen=True)
class EnvironmentParams:
    """DC environment impedance.

    rho = R_DC/R_Q must stay below 1 for the model to apply; values at or
    above 0.2 are allowed but flagged, since the theory assumes rho << 1.
    """

    R_DC: float

    def __post_init__(self):
        _require_positive("R_DC", self.R_DC)

    @property
    def rho(self) -> float:
        return self.R_DC / constants().R_Q

    @property
    def low_impedance_warning(self) -> bool:
        return self.rho >= 0.2


@dataclass(frozen=True)
class RegimeReport:
    """Dimensionless friction/temperature diagnostics and the regime label.

    classification is one of "qSM", "cSM", "crossover", "invalid".
    """

    eta: float
    theta: float
    ratio: float
    classification: str


@dataclass(frozen=True)
class IVCurve:
    """Ordered voltage-current samples with a provenance label."""

    V: np.ndarray
    I: np.ndarray
    meta: str = ""

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        I = np.asarray(self.I, dtype=float)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "I", I)
        if V.ndim != 1 or V.shape != I.shape:
            raise DomainError("curve needs matching 1-d V and I arrays")
        if V.size and not (np.all(np.isfinite(V)) and np.all(np.isfinite(I))):
            raise DomainError("curve contains non-finite values")
        if V.size > 1 and not np.all(np.diff(V) > 0):
            raise DomainError("curve voltages must be strictly increasing")


def _check_rho(rho):
    if not (isinstance(rho, (int, float)) and math.isfinite(rho) and 0.0 < rho < 1.0):
        raise DomainError(f"rho must lie in (0, 1), got {rho!r}")


def dimensionless_rho(R_DC: float) -> float:
    """R_DC divided by the Cooper-pair resistance quantum h/(4 e^2)."""
    _require_positive("R_DC", R_DC)
    return R_DC / constants().R_Q


def renormalized_ej(p: JunctionParams, rho: float) -> float:
    """Fluctuation-renormalized Josephson coupling E_J* (J).

    E_J* = E_J * rho**rho * (beta E_C / 2 pi^2)**(-rho) * exp(-rho * c_0)

    with c_0 Euler's constant. E_J* < E_J whenever the thermal charging
    scale beta E_C/(2 pi^2 rho) exceeds exp(-c_0); the classical limit
    rho -> 0 restores the bare coupling.
    """
    _check_rho(rho)
    c = constants()
    scale = p.beta * p.E_C / _TWO_PI_SQ
    return p.E_J * math.exp(rho * (math.log(rho) - math.log(scale) - c.c_0))


def cooper_pair_current_qsm(V, p: JunctionParams, rho: float):
    """Supercurrent branch of the renormalized phase-diffusion model (A).

    Odd in V; vanishes at V = 0; peaks at V = pi rho/(beta e). Accepts a
    scalar or an array of voltages.
    """
    _check_rho(rho)
    c = constants()
    e_star = renormalized_ej(p, rho)
    beta = p.beta
    y = beta * c.e * np.asarray(V, dtype=float)
    amp = c.e * rho * beta * math.pi / c.hbar * e_star * e_star
    out = amp * y / (y * y + (math.pi * rho) ** 2)
    return out if out.ndim else float(out)


def qsm_peak(p: JunctionParams, rho: float):
    """Closed-form peak of the renormalized model: (V_peak, I_peak).

    V_peak = pi rho / (beta e); I_peak = e beta E_J*^2 / (2 hbar).
    """
    _check_rho(rho)
    c = constants()
    e_star = renormalized_ej(p, rho)
    beta = p.beta
    v_peak = math.pi * rho / (beta * c.e)
    i_peak = c.e * beta * e_star * e_star / (2.0 * c.hbar)
    return v_peak, i_peak


def critical_current(E_J: float) -> float:
    """Ideal Josephson critical current 2 e E_J / hbar (A)."""
    _require_positive("E_J", E_J)
    c = constants()
    return 2.0 * c.e * E_J / c.hbar


def ej_from_conductance(delta_eff: float, g_ratio: float) -> float:
    """Josephson coupling from the normal-state conductance (J).

    Zero-temperature tunnel-junction relation E_J = (delta_eff / 4) * G_N/G_0
    with delta_eff the effective superconducting gap energy. g_ratio = 0 is
    allowed (no coupling); negative values are rejected.
    """
    _require_positive("delta_eff", delta_eff)
    if not (isinstance(g_ratio, (int, float)) and math.isfinite(g_ratio) and g_ratio >= 0):
        raise DomainError(f"g_ratio must be non-negative and finite, got {g_ratio!r}")
    return 0.25 * delta_eff * g_ratio


def classify_regime(p: JunctionParams, rho: float) -> RegimeReport:
    """Place a junction on the friction/temperature regime diagram.

    eta = E_C/(2 pi^2 rho^2 E_J), theta = beta E_C/(2 pi^2 rho). The quantum
    diffusion regime needs eta/theta > 4 together with theta > 10; theta <= 1
    is the classical regime; anything else is the crossover. rho >= 1 is
    outside the model and labeled "invalid" (eta/theta still reported).
    """
    if not (isinstance(rho, (int, float)) and math.isfinite(rho) and rho > 0):
        raise DomainError(f"rho must be positive and finite, got {rho!r}")
    beta = p.beta
    eta = p.E_C / (_TWO_PI_SQ * rho * rho * p.E_J)
    theta = beta * p.E_C / (_TWO_PI_SQ * rho)
    ratio = eta / theta
    if rho >= 1.0:
        label = "invalid"
    elif ratio > 4.0 and theta > 10.0:
        label = "qSM"
    elif theta <= 1.0:
        label = "cSM"
    else:
        label = "crossover"
    return RegimeReport(eta=eta, theta=theta, ratio=ratio, classification=label)


def default_voltage_grid() -> np.ndarray:
    """Symmetric +-30 uV grid with 2001 points, the low-voltage window.

    Built from integer multiples of the step so the midpoint is exactly
    0.0 and the grid is exactly antisymmetric; linspace would leave an
    O(1e-21 V) residue at the centre, which breaks strict V > 0 masks.
    """
    return np.arange(-1000, 1001) * (30e-6 / 1000.0)
