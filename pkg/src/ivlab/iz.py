"""Classical thermal phase-diffusion IV characteristic.

The stationary solution for an overdamped junction with thermal noise alone
(the Ivanchenko-Zil'berman result) expresses the supercurrent through
modified Bessel functions of complex order:

    I(V) = I_0 * Im[ I_(1 - i zeta)(u) / I_(-i zeta)(u) ]

with u = beta E_J_eff, zeta = beta e V / (pi rho) and I_0 = 2 e E_J_eff/hbar.
Its small-coupling limit (u -> 0) is the Lorentzian-shaped curve
iz_lorentzian, algebraically identical to the quantum model's formula with
the bare coupling in place of the renormalized one.

This Bessel ratio is the exact stationary drift solution of the overdamped
washboard Langevin problem: with reduced bias x = zeta/u it satisfies
x - v(u, x) = Im[I_(1 - i u x)(u) / I_(-i u x)(u)] where v is the reduced
mean voltage computed by the Fokker-Planck quadrature (see langevin
module); V here therefore plays the role of the bias R*I_B, the voltage
dropped across the series junction + resistor combination.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bessel import scaled_series_m_array
from .constants import constants, thermal_beta
from .errors import DomainError, NumericError
from .qsm import _check_rho, _require_positive


@dataclass(frozen=True)
class IZParams:
    """Effective coupling, temperature and dimensionless impedance."""

    E_J_eff: float
    T: float
    rho: float

    def __post_init__(self):
        _require_positive("E_J_eff", self.E_J_eff)
        _require_positive("T", self.T)
        _check_rho(self.rho)

    @property
    def beta(self) -> float:
        return thermal_beta(self.T)


def bessel_ratio_im(u: float, zeta) -> np.ndarray:
    """Im[I_(1 - i zeta)(u) / I_(-i zeta)(u)], vectorized over zeta.

    Both orders share the scaled-series form, so the ratio is evaluated
    without ever forming the overflowing I_nu values themselves.
    """
    if not (math.isfinite(u) and u > 0):
        raise DomainError(f"u must be positive and finite, got {u!r}")
    zeta = np.asarray(zeta, dtype=float)
    nu = -1j * zeta
    denom = scaled_series_m_array(nu, u)
    bad = np.abs(denom) < 1e-250
    if np.any(bad):
        raise NumericError(
            f"scaled Bessel series vanished at zeta={zeta[bad].flat[0]!r}, u={u}"
        )
    ratio = (0.5 * u / (nu + 1.0)) * scaled_series_m_array(nu + 1.0, u) / denom
    return ratio.imag


def iz_current(V, p: IZParams):
    """Thermal phase-diffusion current (A) at voltage V; odd in V."""
    c = constants()
    beta = p.beta
    u = beta * p.E_J_eff
    v = np.asarray(V, dtype=float)
    zeta = beta * c.e * v / (math.pi * p.rho)
    i0 = 2.0 * c.e * p.E_J_eff / c.hbar
    out = i0 * bessel_ratio_im(u, zeta)
    return out if out.ndim else float(out)


def iz_lorentzian(V, p: IZParams):
    """Small-coupling limit of the thermal phase-diffusion current (A).

    Same algebra as the renormalized model's closed form but with the
    caller-supplied coupling as is (no renormalization).
    """
    c = constants()
    beta = p.beta
    y = beta * c.e * np.asarray(V, dtype=float)
    amp = c.e * p.rho * beta * math.pi / c.hbar * p.E_J_eff * p.E_J_eff
    out = amp * y / (y * y + (math.pi * p.rho) ** 2)
    return out if out.ndim else float(out)
