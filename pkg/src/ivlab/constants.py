"""Physical constants and the thermal energy scale.

All model code computes in SI units (J, A, V, K). The defining constants use
the CODATA-2018 exact values; everything else (quantum resistance,
conductance quantum, hbar) is derived from them here and nowhere else, so
every downstream number is reproducible to the last bit.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

_E = 1.602176634e-19  # elementary charge, C (exact)
_H = 6.62607015e-34  # Planck constant, J s (exact)
_K_B = 1.380649e-23  # Boltzmann constant, J/K (exact)

# Euler's constant; it sits in an exponent of the coupling renormalization,
# so it is stored to full double precision.
_C_0 = 0.57721566490153286


@dataclass(frozen=True)
class PhysicalConstants:
    """Defining SI constants plus the derived circuit constants.

    Attributes
    ----------
    e : float
        Elementary charge (C).
    h : float
        Planck constant (J s).
    hbar : float
        Reduced Planck constant (J s).
    k_B : float
        Boltzmann constant (J/K).
    R_Q : float
        Cooper-pair resistance quantum h/(4 e^2) (Ohm).
    G_0 : float
        Conductance quantum 1/(2 R_Q) (S).
    c_0 : float
        Euler's constant (dimensionless).
    """

    e: float = _E
    h: float = _H
    k_B: float = _K_B
    hbar: float = _H / (2.0 * math.pi)
    R_Q: float = _H / (4.0 * _E * _E)
    G_0: float = 2.0 * _E * _E / _H
    c_0: float = _C_0


_CONSTANTS = PhysicalConstants()


def constants() -> PhysicalConstants:
    """Return the shared immutable constants record."""
    return _CONSTANTS


def thermal_beta(T: float) -> float:
    """Inverse thermal energy 1/(k_B T) in 1/J.

    Parameters
    ----------
    T : float
        Temperature in K, strictly positive.

    Raises
    ------
    DomainError
        If T is not a positive finite number.
    """
    if not (isinstance(T, (int, float)) and math.isfinite(T) and T > 0):
        raise DomainError(f"temperature must be positive and finite, got {T!r}")
    return 1.0 / (_K_B * T)
