"""Shared fixtures: the reference junction parameter chain used across tests.

The chain starts from laboratory-style inputs (T = 15 mK, R_DC = 377 Ohm,
effective gap 540 ueV, conductance ratio 0.073) and derives every energy
scale through the package's own converters, with the charging energy pinned
through the thermal charging scale theta = beta E_C/(2 pi^2 rho) = 122.
"""

import math
from dataclasses import dataclass

import pytest

from ivlab import (
    JunctionParams,
    constants,
    dimensionless_rho,
    ej_from_conductance,
    thermal_beta,
)


@dataclass(frozen=True)
class Chain:
    T: float
    R_DC: float
    rho: float
    beta: float
    theta: float
    E_C: float
    E_J: float
    E_J_round: float
    params: JunctionParams
    params_round: JunctionParams


@pytest.fixture(scope="session")
def chain() -> Chain:
    T = 0.015
    R_DC = 377.0
    rho = dimensionless_rho(R_DC)
    beta = thermal_beta(T)
    theta = 122.0
    E_C = theta * 2.0 * math.pi**2 * rho / beta
    e = constants().e
    E_J = ej_from_conductance(540e-6 * e, 0.073)
    # rounded coupling used by the headline suppression checks
    E_J_round = 9.86e-6 * e
    return Chain(
        T=T,
        R_DC=R_DC,
        rho=rho,
        beta=beta,
        theta=theta,
        E_C=E_C,
        E_J=E_J,
        E_J_round=E_J_round,
        params=JunctionParams(E_J=E_J, E_C=E_C, T=T),
        params_round=JunctionParams(E_J=E_J_round, E_C=E_C, T=T),
    )
