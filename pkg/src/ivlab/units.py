"""Unit-tagged quantities for the ingestion and report boundary.

Model code never sees these; it works in SI. Config files and CSV headers
carry values in the closed unit list below ("u" means micro, case
sensitive), and this module converts them to SI floats on the way in and
back on the way out.
"""

import math
from dataclasses import dataclass

from .constants import constants
from .errors import DomainError, UnitError

#: base unit string -> (dimension, factor to SI)
_BASE_UNITS = {
    "V": ("V", 1.0),
    "A": ("A", 1.0),
    "Ohm": ("Ohm", 1.0),
    "S": ("S", 1.0),
    "J": ("J", 1.0),
    "eV": ("J", constants().e),
    "K": ("K", 1.0),
    "F": ("F", 1.0),
    "": ("dimensionless", 1.0),
}

_PREFIXES = {
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "M": 1e6,
}

#: unit strings accepted in config files and CSV headers
ACCEPTED_UNITS = (
    "V", "mV", "uV", "A", "nA", "pA", "Ohm", "K", "mK",
    "eV", "ueV", "J", "fF", "S",
)


def _resolve(unit: str):
    """Return (dimension, factor to SI) for a unit string."""
    if unit in _BASE_UNITS:
        return _BASE_UNITS[unit]
    if len(unit) >= 2 and unit[0] in _PREFIXES and unit[1:] in _BASE_UNITS:
        dim, factor = _BASE_UNITS[unit[1:]]
        if dim == "dimensionless":
            raise UnitError(f"unknown unit {unit!r}")
        return dim, factor * _PREFIXES[unit[0]]
    raise UnitError(f"unknown unit {unit!r}")


@dataclass(frozen=True)
class Quantity:
    """A finite value tagged with a unit from the closed list."""

    value: float
    unit: str = ""

    def __post_init__(self):
        _resolve(self.unit)
        if not math.isfinite(self.value):
            raise DomainError(f"quantity value must be finite, got {self.value!r}")

    @property
    def dimension(self) -> str:
        return _resolve(self.unit)[0]


def convert(q: Quantity, target_unit: str) -> Quantity:
    """Rescale a quantity to a dimensionally compatible unit.

    eV and J interconvert (energy); anything else must share its base
    dimension. Raises UnitError on mismatch.
    """
    dim_from, factor_from = _resolve(q.unit)
    dim_to, factor_to = _resolve(target_unit)
    if dim_from != dim_to:
        raise UnitError(
            f"cannot convert {q.unit or 'dimensionless'!r} "
            f"to {target_unit or 'dimensionless'!r}"
        )
    return Quantity(q.value * (factor_from / factor_to), target_unit)


def si_value(q: Quantity) -> float:
    """The quantity's value in the SI base unit of its dimension."""
    _, factor = _resolve(q.unit)
    return q.value * factor


def si_unit(unit: str) -> str:
    """SI base unit string for a given unit (energy maps to J)."""
    dim, _ = _resolve(unit)
    return "" if dim == "dimensionless" else dim


def parse_quantity(text: str) -> Quantity:
    """Parse "15 mK" / "377 Ohm" / "0.073" into a Quantity.

    The unit token is optional (dimensionless). Raises UnitError on an
    unknown unit and ConfigError-style ValueError on a malformed number;
    callers wrap this with file/line context.
    """
    parts = text.strip().split()
    if not parts or len(parts) > 2:
        raise UnitError(f"expected 'NUMBER [UNIT]', got {text!r}")
    try:
        value = float(parts[0])
    except ValueError:
        raise UnitError(f"malformed number {parts[0]!r}") from None
    unit = parts[1] if len(parts) == 2 else ""
    return Quantity(value, unit)
