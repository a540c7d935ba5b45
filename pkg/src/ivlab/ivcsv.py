"""IV-curve CSV format: one header line declaring the unit pair, then rows.

The header is "V_<unit>,I_<unit>" where both units come from the accepted
unit list and carry voltage and current dimension respectively (the
canonical pair is "V_uV,I_pA"). '#' lines and blank lines are comments.
Values use the decimal point and shortest round-trip repr, so a file read
back yields bit-identical floats.
"""

import numpy as np

from .errors import ConfigError, UnitError
from .report import atomic_write_text
from .units import Quantity, si_value

_V_UNITS = ("V", "mV", "uV")
_I_UNITS = ("A", "nA", "pA")


def _scale(unit: str) -> float:
    """SI value of 1 <unit>."""
    return si_value(Quantity(1.0, unit))


def format_ivc_csv(V, I, v_unit: str = "uV", i_unit: str = "pA", comments=()) -> str:
    """Render SI (V, I) arrays as CSV text in the declared display units."""
    if v_unit not in _V_UNITS:
        raise UnitError(f"{v_unit!r} is not a voltage unit; choose from {_V_UNITS}")
    if i_unit not in _I_UNITS:
        raise UnitError(f"{i_unit!r} is not a current unit; choose from {_I_UNITS}")
    V = np.asarray(V, dtype=float)
    I = np.asarray(I, dtype=float)
    if V.shape != I.shape or V.ndim != 1:
        raise ConfigError("V and I must be 1-d arrays of equal length")
    lines = [f"# {c}" for c in comments]
    lines.append(f"V_{v_unit},I_{i_unit}")
    sv, si = _scale(v_unit), _scale(i_unit)
    for v, i in zip(V, I):
        lines.append(f"{float(v) / sv!r},{float(i) / si!r}")
    return "\n".join(lines) + "\n"


def write_ivc_csv(path: str, V, I, v_unit: str = "uV", i_unit: str = "pA", comments=()) -> None:
    atomic_write_text(path, format_ivc_csv(V, I, v_unit, i_unit, comments))


def parse_ivc_csv(text: str, name: str = "<string>"):
    """Parse IVC CSV text.

    Returns
    -------
    (V, I) : SI numpy arrays, in file order.

    Raises
    ------
    ConfigError
        Malformed header or row, citing file and line number.
    """
    header = None
    sv = si = None
    V, I = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line
            parts = line.split(",")
            if len(parts) != 2 or not parts[0].startswith("V_") or not parts[1].startswith("I_"):
                raise ConfigError(
                    f"{name}:{lineno}: header must be 'V_<unit>,I_<unit>', got {line!r}"
                )
            vu, iu = parts[0][2:], parts[1][2:]
            if vu not in _V_UNITS:
                raise ConfigError(f"{name}:{lineno}: unknown voltage unit {vu!r}")
            if iu not in _I_UNITS:
                raise ConfigError(f"{name}:{lineno}: unknown current unit {iu!r}")
            sv, si = _scale(vu), _scale(iu)
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ConfigError(f"{name}:{lineno}: expected two comma-separated values")
        try:
            v, i = float(parts[0]), float(parts[1])
        except ValueError:
            raise ConfigError(f"{name}:{lineno}: not numeric: {line!r}") from None
        if not (np.isfinite(v) and np.isfinite(i)):
            raise ConfigError(f"{name}:{lineno}: non-finite value: {line!r}")
        V.append(v * sv)
        I.append(i * si)
    if header is None:
        raise ConfigError(f"{name}: empty file, expected a 'V_<unit>,I_<unit>' header")
    return np.array(V), np.array(I)


def read_ivc_csv(path: str):
    """Read an IVC CSV file; returns SI (V, I) arrays."""
    try:
        with open(path, "r") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_ivc_csv(text, name=path)
