"""Flat key-value run configuration.

Format: one "key = value" per line, '#' starts a comment, blank lines are
skipped. Values are either a number with an optional unit ("T = 15 mK"),
a bare word ("model = qsm", "broadening = on"), a whitespace-separated
number list ("x_values = 0.2 0.8 1.2"), or a path ("data = run7.csv").

Each command has a closed key schema; unknown keys are rejected so typos
fail loudly. Quantities are converted to SI here, producing the plain
request dictionary that the service consumes and echoes.
"""

import math
import re
from dataclasses import dataclass, field

from .errors import ConfigError, UnitError
from .units import Quantity, parse_quantity, si_value

_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INT_RE = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class RunConfig:
    """A resolved command run: SI request body plus file bookkeeping.

    sources lists every input path referenced by the config; they must be
    distinct. The request dict is exactly what the service receives and
    echoes back, so it doubles as the reproducibility record.
    """

    command: str
    request: dict
    sources: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if len(set(self.sources)) != len(self.sources):
            raise ConfigError(f"referenced paths must be distinct: {self.sources}")


def parse_config_text(text: str, name: str = "<string>") -> dict:
    """Parse flat key-value text into a {key: raw value} dict.

    Raw values are Quantity (number with or without unit), int, str,
    or list[float]; schema application happens separately.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{name}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, rest = line.partition("=")
        key, rest = key.strip(), rest.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"{name}:{lineno}: invalid key {key!r}")
        if key in out:
            raise ConfigError(f"{name}:{lineno}: duplicate key {key!r}")
        if not rest:
            raise ConfigError(f"{name}:{lineno}: empty value for {key!r}")
        out[key] = _parse_value(rest, name, lineno)
    return out


def _parse_value(rest: str, name: str, lineno: int):
    tokens = rest.split()
    numeric = [bool(_NUMBER_RE.match(t)) for t in tokens]
    if len(tokens) == 1:
        if _INT_RE.match(tokens[0]):
            return int(tokens[0])
        if numeric[0]:
            return Quantity(float(tokens[0]), "")
        return tokens[0]
    if len(tokens) == 2 and numeric[0] and not numeric[1]:
        try:
            return parse_quantity(rest)
        except UnitError as exc:
            raise ConfigError(f"{name}:{lineno}: {exc}") from None
    if all(numeric):
        return [float(t) for t in tokens]
    if not any(numeric):
        return list(tokens)
    raise ConfigError(f"{name}:{lineno}: cannot parse value {rest!r}")


def read_config_file(path: str) -> dict:
    try:
        with open(path, "r") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config_text(text, name=path)


# --- schema machinery ---------------------------------------------------

class _Field:
    def __init__(self, kind, required=False, default=None, choices=None, dimension=None):
        self.kind = kind
        self.required = required
        self.default = default
        self.choices = choices
        self.dimension = dimension


def _quantity(dimension, required=False, default=None):
    return _Field("quantity", required=required, default=default, dimension=dimension)


def _number(required=False, default=None):
    return _Field("number", required=required, default=default)


def _integer(required=False, default=None):
    return _Field("integer", required=required, default=default)


def _flag(required=False, default=None):
    return _Field("flag", required=required, default=default)


def _word(choices, required=False, default=None):
    return _Field("word", required=required, default=default, choices=choices)


def _path(required=False):
    return _Field("path", required=required)


def _numlist(required=False, default=None):
    return _Field("numlist", required=required, default=default)


_COMMON_JUNCTION = {
    "E_J": _quantity("J"),
    "delta_eff": _quantity("J"),
    "g_ratio": _number(),
    "E_C": _quantity("J"),
    "T": _quantity("K", required=True),
    "R_DC": _quantity("Ohm", required=True),
}

_SCHEMAS = {
    "curve": {
        **_COMMON_JUNCTION,
        "model": _word(("qsm", "iz", "lorentzian"), default="qsm"),
        "V_min": _quantity("V", default=Quantity(-30.0, "uV")),
        "V_max": _quantity("V", default=Quantity(30.0, "uV")),
        "points": _integer(default=2001),
        "broadening": _flag(default=False),
        "sigma": _quantity("J"),
        "half_range": _number(),
        "quad_points": _integer(),
    },
    "regime": {
        **_COMMON_JUNCTION,
        "g_ratios": _numlist(),
        "sweep_file": _path(),
    },
    "simulate": {
        "g": _Field("number_or_inf"),
        "E_J": _quantity("J"),
        "T": _quantity("K"),
        "R_DC": _quantity("Ohm", required=True),
        "I_0": _quantity("A"),
        "x_values": _numlist(required=True),
        "dt": _number(),
        "n_steps": _integer(),
        "burn_in": _integer(),
        "n_traj": _integer(),
        "seed": _integer(),
        "with_oracle": _flag(default=False),
    },
    "fit": {
        "data": _path(required=True),
        "model": _word(("qsm", "iz", "lorentzian"), default="qsm"),
        "broadened": _flag(default=False),
        "free": _Field("wordlist", required=True),
        "guess_E_J": _quantity("J"),
        "guess_E_C": _quantity("J"),
        "guess_T": _quantity("K"),
        "guess_rho": _number(),
        "E_J": _quantity("J"),
        "E_C": _quantity("J"),
        "T": _quantity("K"),
        "R_DC": _quantity("Ohm"),
        "rho": _number(),
        "window_lo": _quantity("V", default=Quantity(0.0, "uV")),
        "window_hi": _quantity("V", default=Quantity(30.0, "uV")),
        "g_ratio": _number(required=True),
        "label": _Field("word_free", default=""),
    },
    "extract": {
        "data": _path(required=True),
        "window_lo": _quantity("V", default=Quantity(0.0, "uV")),
        "window_hi": _quantity("V", default=Quantity(30.0, "uV")),
        "g_ratio": _number(required=True),
        "label": _Field("word_free", default=""),
        "I_model_max": _quantity("A"),
    },
    "scan": {
        "delta_eff": _quantity("J", required=True),
        "E_C": _quantity("J", required=True),
        "T": _quantity("K", required=True),
        "R_DC": _quantity("Ohm", required=True),
        "g_ratios": _numlist(),
        "sweep_file": _path(),
    },
}

COMMANDS = tuple(_SCHEMAS)


def _coerce(command: str, key: str, spec: _Field, value):
    if spec.kind == "quantity":
        if isinstance(value, Quantity):
            got = value.dimension
            if got == "dimensionless":
                raise ConfigError(f"{command}: {key} needs a unit (e.g. '{key} = 1 {spec.dimension}')")
            if got != spec.dimension:
                raise ConfigError(
                    f"{command}: {key} must carry {spec.dimension}-dimension units, got {value.unit!r}"
                )
            return si_value(value)
        raise ConfigError(f"{command}: {key} must be a 'NUMBER UNIT' quantity")
    if spec.kind == "number":
        if isinstance(value, Quantity) and value.dimension == "dimensionless":
            return float(value.value)
        if isinstance(value, int):
            return float(value)
        raise ConfigError(f"{command}: {key} must be a bare number")
    if spec.kind == "number_or_inf":
        # "inf" stays a string so the config echo remains valid JSON
        if value == "inf":
            return "inf"
        if isinstance(value, Quantity) and value.dimension == "dimensionless":
            return float(value.value)
        if isinstance(value, int):
            return float(value)
        raise ConfigError(f"{command}: {key} must be a number or 'inf'")
    if spec.kind == "integer":
        if isinstance(value, int):
            return value
        raise ConfigError(f"{command}: {key} must be an integer")
    if spec.kind == "flag":
        if value in ("on", "off"):
            return value == "on"
        raise ConfigError(f"{command}: {key} must be 'on' or 'off', got {value!r}")
    if spec.kind == "word":
        if isinstance(value, str) and value in spec.choices:
            return value
        raise ConfigError(f"{command}: {key} must be one of {spec.choices}, got {value!r}")
    if spec.kind == "word_free":
        if isinstance(value, str):
            return value
        raise ConfigError(f"{command}: {key} must be a word")
    if spec.kind == "path":
        if isinstance(value, str):
            return value
        raise ConfigError(f"{command}: {key} must be a path")
    if spec.kind == "numlist":
        if isinstance(value, list) and all(isinstance(v, float) for v in value):
            return list(value)
        if isinstance(value, Quantity) and value.dimension == "dimensionless":
            return [float(value.value)]
        if isinstance(value, int):
            return [float(value)]
        raise ConfigError(f"{command}: {key} must be a list of numbers")
    if spec.kind == "wordlist":
        if isinstance(value, str):
            return [value]
        if isinstance(value, list) and all(isinstance(v, str) for v in value):
            return list(value)
        raise ConfigError(f"{command}: {key} must name one or more parameters")
    raise ConfigError(f"{command}: unhandled kind {spec.kind!r}")


def apply_schema(command: str, raw: dict) -> dict:
    """Validate raw parsed keys against the command schema; SI-resolve."""
    if command not in _SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    schema = _SCHEMAS[command]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"{command}: unknown config key(s): {', '.join(unknown)}")
    out = {}
    for key, spec in schema.items():
        if key in raw:
            out[key] = _coerce(command, key, spec, raw[key])
        elif spec.required:
            raise ConfigError(f"{command}: missing required key {key!r}")
        elif spec.default is not None:
            default = spec.default
            out[key] = si_value(default) if isinstance(default, Quantity) else default
    return out


def read_sweep_file(path: str) -> list:
    """One conductance ratio per line; '#' comments; must be non-empty."""
    try:
        with open(path, "r") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    values = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not values:
        raise ConfigError(f"{path}: sweep file contains no values")
    return values
