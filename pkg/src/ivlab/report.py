"""Report envelopes and deterministic file emission.

Every command run is recorded as a JSON envelope carrying the schema tag,
tool version, timestamp, the fully resolved SI configuration echo, the
result payload and provenance notes. The config echo is sufficient to
reproduce the payload bit for bit: feeding the envelope back as a config
file reruns the identical computation, and payload serialization is
canonical (sorted keys, no whitespace, shortest-repr floats), so reruns
are byte-comparable.
"""

import json
import math
import os
import tempfile
from datetime import datetime, timezone

from .errors import ConfigError

SCHEMA = "ivlab/1"


def to_jsonable(value):
    """Deep-convert numpy scalars/arrays and mappings to plain JSON types.

    Floats must be finite: NaN/inf have no canonical JSON form and would
    silently break byte-for-byte reproducibility, so they are rejected.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return int(value)
    if value is None or isinstance(value, str):
        return value
    if hasattr(value, "tolist"):
        return to_jsonable(value.tolist())
    if isinstance(value, float) or hasattr(value, "__float__"):
        out = float(value)
        if not math.isfinite(out):
            raise ConfigError(f"non-finite value {out!r} cannot be serialized")
        return out
    raise ConfigError(f"cannot serialize value of type {type(value).__name__}")


def canonical_json(value) -> str:
    """Canonical serialization: sorted keys, compact separators."""
    return json.dumps(to_jsonable(value), sort_keys=True, separators=(",", ":"))


def build_envelope(command: str, config: dict, payload: dict, provenance) -> dict:
    return {
        "schema": SCHEMA,
        "tool_version": _tool_version(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "command": command,
        "config": to_jsonable(config),
        "payload": to_jsonable(payload),
        "provenance": list(provenance),
    }


def envelope_json(envelope: dict) -> str:
    """Envelope serialization; payload and config in canonical form."""
    return json.dumps(envelope, sort_keys=True, separators=(",", ":")) + "\n"


def parse_envelope(text: str, name: str) -> dict:
    """Parse and validate a JSON report envelope (for rerun-from-echo)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{name}: not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: envelope must be a JSON object")
    if data.get("schema") != SCHEMA:
        raise ConfigError(
            f"{name}: unsupported schema {data.get('schema')!r}, expected {SCHEMA!r}"
        )
    for field in ("command", "config", "payload"):
        if field not in data:
            raise ConfigError(f"{name}: envelope is missing the {field!r} field")
    return data


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a same-directory temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ivlab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _tool_version() -> str:
    from . import __version__

    return __version__
