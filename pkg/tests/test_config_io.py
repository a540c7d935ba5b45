"""Config parsing, schema coercion, IVC CSV round-trips, report envelopes."""

import json
import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ivlab import ConfigError, Quantity, UnitError
from ivlab.configfile import (
    COMMANDS,
    RunConfig,
    apply_schema,
    parse_config_text,
    read_config_file,
    read_sweep_file,
)
from ivlab.ivcsv import format_ivc_csv, parse_ivc_csv, read_ivc_csv, write_ivc_csv
from ivlab.report import (
    SCHEMA,
    atomic_write_text,
    build_envelope,
    canonical_json,
    envelope_json,
    parse_envelope,
    to_jsonable,
)

# ------------------------------------------------------------- config text


def test_parse_config_value_shapes():
    raw = parse_config_text(
        """
        # a comment line
        T = 15 mK            # trailing comment
        R_DC = 377 Ohm
        g_ratio = 0.073
        points = 2001
        model = qsm
        x_values = 0.2 0.8 1.2
        free = E_J T
        data = run7.csv
        """
    )
    assert raw["T"] == Quantity(15.0, "mK")
    assert raw["R_DC"] == Quantity(377.0, "Ohm")
    assert raw["g_ratio"] == Quantity(0.073, "")
    assert raw["points"] == 2001 and isinstance(raw["points"], int)
    assert raw["model"] == "qsm"
    assert raw["x_values"] == [0.2, 0.8, 1.2]
    assert raw["free"] == ["E_J", "T"]
    assert raw["data"] == "run7.csv"


@pytest.mark.parametrize(
    "line,fragment",
    [
        ("just words without equals", "expected 'key = value'"),
        ("T = ", "empty value"),
        ("2bad = 1", "invalid key"),
        ("T = 1 mK\nT = 2 mK", "duplicate key"),
        ("T = 1 parsec", "unknown unit"),
        ("w = 1 two 3", "cannot parse value"),
    ],
)
def test_parse_config_errors_cite_line(line, fragment):
    with pytest.raises(ConfigError) as err:
        parse_config_text(line, name="demo.cfg")
    assert fragment in str(err.value)
    assert "demo.cfg:" in str(err.value)


def test_read_config_file_missing(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        read_config_file(str(tmp_path / "absent.cfg"))


# ------------------------------------------------------------------ schemas


def test_commands_tuple():
    assert COMMANDS == ("curve", "regime", "simulate", "fit", "extract", "scan")


def test_apply_schema_defaults_and_si():
    raw = parse_config_text("T = 15 mK\nR_DC = 377 Ohm\nE_J = 9.86 ueV\nE_C = 182 ueV")
    req = apply_schema("curve", raw)
    assert req["T"] == pytest.approx(0.015)
    assert req["R_DC"] == 377.0
    assert req["E_J"] == pytest.approx(9.86e-6 * 1.602176634e-19, rel=1e-15)
    # defaults materialize in SI
    assert req["model"] == "qsm"
    assert req["V_min"] == pytest.approx(-30e-6)
    assert req["V_max"] == pytest.approx(30e-6)
    assert req["points"] == 2001
    assert req["broadening"] is False
    assert "sigma" not in req  # optional without default stays absent


def test_apply_schema_flags_and_inf():
    raw = parse_config_text(
        "R_DC = 377 Ohm\ng = inf\nI_0 = 4.8 nA\nx_values = 1.5\nwith_oracle = on"
    )
    req = apply_schema("simulate", raw)
    assert req["g"] == "inf"  # JSON-safe spelling, resolved downstream
    assert req["with_oracle"] is True
    assert req["x_values"] == [1.5]

    raw = parse_config_text("R_DC = 377 Ohm\ng = 2.0\nI_0 = 4.8 nA\nx_values = 0.5")
    assert apply_schema("simulate", raw)["g"] == 2.0


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("T = 15 mK\nR_DC = 377 Ohm\nbogus = 1", "unknown config key"),
        ("T = 15 mK", "missing required key 'R_DC'"),
        ("T = 15 uV\nR_DC = 377 Ohm", "must carry K-dimension units"),
        ("T = 15.0\nR_DC = 377 Ohm", "needs a unit"),
        ("T = 15\nR_DC = 377 Ohm", "must be a 'NUMBER UNIT' quantity"),
        ("T = 15 mK\nR_DC = 377 Ohm\nbroadening = yes", "must be 'on' or 'off'"),
        ("T = 15 mK\nR_DC = 377 Ohm\nmodel = parabola", "must be one of"),
        ("T = 15 mK\nR_DC = 377 Ohm\npoints = 2.5", "must be an integer"),
    ],
)
def test_apply_schema_errors_name_the_command(text, fragment):
    with pytest.raises(ConfigError) as err:
        apply_schema("curve", parse_config_text(text))
    assert fragment in str(err.value)
    assert "curve" in str(err.value)


def test_apply_schema_unknown_command():
    with pytest.raises(ConfigError, match="unknown command"):
        apply_schema("plot", {})


def test_run_config_rejects_duplicate_sources():
    with pytest.raises(ConfigError, match="distinct"):
        RunConfig(command="fit", request={}, sources=("a.cfg", "a.cfg"))
    cfg = RunConfig(command="fit", request={"x": 1}, sources=("a.cfg", "b.csv"))
    assert cfg.sources == ("a.cfg", "b.csv")


def test_read_sweep_file(tmp_path):
    p = tmp_path / "sweep.txt"
    p.write_text("# ratios\n0.02\n0.05  # mid\n\n0.16407\n")
    assert read_sweep_file(str(p)) == [0.02, 0.05, 0.16407]
    bad = tmp_path / "bad.txt"
    bad.write_text("0.02\nnot-a-number\n")
    with pytest.raises(ConfigError, match="not a number"):
        read_sweep_file(str(bad))
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing here\n")
    with pytest.raises(ConfigError, match="contains no values"):
        read_sweep_file(str(empty))
    with pytest.raises(ConfigError, match="cannot read"):
        read_sweep_file(str(tmp_path / "absent.txt"))


# ---------------------------------------------------------------- IVC CSV


def test_csv_default_header_and_round_trip():
    V = np.array([-2e-6, 0.0, 1.5e-6, 28.44e-6])
    I = np.array([-3.1e-12, 0.0, 49e-12, 80.84e-12])
    text = format_ivc_csv(V, I, comments=("ivlab curve",))
    lines = text.splitlines()
    assert lines[0] == "# ivlab curve"
    assert lines[1] == "V_uV,I_pA"
    V2, I2 = parse_ivc_csv(text)
    # shortest-repr emission makes the round trip bit-exact
    assert V2.tolist() == V.tolist()
    assert I2.tolist() == I.tolist()


@pytest.mark.parametrize("v_unit,i_unit", [("V", "A"), ("mV", "nA"), ("uV", "pA")])
def test_csv_unit_pairs(v_unit, i_unit):
    V = np.array([1.25e-5, 3e-5])
    I = np.array([4.5e-11, 9e-10])
    text = format_ivc_csv(V, I, v_unit=v_unit, i_unit=i_unit)
    assert text.splitlines()[0] == f"V_{v_unit},I_{i_unit}"
    V2, I2 = parse_ivc_csv(text)
    assert V2 == pytest.approx(V, rel=1e-15)
    assert I2 == pytest.approx(I, rel=1e-15)


@given(
    vals=st.lists(
        st.tuples(
            st.floats(min_value=-1e3, max_value=1e3, allow_nan=False),
            st.floats(min_value=-1e3, max_value=1e3, allow_nan=False),
        ),
        min_size=1,
        max_size=20,
    )
)
def test_csv_round_trip_property(vals):
    # display-unit scaling divides and re-multiplies by a decimal factor,
    # which can move the last ulp; the contract is 1e-12 relative
    V = np.array(sorted(v for v, _ in vals))
    I = np.array([i for _, i in vals])
    V2, I2 = parse_ivc_csv(format_ivc_csv(V, I))
    assert V2.tolist() == pytest.approx(V.tolist(), rel=1e-12, abs=1e-300)
    assert I2.tolist() == pytest.approx(I.tolist(), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("x,y\n1,2\n", "header must be"),
        ("V_pc,I_pA\n1,2\n", "unknown voltage unit"),
        ("V_uV,I_kA\n1,2\n", "unknown current unit"),
        ("V_uV,I_pA\n1,2,3\n", "two comma-separated"),
        ("V_uV,I_pA\none,2\n", "not numeric"),
        ("V_uV,I_pA\n1,inf\n", "non-finite"),
        ("# only a comment\n", "empty file"),
    ],
)
def test_csv_parse_errors(text, fragment):
    with pytest.raises(ConfigError) as err:
        parse_ivc_csv(text, name="bad.csv")
    assert fragment in str(err.value)
    assert "bad.csv" in str(err.value)


def test_csv_shape_and_unit_validation():
    with pytest.raises(UnitError):
        format_ivc_csv([1.0], [1.0], v_unit="K")
    with pytest.raises(UnitError):
        format_ivc_csv([1.0], [1.0], i_unit="uV")
    with pytest.raises(ConfigError):
        format_ivc_csv([1.0, 2.0], [1.0])


def test_csv_file_round_trip(tmp_path):
    path = str(tmp_path / "curve.csv")
    V = np.array([0.5e-6, 1e-6, 2e-6])
    I = np.array([1e-12, 49e-12, 7e-12])
    write_ivc_csv(path, V, I, comments=("written by test",))
    V2, I2 = read_ivc_csv(path)
    assert V2.tolist() == V.tolist() and I2.tolist() == I.tolist()
    with pytest.raises(ConfigError, match="cannot read"):
        read_ivc_csv(str(tmp_path / "absent.csv"))


# ------------------------------------------------------------------ report


def test_to_jsonable_conversions():
    out = to_jsonable(
        {
            "a": np.float64(1.5),
            "b": np.array([1.0, 2.0]),
            "c": np.int64(7),
            "d": (True, False),
            "e": None,
            "f": "text",
        }
    )
    assert out == {"a": 1.5, "b": [1.0, 2.0], "c": 7, "d": [True, False],
                   "e": None, "f": "text"}
    assert isinstance(out["d"][0], bool)
    with pytest.raises(ConfigError, match="non-finite"):
        to_jsonable({"x": math.inf})
    with pytest.raises(ConfigError, match="non-finite"):
        to_jsonable(math.nan)
    with pytest.raises(ConfigError, match="cannot serialize"):
        to_jsonable(object())


def test_canonical_json_is_stable():
    a = canonical_json({"b": 1.5, "a": [1, 2]})
    b = canonical_json({"a": [1, 2], "b": 1.5})
    assert a == b == '{"a":[1,2],"b":1.5}'


def test_build_envelope_fields():
    env = build_envelope("curve", {"T": 0.015}, {"V_V": [0.0]}, ["note"])
    assert env["schema"] == SCHEMA == "ivlab/1"
    assert env["command"] == "curve"
    assert env["config"] == {"T": 0.015}
    assert env["payload"] == {"V_V": [0.0]}
    assert env["provenance"] == ["note"]
    assert "timestamp" in env and "tool_version" in env
    text = envelope_json(env)
    assert text.endswith("\n")
    assert json.loads(text) == env


def test_parse_envelope_round_trip_and_errors():
    env = build_envelope("scan", {"x": 1}, {"rows": []}, [])
    parsed = parse_envelope(envelope_json(env), name="r.json")
    assert parsed["command"] == "scan"
    assert parsed["config"] == {"x": 1}
    with pytest.raises(ConfigError, match="not valid JSON"):
        parse_envelope("{oops", name="r.json")
    with pytest.raises(ConfigError, match="JSON object"):
        parse_envelope("[1,2]", name="r.json")
    with pytest.raises(ConfigError, match="unsupported schema"):
        parse_envelope('{"schema": "other/9"}', name="r.json")
    with pytest.raises(ConfigError, match="missing"):
        parse_envelope(
            '{"schema": "ivlab/1", "command": "scan", "config": {}}', name="r.json"
        )


def test_atomic_write_text(tmp_path):
    path = str(tmp_path / "sub" / "out.txt")
    atomic_write_text(path, "hello\n")
    with open(path) as fh:
        assert fh.read() == "hello\n"
    # no temp litter left behind
    assert [p for p in os.listdir(tmp_path / "sub") if p != "out.txt"] == []
    atomic_write_text(path, "replaced\n")
    with open(path) as fh:
        assert fh.read() == "replaced\n"
