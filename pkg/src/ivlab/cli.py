"""Command-line interface: a thin client of the JSON service.

Each run reads one configuration file (flat key-value text, or a previous
JSON report to reproduce), sends the resolved SI request to the service
(in-process by default, over HTTP with --server), and writes the results
atomically into the output directory:

    {command}.json   versioned report (config echo + payload + provenance)
    {command}.csv    curve or table, where the command produces one

Exit codes: 0 success, 2 configuration/validation failure, 3 numeric
failure. Rerunning a command with --config pointing at its own JSON report
reproduces the identical payload.
"""

import argparse
import json
import os
import sys

from .configfile import RunConfig, apply_schema, parse_config_text, read_sweep_file
from .errors import ConfigError, IvlabError, NumericError
from .ivcsv import format_ivc_csv, read_ivc_csv
from .report import atomic_write_text, build_envelope, envelope_json, parse_envelope

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_NUMERIC = 3

_COMMAND_HELP = (
    ("curve", "evaluate an analytic IV curve (optionally broadened)"),
    ("regime", "classify a junction, or a conductance sweep, on the regime diagram"),
    ("simulate", "run the stochastic washboard simulator over a bias grid"),
    ("fit", "fit a phase-diffusion model to measured IV data"),
    ("extract", "extract the switching current from measured IV data"),
    ("scan", "tabulate regime diagnostics over a conductance sweep"),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ivlab",
        description="IV-curve toolkit for overdamped Josephson phase diffusion.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, help_text in _COMMAND_HELP:
        p = sub.add_parser(name, help=help_text)
        p.add_argument(
            "--config",
            required=True,
            help="run configuration: flat key-value file, or a previous JSON report",
        )
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument(
            "--seed",
            type=int,
            default=None,
            help="override the stochastic seed (simulate runs; ignored elsewhere)",
        )
        p.add_argument("--quiet", action="store_true", help="suppress the summary line")
        p.add_argument(
            "--server",
            default=None,
            help="base URL of a running service; default computes in-process",
        )
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_request(command: str, config_path: str):
    """Resolve a config file into the service request dict.

    A JSON report is recognized by its leading '{' and replayed through its
    embedded config echo; flat text goes through schema validation and any
    referenced data files are inlined.
    """
    try:
        with open(config_path, "r") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {config_path}: {exc}") from None

    if text.lstrip().startswith("{"):
        envelope = parse_envelope(text, name=config_path)
        if envelope["command"] != command:
            raise ConfigError(
                f"{config_path}: report was produced by {envelope['command']!r}, "
                f"cannot rerun it as {command!r}"
            )
        config = envelope["config"]
        if not isinstance(config, dict):
            raise ConfigError(f"{config_path}: config echo must be an object")
        return config, (config_path,)

    raw = parse_config_text(text, name=config_path)
    request = apply_schema(command, raw)
    sources = [config_path]

    if command in ("regime", "scan") and "sweep_file" in request:
        if "g_ratios" in request:
            raise ConfigError(f"{command}: give g_ratios or sweep_file, not both")
        sweep_path = request.pop("sweep_file")
        request["g_ratios"] = read_sweep_file(sweep_path)
        sources.append(sweep_path)

    if command in ("fit", "extract"):
        data_path = request.pop("data")
        V, I = read_ivc_csv(data_path)
        request["V_V"] = [float(v) for v in V]
        request["I_A"] = [float(i) for i in I]
        sources.append(data_path)

    if command == "fit":
        guesses = {}
        for key in list(request):
            if key.startswith("guess_"):
                guesses[key[len("guess_"):]] = request.pop(key)
        if guesses:
            request["guesses"] = guesses

    run = RunConfig(command=command, request=request, sources=tuple(sources))
    return run.request, run.sources


def _post(command: str, request: dict, server):
    """POST the request; returns (status_code, body dict)."""
    if server:
        import httpx

        url = server.rstrip("/") + f"/v1/{command}"
        try:
            response = httpx.post(url, json=request, timeout=None)
        except httpx.HTTPError as exc:
            raise NumericError(f"service request failed: {exc}") from None
    else:
        import warnings

        with warnings.catch_warnings():
            # in-process transport; the client library churn is not actionable here
            warnings.simplefilter("ignore", DeprecationWarning)
            warnings.simplefilter("ignore", UserWarning)
            from starlette.testclient import TestClient

            from .service.app import app

            with TestClient(app, raise_server_exceptions=False) as client:
                response = client.post(f"/v1/{command}", json=request)
    try:
        body = response.json()
    except ValueError:
        body = {"error": {"type": "ServerError", "message": response.text[:500]}}
    return response.status_code, body


def _format_regime_csv(rows) -> str:
    lines = ["g_ratio,E_J_J,eta,theta,ratio,classification"]
    for row in rows:
        g = "" if row["g_ratio"] is None else repr(float(row["g_ratio"]))
        lines.append(
            f"{g},{float(row['E_J_J'])!r},{float(row['eta'])!r},"
            f"{float(row['theta'])!r},{float(row['ratio'])!r},{row['classification']}"
        )
    return "\n".join(lines) + "\n"


def _write_outputs(command: str, out_dir: str, body: dict):
    envelope = build_envelope(
        command,
        config=body["config"],
        payload=body["payload"],
        provenance=body.get("provenance", []),
    )
    payload = body["payload"]
    try:
        os.makedirs(out_dir, exist_ok=True)
        written = []
        if command in ("curve", "simulate"):
            csv_path = os.path.join(out_dir, f"{command}.csv")
            text = format_ivc_csv(
                payload["V_V"], payload["I_A"], comments=(f"ivlab {command}",)
            )
            atomic_write_text(csv_path, text)
            written.append(csv_path)
        elif command in ("regime", "scan"):
            csv_path = os.path.join(out_dir, f"{command}.csv")
            atomic_write_text(csv_path, _format_regime_csv(payload["rows"]))
            written.append(csv_path)
        json_path = os.path.join(out_dir, f"{command}.json")
        atomic_write_text(json_path, envelope_json(envelope))
        written.append(json_path)
    except OSError as exc:
        raise ConfigError(f"cannot write outputs under {out_dir!r}: {exc}") from None
    return written


def _summary(command: str, payload: dict) -> str:
    if command in ("curve", "simulate"):
        return f"{command}: {len(payload['V_V'])} points"
    if command in ("regime", "scan"):
        rows = payload["rows"]
        labels = ",".join(sorted({row["classification"] for row in rows}))
        return f"{command}: {len(rows)} row(s), classification {labels}"
    if command == "fit":
        return (
            f"fit: converged={payload['converged']} "
            f"residual={payload['residual']:.6g} iterations={payload['iterations']}"
        )
    if command == "extract":
        return (
            f"extract: I_S={payload['I_S_A']:.6g} A "
            f"at V={payload['V_at_max_V']:.6g} V"
        )
    return command


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)

    if ns.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=ns.host, port=ns.port)
        return _EXIT_OK

    try:
        request, _sources = _load_request(ns.command, ns.config)
        if ns.seed is not None and ns.command == "simulate":
            request = dict(request)
            request["seed"] = ns.seed
        status, body = _post(ns.command, request, ns.server)
        if status == 200:
            written = _write_outputs(ns.command, ns.out, body)
            if not ns.quiet:
                print(f"{_summary(ns.command, body['payload'])} -> {', '.join(written)}")
            return _EXIT_OK
        error = body.get("error", {}) if isinstance(body, dict) else {}
        kind = error.get("type", "ServerError")
        message = error.get("message", json.dumps(body)[:500])
        print(f"ivlab {ns.command}: {kind}: {message}", file=sys.stderr)
        return _EXIT_CONFIG if status == 422 else _EXIT_NUMERIC
    except NumericError as exc:
        print(f"ivlab {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    except IvlabError as exc:
        print(f"ivlab {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
