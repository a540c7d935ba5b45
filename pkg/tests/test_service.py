"""JSON service: endpoint contracts, validation mapping, error envelope."""

import math

import pytest
from starlette.testclient import TestClient

from ivlab import __version__
from ivlab.service import create_app

_CURVE_BODY = {
    "E_J": 9.86e-6 * 1.602176634e-19,
    "E_C": 181.85e-6 * 1.602176634e-19,
    "T": 0.015,
    "R_DC": 377.0,
    "points": 21,
}


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(), raise_server_exceptions=False) as c:
        yield c


def test_health(client):
    r = client.get("/v1/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "version": __version__}


def test_curve_happy_path(client):
    r = client.post("/v1/curve", json=_CURVE_BODY)
    assert r.status_code == 200
    body = r.json()
    assert set(body) == {"config", "payload", "provenance"}
    # echo carries materialized defaults
    assert body["config"]["model"] == "qsm"
    assert body["config"]["points"] == 21
    assert body["config"]["V_max"] == 30e-6
    p = body["payload"]
    assert p["model"] == "qsm" and p["broadened"] is False
    assert p["low_impedance_warning"] is False
    assert len(p["V_V"]) == 21 and len(p["I_A"]) == 21
    assert p["V_V"][10] == 0.0 and p["I_A"][10] == 0.0
    # curve is odd on the symmetric grid
    assert p["I_A"][0] == pytest.approx(-p["I_A"][-1], rel=1e-12)
    assert p["analytic_peak"]["I_A"] == pytest.approx(4.881376394352356e-9, rel=1e-9)
    assert p["E_J_eff_J"] < p["E_J_J"]
    assert isinstance(body["provenance"], list) and body["provenance"]


def test_curve_broadened_with_derived_sigma(client):
    body = dict(_CURVE_BODY, broadening=True, points=201)
    r = client.post("/v1/curve", json=body)
    assert r.status_code == 200
    p = r.json()["payload"]
    assert p["broadened"] is True
    assert p["sigma_J"] == pytest.approx(21.682381497323167e-6 * 1.602176634e-19, rel=1e-4)


@pytest.mark.parametrize(
    "mutate,expected_type",
    [
        (lambda b: b.pop("T"), "RequestValidationError"),
        (lambda b: b.update(unknown_key=1.0), "RequestValidationError"),
        (lambda b: b.update(T=-1.0), "RequestValidationError"),
        (lambda b: b.update(R_DC=10_000.0), "DomainError"),  # rho >= 1
        (lambda b: (b.pop("E_C"), b.update(broadening=True)), "ConfigError"),
        (lambda b: b.update(delta_eff=1e-22), "ConfigError"),  # E_J given too
    ],
)
def test_curve_validation_maps_to_422(client, mutate, expected_type):
    body = dict(_CURVE_BODY)
    mutate(body)
    r = client.post("/v1/curve", json=body)
    assert r.status_code == 422
    err = r.json()["error"]
    assert err["type"] == expected_type
    assert isinstance(err["message"], str) and err["message"]


def test_curve_iz_model_needs_no_ec(client):
    body = {"E_J": 9.86e-6 * 1.602176634e-19, "T": 0.015, "R_DC": 377.0,
            "points": 11, "model": "iz"}
    r = client.post("/v1/curve", json=body)
    assert r.status_code == 200
    assert r.json()["payload"]["model"] == "iz"
    assert "E_J_eff_J" not in r.json()["payload"]


def test_regime_single_and_sweep(client):
    single = {
        "E_J": 9.855e-6 * 1.602176634e-19,
        "E_C": 181.85e-6 * 1.602176634e-19,
        "T": 0.015,
        "R_DC": 377.0,
    }
    r = client.post("/v1/regime", json=single)
    assert r.status_code == 200
    p = r.json()["payload"]
    assert p["mode"] == "single" and len(p["rows"]) == 1
    row = p["rows"][0]
    assert row["g_ratio"] is None
    assert row["classification"] == "crossover"
    assert row["theta"] == pytest.approx(122.0, rel=1e-3)

    sweep = {
        "delta_eff": 540e-6 * 1.602176634e-19,
        "E_C": 181.85e-6 * 1.602176634e-19,
        "T": 0.015,
        "R_DC": 377.0,
        "g_ratios": [0.02, 0.073, 0.16407],
    }
    r = client.post("/v1/regime", json=sweep)
    assert r.status_code == 200
    p = r.json()["payload"]
    assert p["mode"] == "scan" and len(p["rows"]) == 3
    assert p["rows"][0]["classification"] == "qSM"

    # sweep mode must not also carry a point coupling
    r = client.post("/v1/regime", json=dict(sweep, E_J=1e-24))
    assert r.status_code == 422
    assert r.json()["error"]["type"] == "ConfigError"


def test_scan_rows_ordered(client):
    body = {
        "delta_eff": 540e-6 * 1.602176634e-19,
        "E_C": 181.85e-6 * 1.602176634e-19,
        "T": 0.015,
        "R_DC": 377.0,
        "g_ratios": [0.02, 0.05, 0.1],
    }
    r = client.post("/v1/scan", json=body)
    assert r.status_code == 200
    rows = r.json()["payload"]["rows"]
    assert [row["g_ratio"] for row in rows] == [0.02, 0.05, 0.1]
    ratios = [row["ratio"] for row in rows]
    assert ratios[0] > ratios[1] > ratios[2]
    r = client.post("/v1/scan", json=dict(body, g_ratios=[]))
    assert r.status_code == 422
    assert r.json()["error"]["type"] == "RequestValidationError"


def test_simulate_noise_off(client):
    body = {
        "g": "inf",
        "I_0": 4.8e-9,
        "R_DC": 377.0,
        "x_values": [1.5],
        "dt": 0.0025,
        "n_steps": 200_000,
        "burn_in": 20_000,
        "n_traj": 1,
        "with_oracle": True,
    }
    r = client.post("/v1/simulate", json=body)
    assert r.status_code == 200
    body_out = r.json()
    # resolved stochastic knobs are folded into the echo
    assert body_out["config"]["seed"] == 1_000_003
    assert body_out["config"]["dt"] == 0.0025
    p = body_out["payload"]
    assert p["g"] == "inf"
    v = p["stats"][0]["mean_velocity"]
    assert abs(v / math.sqrt(1.25) - 1.0) <= 0.01
    assert p["stats"][0]["fp_velocity"] is None  # no finite-noise oracle
    assert p["V_V"][0] == pytest.approx(377.0 * 4.8e-9 * v, rel=1e-12)


def test_simulate_rejects_raw_inf(client):
    # raw JSON cannot carry Infinity; a float('inf') smuggled as a string
    # must be rejected with guidance toward the "inf" spelling
    r = client.post(
        "/v1/simulate",
        content='{"g": Infinity, "I_0": 1e-9, "R_DC": 377.0, "x_values": [0.5]}',
        headers={"content-type": "application/json"},
    )
    assert r.status_code == 422
    assert "inf" in r.json()["error"]["message"]


def test_simulate_numeric_failure_maps_to_500(client):
    body = {
        "g": 5e-324,
        "I_0": 1e-9,
        "R_DC": 377.0,
        "x_values": [0.0],
        "n_steps": 500,
        "burn_in": 0,
        "n_traj": 1,
    }
    r = client.post("/v1/simulate", json=body)
    assert r.status_code == 500
    err = r.json()["error"]
    assert err["type"] == "NumericError"
    assert "step 0" in err["message"]


def test_simulate_underdetermined(client):
    r = client.post("/v1/simulate", json={"R_DC": 377.0, "x_values": [0.5]})
    assert r.status_code == 422
    assert r.json()["error"]["type"] == "ConfigError"
    r = client.post(
        "/v1/simulate", json={"g": 2.0, "R_DC": 377.0, "x_values": [0.5]}
    )
    assert r.status_code == 422  # g without I_0


def test_fit_happy_path(client):
    # noiseless single-parameter recovery through the HTTP surface
    import numpy as np

    from ivlab import JunctionParams, cooper_pair_current_qsm, dimensionless_rho

    rho = dimensionless_rho(377.0)
    E_J = 9.855e-6 * 1.602176634e-19
    E_C = 181.85e-6 * 1.602176634e-19
    params = JunctionParams(E_J=E_J, E_C=E_C, T=0.015)
    V = np.linspace(0.05e-6, 30e-6, 40)
    I = cooper_pair_current_qsm(V, params, rho)
    body = {
        "V_V": V.tolist(),
        "I_A": I.tolist(),
        "g_ratio": 0.073,
        "free": ["E_J"],
        "guesses": {"E_J": 1.3 * E_J},
        "E_C": E_C,
        "T": 0.015,
        "R_DC": 377.0,
    }
    r = client.post("/v1/fit", json=body)
    assert r.status_code == 200
    p = r.json()["payload"]
    assert p["converged"] is True
    assert p["params"]["E_J_J"] == pytest.approx(E_J, rel=1e-3)
    assert p["params"]["rho"] == pytest.approx(rho, rel=1e-12)
    assert p["free"] == ["E_J"]

    r = client.post("/v1/fit", json=dict(body, rho=rho))
    assert r.status_code == 422  # both rho and R_DC
    r = client.post("/v1/fit", json=dict(body, free=["E_J", "E_C"]))
    assert r.status_code == 422  # E_C both free and fixed


def test_extract_happy_path(client):
    body = {
        "V_V": [-2e-6, 1e-6, 2e-6, 3e-6, 4e-6, 5e-6, 6e-6, 8e-6],
        "I_A": [-5e-12, 10e-12, 25e-12, 40e-12, 49e-12, 44e-12, 30e-12, 20e-12],
        "g_ratio": 0.073,
        "label": "fixture",
        "I_model_max": 56e-12,
    }
    r = client.post("/v1/extract", json=body)
    assert r.status_code == 200
    p = r.json()["payload"]
    assert p["I_S_A"] == 49e-12
    assert p["V_at_max_V"] == 4e-6
    assert p["edge_maximum"] is False
    assert p["deviation"]["delta"] == pytest.approx(0.125, abs=1e-12)
    assert p["deviation"]["I_S_A"] == 49e-12

    r = client.post("/v1/extract", json=dict(body, window_lo=1e-5, window_hi=1e-6))
    assert r.status_code == 422
    assert r.json()["error"]["type"] == "ExtractionError"


def test_unknown_route_is_404(client):
    assert client.post("/v1/plot", json={}).status_code == 404
