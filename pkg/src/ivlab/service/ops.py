"""Command implementations behind the service endpoints.

Each operation takes a validated request model and returns the triple
(config echo, payload, provenance notes). The echo is the request with all
defaults materialized, so feeding it back as a new request reproduces the
run exactly; for stochastic runs the resolved seed and budgets are folded
into the echo to honor that contract.
"""

import math

import numpy as np

from ..analysis import (
    MeasuredIVC,
    deviation_qsm,
    extract_switching,
    fit_model,
    regime_scan,
)
from ..broadening import BroadeningSpec, convolve_model, sigma_capacitive
from ..constants import thermal_beta
from ..errors import ConfigError
from ..iz import IZParams, iz_current, iz_lorentzian
from ..langevin import SimConfig, fp_mean_velocity, junction_iv_from_sim
from ..qsm import (
    EnvironmentParams,
    IVCurve,
    JunctionParams,
    classify_regime,
    cooper_pair_current_qsm,
    critical_current,
    ej_from_conductance,
    qsm_peak,
    renormalized_ej,
)
from ..report import to_jsonable


def _echo(req) -> dict:
    # also rejects non-finite floats, which JSON responses cannot carry
    return to_jsonable(req.model_dump())


def _resolve_ej(req) -> float:
    if req.E_J is not None:
        if req.delta_eff is not None:
            raise ConfigError("give either E_J or delta_eff with g_ratio, not both")
        return float(req.E_J)
    if req.delta_eff is not None and req.g_ratio is not None:
        return ej_from_conductance(float(req.delta_eff), float(req.g_ratio))
    raise ConfigError(
        "junction coupling underdetermined: set E_J, or delta_eff together with g_ratio"
    )


def _voltage_grid(v_min: float, v_max: float, points: int) -> np.ndarray:
    if not (math.isfinite(v_min) and math.isfinite(v_max) and v_min < v_max):
        raise ConfigError(f"voltage window needs V_min < V_max, got [{v_min!r}, {v_max!r}]")
    if points % 2 == 1 and v_min == -v_max:
        # integer-multiple construction keeps the midpoint exactly 0.0
        half = (points - 1) // 2
        return np.arange(-half, half + 1) * (v_max / half)
    step = (v_max - v_min) / (points - 1)
    return v_min + np.arange(points) * step


def run_curve(req):
    echo = _echo(req)
    E_J = _resolve_ej(req)
    env = EnvironmentParams(R_DC=req.R_DC)
    rho = env.rho
    grid = _voltage_grid(req.V_min, req.V_max, req.points)

    if req.model == "qsm":
        if req.E_C is None:
            raise ConfigError("model 'qsm' needs E_C for the coupling renormalization")
        junction = JunctionParams(E_J=E_J, E_C=float(req.E_C), T=req.T)
        func = lambda v: cooper_pair_current_qsm(v, junction, rho)
    else:
        izp = IZParams(E_J_eff=E_J, T=req.T, rho=rho)
        base = iz_current if req.model == "iz" else iz_lorentzian
        func = lambda v: base(v, izp)

    sigma = None
    if req.broadening:
        if req.sigma is not None:
            sigma = float(req.sigma)
        elif req.E_C is not None:
            sigma = sigma_capacitive(float(req.E_C), req.T)
        else:
            raise ConfigError("broadening needs sigma, or E_C to derive it")
        spec = BroadeningSpec(
            sigma=sigma,
            half_range=8.0 if req.half_range is None else float(req.half_range),
            points=8193 if req.quad_points is None else int(req.quad_points),
        )
        curve = convolve_model(func, sigma, grid, spec)
    else:
        curve = IVCurve(V=grid, I=np.asarray(func(grid), dtype=float))

    payload = {
        "model": req.model,
        "broadened": bool(req.broadening),
        "rho": rho,
        "low_impedance_warning": env.low_impedance_warning,
        "E_J_J": E_J,
        "I_0_A": critical_current(E_J),
        "V_V": curve.V,
        "I_A": curve.I,
    }
    if sigma is not None:
        payload["sigma_J"] = sigma
    if req.model == "qsm":
        payload["E_J_eff_J"] = renormalized_ej(junction, rho)
        v_peak, i_peak = qsm_peak(junction, rho)
        payload["analytic_peak"] = {"V_V": v_peak, "I_A": i_peak}

    provenance = [f"analytic {req.model} phase-diffusion curve on {req.points} grid points"]
    if req.broadening:
        provenance.append(
            "capacitive Gaussian broadening by trapezoid quadrature against the analytic model"
        )
    return echo, to_jsonable(payload), provenance


def _scan_rows(delta_eff: float, g_ratios, E_C: float, T: float, rho: float):
    entries = [
        (g, JunctionParams(E_J=ej_from_conductance(delta_eff, float(g)), E_C=E_C, T=T))
        for g in g_ratios
    ]
    return [
        {
            "g_ratio": row.g_ratio,
            "E_J_J": row.E_J,
            "eta": row.eta,
            "theta": row.theta,
            "ratio": row.ratio,
            "classification": row.classification,
        }
        for row in regime_scan(entries, rho)
    ]


def run_regime(req):
    echo = _echo(req)
    env = EnvironmentParams(R_DC=req.R_DC)
    rho = env.rho
    if req.g_ratios is not None:
        if req.E_J is not None or req.g_ratio is not None:
            raise ConfigError("sweep mode uses g_ratios alone; drop E_J and g_ratio")
        if req.delta_eff is None:
            raise ConfigError("a conductance sweep needs delta_eff")
        mode = "scan"
        rows = _scan_rows(float(req.delta_eff), req.g_ratios, req.E_C, req.T, rho)
    else:
        E_J = _resolve_ej(req)
        report = classify_regime(JunctionParams(E_J=E_J, E_C=req.E_C, T=req.T), rho)
        mode = "single"
        rows = [
            {
                "g_ratio": None if req.g_ratio is None else float(req.g_ratio),
                "E_J_J": E_J,
                "eta": report.eta,
                "theta": report.theta,
                "ratio": report.ratio,
                "classification": report.classification,
            }
        ]
    payload = {
        "mode": mode,
        "rho": rho,
        "low_impedance_warning": env.low_impedance_warning,
        "rows": rows,
    }
    return echo, to_jsonable(payload), ["regime classification from eta/theta diagnostics"]


def run_scan(req):
    echo = _echo(req)
    env = EnvironmentParams(R_DC=req.R_DC)
    rows = _scan_rows(req.delta_eff, req.g_ratios, req.E_C, req.T, env.rho)
    payload = {
        "rho": env.rho,
        "low_impedance_warning": env.low_impedance_warning,
        "rows": rows,
    }
    return echo, to_jsonable(payload), [
        f"regime scan over {len(rows)} conductance settings"
    ]


def run_simulate(req):
    if req.g is not None:
        if req.E_J is not None:
            raise ConfigError("give either g or E_J with T, not both")
        g = math.inf if req.g == "inf" else float(req.g)
        if req.I_0 is None:
            raise ConfigError("I_0 is required when g is given directly")
        I_0 = float(req.I_0)
    else:
        if req.E_J is None or req.T is None:
            raise ConfigError("noise strength underdetermined: set g, or E_J together with T")
        g = thermal_beta(req.T) * float(req.E_J)
        I_0 = critical_current(float(req.E_J)) if req.I_0 is None else float(req.I_0)

    overrides = {
        name: getattr(req, name)
        for name in ("dt", "n_steps", "burn_in", "n_traj", "seed")
        if getattr(req, name) is not None
    }
    template = SimConfig(g=g, x=0.0, **overrides)

    # fold the resolved seed and budgets into the echo: the reproducibility
    # contract requires the echo alone to pin the stochastic run
    resolved = req.model_copy(
        update={
            "dt": template.dt,
            "n_steps": template.n_steps,
            "burn_in": template.burn_in,
            "n_traj": template.n_traj,
            "seed": template.seed,
        }
    )
    echo = _echo(resolved)

    curve, stats = junction_iv_from_sim(req.x_values, template, R=req.R_DC, I_0=I_0)
    stat_rows = []
    for result in stats:
        row = {
            "x": result.config.x,
            "mean_velocity": result.mean_velocity,
            "std_error": result.std_error,
            "n_effective": result.n_effective,
        }
        if req.with_oracle:
            row["fp_velocity"] = fp_mean_velocity(g, result.config.x) if math.isfinite(g) else None
        stat_rows.append(row)

    payload = {
        "g": "inf" if math.isinf(g) else g,
        "I_0_A": I_0,
        "R_Ohm": req.R_DC,
        "seed": template.seed,
        "V_V": curve.V,
        "I_A": curve.I,
        "stats": stat_rows,
    }
    provenance = [
        f"Euler-Maruyama washboard ensemble, {template.n_traj} trajectories per bias point"
    ]
    if req.with_oracle:
        provenance.append("stationary-diffusion quadrature oracle attached per bias point")
    return echo, to_jsonable(payload), provenance


def _measured(req) -> MeasuredIVC:
    return MeasuredIVC(
        V=np.asarray(req.V_V, dtype=float),
        I=np.asarray(req.I_A, dtype=float),
        G_N_ratio=req.g_ratio,
        label=req.label,
    )


def run_fit(req):
    echo = _echo(req)
    data = _measured(req)
    fixed = {}
    for name in ("E_J", "E_C", "T"):
        value = getattr(req, name)
        if value is not None:
            fixed[name] = float(value)
    if req.rho is not None:
        if req.R_DC is not None:
            raise ConfigError("give rho or R_DC, not both")
        fixed["rho"] = float(req.rho)
    elif req.R_DC is not None:
        fixed["rho"] = EnvironmentParams(R_DC=req.R_DC).rho
    overlap = sorted(set(req.free) & set(fixed))
    if overlap:
        raise ConfigError(f"parameters cannot be both free and fixed: {overlap}")

    result = fit_model(
        data,
        free=req.free,
        fixed=fixed,
        model=req.model,
        broadened=req.broadened,
        window=(req.window_lo, req.window_hi),
        guesses=req.guesses,
    )
    params = {}
    for name, quantity in result.params.items():
        key = name if quantity.unit == "" else f"{name}_{quantity.unit}"
        params[key] = quantity.value
    payload = {
        "model": req.model,
        "broadened": req.broadened,
        "free": list(req.free),
        "params": params,
        "residual": result.residual,
        "iterations": result.iterations,
        "converged": result.converged,
        "message": result.message,
    }
    return echo, to_jsonable(payload), [
        "derivative-free simplex fit of the squared current residual"
    ]


def run_extract(req):
    echo = _echo(req)
    data = _measured(req)
    report = extract_switching(data, window=(req.window_lo, req.window_hi))
    deviation = None
    if req.I_model_max is not None:
        dev = deviation_qsm(float(req.I_model_max), report.I_S)
        deviation = {
            "delta": dev.delta,
            "I_model_max_A": dev.I_model_max,
            "I_S_A": dev.I_S,
        }
    payload = {
        "label": req.label,
        "I_S_A": report.I_S,
        "V_at_max_V": report.V_at_max,
        "window_V": [report.window[0], report.window[1]],
        "edge_maximum": report.edge_maximum,
        "deviation": deviation,
    }
    return echo, to_jsonable(payload), [
        "raw in-window maximum of the measured branch, no interpolation"
    ]


RUNNERS = {
    "curve": run_curve,
    "regime": run_regime,
    "simulate": run_simulate,
    "fit": run_fit,
    "extract": run_extract,
    "scan": run_scan,
}
