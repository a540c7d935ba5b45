"""Measured-data pipeline: ingestion, switching-current extraction, the
relative-deviation metric, model fitting and conductance scans.

Fitting is a derivative-free simplex search over the squared current
residual; power laws are fitted as straight lines in log-log space so the
exponent recovery is a linear problem.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .broadening import convolve_model, sigma_capacitive
from .errors import ConfigError, DomainError, ExtractionError, FitError
from .iz import IZParams, iz_current, iz_lorentzian
from .qsm import JunctionParams, RegimeReport, classify_regime, cooper_pair_current_qsm
from .units import Quantity

_PARAM_NAMES = ("E_J", "E_C", "T", "rho")
_PARAM_UNITS = {"E_J": "J", "E_C": "J", "T": "K", "rho": ""}
#: comparison window for fits and extraction: the low-voltage regime
DEFAULT_WINDOW = (0.0, 30e-6)


@dataclass(frozen=True)
class MeasuredIVC:
    """A measured IV characteristic with its conductance tag.

    Points are sorted by voltage on construction; duplicate voltages are
    rejected. G_N_ratio is the normal-state conductance in units of the
    conductance quantum.
    """

    V: np.ndarray
    I: np.ndarray
    G_N_ratio: float
    label: str = ""

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        I = np.asarray(self.I, dtype=float)
        if V.ndim != 1 or V.shape != I.shape:
            raise DomainError("measured curve needs matching 1-d V and I arrays")
        if V.size < 8:
            raise DomainError(f"measured curve needs at least 8 points, got {V.size}")
        if not (np.all(np.isfinite(V)) and np.all(np.isfinite(I))):
            raise DomainError("measured curve contains non-finite values")
        order = np.argsort(V, kind="stable")
        V, I = V[order], I[order]
        if not np.all(np.diff(V) > 0):
            raise DomainError("measured voltages must be distinct")
        if not (0.0 < self.G_N_ratio < 1.0):
            raise DomainError(f"G_N_ratio must lie in (0, 1), got {self.G_N_ratio!r}")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "I", I)


@dataclass(frozen=True)
class SwitchingReport:
    """Maximum supercurrent of the phase-diffusion branch in a window."""

    I_S: float
    V_at_max: float
    window: tuple
    edge_maximum: bool = False


@dataclass(frozen=True)
class DeviationReport:
    """Relative deviation |I_model_max - I_S| / I_model_max."""

    delta: float
    I_model_max: float
    I_S: float


@dataclass(frozen=True)
class FitResult:
    """Fitted parameter map with units, plus convergence diagnostics."""

    params: dict
    residual: float
    iterations: int
    converged: bool
    message: str = ""


def extract_switching(data: MeasuredIVC, window=DEFAULT_WINDOW) -> SwitchingReport:
    """Largest sampled current at positive voltage inside the window.

    No interpolation or smoothing: the raw in-window maximum is reported,
    ties broken toward smaller voltage. If the maximum sits on the last
    in-window point the report carries an edge_maximum flag, since the true
    peak may lie beyond the window.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (lo < hi):
        raise ExtractionError(f"window must satisfy lo < hi, got {window!r}")
    mask = (data.V > 0) & (data.V >= lo) & (data.V <= hi)
    n_in = int(np.count_nonzero(mask))
    if n_in == 0:
        raise ExtractionError(
            f"no positive-voltage points inside window [{lo!r}, {hi!r}]"
        )
    if n_in < 3:
        raise ExtractionError(
            f"need at least 3 points inside the window, got {n_in}"
        )
    V = data.V[mask]
    I = data.I[mask]
    k = int(np.argmax(I))  # first occurrence = smallest voltage on ties
    return SwitchingReport(
        I_S=float(I[k]),
        V_at_max=float(V[k]),
        window=(lo, hi),
        edge_maximum=(k == I.size - 1),
    )


def deviation_qsm(I_model_max: float, I_S: float) -> DeviationReport:
    """Relative deviation of a measured switching current from the model max."""
    if not (isinstance(I_model_max, (int, float)) and math.isfinite(I_model_max) and I_model_max > 0):
        raise DomainError(f"I_model_max must be positive and finite, got {I_model_max!r}")
    if not (isinstance(I_S, (int, float)) and math.isfinite(I_S)):
        raise DomainError(f"I_S must be finite, got {I_S!r}")
    return DeviationReport(
        delta=abs(I_model_max - I_S) / I_model_max,
        I_model_max=float(I_model_max),
        I_S=float(I_S),
    )


def nelder_mead(f, x0, bounds, rel_tol=1e-10, x_tol=1e-12, max_iter=10_000):
    """Derivative-free simplex minimizer with reflecting bounds.

    Converges when the simplex's relative residual spread falls below
    rel_tol, or (machine-precision backstop) when its relative parameter
    extent falls below x_tol; gives up after max_iter iterations. Bound
    violations are folded back into the box by reflection.

    Returns (x_best, f_best, iterations, converged).
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)

    def clamp(x):
        x = x.copy()
        for _ in range(64):
            below = x < lo
            above = x > hi
            if not (below.any() or above.any()):
                break
            x[below] = 2.0 * lo[below] - x[below]
            x[above] = 2.0 * hi[above] - x[above]
        return np.clip(x, lo, hi)

    simplex = [clamp(x0)]
    for i in range(n):
        step = 0.05 * x0[i] if x0[i] != 0 else 0.00025
        v = x0.copy()
        v[i] += step
        simplex.append(clamp(v))
    simplex = np.array(simplex)
    values = np.array([f(v) for v in simplex])

    alpha, gamma, beta_c, delta = 1.0, 2.0, 0.5, 0.5
    iterations = 0
    converged = False
    while iterations < max_iter:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        f_lo, f_hi = values[0], values[-1]
        spread = f_hi - f_lo
        scale = max(abs(f_lo), abs(f_hi))
        if spread <= rel_tol * scale or (scale == 0 and spread == 0):
            converged = True
            break
        extent = np.max(np.abs(simplex[1:] - simplex[0]), axis=0)
        x_scale = np.maximum(np.abs(simplex[0]), 1e-300)
        if np.all(extent <= x_tol * x_scale):
            converged = True
            break
        iterations += 1
        centroid = simplex[:-1].mean(axis=0)
        xr = clamp(centroid + alpha * (centroid - simplex[-1]))
        fr = f(xr)
        if fr < values[0]:
            xe = clamp(centroid + gamma * (xr - centroid))
            fe = f(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        else:
            xc = clamp(centroid + beta_c * (simplex[-1] - centroid))
            fc = f(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    simplex[i] = clamp(simplex[0] + delta * (simplex[i] - simplex[0]))
                    values[i] = f(simplex[i])
    order = np.argsort(values, kind="stable")
    simplex, values = simplex[order], values[order]
    return simplex[0], float(values[0]), iterations, converged


def _model_current(V, params, model, broadened):
    p = JunctionParams(E_J=params["E_J"], E_C=params["E_C"], T=params["T"])
    rho = params["rho"]
    if model == "qsm":
        func = lambda v: cooper_pair_current_qsm(v, p, rho)
    elif model == "iz":
        izp = IZParams(E_J_eff=params["E_J"], T=params["T"], rho=rho)
        func = lambda v: iz_current(v, izp)
    elif model == "lorentzian":
        izp = IZParams(E_J_eff=params["E_J"], T=params["T"], rho=rho)
        func = lambda v: iz_lorentzian(v, izp)
    else:
        raise ConfigError(f"unknown model {model!r}")
    if broadened:
        sigma = sigma_capacitive(params["E_C"], params["T"])
        return convolve_model(func, sigma, V).I
    return np.asarray(func(np.asarray(V, dtype=float)), dtype=float)


def fit_model(
    data: MeasuredIVC,
    free,
    fixed,
    model: str = "qsm",
    broadened: bool = False,
    window=DEFAULT_WINDOW,
    guesses=None,
) -> FitResult:
    """Least-squares fit of a phase-diffusion model to measured points.

    Parameters
    ----------
    data : MeasuredIVC
    free : sequence of parameter names out of {"E_J", "E_C", "T", "rho"}
    fixed : mapping with SI values for the remaining parameters
    model : "qsm", "iz" or "lorentzian"
    broadened : bool
        Convolve the model with the capacitive Gaussian of width
        sqrt(2 E_C k_B T) before comparing.
    window : (lo, hi)
        Only points with lo < V <= hi enter the residual.
    guesses : mapping
        Initial SI values for every free parameter.

    Returns
    -------
    FitResult
        params carries every model parameter (fitted and fixed) as a
        unit-tagged quantity.
    """
    free = list(free)
    if not free:
        raise ConfigError("free parameter list must not be empty")
    for name in free:
        if name not in _PARAM_NAMES:
            raise ConfigError(f"unknown free parameter {name!r}")
    guesses = dict(guesses or {})
    missing = [n for n in free if n not in guesses]
    if missing:
        raise ConfigError(f"missing initial guesses for {missing}")
    fixed = dict(fixed or {})
    for name in _PARAM_NAMES:
        if name not in free and name not in fixed:
            raise ConfigError(f"parameter {name!r} is neither free nor fixed")
    lo, hi = float(window[0]), float(window[1])
    mask = (data.V > lo) & (data.V <= hi)
    if not mask.any():
        raise ConfigError(f"no data points inside the fit window [{lo!r}, {hi!r}]")
    V = data.V[mask]
    I = data.I[mask]

    bounds_si = {"E_J": (0.0, math.inf), "E_C": (0.0, math.inf),
                 "T": (0.0, math.inf), "rho": (0.0, 1.0)}
    scales = np.array([float(guesses[n]) for n in free])
    if not np.all(np.isfinite(scales) & (scales > 0)):
        raise ConfigError("initial guesses must be positive and finite")

    def assemble(z):
        params = dict(fixed)
        for name, zi, s in zip(free, z, scales):
            params[name] = zi * s
        return params

    def loss(z):
        params = assemble(z)
        try:
            model_i = _model_current(V, params, model, broadened)
        except DomainError:
            return math.inf  # reflected point still outside validity
        r = I - model_i
        return float(r @ r)

    z0 = np.ones(len(free))
    zbounds = []
    for name, s in zip(free, scales):
        b_lo, b_hi = bounds_si[name]
        zbounds.append((b_lo / s, min(b_hi / s, 1e12)))
    z_best, f_best, iterations, converged = nelder_mead(loss, z0, zbounds)
    initial = loss(z0)
    if converged and not (f_best <= initial):
        converged = False
    fitted = assemble(z_best)
    params = {
        name: Quantity(float(fitted[name]), _PARAM_UNITS[name])
        for name in _PARAM_NAMES
    }
    return FitResult(
        params=params,
        residual=f_best,
        iterations=iterations,
        converged=converged,
        message="" if converged else "iteration limit reached",
    )


def fit_powerlaw(points, exponent="free") -> FitResult:
    """Fit I = a * (G_N/G_0)**p, with p free or fixed to 1 or 2.

    Performed in log-log space: exact power-law data recovers the exponent
    to linear-algebra precision.
    """
    pts = [(float(g), float(i)) for g, i in points]
    if len(pts) < 3:
        raise FitError(f"need at least 3 points, got {len(pts)}")
    g = np.array([p[0] for p in pts])
    cur = np.array([p[1] for p in pts])
    if not (np.all(g > 0) and np.all(cur > 0)):
        raise FitError("power-law fit needs strictly positive points")
    lg = np.log(g)
    li = np.log(cur)
    if np.ptp(lg) == 0:
        raise FitError("degenerate abscissae: all conductance values equal")
    if exponent == "free":
        design = np.column_stack([np.ones_like(lg), lg])
        coef, *_ = np.linalg.lstsq(design, li, rcond=None)
        ln_a, p = float(coef[0]), float(coef[1])
        iterations = 1
    else:
        p = float(exponent)
        ln_a = float(np.mean(li - p * lg))
        iterations = 1
    a = math.exp(ln_a)
    residual = float(np.sum((cur - a * g**p) ** 2))
    return FitResult(
        params={"a": Quantity(a, "A"), "p": Quantity(p, "")},
        residual=residual,
        iterations=iterations,
        converged=True,
    )


@dataclass(frozen=True)
class ScanRow:
    """One conductance setting of a regime scan."""

    g_ratio: float
    E_J: float
    report: RegimeReport = field(repr=False)

    @property
    def eta(self):
        return self.report.eta

    @property
    def theta(self):
        return self.report.theta

    @property
    def ratio(self):
        return self.report.ratio

    @property
    def classification(self):
        return self.report.classification


def regime_scan(sweep, rho: float):
    """Regime classification along a conductance sweep.

    sweep is a sequence of (G_N/G_0, JunctionParams); returns one ScanRow
    per entry, in order.
    """
    entries = list(sweep)
    if not entries:
        raise DomainError("sweep must not be empty")
    rows = []
    for g_ratio, params in entries:
        report = classify_regime(params, rho)
        rows.append(ScanRow(g_ratio=float(g_ratio), E_J=params.E_J, report=report))
    return rows
