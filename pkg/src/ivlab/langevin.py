"""Overdamped phase diffusion in the tilted washboard potential.

Dimensionless reduction of the resistively shunted junction with thermal
noise: measuring time in units of t_0 = hbar/(2 e R I_0) and tilting by
x = I_B/I_0, the phase obeys

    d phi = (x - sin phi) du + sqrt(2/g) dW,      g = beta E_J_eff,

where the noise strength follows from the fluctuation-dissipation relation
of the ohmic shunt. The voltage follows from the second Josephson relation,
V = R I_0 <d phi/du>, and the junction-element current is I_J = I_B - V/R.

Two independent routes to the stationary mean velocity are provided: an
Euler-Maruyama Monte-Carlo ensemble (`simulate`) and the exact stationary
diffusion solution in a tilted periodic potential, computed by double
quadrature (`fp_mean_velocity`). g = inf switches the noise off.
"""

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numba
import numpy as np

from .errors import DomainError, NumericError
from .qsm import IVCurve

_CHUNK = 1 << 20
_BLOCK = 16384
_TWO_PI = 2.0 * math.pi
_ZERO_CHUNK = None


@dataclass(frozen=True)
class SimConfig:
    """One stochastic run specification.

    Budgets default to values sized so that the slowest point of the
    standard cross-check grid (g=5, x=0.2, rare-hopping regime) resolves
    its drift velocity to under two percent statistical error.
    """

    g: float
    x: float
    dt: float = 0.01
    n_steps: int = 20_000_000
    burn_in: int = 100_000
    n_traj: int = 128
    seed: int = 1_000_003

    def __post_init__(self):
        if not (isinstance(self.g, (int, float)) and self.g > 0):
            raise DomainError(f"g must be positive, got {self.g!r}")
        if not (isinstance(self.x, (int, float)) and math.isfinite(self.x)):
            raise DomainError(f"x must be finite, got {self.x!r}")
        if not (isinstance(self.dt, (int, float)) and 0 < self.dt <= 0.01):
            raise DomainError(f"dt must lie in (0, 0.01], got {self.dt!r}")
        if not (isinstance(self.n_steps, int) and self.n_steps >= 1):
            raise DomainError(f"n_steps must be a positive integer, got {self.n_steps!r}")
        if not (isinstance(self.burn_in, int) and 0 <= self.burn_in < self.n_steps):
            raise DomainError(
                f"burn_in must satisfy 0 <= burn_in < n_steps, got {self.burn_in!r}"
            )
        if not (isinstance(self.n_traj, int) and self.n_traj >= 1):
            raise DomainError(f"n_traj must be a positive integer, got {self.n_traj!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass(frozen=True)
class SimResult:
    """Ensemble statistics of the mean phase velocity."""

    mean_velocity: float
    std_error: float
    n_effective: int
    config: SimConfig


@dataclass(frozen=True)
class PhaseState:
    """Unwrapped phase and dimensionless time of a single trajectory."""

    phi: float
    u: float


@numba.njit(cache=True)
def _advance_numba(phi, x, dt, amp, xi, n):
    for i in range(n):
        phi += (x - math.sin(phi)) * dt + amp * xi[i]
    return phi


def _sin_ieee(v: float) -> float:
    # CPython's math.sin raises on infinite input where the compiled kernel
    # propagates nan; the twin must follow IEEE so divergence re-walks
    # terminate instead of crashing mid-chunk
    try:
        return math.sin(v)
    except ValueError:
        return math.nan


def _advance_python(phi, x, dt, amp, xi, n):
    """Pure-Python twin of the compiled step loop (bit-identical)."""
    for i in range(n):
        phi += (x - _sin_ieee(phi)) * dt + amp * xi[i]
    return phi


@numba.njit(cache=True)
def _advance_block_numba(phi, x, dt, amp, xi, n):
    """Advance all trajectories n steps; xi holds one noise row per trajectory.

    The update expression is identical to _advance_numba step for step, so
    each trajectory's path is bit-identical to a scalar run on its own
    stream; interleaving trajectories only breaks the serial sin dependency
    chain for the CPU.
    """
    for s in range(n):
        for k in range(phi.shape[0]):
            phi[k] += (x - math.sin(phi[k])) * dt + amp * xi[k, s]


def _first_bad_step(phi, x, dt, amp, xi, n):
    for i in range(n):
        phi += (x - math.sin(phi)) * dt + amp * xi[i]
        if not math.isfinite(phi):
            return i
    return n - 1


def _zero_chunk():
    global _ZERO_CHUNK
    if _ZERO_CHUNK is None:
        _ZERO_CHUNK = np.zeros(_CHUNK)
    return _ZERO_CHUNK


def _trajectory_stream(seed: int, index: int) -> np.random.Generator:
    """Independent, partition-stable noise stream for one trajectory.

    Each trajectory's stream is derived solely from (seed, index), so the
    draws a trajectory sees do not depend on how many trajectories run or
    in what order they are scheduled.
    """
    return np.random.Generator(np.random.PCG64DXSM(np.random.SeedSequence((seed, index))))


def _segment_lengths(cfg: SimConfig, limit: int):
    """Step-count segments cut at the burn-in boundary and at limit-size."""
    done = 0
    while done < cfg.n_steps:
        m = min(limit, cfg.n_steps - done)
        if done < cfg.burn_in < done + m:
            m = cfg.burn_in - done
        yield done, m
        done += m


def _run_trajectory(cfg: SimConfig, index: int, advance) -> float:
    """Mean velocity of one trajectory from its total displacement.

    Sequential reference path; `simulate` uses the blocked kernel, which
    must reproduce this bit for bit.
    """
    rng = _trajectory_stream(cfg.seed, index)
    amp = 0.0 if math.isinf(cfg.g) else math.sqrt(2.0 * cfg.dt / cfg.g)
    phi = 0.0
    phi_burn = 0.0
    for done, m in _segment_lengths(cfg, _CHUNK):
        xi = _zero_chunk()[:m] if amp == 0.0 else rng.standard_normal(m)
        phi_prev = phi
        phi = advance(phi, cfg.x, cfg.dt, amp, xi, m)
        if not math.isfinite(phi):
            bad = _first_bad_step(phi_prev, cfg.x, cfg.dt, amp, xi, m)
            raise NumericError(
                f"trajectory {index} became non-finite at step {done + bad}"
            )
        if done + m == cfg.burn_in:
            phi_burn = phi
    return (phi - phi_burn) / ((cfg.n_steps - cfg.burn_in) * cfg.dt)


def _locate_divergence(cfg: SimConfig, index: int) -> int:
    """First step at which trajectory `index` goes non-finite (re-walk)."""
    rng = _trajectory_stream(cfg.seed, index)
    amp = 0.0 if math.isinf(cfg.g) else math.sqrt(2.0 * cfg.dt / cfg.g)
    phi = 0.0
    for done, m in _segment_lengths(cfg, _CHUNK):
        xi = _zero_chunk()[:m] if amp == 0.0 else rng.standard_normal(m)
        nxt = _advance_python(phi, cfg.x, cfg.dt, amp, xi, m)
        if not math.isfinite(nxt):
            return done + _first_bad_step(phi, cfg.x, cfg.dt, amp, xi, m)
        phi = nxt
    return cfg.n_steps - 1


def _results_from_velocities(cfg: SimConfig, velocities: np.ndarray) -> SimResult:
    mean = float(np.mean(velocities))
    if cfg.n_traj > 1:
        std_error = float(np.std(velocities, ddof=1) / math.sqrt(cfg.n_traj))
    else:
        std_error = 0.0
    return SimResult(
        mean_velocity=mean,
        std_error=std_error,
        n_effective=cfg.n_traj,
        config=cfg,
    )


def _simulate_sequential(cfg: SimConfig, advance=_advance_numba) -> SimResult:
    """Reference implementation: one trajectory at a time."""
    velocities = np.array([_run_trajectory(cfg, k, advance) for k in range(cfg.n_traj)])
    return _results_from_velocities(cfg, velocities)


def simulate(cfg: SimConfig) -> SimResult:
    """Euler-Maruyama ensemble estimate of the stationary mean velocity.

    mean_velocity is the ensemble average of per-trajectory displacement
    rates after burn-in; std_error is the standard error over trajectories
    (0 for a single trajectory). Identical configs give bit-identical
    results; the answer equals the sequential reference path bit for bit
    because each trajectory keeps its own stream and op order.
    """
    amp = 0.0 if math.isinf(cfg.g) else math.sqrt(2.0 * cfg.dt / cfg.g)
    gens = None if amp == 0.0 else [
        _trajectory_stream(cfg.seed, k) for k in range(cfg.n_traj)
    ]
    # rows padded by one cache line so row strides do not alias in L1
    buf = np.zeros((cfg.n_traj, _BLOCK + 8))
    phi = np.zeros(cfg.n_traj)
    phi_burn = np.zeros(cfg.n_traj)
    for done, m in _segment_lengths(cfg, _BLOCK):
        if gens is not None:
            for k in range(cfg.n_traj):
                gens[k].standard_normal(m, out=buf[k, :m])
        _advance_block_numba(phi, cfg.x, cfg.dt, amp, buf, m)
        if not np.all(np.isfinite(phi)):
            bad = int(np.flatnonzero(~np.isfinite(phi))[0])
            raise NumericError(
                f"trajectory {bad} became non-finite at step "
                f"{_locate_divergence(cfg, bad)}"
            )
        if done + m == cfg.burn_in:
            phi_burn[:] = phi
    velocities = (phi - phi_burn) / ((cfg.n_steps - cfg.burn_in) * cfg.dt)
    return _results_from_velocities(cfg, velocities)


@lru_cache(maxsize=None)
def _gauss_legendre_0_2pi(n: int):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return math.pi * (nodes + 1.0), math.pi * weights


def _fp_log_denominator(g: float, x: float, n: int) -> float:
    """log of the double integral over one period, in overflow-safe form.

    Integrand exp(g [cos(phi - y) - cos(phi) - x y]) on [0, 2pi]^2;
    periodic trapezoid in phi, Gauss-Legendre in y, scaled by the analytic
    maximum of the exponent (the forward barrier height for x < 1, zero
    otherwise).
    """
    phi = np.arange(n) * (_TWO_PI / n)
    y, wy = _gauss_legendre_0_2pi(n)
    if x < 1.0:
        m_log = g * (2.0 * math.sqrt(1.0 - x * x) - x * (math.pi - 2.0 * math.asin(x)))
        m_log = max(m_log, 0.0)
    else:
        m_log = 0.0
    acc = 0.0
    block = 512
    cos_phi = np.cos(phi)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        expo = g * (
            np.cos(phi[lo:hi, None] - y[None, :])
            - cos_phi[lo:hi, None]
            - x * y[None, :]
        )
        acc += float(np.sum(np.exp(expo - m_log) @ wy))
    if acc <= 0.0:
        raise NumericError(f"stationary-state integral underflowed at g={g}, x={x}")
    return m_log + math.log(acc * (_TWO_PI / n))


def fp_mean_velocity(g: float, x: float) -> float:
    """Exact stationary mean phase velocity in the tilted periodic potential.

    Solves the stationary diffusion problem with periodic flux for
    U(phi) = -cos(phi) - x phi at inverse noise strength g, by the standard
    double-quadrature closed form; node counts are doubled until the result
    is stable to 1e-9 relative.
    """
    if not (isinstance(g, (int, float)) and math.isfinite(g) and g > 0):
        raise DomainError(f"g must be positive and finite, got {g!r}")
    if not (isinstance(x, (int, float)) and math.isfinite(x)):
        raise DomainError(f"x must be finite, got {x!r}")
    if x == 0:
        return 0.0
    if x < 0:
        return -fp_mean_velocity(g, -x)
    # v = 2 pi D (1 - exp(-2 pi x g)) / denominator, D = 1/g
    log_num = math.log(_TWO_PI / g) + math.log(-math.expm1(-_TWO_PI * x * g))
    prev = None
    for n in (128, 256, 512, 1024, 2048, 4096):
        log_v = log_num - _fp_log_denominator(g, x, n)
        v = math.exp(log_v) if log_v > -745.0 else 0.0
        if prev is not None and abs(v - prev) <= 1e-9 * max(abs(v), 1e-300):
            return v
        prev = v
    raise NumericError(
        f"stationary mean velocity quadrature did not converge at g={g}, x={x}"
    )


def junction_iv_from_sim(bias_points, template: SimConfig, R: float, I_0: float):
    """IV curve of the junction element from stochastic runs.

    For each dimensionless bias x: V = R I_0 <v> (second Josephson relation
    in the dimensionless reduction) and I_J = I_B - V/R = I_0 (x - <v>).

    Returns
    -------
    (IVCurve, list of SimResult)
        Curve sorted by voltage, with the per-point statistics in the same
        order.
    """
    if not (isinstance(R, (int, float)) and math.isfinite(R) and R > 0):
        raise DomainError(f"R must be positive and finite, got {R!r}")
    if not (isinstance(I_0, (int, float)) and math.isfinite(I_0) and I_0 > 0):
        raise DomainError(f"I_0 must be positive and finite, got {I_0!r}")
    xs = [float(x) for x in bias_points]
    if not xs:
        raise DomainError("bias_points must be non-empty")
    results = [simulate(replace(template, x=x)) for x in xs]
    V = np.array([R * I_0 * r.mean_velocity for r in results])
    I_J = np.array([I_0 * (x - r.mean_velocity) for x, r in zip(xs, results)])
    order = np.argsort(V, kind="stable")
    V, I_J = V[order], I_J[order]
    if V.size > 1 and not np.all(np.diff(V) > 0):
        raise NumericError(
            "simulated voltages are not strictly increasing; "
            "raise the budgets or space the bias points further apart"
        )
    curve = IVCurve(V=V, I=I_J, meta="washboard-sim")
    return curve, [results[i] for i in order]
