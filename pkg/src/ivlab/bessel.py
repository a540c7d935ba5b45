"""Modified Bessel functions I_nu(x) of complex order.

The thermal phase-diffusion IV characteristic needs the ratio
I_(1-i zeta)(u) / I_(-i zeta)(u) where zeta is proportional to voltage and
can reach several hundred. Two evaluation routes are provided:

* the integral representation

      I_nu(x) = (1/pi) * int_0^pi exp(x cos t) cos(nu t) dt
                - sin(pi nu)/pi * int_0^inf exp(-x cosh t - nu t) dt

  by adaptive quadrature. Its two terms cancel like exp(pi |Im nu| / 2), so
  it is only trustworthy for moderate |Im nu| and is used when
  |Im nu| <= 6;

* the ascending series in log-scaled form,

      I_nu(x) = exp(nu ln(x/2) - lgamma(nu + 1)) * M_nu(x),
      M_nu(x) = sum_k c_k,  c_0 = 1,  c_{k+1} = c_k (x^2/4)/((k+1)(nu+k+1)),

  used for large |Im nu|. M_nu is overflow-free, which also gives a stable
  ratio I_(nu+1)/I_nu = (x/2)/(nu+1) * M_(nu+1)/M_nu for any order, while
  I_nu itself overflows once |Gamma(nu+1)| underflows (|Im nu| around 450).
"""

import cmath
import math

import numpy as np
from scipy import integrate
from scipy.special import loggamma

from .errors import DomainError, NumericError

#: quadrature branch is used up to this |Im nu| (cancellation stays < 1e4)
IM_NU_QUADRATURE_LIMIT = 6.0

_QUAD_OPTS = dict(epsabs=1e-14, epsrel=1e-12, limit=200)
_EXP_ARG_MIN = 745.0  # exp(-745) underflows double precision
_LOG_DBL_MAX = 709.0


def _quad_checked(f, a, b, what):
    out = integrate.quad(f, a, b, full_output=1, **_QUAD_OPTS)
    if len(out) > 3:
        raise NumericError(f"quadrature failed for {what}: {out[3]}")
    return out[0]


def _tail_t_max(x: float, re_nu: float) -> float:
    """Truncation point where exp(-x cosh t - Re(nu) t) underflows.

    Fixed-point iteration on x cosh(t) + Re(nu) t = 745, padded by one unit;
    the discarded remainder is below exp(-745), i.e. exactly zero in double
    precision.
    """
    t = math.acosh(max(_EXP_ARG_MIN / x, 1.0) + 1.0)
    for _ in range(60):
        arg = max((_EXP_ARG_MIN - re_nu * t) / x, 1.0)
        t_new = math.acosh(arg + 1.0)
        if abs(t_new - t) < 1e-9:
            t = t_new
            break
        t = t_new
    return t + 1.0


def _integral_representation(nu: complex, x: float) -> complex:
    # first term, scaled by exp(x) so the integrand never overflows
    def f_re(t):
        return math.exp(x * (math.cos(t) - 1.0)) * cmath.cos(nu * t).real

    def f_im(t):
        return math.exp(x * (math.cos(t) - 1.0)) * cmath.cos(nu * t).imag

    j_re = _quad_checked(f_re, 0.0, math.pi, "periodic term (real part)")
    j_im = _quad_checked(f_im, 0.0, math.pi, "periodic term (imag part)")
    peri = complex(j_re, j_im) / math.pi
    log_mag = x + math.log(max(abs(peri), 5e-324))
    if log_mag > _LOG_DBL_MAX:
        raise NumericError(
            f"I_nu({x}) at nu={nu} exceeds double range "
            f"(log magnitude {log_mag:.1f})"
        )
    term1 = peri * math.exp(x)

    s = cmath.sin(math.pi * nu) / math.pi
    if s == 0:
        return term1
    t_max = _tail_t_max(x, nu.real)

    def g_re(t):
        z = cmath.exp(-x * math.cosh(t) - nu * t)
        return z.real

    def g_im(t):
        z = cmath.exp(-x * math.cosh(t) - nu * t)
        return z.imag

    k_re = _quad_checked(g_re, 0.0, t_max, "tail term (real part)")
    k_im = _quad_checked(g_im, 0.0, t_max, "tail term (imag part)")
    return term1 - s * complex(k_re, k_im)


def scaled_series_m(nu: complex, x: float, max_terms: int = 2000) -> complex:
    """Unit-leading-term series M_nu(x); I_nu = (x/2)^nu / Gamma(nu+1) * M_nu."""
    z = 0.25 * x * x
    c = 1.0 + 0.0j
    s = 1.0 + 0.0j
    k_min = int(x) + 8
    for k in range(max_terms):
        d = (k + 1.0) * (nu + k + 1.0)
        if d == 0:
            raise NumericError(f"series undefined: order {nu} hits a pole at term {k}")
        c *= z / d
        s += c
        if k >= k_min and abs(c) <= 1e-17 * abs(s):
            return s
    raise NumericError(f"series for I_nu did not converge (nu={nu}, x={x})")


def scaled_series_m_array(nu: np.ndarray, x: float, max_terms: int = 2000) -> np.ndarray:
    """Vectorized M_nu(x) over an array of complex orders (shared x)."""
    nu = np.asarray(nu, dtype=complex)
    z = 0.25 * x * x
    c = np.ones(nu.shape, dtype=complex)
    s = np.ones(nu.shape, dtype=complex)
    k_min = int(x) + 8
    for k in range(max_terms):
        c = c * (z / ((k + 1.0) * (nu + (k + 1.0))))
        s = s + c
        if k >= k_min and np.max(np.abs(c)) <= 1e-17 * np.min(np.abs(s)):
            return s
    raise NumericError(f"vectorized series for I_nu did not converge (x={x})")


def _series_branch(nu: complex, x: float) -> complex:
    m = scaled_series_m(nu, x)
    log_pref = nu * math.log(0.5 * x) - loggamma(nu + 1.0)
    log_mag = log_pref.real + math.log(max(abs(m), 5e-324))
    if log_mag > _LOG_DBL_MAX:
        raise NumericError(
            f"I_nu overflows double precision at nu={nu}, x={x} "
            f"(log magnitude {log_mag:.1f}); use the ratio form instead"
        )
    if log_mag < -_EXP_ARG_MIN:
        return 0.0 + 0.0j
    return cmath.exp(log_pref) * m


def bessel_i_complex_order(nu: complex, x: float) -> complex:
    """I_nu(x) for complex order nu and real x > 0.

    Uses the integral representation for |Im nu| <= 6 and the log-scaled
    ascending series beyond, where the representation's two terms would
    cancel catastrophically. Raises NumericError when the value itself
    leaves the double range.
    """
    nu = complex(nu)
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0):
        raise DomainError(f"argument x must be positive and finite, got {x!r}")
    if not (cmath.isfinite(nu) and abs(nu) <= 1e3):
        raise DomainError(f"order magnitude must be finite and <= 1e3, got {nu!r}")
    if abs(nu.imag) <= IM_NU_QUADRATURE_LIMIT:
        return _integral_representation(nu, x)
    return _series_branch(nu, x)


def bessel_i_ratio_next(nu: complex, x: float) -> complex:
    """Stable I_(nu+1)(x) / I_nu(x); never overflows.

    The (x/2)^nu / Gamma(nu+1) prefactors cancel algebraically, leaving
    (x/2)/(nu+1) times a ratio of order-unity scaled series.
    """
    nu = complex(nu)
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0):
        raise DomainError(f"argument x must be positive and finite, got {x!r}")
    denom = scaled_series_m(nu, x)
    if abs(denom) < 1e-250:
        raise NumericError(f"scaled series vanished for nu={nu}, x={x}")
    return (0.5 * x / (nu + 1.0)) * scaled_series_m(nu + 1.0, x) / denom
