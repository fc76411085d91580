"""Scalar special functions used by the contour kernels and fading formulas.

Everything here is a thin, contract-enforcing layer over scipy.special:

* ``ln_gamma``  -- principal-branch complex log-gamma with pole detection,
* ``gamma_real`` -- real gamma with pole detection and explicit overflow,
* ``erfc``      -- complementary error function,
* ``bessel_i``  -- modified Bessel I_v with explicit overflow reporting,
  using the exponentially scaled form internally.

The evaluation contracts (pole tolerance 1e-12, explicit overflow errors)
are what the remainder of the package relies on; the heavy lifting is
delegated to scipy's battle-tested implementations.
"""

from __future__ import annotations

import numpy as np
import scipy.special as sps

from .errors import ParameterError, PoleError, RangeOverflowError

#: Absolute distance from a non-positive integer at which gamma evaluation
#: is refused rather than allowed to blow up.
POLE_TOLERANCE = 1e-12

_LOG_FLOAT_MAX = float(np.log(np.finfo(float).max))  # ~709.78


def _near_nonpositive_integer(x, tol=POLE_TOLERANCE):
    """True where x is within ``tol`` of 0, -1, -2, ..."""
    x = np.asarray(x, dtype=float)
    return (x <= 0.5) & (np.abs(x - np.round(x)) <= tol)


def ln_gamma(z):
    """Principal-branch log-gamma for complex (or real) argument.

    Accepts scalars or arrays. Raises PoleError when any entry lies within
    POLE_TOLERANCE of a pole (the non-positive integers on the real axis).
    """
    z = np.asarray(z)
    if z.dtype.kind != "c":
        z = z.astype(complex)
    on_axis = np.abs(z.imag) <= POLE_TOLERANCE
    if np.any(on_axis & _near_nonpositive_integer(z.real)):
        raise PoleError("ln_gamma evaluated at a non-positive integer pole")
    out = sps.loggamma(z)
    if out.ndim == 0:
        return complex(out)
    return out


def gamma_real(x):
    """Real gamma function with explicit pole and overflow reporting."""
    x = float(x)
    if _near_nonpositive_integer(x):
        raise PoleError(f"gamma_real pole at x={x!r}")
    if x > 171.7:
        # lgamma(171.7) is already past log(DBL_MAX)
        raise RangeOverflowError(f"gamma_real overflows double range at x={x!r}")
    return float(sps.gamma(x))


def ln_gamma_real(x):
    """Real log-gamma (log |Gamma(x)| is NOT what we want: x must be > 0)."""
    x = float(x)
    if x <= 0.0:
        raise ParameterError(f"ln_gamma_real requires x > 0, got {x!r}")
    return float(sps.gammaln(x))


def erfc(x):
    """Complementary error function, scalar or array."""
    return sps.erfc(x)


def bessel_i(order, x):
    """Modified Bessel function I_order(x) for order >= -0.5, x >= 0.

    Overflow (e^x beyond double range) is reported as RangeOverflowError
    instead of returning inf; internally the exponentially scaled variant
    is used so the check is exact rather than incidental.
    """
    order = float(order)
    if order < -0.5:
        raise ParameterError(f"bessel_i requires order >= -0.5, got {order!r}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ParameterError("bessel_i requires x >= 0")
    scaled = sps.ive(order, x_arr)
    with np.errstate(over="ignore"):
        out = scaled * np.exp(x_arr)
    if np.any(~np.isfinite(out) & np.isfinite(x_arr)):
        raise RangeOverflowError(
            f"bessel_i({order}, x) overflows double range for x up to "
            f"{float(np.max(x_arr))!r}"
        )
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return float(out)
    return out


def bessel_i_scaled(order, x):
    """e^{-x} I_order(x); never overflows for finite x >= 0."""
    order = float(order)
    if order < -0.5:
        raise ParameterError(f"bessel_i_scaled requires order >= -0.5, got {order!r}")
    return sps.ive(order, np.asarray(x, dtype=float))
