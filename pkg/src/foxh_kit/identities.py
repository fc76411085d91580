"""Integral and derivative identities for bivariate H-functions.

Each operation takes a bivariate descriptor H together with argument scales
(a, b) — the object under transformation is the function u -> H[a*u, b*u] —
and returns the closed form as a :class:`ScaledBivariateH` built by parameter
surgery on the descriptor:

* ``definite_integral``: F(X) = integral_0^X H[a x, b x] dx,
* ``laplace_transform``: integral_0^inf e^{-s_hat x} H[a x, b x] dx,
* ``kernel_integral``: the same against exp(-k sqrt x), sqrt(x) exp(-k sqrt x)
  or erfc(sqrt(k x)) kernels,
* ``derivative_x``: d/dx H[a x, b x] (two equivalent parameter-shift forms),
* ``derivative_arg``: d/da (or d/db) of H[a x, b x].

All of them derive from the Mellin kernel of the weight: for example
integral_0^X x^{s+t} dx = X^{s+t+1}/(s+t+1) = X^{s+t+1} Gamma(s+t+1)/Gamma(s+t+2),
which is exactly one prepended joint numerator gamma and one appended joint
denominator gamma evaluated at the rescaled arguments.

Every returned object carries an independent ``oracle_check`` hook: adaptive
real-axis quadrature (scipy QAGS) of the defining integral, or central finite
differences with one Richardson extrapolation step for the derivatives.  The
oracle path never uses the transformed descriptor, so the two routes are
genuinely independent.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy import integrate

from .errors import DivergenceError, ParameterError
from .fox_h import (
    BivariateHDescriptor,
    GammaPair,
    GammaTriple,
    OracleReport,
    ScaledBivariateH,
    get_evaluator,
    validate,
)

__all__ = [
    "definite_integral",
    "laplace_transform",
    "kernel_integral",
    "derivative_x",
    "derivative_arg",
    "KERNEL_KINDS",
]

KERNEL_KINDS = ("exp_sqrt", "sqrt_exp_sqrt", "erfc_sqrt")

_FD_STEP = 1e-4  # relative central-difference step for derivative oracles


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _require_bivariate(desc):
    if not isinstance(desc, BivariateHDescriptor):
        raise ParameterError("identities operate on bivariate descriptors")
    validate(desc, run_screen=False)


def _require_positive(**kwargs):
    for name, v in kwargs.items():
        if not (np.isfinite(v) and v > 0):
            raise ParameterError(f"{name} must be positive and finite, got {v!r}")


def _origin_exponent(desc: BivariateHDescriptor) -> float:
    """Leading power of u in H[a u, b u] as u -> 0+.

    Governed by the right pole families (the numerator entries of the channel
    lower blocks); a channel without right poles decays faster than any power
    and contributes +inf.
    """
    ps = (
        min(g.param / g.coef for g in desc.s_lower[: desc.m2])
        if desc.m2 > 0
        else math.inf
    )
    pt = (
        min(g.param / g.coef for g in desc.t_lower[: desc.m3])
        if desc.m3 > 0
        else math.inf
    )
    return ps + pt


def _screen_origin(desc, extra_power: float, what: str):
    expo = _origin_exponent(desc) + extra_power
    if not expo > -1.0:
        raise DivergenceError(
            f"{what} diverges at the origin: integrand behaves like "
            f"u^{expo:.4g} as u -> 0+"
        )


def _prepend_joint_upper(desc, triples):
    return replace(
        desc,
        joint_upper=tuple(triples) + desc.joint_upper,
        n1=desc.n1 + len(triples),
    )


def _append_joint_lower(desc, triples):
    return replace(desc, joint_lower=desc.joint_lower + tuple(triples))


def _quad_oracle(kind, desc, a, b, weight, upper, *, quad_limit=400):
    """Adaptive quadrature of weight(u) * H[a u, b u] over (0, upper)."""

    def oracle(sc: ScaledBivariateH, tolerance: float) -> OracleReport:
        ev = get_evaluator(desc)

        def f(u):
            return weight(u) * ev.eval(a * u, b * u)

        ref, err = integrate.quad(f, 0.0, upper, epsabs=0.0, epsrel=1e-9,
                                  limit=quad_limit)
        val = sc.value()
        scale = max(abs(val), abs(ref), 1e-300)
        rel = abs(val - ref) / scale
        return OracleReport(
            kind=kind,
            value=val,
            reference=ref,
            rel_error=rel,
            tolerance=tolerance,
            passed=rel <= tolerance,
            detail=f"quad error estimate {err:.2e}",
        )

    return oracle


def _richardson_central(f, x, h):
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + h / 2.0) - f(x - h / 2.0)) / h
    return (4.0 * d2 - d1) / 3.0


# ---------------------------------------------------------------------------
# integral transforms
# ---------------------------------------------------------------------------


def definite_integral(
    desc: BivariateHDescriptor, a: float, b: float, upper_limit: float
) -> ScaledBivariateH:
    """F(X) = integral_0^X H[a x, b x] dx as a fully evaluated constant form.

    Mellin route: the inner integral contributes
    X^{s+t+1} * Gamma(s+t+1) / Gamma(s+t+2), i.e. one prepended joint
    numerator triple (0;1;1), one appended joint denominator triple (-1;1;1),
    prefactor X and rescaled arguments (aX, bX).
    """
    _require_bivariate(desc)
    _require_positive(a=a, b=b, upper_limit=upper_limit)
    _screen_origin(desc, 0.0, "definite integral")
    new = _append_joint_lower(
        _prepend_joint_upper(desc, [GammaTriple(0.0, 1.0, 1.0)]),
        [GammaTriple(-1.0, 1.0, 1.0)],
    )
    oracle = _quad_oracle(
        "definite_integral quadrature", desc, a, b, lambda u: 1.0, upper_limit
    )
    return ScaledBivariateH.make(
        new,
        x_scale=a * upper_limit,
        y_scale=b * upper_limit,
        prefactor=upper_limit,
        form="constant",
        oracle=oracle,
    )


def laplace_transform(
    desc: BivariateHDescriptor, a: float, b: float, s_hat: float
) -> ScaledBivariateH:
    """integral_0^inf e^{-s_hat x} H[a x, b x] dx (constant form).

    Mellin route: Gamma(s+t+1)/s_hat^{s+t+1} -> prepended (0;1;1),
    prefactor 1/s_hat, arguments (a/s_hat, b/s_hat).
    """
    _require_bivariate(desc)
    _require_positive(a=a, b=b, s_hat=s_hat)
    _screen_origin(desc, 0.0, "Laplace transform")
    new = _prepend_joint_upper(desc, [GammaTriple(0.0, 1.0, 1.0)])
    # Truncate where the exponential weight alone is ~1e-26 of its peak.
    oracle = _quad_oracle(
        "laplace_transform quadrature",
        desc,
        a,
        b,
        lambda u: math.exp(-s_hat * u),
        60.0 / s_hat,
    )
    return ScaledBivariateH.make(
        new,
        x_scale=a / s_hat,
        y_scale=b / s_hat,
        prefactor=1.0 / s_hat,
        form="constant",
        oracle=oracle,
    )


def kernel_integral(
    desc: BivariateHDescriptor, a: float, b: float, kind: str, k: float
) -> ScaledBivariateH:
    """integral_0^inf kernel(x) H[a x, b x] dx for the three radical kernels.

    kind == "exp_sqrt":       kernel exp(-k sqrt x)
        Mellin: 2 Gamma(2s+2t+2)/k^{2(s+t)+2} -> triple (-1;2;2),
        prefactor 2/k^2, arguments (a/k^2, b/k^2).
    kind == "sqrt_exp_sqrt":  kernel sqrt(x) exp(-k sqrt x)
        Mellin: 2 Gamma(2s+2t+3)/k^{2(s+t)+3} -> triple (-2;2;2),
        prefactor 2/k^3, arguments (a/k^2, b/k^2).
    kind == "erfc_sqrt":      kernel erfc(sqrt(k x))
        Mellin: Gamma(s+t+1) Gamma(s+t+3/2) / (sqrt(pi) (s+t+1) k^{s+t+1})
        -> triples (0;1;1), (-1/2;1;1) up and (-1;1;1) down,
        prefactor 1/(k sqrt(pi)), arguments (a/k, b/k).
    """
    _require_bivariate(desc)
    _require_positive(a=a, b=b, k=k)
    if kind == "exp_sqrt":
        _screen_origin(desc, 0.0, "exp(-k sqrt x) kernel integral")
        new = _prepend_joint_upper(desc, [GammaTriple(-1.0, 2.0, 2.0)])
        pref = 2.0 / k**2
        xs, ys = a / k**2, b / k**2
        weight = lambda u: math.exp(-k * math.sqrt(u))
        cutoff = (60.0 / k) ** 2
    elif kind == "sqrt_exp_sqrt":
        _screen_origin(desc, 0.5, "sqrt(x) exp(-k sqrt x) kernel integral")
        new = _prepend_joint_upper(desc, [GammaTriple(-2.0, 2.0, 2.0)])
        pref = 2.0 / k**3
        xs, ys = a / k**2, b / k**2
        weight = lambda u: math.sqrt(u) * math.exp(-k * math.sqrt(u))
        cutoff = (60.0 / k) ** 2
    elif kind == "erfc_sqrt":
        _screen_origin(desc, 0.0, "erfc(sqrt(k x)) kernel integral")
        new = _append_joint_lower(
            _prepend_joint_upper(
                desc, [GammaTriple(0.0, 1.0, 1.0), GammaTriple(-0.5, 1.0, 1.0)]
            ),
            [GammaTriple(-1.0, 1.0, 1.0)],
        )
        pref = 1.0 / (k * math.sqrt(math.pi))
        xs, ys = a / k, b / k
        import scipy.special as sps

        weight = lambda u: float(sps.erfc(math.sqrt(k * u)))
        cutoff = 60.0 / k
    else:
        raise ParameterError(f"unknown kernel kind {kind!r}; use one of {KERNEL_KINDS}")
    oracle = _quad_oracle(f"kernel_integral[{kind}] quadrature", desc, a, b,
                          weight, cutoff)
    return ScaledBivariateH.make(
        new, x_scale=xs, y_scale=ys, prefactor=pref, form="constant", oracle=oracle
    )


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------


def _shift_triples(triples, ds: float, dt: float):
    return tuple(
        GammaTriple(g.param - ds * g.coef_s - dt * g.coef_t, g.coef_s, g.coef_t)
        for g in triples
    )


def _shift_pairs(pairs, d: float):
    return tuple(GammaPair(g.param - d * g.coef, g.coef) for g in pairs)


def derivative_x(
    desc: BivariateHDescriptor, a: float, b: float, form: str = "t_shift"
) -> ScaledBivariateH:
    """d/dx H[a x, b x], argument form (evaluate via .value(x)).

    Differentiating the Mellin integrand gives (s+t) x^{s+t-1}; absorbing the
    index shift into the t (or s) contour shifts every gamma parameter that
    couples to that variable down by its coefficient and adds the factor
    (s+t+1) = Gamma(s+t+2)/Gamma(s+t+1) -> prepended (-1;1;1) up, appended
    (0;1;1) down.  Both forms are the same function; evaluating both is a
    consistency check.
    """
    _require_bivariate(desc)
    _require_positive(a=a, b=b)
    if form == "t_shift":
        new = replace(
            desc,
            joint_upper=(GammaTriple(-1.0, 1.0, 1.0),)
            + _shift_triples(desc.joint_upper, 0.0, 1.0),
            joint_lower=_shift_triples(desc.joint_lower, 0.0, 1.0)
            + (GammaTriple(0.0, 1.0, 1.0),),
            t_upper=_shift_pairs(desc.t_upper, 1.0),
            t_lower=_shift_pairs(desc.t_lower, 1.0),
            n1=desc.n1 + 1,
        )
        pref = b
    elif form == "s_shift":
        new = replace(
            desc,
            joint_upper=(GammaTriple(-1.0, 1.0, 1.0),)
            + _shift_triples(desc.joint_upper, 1.0, 0.0),
            joint_lower=_shift_triples(desc.joint_lower, 1.0, 0.0)
            + (GammaTriple(0.0, 1.0, 1.0),),
            s_upper=_shift_pairs(desc.s_upper, 1.0),
            s_lower=_shift_pairs(desc.s_lower, 1.0),
            n1=desc.n1 + 1,
        )
        pref = a
    else:
        raise ParameterError(f"unknown derivative form {form!r}")

    def oracle(sc: ScaledBivariateH, tolerance: float) -> OracleReport:
        ev = get_evaluator(desc)
        x0 = 2.0 / (a + b)
        worst = None
        for x in (0.6 * x0, 1.1 * x0):
            f = lambda u: ev.eval(a * u, b * u)
            ref = _richardson_central(f, x, _FD_STEP * x)
            val = sc.value(x)
            scale = max(abs(val), abs(ref), 1e-300)
            rel = abs(val - ref) / scale
            rep = OracleReport(
                kind=f"derivative_x[{form}] finite-difference",
                value=val,
                reference=ref,
                rel_error=rel,
                tolerance=tolerance,
                passed=rel <= tolerance,
                detail=f"probe x={x:.6g}",
            )
            if worst is None or rep.rel_error > worst.rel_error:
                worst = rep
        return worst

    return ScaledBivariateH.make(
        new, x_scale=a, y_scale=b, prefactor=pref, form="argument", oracle=oracle
    )


def derivative_arg(
    desc: BivariateHDescriptor, a: float, b: float, axis: str = "a"
) -> ScaledBivariateH:
    """d/da (axis="a") or d/db (axis="b") of H[a x, b x], argument form in x.

    The derivative brings down the Mellin index: d/da a^s = s a^{s-1}, and
    s = Gamma(1+s)/Gamma(s) is one numerator pair (0;1) on the channel's
    upper row and one denominator pair (1;1) on its lower row; arguments stay
    (a x, b x).
    """
    _require_bivariate(desc)
    _require_positive(a=a, b=b)
    if axis == "a":
        new = replace(
            desc,
            s_upper=(GammaPair(0.0, 1.0),) + desc.s_upper,
            s_lower=desc.s_lower + (GammaPair(1.0, 1.0),),
            n2=desc.n2 + 1,
        )
        pref = 1.0 / a
    elif axis == "b":
        new = replace(
            desc,
            t_upper=(GammaPair(0.0, 1.0),) + desc.t_upper,
            t_lower=desc.t_lower + (GammaPair(1.0, 1.0),),
            n3=desc.n3 + 1,
        )
        pref = 1.0 / b
    else:
        raise ParameterError(f"unknown axis {axis!r}; use 'a' or 'b'")

    def oracle(sc: ScaledBivariateH, tolerance: float) -> OracleReport:
        ev = get_evaluator(desc)
        x0 = 2.0 / (a + b)
        if axis == "a":
            f = lambda v: ev.eval(v * x0, b * x0)
            ref = _richardson_central(f, a, _FD_STEP * a)
        else:
            f = lambda v: ev.eval(a * x0, v * x0)
            ref = _richardson_central(f, b, _FD_STEP * b)
        val = sc.value(x0)
        scale = max(abs(val), abs(ref), 1e-300)
        rel = abs(val - ref) / scale
        return OracleReport(
            kind=f"derivative_arg[{axis}] finite-difference",
            value=val,
            reference=ref,
            rel_error=rel,
            tolerance=tolerance,
            passed=rel <= tolerance,
            detail=f"probe x={x0:.6g}",
        )

    return ScaledBivariateH.make(
        new, x_scale=a, y_scale=b, prefactor=pref, form="argument", oracle=oracle
    )
