"""Composite fading model: generalized small-scale fading with inverse-gamma
shadowing, and the performance metrics built on it.

The small-scale power follows the three-parameter family with a nonlinearity
exponent ``alpha``, an in-phase/quadrature power-imbalance parameter ``eta``
and a cluster count ``mu``; shadowing multiplies the mean SNR by an
inverse-gamma variate with shape ``m_s`` (unit mean of the inverse, so the
shadowed and unshadowed mean SNRs coincide as ``m_s`` grows).

Three independent routes to the composite statistics are provided and kept
deliberately separate so they can cross-check each other:

* ``pdf_direct``: the unshadowed density in elementary terms
  (exponential times a modified Bessel function, evaluated in scaled form),
* ``pdf_foxh``: the same density as a product of two univariate H-functions,
* ``composite_pdf`` / ``composite_pdf_descriptor``: the shadowed density as a
  single bivariate H-function, with ``composite_pdf_quadrature`` as the
  brute-force mixing integral over the shadowing variate.

Metrics (outage probability, average symbol error probabilities for
coherent/noncoherent detection under Gaussian noise and for PSK under
Laplacian noise, and the generalized moment-generating function) are obtained
by applying the integral identities from :mod:`.identities` to the composite
descriptor, alongside closed-form deep-fade asymptotics derived from the
density's behavior at the origin.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import ParameterError
from .fox_h import (
    BivariateHDescriptor,
    GammaPair,
    GammaTriple,
    ScaledBivariateH,
    UnivariateHDescriptor,
    eval_univariate,
)
from .identities import definite_integral, kernel_integral
from .special_fns import bessel_i_scaled, erfc, ln_gamma_real

__all__ = [
    "ETA_UNITY_LIMIT",
    "FadingParams",
    "DerivedConstants",
    "derive_constants",
    "pdf_direct",
    "pdf_foxh",
    "igamma_pdf",
    "composite_pdf_descriptor",
    "composite_pdf",
    "composite_pdf_quadrature",
    "gen_mgf",
    "outage",
    "Modulation",
    "MODULATION_PRESETS",
    "parse_modulation",
    "conditional_error",
    "sep",
    "origin_pdf",
    "asymptotic_outage",
    "asymptotic_sep",
    "db_to_linear",
    "linear_to_db",
]

#: Largest power-imbalance parameter accepted as "approaching one".  The
#: balanced limit itself degenerates (the imbalance constant vanishes and the
#: H-form divides by it), so callers wanting that limit pass this value.
ETA_UNITY_LIMIT = 1.0 - 1e-6


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FadingParams:
    """Parameters of the composite model.

    alpha:    nonlinearity exponent of the envelope-power mapping, > 0
    eta:      power-imbalance parameter; format "I" takes the in-phase to
              quadrature power ratio (any positive value except 1; values
              above 1 are equivalent to their reciprocal), format "II" takes
              the correlation coefficient in (0, 1)
    mu:       number of multipath clusters (need not be an integer), > 0
    m_s:      shadowing shape; smaller means heavier shadowing, > 0
    mean_snr: average SNR (linear scale), > 0
    fmt:      imbalance format, "I" or "II"
    """

    alpha: float
    eta: float
    mu: float
    m_s: float
    mean_snr: float = 1.0
    fmt: str = "I"

    def __post_init__(self):
        for name in ("alpha", "eta", "mu", "m_s", "mean_snr"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive and finite, got {v!r}")
        if self.fmt not in ("I", "II"):
            raise ParameterError(f"fmt must be 'I' or 'II', got {self.fmt!r}")
        if self.fmt == "I":
            e = self.eta if self.eta <= 1.0 else 1.0 / self.eta
            if e > ETA_UNITY_LIMIT:
                raise ParameterError(
                    "eta too close to 1: the balanced limit degenerates; use "
                    f"eta = ETA_UNITY_LIMIT ({ETA_UNITY_LIMIT}) to approach it"
                )
        else:
            if self.eta > ETA_UNITY_LIMIT:
                raise ParameterError(
                    "format II requires eta in (0, 1); use ETA_UNITY_LIMIT to "
                    "approach the boundary"
                )

    def with_mean_snr(self, mean_snr: float) -> "FadingParams":
        return replace(self, mean_snr=mean_snr)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "eta": self.eta,
            "mu": self.mu,
            "m_s": self.m_s,
            "mean_snr": self.mean_snr,
            "fmt": self.fmt,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FadingParams":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "FadingParams":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class DerivedConstants:
    """Constants derived from the fading parameters.

    Large or tiny aggregates are carried as logs so parameter ranges like
    m_s ~ 200 stay representable end to end.
    """

    h_sum: float  # balance constant multiplying the full power
    h_diff: float  # imbalance constant (vanishes as eta -> 1)
    p_hat: float  # mu + 1/2
    p: float  # mu - 1/2
    q: float  # exponential rate constant, 2*mu*h_sum
    q_hat: float  # Bessel argument constant, 2*mu*h_diff
    t: float  # net exponential rate, q - q_hat
    t_hat: float  # doubled Bessel constant, 2*q_hat
    log_norm: float  # ln of the density normalization aggregate
    log_r: float  # ln of the H-form prefactor aggregate
    log_r_hat: float  # ln of the origin (deep-fade) aggregate


def _imbalance(params: FadingParams) -> tuple[float, float]:
    if params.fmt == "I":
        e = params.eta if params.eta <= 1.0 else 1.0 / params.eta
        return (2.0 + 1.0 / e + e) / 4.0, (1.0 / e - e) / 4.0
    e = params.eta
    return 1.0 / (1.0 - e * e), e / (1.0 - e * e)


@lru_cache(maxsize=256)
def derive_constants(params: FadingParams) -> DerivedConstants:
    a, mu, m_s = params.alpha, params.mu, params.m_s
    hs, hd = _imbalance(params)
    p_hat = mu + 0.5
    p = mu - 0.5
    q = 2.0 * mu * hs
    q_hat = 2.0 * mu * hd
    t = q - q_hat
    t_hat = 2.0 * q_hat
    log_norm = (
        math.log(a)
        + p_hat * math.log(mu)
        + mu * math.log(hs)
        - ln_gamma_real(mu)
        - p * math.log(hd)
    )
    log_r = 2.0 * math.log(2.0 / a) + log_norm + (2.0 / a - p_hat) * math.log(t)
    log_r_hat = (
        0.5 * math.log(math.pi)
        + math.log(a)
        + 2.0 * mu * math.log(mu)
        + mu * math.log(hs)
        + ln_gamma_real(m_s + a * mu)
        - ln_gamma_real(mu)
        - ln_gamma_real(mu + 0.5)
        - ln_gamma_real(m_s)
        - a * mu * math.log(m_s)
    )
    return DerivedConstants(
        h_sum=hs,
        h_diff=hd,
        p_hat=p_hat,
        p=p,
        q=q,
        q_hat=q_hat,
        t=t,
        t_hat=t_hat,
        log_norm=log_norm,
        log_r=log_r,
        log_r_hat=log_r_hat,
    )


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------


def pdf_direct(params: FadingParams, gamma) -> np.ndarray:
    """Unshadowed SNR density in elementary terms.

    Evaluated as exp(-t*w) * scaled_bessel(p, t_hat/2 * ... ) so the
    exponentially growing Bessel factor and the decaying exponential cancel
    analytically instead of overflowing.
    """
    c = derive_constants(params)
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(g < 0):
        raise ParameterError("SNR values must be >= 0")
    out = np.zeros_like(g)
    pos = g > 0
    gp = g[pos]
    half_a = params.alpha / 2.0
    w = (gp / params.mean_snr) ** half_a
    ln_f = (
        0.5 * math.log(math.pi)
        + c.log_norm
        + (half_a * c.p_hat - 1.0) * np.log(gp)
        - half_a * c.p_hat * math.log(params.mean_snr)
        - c.t * w
    )
    bes = bessel_i_scaled(c.p, c.q_hat * w)
    vals = np.zeros_like(gp)
    ok = bes > 0
    vals[ok] = np.exp(ln_f[ok] + np.log(bes[ok]))
    out[pos] = vals
    if np.any(~pos):
        amu = params.alpha * params.mu
        if amu < 1.0:
            out[~pos] = np.inf
        elif amu == 1.0:
            # Unshadowed origin value: the small-argument Bessel limit turns
            # the density into a pure power of gamma with this constant.
            log_c0 = (
                0.5 * math.log(math.pi)
                + math.log(params.alpha)
                + 2.0 * params.mu * math.log(params.mu)
                + params.mu * math.log(c.h_sum)
                - ln_gamma_real(params.mu)
                - ln_gamma_real(params.mu + 0.5)
            )
            out[~pos] = math.exp(log_c0) / params.mean_snr
    return out


@lru_cache(maxsize=256)
def _pdf_foxh_parts(params: FadingParams):
    c = derive_constants(params)
    two_over_a = 2.0 / params.alpha
    rate_desc = UnivariateHDescriptor(
        m=1, n=0, upper=(), lower=((c.p_hat - two_over_a, two_over_a),)
    )
    bessel_desc = UnivariateHDescriptor(
        m=1,
        n=1,
        upper=((0.5, two_over_a),),
        lower=((c.p, two_over_a), (-c.p, two_over_a)),
    )
    x_scale = c.t**two_over_a / params.mean_snr
    y_scale = c.t_hat**two_over_a / params.mean_snr
    log_pref = c.log_r - math.log(params.mean_snr)
    return rate_desc, bessel_desc, x_scale, y_scale, log_pref


def pdf_foxh(params: FadingParams, gamma, *, rtol: float = 1e-10) -> np.ndarray:
    """Unshadowed SNR density as a product of two univariate H-functions.

    This is an independent route to ``pdf_direct`` -- one H-factor carries the
    exponential decay, the other the Bessel-type structure -- and the two are
    cross-checked in the test suite.
    """
    rate_desc, bessel_desc, x_scale, y_scale, log_pref = _pdf_foxh_parts(params)
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(~(g > 0)):
        raise ParameterError("this route requires strictly positive SNR values")
    h1 = eval_univariate(rate_desc, x_scale * g, log_offset=log_pref, rtol=rtol)
    h2 = eval_univariate(bessel_desc, y_scale * g, rtol=rtol)
    return h1 * h2


def igamma_pdf(m_s: float, z, omega: float | None = None) -> np.ndarray:
    """Inverse-gamma shadowing density; ``omega`` defaults to m_s so the
    inverse variate has unit mean."""
    if not (m_s > 0):
        raise ParameterError("m_s must be positive")
    w = m_s if omega is None else omega
    if not (w > 0):
        raise ParameterError("omega must be positive")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.zeros_like(z)
    pos = z > 0
    zp = z[pos]
    out[pos] = np.exp(
        m_s * math.log(w) - ln_gamma_real(m_s) - (m_s + 1.0) * np.log(zp) - w / zp
    )
    return out


@lru_cache(maxsize=256)
def composite_pdf_descriptor(
    params: FadingParams, *, arg_exponent: str = "two_over_alpha"
) -> ScaledBivariateH:
    """Shadowed SNR density as one bivariate H-function (argument form in γ).

    ``arg_exponent`` selects the exponent applied to the doubled Bessel
    constant inside the second argument: ``"two_over_alpha"`` is the working
    convention (it reproduces the mixing integral); ``"alpha_over_two"`` is
    provided so the diagnostic suite can demonstrate that the alternative
    reading fails against quadrature.
    """
    if arg_exponent not in ("two_over_alpha", "alpha_over_two"):
        raise ParameterError(f"unknown arg_exponent {arg_exponent!r}")
    c = derive_constants(params)
    two_over_a = 2.0 / params.alpha
    m_s = params.m_s
    desc = BivariateHDescriptor(
        joint_upper=(GammaTriple(-m_s, 1.0, 1.0),),
        joint_lower=(),
        s_upper=(),
        s_lower=(GammaPair(c.p_hat - two_over_a, two_over_a),),
        t_upper=(GammaPair(0.5, two_over_a),),
        t_lower=(GammaPair(c.p, two_over_a), GammaPair(-c.p, two_over_a)),
        n1=1,
        m2=1,
        n2=0,
        m3=1,
        n3=1,
    )
    expo = two_over_a if arg_exponent == "two_over_alpha" else params.alpha / 2.0
    x_scale = c.t**two_over_a / (params.mean_snr * m_s)
    y_scale = c.t_hat**expo / (params.mean_snr * m_s)
    log_pref = c.log_r - ln_gamma_real(m_s + 1.0) - math.log(params.mean_snr)
    return ScaledBivariateH(
        descriptor=desc,
        x_scale=x_scale,
        y_scale=y_scale,
        log_prefactor=log_pref,
        sign=1,
        form="argument",
    )


def composite_pdf(params: FadingParams, gamma, *, rtol: float = 1e-10) -> np.ndarray:
    """Shadowed SNR density via the bivariate H-function route."""
    sc = composite_pdf_descriptor(params)
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    return sc.value_many(g, rtol=rtol)


def composite_pdf_quadrature(params: FadingParams, gamma) -> np.ndarray:
    """Shadowed SNR density by direct mixing over the shadowing variate.

    Independent of every H-function route (it integrates ``pdf_direct``
    against the inverse-gamma weight with adaptive quadrature); used as the
    cross-check oracle for :func:`composite_pdf`.
    """
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    out = np.empty_like(g)
    m_s = params.m_s
    for i, gi in enumerate(g):
        def integrand(z):
            cond = pdf_direct(params.with_mean_snr(params.mean_snr * z), gi)
            return float(cond[0]) * float(igamma_pdf(m_s, z)[0])

        # The inverse-gamma weight concentrates near z ~ 1 for moderate m_s;
        # split at its mode to help the adaptive rule.
        mode = m_s / (m_s + 1.0)
        v1, _ = integrate.quad(integrand, 0.0, mode, epsabs=0.0, epsrel=1e-10,
                               limit=300)
        v2, _ = integrate.quad(integrand, mode, np.inf, epsabs=0.0,
                               epsrel=1e-10, limit=300)
        out[i] = v1 + v2
    return out


# ---------------------------------------------------------------------------
# Generalized MGF and outage
# ---------------------------------------------------------------------------


def gen_mgf(params: FadingParams, n: int, s: float, *, rtol: float = 1e-10) -> float:
    """E[γ^n e^{-sγ}]: the n-th generalized moment-generating function value.

    Built by weighting the composite density's Mellin kernel with
    Gamma(n+1+s+t)/s_hat^{n+1+s+t}: one extra joint numerator triple, both
    arguments divided by s, and a 1/s^{n+1} prefactor.
    """
    if not (isinstance(n, (int, np.integer)) and n >= 0):
        raise ParameterError("n must be a nonnegative integer")
    if not (s > 0):
        raise ParameterError("the transform variable must be positive")
    base = composite_pdf_descriptor(params)
    desc = base.descriptor
    new_desc = replace(
        desc,
        joint_upper=(GammaTriple(-float(n), 1.0, 1.0),) + desc.joint_upper,
        n1=desc.n1 + 1,
    )
    sc = ScaledBivariateH(
        descriptor=new_desc,
        x_scale=base.x_scale / s,
        y_scale=base.y_scale / s,
        log_prefactor=base.log_prefactor - (n + 1.0) * math.log(s),
        sign=1,
        form="constant",
    )
    return sc.value(rtol=rtol)


def outage(params: FadingParams, gamma_th: float, *, rtol: float = 1e-10) -> float:
    """P(γ <= gamma_th): the definite integral of the composite density."""
    if gamma_th < 0:
        raise ParameterError("threshold must be >= 0")
    if gamma_th == 0.0:
        return 0.0
    base = composite_pdf_descriptor(params)
    sc = definite_integral(
        base.descriptor, base.x_scale, base.y_scale, gamma_th
    ).rescaled(base.log_prefactor)
    return float(min(max(sc.value(rtol=rtol), 0.0), 1.0))


# ---------------------------------------------------------------------------
# Modulations and conditional error probabilities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Modulation:
    """A detection scheme's conditional symbol error probability.

    kind "coherent":        a * erfc(sqrt(b * γ))        (Gaussian noise)
    kind "noncoherent":     a * exp(-b * γ)              (Gaussian noise)
    kind "laplacian_bpsk":  binary PSK under Laplacian noise
    kind "laplacian_qpsk":  quaternary PSK under Laplacian noise
    kind "laplacian_mpsk":  M-ary PSK under Laplacian noise (M >= 8, 4 | M)
    """

    kind: str
    a: float = 1.0
    b: float = 1.0
    order: int = 0

    def __post_init__(self):
        if self.kind not in (
            "coherent",
            "noncoherent",
            "laplacian_bpsk",
            "laplacian_qpsk",
            "laplacian_mpsk",
        ):
            raise ParameterError(f"unknown modulation kind {self.kind!r}")
        if self.kind in ("coherent", "noncoherent"):
            if not (self.a > 0 and self.b > 0):
                raise ParameterError("conditional-error constants must be positive")
        if self.kind == "laplacian_mpsk":
            if self.order < 8 or self.order % 4 != 0:
                raise ParameterError(
                    "Laplacian M-ary PSK requires M >= 8 with M divisible by 4"
                )


MODULATION_PRESETS = {
    "bpsk": Modulation("coherent", 0.5, 1.0),
    "bfsk": Modulation("coherent", 0.5, 0.5),
    "dbpsk": Modulation("noncoherent", 0.5, 1.0),
    "ncfsk": Modulation("noncoherent", 0.5, 0.5),
    "lbpsk": Modulation("laplacian_bpsk"),
    "lqpsk": Modulation("laplacian_qpsk"),
}


def parse_modulation(name: str) -> Modulation:
    """Parse a preset name: fixed names plus ``mpsk:M`` and ``lmpsk:M``."""
    key = name.strip().lower()
    if key in MODULATION_PRESETS:
        return MODULATION_PRESETS[key]
    if ":" in key:
        head, _, tail = key.partition(":")
        try:
            m = int(tail)
        except ValueError as exc:
            raise ParameterError(f"bad modulation order in {name!r}") from exc
        if head == "mpsk":
            if m < 2:
                raise ParameterError("mpsk:M requires M >= 2")
            return Modulation("coherent", 1.0, math.sin(math.pi / m) ** 2)
        if head == "lmpsk":
            return Modulation("laplacian_mpsk", order=m)
    raise ParameterError(
        f"unknown modulation {name!r}; presets: "
        f"{sorted(MODULATION_PRESETS)} plus mpsk:M and lmpsk:M"
    )


def _mpsk_geometry(m: int, l: int):
    """Angles and decay constants of the l-th error sector for M-ary PSK
    under Laplacian noise."""
    th1 = (2 * l + 1) * math.pi / m
    th2 = 2.0 * th1
    phi = 2.0 * math.pi / m
    k2 = 2.0 * math.sin(math.pi / m) / math.cos(th1)
    k3 = 2.0 * math.sin(math.pi / m) / math.sin(th1)
    k4 = 2.0 * math.sqrt(2.0) * math.cos(2.0 * l * math.pi / m - math.pi / 4.0)
    return th1, th2, phi, k2, k3, k4


def conditional_error(mod: Modulation, gamma) -> np.ndarray:
    """Symbol error probability conditioned on the instantaneous SNR."""
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(g < 0):
        raise ParameterError("SNR values must be >= 0")
    if mod.kind == "coherent":
        return mod.a * erfc(np.sqrt(mod.b * g))
    if mod.kind == "noncoherent":
        return mod.a * np.exp(-mod.b * g)
    r = np.sqrt(g)
    if mod.kind == "laplacian_bpsk":
        return 0.5 * np.exp(-2.0 * r)
    if mod.kind == "laplacian_qpsk":
        return (0.75 + r) * np.exp(-2.0 * r)
    m = mod.order
    tan2 = math.tan(math.pi / m) ** 2
    total = np.zeros_like(g)
    for l in range(m // 4):
        th1, th2, phi, k2, k3, k4 = _mpsk_geometry(m, l)
        sector = (1.0 / (2.0 * math.cos(th2))) * (
            math.cos(th1) ** 2 * np.exp(-k2 * r)
            - math.sin(th1) ** 2 * np.exp(-k3 * r)
        ) - (
            math.sin(phi)
            / (8.0 * (math.cos(phi) + math.sin(4.0 * l * math.pi / m)))
        ) * np.exp(-k4 * r)
        total += sector
    total *= 8.0 / m
    total += (2.0 * tan2 / (m * (1.0 - tan2))) * np.exp(-2.0 * r)
    return total


# ---------------------------------------------------------------------------
# Average symbol error probabilities
# ---------------------------------------------------------------------------


def _avg_exp_sqrt(base: ScaledBivariateH, k: float, rtol: float) -> float:
    """E[exp(-k sqrt(γ))] against the composite density."""
    sc = kernel_integral(base.descriptor, base.x_scale, base.y_scale,
                         "exp_sqrt", k).rescaled(base.log_prefactor)
    return sc.value(rtol=rtol)


def sep(params: FadingParams, mod: Modulation, *, rtol: float = 1e-10) -> float:
    """Average symbol error probability for the given detection scheme."""
    base = composite_pdf_descriptor(params)
    if mod.kind == "coherent":
        sc = kernel_integral(
            base.descriptor, base.x_scale, base.y_scale, "erfc_sqrt", mod.b
        ).rescaled(base.log_prefactor + math.log(mod.a))
        return float(min(max(sc.value(rtol=rtol), 0.0), 1.0))
    if mod.kind == "noncoherent":
        return float(min(max(mod.a * gen_mgf(params, 0, mod.b, rtol=rtol), 0.0), 1.0))
    if mod.kind == "laplacian_bpsk":
        val = 0.5 * _avg_exp_sqrt(base, 2.0, rtol)
        return float(min(max(val, 0.0), 1.0))
    if mod.kind == "laplacian_qpsk":
        sqrt_term = kernel_integral(
            base.descriptor, base.x_scale, base.y_scale, "sqrt_exp_sqrt", 2.0
        ).rescaled(base.log_prefactor)
        val = 0.75 * _avg_exp_sqrt(base, 2.0, rtol) + sqrt_term.value(rtol=rtol)
        return float(min(max(val, 0.0), 1.0))
    m = mod.order
    tan2 = math.tan(math.pi / m) ** 2
    total = 0.0
    for l in range(m // 4):
        th1, th2, phi, k2, k3, k4 = _mpsk_geometry(m, l)
        total += (1.0 / (2.0 * math.cos(th2))) * (
            math.cos(th1) ** 2 * _avg_exp_sqrt(base, k2, rtol)
            - math.sin(th1) ** 2 * _avg_exp_sqrt(base, k3, rtol)
        ) - (
            math.sin(phi)
            / (8.0 * (math.cos(phi) + math.sin(4.0 * l * math.pi / m)))
        ) * _avg_exp_sqrt(base, k4, rtol)
    total *= 8.0 / m
    total += (2.0 * tan2 / (m * (1.0 - tan2))) * _avg_exp_sqrt(base, 2.0, rtol)
    return float(min(max(total, 0.0), 1.0))


# ---------------------------------------------------------------------------
# Deep-fade (high-SNR) behavior
# ---------------------------------------------------------------------------


def origin_pdf(params: FadingParams, gamma) -> np.ndarray:
    """Leading behavior of the composite density as γ -> 0+."""
    c = derive_constants(params)
    amu = params.alpha * params.mu
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    return np.exp(
        c.log_r_hat + (amu - 1.0) * np.log(g) - amu * math.log(params.mean_snr)
    )


def asymptotic_outage(params: FadingParams, gamma_th: float) -> float:
    """High-SNR outage: integral of the origin density up to the threshold."""
    if gamma_th < 0:
        raise ParameterError("threshold must be >= 0")
    if gamma_th == 0.0:
        return 0.0
    c = derive_constants(params)
    amu = params.alpha * params.mu
    return math.exp(
        c.log_r_hat + amu * (math.log(gamma_th) - math.log(params.mean_snr))
        - math.log(amu)
    )


def asymptotic_sep(params: FadingParams, mod: Modulation) -> float:
    """High-SNR average symbol error probability from the origin density.

    The diversity order -alpha*mu is common to every scheme; the coding gain
    follows from integrating the conditional error against γ^{alpha*mu - 1}.
    """
    c = derive_constants(params)
    amu = params.alpha * params.mu
    lead = c.log_r_hat - amu * math.log(params.mean_snr)
    if mod.kind == "coherent":
        return math.exp(
            lead
            + ln_gamma_real(amu + 0.5)
            - 0.5 * math.log(math.pi)
            - math.log(amu)
            - amu * math.log(mod.b)
            + math.log(mod.a)
        )
    if mod.kind == "noncoherent":
        return math.exp(
            lead + ln_gamma_real(amu) - amu * math.log(mod.b) + math.log(mod.a)
        )

    # Laplacian PSK: each conditional term c_i * exp(-k_i sqrt(γ)) integrates
    # to c_i * 2 Gamma(2 alpha mu) / k_i^(2 alpha mu); the QPSK sqrt(γ) term
    # contributes 2 Gamma(2 alpha mu + 1) / k^(2 alpha mu + 1) extra.
    g2 = math.exp(lead + ln_gamma_real(2.0 * amu))
    if mod.kind == "laplacian_bpsk":
        return 0.5 * 2.0 * g2 / 2.0 ** (2.0 * amu)
    if mod.kind == "laplacian_qpsk":
        g3 = math.exp(lead + ln_gamma_real(2.0 * amu + 1.0))
        return (
            0.75 * 2.0 * g2 / 2.0 ** (2.0 * amu)
            + 2.0 * g3 / 2.0 ** (2.0 * amu + 1.0)
        )
    m = mod.order
    tan2 = math.tan(math.pi / m) ** 2
    total = 0.0
    for l in range(m // 4):
        th1, th2, phi, k2, k3, k4 = _mpsk_geometry(m, l)
        total += (1.0 / (2.0 * math.cos(th2))) * (
            math.cos(th1) ** 2 * 2.0 * g2 / k2 ** (2.0 * amu)
            - math.sin(th1) ** 2 * 2.0 * g2 / k3 ** (2.0 * amu)
        ) - (
            math.sin(phi)
            / (8.0 * (math.cos(phi) + math.sin(4.0 * l * math.pi / m)))
        ) * 2.0 * g2 / k4 ** (2.0 * amu)
    total *= 8.0 / m
    total += (2.0 * tan2 / (m * (1.0 - tan2))) * 2.0 * g2 / 2.0 ** (2.0 * amu)
    return total
