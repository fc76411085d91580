"""Descriptors and evaluation for univariate and bivariate H-functions.

A bivariate H-function here is the double inverse Mellin transform

    H[x, y] = (1/(2*pi*i))**2 * integral integral of
              phi(s, t) * phi1(s) * phi2(t) * x**s * y**t  ds dt

where ``phi`` is a ratio of gamma factors coupling s and t (the "joint"
blocks) and ``phi1``/``phi2`` are per-channel gamma ratios.  Parameter lists
follow the usual split convention: the first ``n`` entries of an upper list
and the first ``m`` entries of a lower list are numerator gammas, the rest
denominators:

    joint upper  (p1 entries, first n1 numerator):  Gamma(1 - a + as*s + at*t)
                                     / denominators Gamma(a - as*s - at*t)
    joint lower  (q1 entries, first m1 numerator == 0 by construction):
                                       denominators Gamma(1 - b + bs*s + bt*t)
    channel upper (first n numerator): Gamma(1 - c + ch*s) / Gamma(c - ch*s)
    channel lower (first m numerator): Gamma(d - dh*s) / Gamma(1 - d + dh*s)

Descriptors are frozen, hashable dataclasses; evaluation delegates to the
adaptive contour engine in :mod:`foxh_kit.mellin_barnes`, with evaluator
caching keyed by descriptor so argument sweeps share the log-gamma grids.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import mellin_barnes as mb
from .errors import ParameterError, StructuralValidationError
from .mellin_barnes import (
    ContourSpec,
    GammaTerm,
    KernelStructure,
    ScreenReport,
    StructureEvaluator,
    choose_contours,
    convergence_screen,
)

__all__ = [
    "GammaPair",
    "GammaTriple",
    "UnivariateHDescriptor",
    "BivariateHDescriptor",
    "ScaledUnivariateH",
    "ScaledBivariateH",
    "OracleReport",
    "ValidationReport",
    "validate",
    "eval_univariate",
    "eval_bivariate",
    "meijer_exp_sqrt",
    "meijer_erfc",
    "descriptor_to_json",
    "descriptor_from_json",
    "scaled_to_json",
    "scaled_from_json",
    "canonical",
    "choose_contours",
    "convergence_screen",
    "ContourSpec",
    "ScreenReport",
]


@dataclass(frozen=True)
class GammaPair:
    """(param, coef) of a single-variable gamma factor; coef > 0."""

    param: float
    coef: float = 1.0


@dataclass(frozen=True)
class GammaTriple:
    """(param, coef_s, coef_t) of a joint gamma factor; both coefs > 0."""

    param: float
    coef_s: float = 1.0
    coef_t: float = 1.0


def _as_pairs(items):
    return tuple(
        p if isinstance(p, GammaPair) else GammaPair(float(p[0]), float(p[1]))
        for p in items
    )


def _as_triples(items):
    return tuple(
        t
        if isinstance(t, GammaTriple)
        else GammaTriple(float(t[0]), float(t[1]), float(t[2]))
        for t in items
    )


@dataclass(frozen=True)
class UnivariateHDescriptor:
    """H^{m,n}_{p,q}[x] with p = len(upper), q = len(lower)."""

    m: int
    n: int
    upper: tuple[GammaPair, ...] = ()
    lower: tuple[GammaPair, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "upper", _as_pairs(self.upper))
        object.__setattr__(self, "lower", _as_pairs(self.lower))

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    def structure(self) -> KernelStructure:
        terms = []
        for i, gp in enumerate(self.upper):
            if i < self.n:
                terms.append(GammaTerm(1.0 - gp.param, gp.coef, 0.0, +1))
            else:
                terms.append(GammaTerm(gp.param, -gp.coef, 0.0, -1))
        for i, gp in enumerate(self.lower):
            if i < self.m:
                terms.append(GammaTerm(gp.param, -gp.coef, 0.0, +1))
            else:
                terms.append(GammaTerm(1.0 - gp.param, gp.coef, 0.0, -1))
        return KernelStructure(tuple(terms))


@dataclass(frozen=True)
class BivariateHDescriptor:
    """Bivariate H-function descriptor (joint + two channels).

    ``m1`` is structurally zero in this family: the joint lower row carries
    only denominator gammas.
    """

    joint_upper: tuple[GammaTriple, ...] = ()
    joint_lower: tuple[GammaTriple, ...] = ()
    s_upper: tuple[GammaPair, ...] = ()
    s_lower: tuple[GammaPair, ...] = ()
    t_upper: tuple[GammaPair, ...] = ()
    t_lower: tuple[GammaPair, ...] = ()
    n1: int = 0
    m2: int = 0
    n2: int = 0
    m3: int = 0
    n3: int = 0
    m1: int = 0

    def __post_init__(self):
        object.__setattr__(self, "joint_upper", _as_triples(self.joint_upper))
        object.__setattr__(self, "joint_lower", _as_triples(self.joint_lower))
        for name in ("s_upper", "s_lower", "t_upper", "t_lower"):
            object.__setattr__(self, name, _as_pairs(getattr(self, name)))

    @property
    def p1(self) -> int:
        return len(self.joint_upper)

    @property
    def q1(self) -> int:
        return len(self.joint_lower)

    @property
    def p2(self) -> int:
        return len(self.s_upper)

    @property
    def q2(self) -> int:
        return len(self.s_lower)

    @property
    def p3(self) -> int:
        return len(self.t_upper)

    @property
    def q3(self) -> int:
        return len(self.t_lower)

    @property
    def orders(self):
        """((m1,n1,p1,q1), (m2,n2,p2,q2), (m3,n3,p3,q3))."""
        return (
            (self.m1, self.n1, self.p1, self.q1),
            (self.m2, self.n2, self.p2, self.q2),
            (self.m3, self.n3, self.p3, self.q3),
        )

    def structure(self) -> KernelStructure:
        terms = []
        for i, gt in enumerate(self.joint_upper):
            if i < self.n1:
                terms.append(GammaTerm(1.0 - gt.param, gt.coef_s, gt.coef_t, +1))
            else:
                terms.append(GammaTerm(gt.param, -gt.coef_s, -gt.coef_t, -1))
        for i, gt in enumerate(self.joint_lower):
            if i < self.m1:
                terms.append(GammaTerm(gt.param, -gt.coef_s, -gt.coef_t, +1))
            else:
                terms.append(GammaTerm(1.0 - gt.param, gt.coef_s, gt.coef_t, -1))
        for i, gp in enumerate(self.s_upper):
            if i < self.n2:
                terms.append(GammaTerm(1.0 - gp.param, gp.coef, 0.0, +1))
            else:
                terms.append(GammaTerm(gp.param, -gp.coef, 0.0, -1))
        for i, gp in enumerate(self.s_lower):
            if i < self.m2:
                terms.append(GammaTerm(gp.param, -gp.coef, 0.0, +1))
            else:
                terms.append(GammaTerm(1.0 - gp.param, gp.coef, 0.0, -1))
        for i, gp in enumerate(self.t_upper):
            if i < self.n3:
                terms.append(GammaTerm(1.0 - gp.param, 0.0, gp.coef, +1))
            else:
                terms.append(GammaTerm(gp.param, 0.0, -gp.coef, -1))
        for i, gp in enumerate(self.t_lower):
            if i < self.m3:
                terms.append(GammaTerm(gp.param, 0.0, -gp.coef, +1))
            else:
                terms.append(GammaTerm(1.0 - gp.param, 0.0, gp.coef, -1))
        return KernelStructure(tuple(terms))

    def s_channel(self) -> UnivariateHDescriptor:
        return UnivariateHDescriptor(self.m2, self.n2, self.s_upper, self.s_lower)

    def t_channel(self) -> UnivariateHDescriptor:
        return UnivariateHDescriptor(self.m3, self.n3, self.t_upper, self.t_lower)

    def is_separable(self) -> bool:
        return self.p1 == 0 and self.q1 == 0


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]
    screen: ScreenReport | None


def _check_pairs(violations, pairs, label):
    for i, gp in enumerate(pairs):
        if not (math.isfinite(gp.param) and math.isfinite(gp.coef)):
            violations.append(f"{label}[{i}] has non-finite entries")
        elif gp.coef <= 0:
            violations.append(f"{label}[{i}] coefficient must be > 0, got {gp.coef!r}")


def validate(desc, *, run_screen: bool = True) -> ValidationReport:
    """Structural validation; raises StructuralValidationError listing every
    violation, otherwise returns a report with the advisory convergence
    screen attached."""
    violations: list[str] = []
    if isinstance(desc, UnivariateHDescriptor):
        if not (0 <= desc.m <= desc.q):
            violations.append(f"need 0 <= m <= q, got m={desc.m}, q={desc.q}")
        if not (0 <= desc.n <= desc.p):
            violations.append(f"need 0 <= n <= p, got n={desc.n}, p={desc.p}")
        _check_pairs(violations, desc.upper, "upper")
        _check_pairs(violations, desc.lower, "lower")
    elif isinstance(desc, BivariateHDescriptor):
        if desc.m1 != 0:
            violations.append("joint lower numerator block must be empty (m1 = 0)")
        if not (0 <= desc.n1 <= desc.p1):
            violations.append(f"need 0 <= n1 <= p1, got n1={desc.n1}, p1={desc.p1}")
        if not (0 <= desc.m2 <= desc.q2):
            violations.append(f"need 0 <= m2 <= q2, got m2={desc.m2}, q2={desc.q2}")
        if not (0 <= desc.n2 <= desc.p2):
            violations.append(f"need 0 <= n2 <= p2, got n2={desc.n2}, p2={desc.p2}")
        if not (0 <= desc.m3 <= desc.q3):
            violations.append(f"need 0 <= m3 <= q3, got m3={desc.m3}, q3={desc.q3}")
        if not (0 <= desc.n3 <= desc.p3):
            violations.append(f"need 0 <= n3 <= p3, got n3={desc.n3}, p3={desc.p3}")
        for label, triples in (
            ("joint_upper", desc.joint_upper),
            ("joint_lower", desc.joint_lower),
        ):
            for i, gt in enumerate(triples):
                if not all(
                    math.isfinite(v) for v in (gt.param, gt.coef_s, gt.coef_t)
                ):
                    violations.append(f"{label}[{i}] has non-finite entries")
                elif gt.coef_s <= 0 or gt.coef_t <= 0:
                    violations.append(
                        f"{label}[{i}] coefficients must be > 0, got "
                        f"({gt.coef_s!r}, {gt.coef_t!r})"
                    )
        for name in ("s_upper", "s_lower", "t_upper", "t_lower"):
            _check_pairs(violations, getattr(desc, name), name)
    else:
        raise ParameterError(f"not an H-function descriptor: {type(desc)!r}")
    if violations:
        raise StructuralValidationError(violations)
    screen = convergence_screen(desc) if run_screen else None
    return ValidationReport(ok=True, violations=(), screen=screen)


# ---------------------------------------------------------------------------
# Evaluation (with evaluator caching)
# ---------------------------------------------------------------------------

_EVALUATOR_CACHE: dict = {}
_CACHE_MAX = 64


def get_evaluator(desc, rtol: float = 1e-10) -> StructureEvaluator:
    """Shared adaptive evaluator for a descriptor (grids are reusable)."""
    key = (desc, rtol)
    ev = _EVALUATOR_CACHE.get(key)
    if ev is None:
        validate(desc, run_screen=False)
        ev = StructureEvaluator(desc.structure(), rtol=rtol)
        if len(_EVALUATOR_CACHE) >= _CACHE_MAX:
            _EVALUATOR_CACHE.pop(next(iter(_EVALUATOR_CACHE)))
        _EVALUATOR_CACHE[key] = ev
    return ev


def eval_univariate(desc: UnivariateHDescriptor, x, *, log_offset=0.0, rtol=1e-10):
    """Evaluate a univariate H-function at x > 0 (scalar or array).

    An empty descriptor (p = q = 0) evaluates as the constant 1, the empty
    product convention used by degenerate separable cases.
    """
    scalar = np.isscalar(x) or np.asarray(x).ndim == 0
    if desc.p == 0 and desc.q == 0:
        shape = np.shape(x)
        ones = np.ones(shape if shape else (1,)) * math.exp(log_offset)
        return float(ones[0]) if scalar else ones
    ev = get_evaluator(desc, rtol)
    vals = ev.eval_many(x, None, log_offset=log_offset)
    return float(vals[0]) if scalar else vals


def eval_bivariate(
    desc: BivariateHDescriptor, x, y, *, log_offset=0.0, rtol=1e-10
):
    """Evaluate a bivariate H-function at x, y > 0 (scalars or arrays).

    Separable descriptors with one empty channel fall back to the product of
    univariate evaluations (empty channel == 1); everything else runs through
    the genuine double-contour path.
    """
    scalar = (np.isscalar(x) or np.asarray(x).ndim == 0) and (
        np.isscalar(y) or np.asarray(y).ndim == 0
    )
    s_empty = desc.p2 == 0 and desc.q2 == 0
    t_empty = desc.p3 == 0 and desc.q3 == 0
    if desc.is_separable() and (s_empty or t_empty):
        vs = eval_univariate(desc.s_channel(), x, log_offset=log_offset, rtol=rtol)
        vt = eval_univariate(desc.t_channel(), y, rtol=rtol)
        out = np.atleast_1d(vs * vt)
        return float(out[0]) if scalar else out
    ev = get_evaluator(desc, rtol)
    vals = ev.eval_many(x, y, log_offset=log_offset)
    return float(vals[0]) if scalar else vals


# ---------------------------------------------------------------------------
# Scaled forms (closed-form results of the integral identities)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one independent numerical cross-check."""

    kind: str
    value: float
    reference: float
    rel_error: float
    tolerance: float
    passed: bool
    detail: str = ""

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (
            f"[{status}] {self.kind}: value={self.value:.10g} "
            f"ref={self.reference:.10g} rel_err={self.rel_error:.3e} "
            f"tol={self.tolerance:.1e}"
            + (f" ({self.detail})" if self.detail else "")
        )


def _rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale


@dataclass(frozen=True)
class ScaledUnivariateH:
    """prefactor * H[x_scale * x] for a univariate descriptor."""

    descriptor: UnivariateHDescriptor
    x_scale: float
    log_prefactor: float = 0.0
    sign: int = 1

    @property
    def prefactor(self) -> float:
        return self.sign * math.exp(self.log_prefactor)

    def value(self, x, *, rtol: float = 1e-10):
        vals = eval_univariate(
            self.descriptor,
            np.asarray(x, dtype=float) * self.x_scale,
            log_offset=self.log_prefactor,
            rtol=rtol,
        )
        return self.sign * vals


@dataclass(frozen=True)
class ScaledBivariateH:
    """prefactor * H[x_scale * u, y_scale * u]  (argument form)
    or prefactor * H[x_scale, y_scale]          (constant form).

    The prefactor is stored in log form so extreme magnitudes (for example
    1/Gamma(m_s + 1) with m_s ~ 200) survive until they combine with the
    H-value; ``prefactor`` exposes the float when representable.
    """

    descriptor: BivariateHDescriptor
    x_scale: float
    y_scale: float
    log_prefactor: float = 0.0
    sign: int = 1
    form: str = "constant"  # "constant" | "argument"
    oracle: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.form not in ("constant", "argument"):
            raise ParameterError(f"unknown form {self.form!r}")
        if self.sign not in (-1, 0, 1):
            raise ParameterError("sign must be -1, 0 or +1")

    @classmethod
    def make(cls, descriptor, x_scale, y_scale, prefactor, form, oracle=None):
        if prefactor == 0:
            sign, logp = 0, 0.0
        else:
            sign = 1 if prefactor > 0 else -1
            logp = math.log(abs(prefactor))
        return cls(descriptor, x_scale, y_scale, logp, sign, form, oracle)

    @property
    def prefactor(self) -> float:
        return self.sign * math.exp(self.log_prefactor)

    def value(self, u=None, *, rtol: float = 1e-10) -> float:
        """Evaluate; ``u`` is required (and positive) in argument form."""
        return float(np.atleast_1d(self.value_many(u, rtol=rtol))[0])

    def value_many(self, u=None, *, rtol: float = 1e-10):
        if self.sign == 0:
            if self.form == "constant":
                return np.zeros(1)
            return np.zeros(np.shape(u) or (1,))
        if self.form == "constant":
            if u is not None:
                raise ParameterError("constant-form result takes no argument")
            xs = np.array([self.x_scale])
            ys = np.array([self.y_scale])
        else:
            if u is None:
                raise ParameterError("argument-form result requires an argument")
            u = np.atleast_1d(np.asarray(u, dtype=float))
            if np.any(~(u > 0)):
                raise ParameterError("argument must be positive")
            xs = self.x_scale * u
            ys = self.y_scale * u
        vals = eval_bivariate(
            self.descriptor, xs, ys, log_offset=self.log_prefactor, rtol=rtol
        )
        return self.sign * np.atleast_1d(vals)

    def with_oracle(self, oracle) -> "ScaledBivariateH":
        return replace(self, oracle=oracle)

    def rescaled(self, log_factor: float, sign: int = 1) -> "ScaledBivariateH":
        """Multiply by sign * exp(log_factor), staying in log space."""
        return replace(
            self, log_prefactor=self.log_prefactor + log_factor,
            sign=self.sign * sign,
        )

    def oracle_check(self, tolerance: float = 1e-6) -> OracleReport:
        """Run the attached independent cross-check (quadrature or finite
        differences, depending on which identity produced this object)."""
        if self.oracle is None:
            raise ParameterError("no oracle attached to this result")
        return self.oracle(self, tolerance)


# ---------------------------------------------------------------------------
# Classic Meijer-G special cases
# ---------------------------------------------------------------------------


def meijer_exp_sqrt(k: float) -> ScaledUnivariateH:
    """exp(-k*sqrt(x)) as a scaled H-function of x.

    The Mellin substitution that turns the sqrt argument into a linear one
    leaves a Jacobian of 1/2 on the bare descriptor, so the exact identity is
    exp(-k*sqrt(x)) = 2 * H^{1,0}_{0,1}[k^2 x | (0, 2)].
    """
    if not k > 0:
        raise ParameterError("k must be positive")
    desc = UnivariateHDescriptor(m=1, n=0, upper=(), lower=(GammaPair(0.0, 2.0),))
    return ScaledUnivariateH(desc, x_scale=k * k, log_prefactor=math.log(2.0))


def meijer_erfc(k: float) -> ScaledUnivariateH:
    """erfc(sqrt(k*x)) = (1/sqrt(pi)) * H^{2,0}_{1,2}[k x | (1,1); (0,1),(1/2,1)]."""
    if not k > 0:
        raise ParameterError("k must be positive")
    desc = UnivariateHDescriptor(
        m=2,
        n=0,
        upper=(GammaPair(1.0, 1.0),),
        lower=(GammaPair(0.0, 1.0), GammaPair(0.5, 1.0)),
    )
    return ScaledUnivariateH(desc, x_scale=k, log_prefactor=-0.5 * math.log(math.pi))


# ---------------------------------------------------------------------------
# Canonical form and JSON serialization
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def canonical(desc) -> str:
    """Deterministic text form; equality of canonical strings is descriptor
    equality for golden tests.  Entries are sorted within each numerator/
    denominator sub-block (where ordering is mathematically immaterial)."""

    def pairs(block, split):
        num = sorted((_fmt(g.param), _fmt(g.coef)) for g in block[:split])
        den = sorted((_fmt(g.param), _fmt(g.coef)) for g in block[split:])
        fmt = lambda items: ",".join(f"({a};{b})" for a, b in items)
        return f"N[{fmt(num)}]D[{fmt(den)}]"

    def triples(block, split):
        num = sorted(
            (_fmt(g.param), _fmt(g.coef_s), _fmt(g.coef_t)) for g in block[:split]
        )
        den = sorted(
            (_fmt(g.param), _fmt(g.coef_s), _fmt(g.coef_t)) for g in block[split:]
        )
        fmt = lambda items: ",".join(f"({a};{b};{c})" for a, b, c in items)
        return f"N[{fmt(num)}]D[{fmt(den)}]"

    if isinstance(desc, UnivariateHDescriptor):
        return (
            f"H1<{desc.m},{desc.n},{desc.p},{desc.q}>"
            f"U{pairs(desc.upper, desc.n)}L{pairs(desc.lower, desc.m)}"
        )
    if isinstance(desc, BivariateHDescriptor):
        o = desc.orders
        return (
            f"H2<{o[0]};{o[1]};{o[2]}>"
            f"JU{triples(desc.joint_upper, desc.n1)}"
            f"JL{triples(desc.joint_lower, desc.m1)}"
            f"SU{pairs(desc.s_upper, desc.n2)}SL{pairs(desc.s_lower, desc.m2)}"
            f"TU{pairs(desc.t_upper, desc.n3)}TL{pairs(desc.t_lower, desc.m3)}"
        )
    raise ParameterError(f"not an H-function descriptor: {type(desc)!r}")


def descriptor_to_json(desc) -> dict:
    if isinstance(desc, UnivariateHDescriptor):
        return {
            "kind": "univariate",
            "orders": {"m": desc.m, "n": desc.n, "p": desc.p, "q": desc.q},
            "upper": [[g.param, g.coef] for g in desc.upper],
            "lower": [[g.param, g.coef] for g in desc.lower],
        }
    if isinstance(desc, BivariateHDescriptor):
        (m1, n1, p1, q1), (m2, n2, p2, q2), (m3, n3, p3, q3) = desc.orders
        return {
            "kind": "bivariate",
            "orders": {
                "m1": m1, "n1": n1, "p1": p1, "q1": q1,
                "m2": m2, "n2": n2, "p2": p2, "q2": q2,
                "m3": m3, "n3": n3, "p3": p3, "q3": q3,
            },
            "joint_upper": [[g.param, g.coef_s, g.coef_t] for g in desc.joint_upper],
            "joint_lower": [[g.param, g.coef_s, g.coef_t] for g in desc.joint_lower],
            "s_upper": [[g.param, g.coef] for g in desc.s_upper],
            "s_lower": [[g.param, g.coef] for g in desc.s_lower],
            "t_upper": [[g.param, g.coef] for g in desc.t_upper],
            "t_lower": [[g.param, g.coef] for g in desc.t_lower],
        }
    raise ParameterError(f"not an H-function descriptor: {type(desc)!r}")


def descriptor_from_json(obj) -> UnivariateHDescriptor | BivariateHDescriptor:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("kind")
    orders = obj.get("orders", {})
    if kind == "univariate":
        desc = UnivariateHDescriptor(
            m=int(orders["m"]),
            n=int(orders["n"]),
            upper=_as_pairs(obj.get("upper", ())),
            lower=_as_pairs(obj.get("lower", ())),
        )
        if desc.p != int(orders.get("p", desc.p)) or desc.q != int(
            orders.get("q", desc.q)
        ):
            raise StructuralValidationError(
                ["declared p/q orders disagree with parameter list lengths"]
            )
        return desc
    if kind == "bivariate":
        desc = BivariateHDescriptor(
            joint_upper=_as_triples(obj.get("joint_upper", ())),
            joint_lower=_as_triples(obj.get("joint_lower", ())),
            s_upper=_as_pairs(obj.get("s_upper", ())),
            s_lower=_as_pairs(obj.get("s_lower", ())),
            t_upper=_as_pairs(obj.get("t_upper", ())),
            t_lower=_as_pairs(obj.get("t_lower", ())),
            n1=int(orders.get("n1", 0)),
            m2=int(orders.get("m2", 0)),
            n2=int(orders.get("n2", 0)),
            m3=int(orders.get("m3", 0)),
            n3=int(orders.get("n3", 0)),
            m1=int(orders.get("m1", 0)),
        )
        declared = (
            int(orders.get("p1", desc.p1)), int(orders.get("q1", desc.q1)),
            int(orders.get("p2", desc.p2)), int(orders.get("q2", desc.q2)),
            int(orders.get("p3", desc.p3)), int(orders.get("q3", desc.q3)),
        )
        actual = (desc.p1, desc.q1, desc.p2, desc.q2, desc.p3, desc.q3)
        if declared != actual:
            raise StructuralValidationError(
                ["declared p/q orders disagree with parameter list lengths"]
            )
        return desc
    raise ParameterError(f"unknown descriptor kind {kind!r}")


def scaled_to_json(sc: ScaledBivariateH) -> dict:
    return {
        "kind": "scaled_bivariate",
        "form": sc.form,
        "sign": sc.sign,
        "log_prefactor": sc.log_prefactor,
        "x_scale": sc.x_scale,
        "y_scale": sc.y_scale,
        "descriptor": descriptor_to_json(sc.descriptor),
    }


def scaled_from_json(obj) -> ScaledBivariateH:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("kind") != "scaled_bivariate":
        raise ParameterError("not a scaled bivariate H payload")
    return ScaledBivariateH(
        descriptor=descriptor_from_json(obj["descriptor"]),
        x_scale=float(obj["x_scale"]),
        y_scale=float(obj["y_scale"]),
        log_prefactor=float(obj["log_prefactor"]),
        sign=int(obj["sign"]),
        form=obj["form"],
    )
