"""Monte Carlo simulation of the composite fading channel.

The sampler is deliberately independent of every analytic route in
:mod:`.fading`: it draws the small-scale power as the sum of two gamma
variates (the in-phase and quadrature cluster powers, whose rates differ by
the imbalance constant), applies the envelope nonlinearity as a power law,
and multiplies by an inverse-gamma shadowing variate.  Agreement between
these samples and the H-function formulas is therefore evidence for both.

Estimators return symmetric simultaneous-coverage confidence intervals:
binomial proportions use the Wilson score interval, bounded means use the
normal approximation.  ``ks_grid`` compares the empirical CDF with the
analytic outage curve on a quantile grid; the max deviation is a lower bound
for the full Kolmogorov-Smirnov statistic, so comparing it against the
standard critical values is conservative in the accepting direction while
still catching gross mismatches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .fading import FadingParams, Modulation, conditional_error, derive_constants, outage

__all__ = [
    "SamplerConfig",
    "MCResult",
    "sample_small_scale_power",
    "sample_shadowing",
    "sample_snr",
    "empirical_outage",
    "empirical_mean",
    "empirical_sep",
    "empirical_cdf",
    "ks_grid",
    "KS_CRITICAL_99",
    "KS_CRITICAL_95",
]

#: Asymptotic Kolmogorov-Smirnov critical values: P(sqrt(n) D_n > c) = alpha.
KS_CRITICAL_99 = 1.628
KS_CRITICAL_95 = 1.358


@dataclass(frozen=True)
class SamplerConfig:
    """How many samples to draw and how to seed the generator.

    Batches are seeded from independent spawns of one ``SeedSequence``, so
    results are reproducible for a fixed (seed, n_samples, batch_size) and
    the memory high-water mark stays bounded for large runs.
    """

    n_samples: int = 1_000_000
    seed: int = 0
    batch_size: int = 1 << 18

    def __post_init__(self):
        if self.n_samples <= 0:
            raise ParameterError("n_samples must be positive")
        if self.batch_size <= 0:
            raise ParameterError("batch_size must be positive")

    def batches(self):
        """Yield (generator, batch_length) pairs covering n_samples."""
        n_batches = (self.n_samples + self.batch_size - 1) // self.batch_size
        seeds = np.random.SeedSequence(self.seed).spawn(n_batches)
        remaining = self.n_samples
        for ss in seeds:
            size = min(self.batch_size, remaining)
            remaining -= size
            yield np.random.default_rng(ss), size


@dataclass(frozen=True)
class MCResult:
    """Point estimate with a confidence interval at the stated level."""

    estimate: float
    ci_low: float
    ci_high: float
    n_samples: int
    level: float

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high


def sample_small_scale_power(
    params: FadingParams, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Unit-mean small-scale power before the envelope nonlinearity.

    Sum of two independent gamma variates with shape ``mu`` whose rates are
    split symmetrically by the imbalance constant; their means add to one.
    """
    c = derive_constants(params)
    rate_a = c.q + c.q_hat  # 2*mu*(h_sum + h_diff)
    rate_b = c.t  # 2*mu*(h_sum - h_diff)
    return rng.gamma(params.mu, 1.0 / rate_a, n) + rng.gamma(
        params.mu, 1.0 / rate_b, n
    )


def sample_shadowing(
    params: FadingParams, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Inverse-gamma shadowing multiplier with unit mean of its inverse."""
    return params.m_s / rng.gamma(params.m_s, 1.0, n)


def sample_snr(
    params: FadingParams,
    n: int,
    rng: np.random.Generator,
    *,
    shadowed: bool = True,
) -> np.ndarray:
    """Instantaneous SNR samples of the (optionally shadowed) channel."""
    w = sample_small_scale_power(params, n, rng)
    g = params.mean_snr * w ** (2.0 / params.alpha)
    if shadowed:
        g *= sample_shadowing(params, n, rng)
    return g


def _z_value(level: float) -> float:
    if not (0.0 < level < 1.0):
        raise ParameterError("confidence level must lie in (0, 1)")
    # Inverse normal CDF via the complementary error function relation.
    from scipy.special import erfcinv

    return math.sqrt(2.0) * float(erfcinv(1.0 - level))


def _wilson(successes: int, n: int, level: float) -> tuple[float, float, float]:
    z = _z_value(level)
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2.0 * n)) / denom
    half = (
        z
        * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n))
        / denom
    )
    return phat, max(center - half, 0.0), min(center + half, 1.0)


def empirical_outage(
    params: FadingParams,
    gamma_th: float,
    cfg: SamplerConfig,
    *,
    shadowed: bool = True,
    level: float = 0.95,
) -> MCResult:
    """Fraction of SNR samples at or below the threshold (Wilson interval)."""
    if gamma_th < 0:
        raise ParameterError("threshold must be >= 0")
    hits = 0
    for rng, size in cfg.batches():
        g = sample_snr(params, size, rng, shadowed=shadowed)
        hits += int(np.count_nonzero(g <= gamma_th))
    est, lo, hi = _wilson(hits, cfg.n_samples, level)
    return MCResult(est, lo, hi, cfg.n_samples, level)


def empirical_mean(
    params: FadingParams,
    fn,
    cfg: SamplerConfig,
    *,
    shadowed: bool = True,
    level: float = 0.95,
    clip_unit: bool = False,
) -> MCResult:
    """Sample mean of ``fn(snr_samples)`` with a normal-approximation interval.

    ``fn`` must map an SNR array to an equally shaped array of finite values.
    ``clip_unit`` clamps the interval to [0, 1] for probability-valued
    functionals.
    """
    total = 0.0
    total_sq = 0.0
    for rng, size in cfg.batches():
        g = sample_snr(params, size, rng, shadowed=shadowed)
        v = np.asarray(fn(g), dtype=float)
        total += float(np.sum(v))
        total_sq += float(np.sum(v * v))
    n = cfg.n_samples
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    half = _z_value(level) * math.sqrt(var / n)
    lo, hi = mean - half, mean + half
    if clip_unit:
        lo, hi = max(lo, 0.0), min(hi, 1.0)
    return MCResult(mean, lo, hi, n, level)


def empirical_sep(
    params: FadingParams,
    mod: Modulation,
    cfg: SamplerConfig,
    *,
    shadowed: bool = True,
    level: float = 0.95,
) -> MCResult:
    """Mean conditional error probability over SNR samples (normal interval).

    The conditional error is bounded in [0, 1], so the CLT interval with the
    sample standard deviation is accurate at these sample sizes.
    """
    return empirical_mean(
        params,
        lambda g: conditional_error(mod, g),
        cfg,
        shadowed=shadowed,
        level=level,
        clip_unit=True,
    )


def empirical_cdf(
    params: FadingParams,
    grid,
    cfg: SamplerConfig,
    *,
    shadowed: bool = True,
) -> np.ndarray:
    """Empirical CDF of the SNR evaluated at the given grid points."""
    grid = np.asarray(grid, dtype=float)
    counts = np.zeros(grid.shape, dtype=np.int64)
    for rng, size in cfg.batches():
        g = np.sort(sample_snr(params, size, rng, shadowed=shadowed))
        counts += np.searchsorted(g, grid, side="right")
    return counts / cfg.n_samples


def ks_grid(
    params: FadingParams,
    cfg: SamplerConfig,
    *,
    n_grid: int = 31,
    rtol: float = 1e-8,
) -> tuple[float, float, np.ndarray]:
    """Grid Kolmogorov-Smirnov check of samples against the analytic CDF.

    Grid points are spread over the distribution's bulk (equally spaced
    analytic quantile levels between 2% and 98%, located by bisection on the
    outage curve).  Returns ``(sqrt(n) * D_grid, D_grid, grid)``; the first
    entry compares directly against KS_CRITICAL_99 / KS_CRITICAL_95.
    """
    if n_grid < 3:
        raise ParameterError("n_grid must be at least 3")
    levels = np.linspace(0.02, 0.98, n_grid)
    grid = np.empty(n_grid)
    lo_init, hi_init = params.mean_snr * 1e-9, params.mean_snr * 1e9
    for i, lv in enumerate(levels):
        lo, hi = lo_init, hi_init
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            if outage(params, mid, rtol=rtol) < lv:
                lo = mid
            else:
                hi = mid
            if hi / lo < 1.0 + 1e-12:
                break
        grid[i] = math.sqrt(lo * hi)
    analytic = np.array([outage(params, x, rtol=rtol) for x in grid])
    empirical = empirical_cdf(params, grid, cfg)
    d_grid = float(np.max(np.abs(empirical - analytic)))
    return math.sqrt(cfg.n_samples) * d_grid, d_grid, grid
