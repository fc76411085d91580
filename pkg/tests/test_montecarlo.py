"""Tests for the Monte Carlo sampler: distributional moments, reproducibility,
interval behavior, and agreement with the analytic formulas at moderate sample
sizes (the full million-sample validation lives in the acceptance suite)."""

import numpy as np
import pytest

from foxh_kit.errors import ParameterError
from foxh_kit.fading import FadingParams, outage, parse_modulation, sep
from foxh_kit.montecarlo import (
    KS_CRITICAL_95,
    KS_CRITICAL_99,
    MCResult,
    SamplerConfig,
    empirical_cdf,
    empirical_outage,
    empirical_sep,
    ks_grid,
    sample_shadowing,
    sample_small_scale_power,
    sample_snr,
)

P1 = FadingParams(alpha=2.0, eta=0.3, mu=1.5, m_s=2.5)
CFG = SamplerConfig(n_samples=200_000, seed=7)


def test_small_scale_power_has_unit_mean():
    rng = np.random.default_rng(3)
    w = sample_small_scale_power(P1, 400_000, rng)
    tol = 5.0 * w.std() / np.sqrt(w.size)
    assert abs(w.mean() - 1.0) < tol


def test_shadowing_inverse_has_unit_mean():
    rng = np.random.default_rng(4)
    z = sample_shadowing(P1, 400_000, rng)
    inv = 1.0 / z
    tol = 5.0 * inv.std() / np.sqrt(z.size)
    assert abs(inv.mean() - 1.0) < tol
    assert np.all(z > 0)


def test_unshadowed_snr_mean_scales_with_alpha_two():
    # For alpha = 2 the SNR is mean_snr times the unit-mean power itself.
    p = P1.with_mean_snr(3.0)
    rng = np.random.default_rng(5)
    g = sample_snr(p, 400_000, rng, shadowed=False)
    tol = 5.0 * g.std() / np.sqrt(g.size)
    assert abs(g.mean() - 3.0) < tol


def test_sampler_config_batching_is_exact_and_reproducible():
    cfg = SamplerConfig(n_samples=1000, seed=11, batch_size=300)
    sizes = [size for _, size in cfg.batches()]
    assert sizes == [300, 300, 300, 100]

    def draw(c):
        return np.concatenate(
            [sample_snr(P1, size, rng) for rng, size in c.batches()]
        )

    a = draw(cfg)
    b = draw(SamplerConfig(n_samples=1000, seed=11, batch_size=300))
    np.testing.assert_array_equal(a, b)
    c = draw(SamplerConfig(n_samples=1000, seed=12, batch_size=300))
    assert not np.array_equal(a, c)


def test_sampler_config_validation():
    with pytest.raises(ParameterError):
        SamplerConfig(n_samples=0)
    with pytest.raises(ParameterError):
        SamplerConfig(batch_size=0)


def test_mc_result_contains():
    r = MCResult(0.5, 0.4, 0.6, 100, 0.95)
    assert r.contains(0.45)
    assert not r.contains(0.39)


def test_empirical_outage_covers_analytic():
    res = empirical_outage(P1, 1.0, CFG, level=0.99)
    assert res.contains(outage(P1, 1.0))
    assert 0.0 <= res.ci_low <= res.estimate <= res.ci_high <= 1.0


def test_empirical_outage_zero_hits_gives_zero_interval_floor():
    # Threshold far below any sample: zero successes, Wilson lower bound 0.
    res = empirical_outage(P1, 1e-30, SamplerConfig(n_samples=10_000, seed=1))
    assert res.estimate == 0.0
    assert res.ci_low == 0.0
    assert res.ci_high > 0.0
    with pytest.raises(ParameterError):
        empirical_outage(P1, -1.0, CFG)


@pytest.mark.parametrize("name", ["bpsk", "dbpsk", "lqpsk"])
def test_empirical_sep_covers_analytic(name):
    mod = parse_modulation(name)
    res = empirical_sep(P1, mod, CFG, level=0.99)
    assert res.contains(sep(P1, mod))


def test_empirical_estimates_are_seed_deterministic():
    a = empirical_outage(P1, 1.0, CFG)
    b = empirical_outage(P1, 1.0, SamplerConfig(n_samples=200_000, seed=7))
    assert a == b


def test_empirical_cdf_monotone_and_bounded():
    grid = np.array([0.05, 0.2, 1.0, 5.0, 50.0])
    cdf = empirical_cdf(P1, grid, CFG)
    assert np.all(np.diff(cdf) >= 0)
    assert cdf[0] >= 0.0 and cdf[-1] <= 1.0


def test_ks_grid_below_critical():
    stat, d, grid = ks_grid(P1, CFG, n_grid=15)
    assert np.all(np.diff(grid) > 0)
    assert d >= 0.0
    assert stat < KS_CRITICAL_99
    with pytest.raises(ParameterError):
        ks_grid(P1, CFG, n_grid=2)


def test_ks_critical_constants():
    # Asymptotic Kolmogorov distribution: these are the standard 1% and 5%
    # two-sided critical points of sqrt(n) * D_n.
    assert KS_CRITICAL_99 == pytest.approx(1.628, abs=5e-4)
    assert KS_CRITICAL_95 == pytest.approx(1.358, abs=5e-4)
    assert KS_CRITICAL_95 < KS_CRITICAL_99


def test_confidence_level_validation():
    with pytest.raises(ParameterError):
        empirical_outage(P1, 1.0, SamplerConfig(n_samples=1000), level=1.5)
