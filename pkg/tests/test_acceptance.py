"""End-to-end acceptance checks for the composite-fading toolkit.

Every public pipeline is validated against an independent reference:
elementary closed forms, adaptive quadrature of the conditional mixing
integral, Monte-Carlo simulation, and exact power laws.  The checks cover

1. the identity self-test corpus (closed forms and quadrature oracles),
2. pointwise equivalence of the contour-integral density with the mixing
   quadrature, plus normalization, over the full parameter matrix,
3. numeric adjudication of the formula readings that print ambiguously,
4. simulation agreement (confidence intervals and a KS distance check),
5. high-SNR ratio and diversity-slope consistency of the closed asymptotes,
6. the qualitative curve orderings the model implies, and
7. special-case limits (one-cluster shadowed channel, weak shadowing).
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate

from foxh_kit import selftest
from foxh_kit.fading import (
    ETA_UNITY_LIMIT,
    FadingParams,
    MODULATION_PRESETS,
    asymptotic_outage,
    asymptotic_sep,
    composite_pdf,
    composite_pdf_quadrature,
    outage,
    parse_modulation,
    pdf_direct,
    sep,
)
from foxh_kit.montecarlo import (
    KS_CRITICAL_99,
    SamplerConfig,
    empirical_outage,
    empirical_sep,
    ks_grid,
)

ACCEPTANCE_SEED = 20250814

# Full parameter matrix: 3 nonlinearity x 2 imbalance x 3 cluster counts x
# 3 shadowing shapes = 54 sets.
PARAM_MATRIX = tuple(
    FadingParams(a, e, m, ms)
    for a in (1.5, 2.0, 3.0)
    for e in (0.3, 0.5)
    for m in (1.0, 1.5, 3.5)
    for ms in (1.5, 2.5, 3.5)
)

ETA1 = ETA_UNITY_LIMIT
BPSK = MODULATION_PRESETS["bpsk"]
DBPSK = MODULATION_PRESETS["dbpsk"]
LQPSK = MODULATION_PRESETS["lqpsk"]
LBPSK = MODULATION_PRESETS["lbpsk"]

# Parameter families behind the simulation cross-checks: classic special
# cases (one- and two-cluster symmetric channels under unit-shape shadowing),
# coherent M-ary PSK, binary coherent vs non-coherent detection, and binary
# PSK under Laplacian noise with near-negligible shadowing.
OUTAGE_FAMILY = (
    ("one-cluster", FadingParams(2.0, ETA1, 0.5, 1.0)),
    ("two-cluster", FadingParams(2.0, ETA1, 1.0, 1.0)),
)
OUTAGE_THRESHOLDS = (1.0, 10.0 ** 0.5)  # 0 dB and 5 dB
MPSK_FAMILY = tuple(
    (mu, m) for mu in (1.5, 3.5) for m in (8, 16, 32)
)
BINARY_FAMILY = (1.5, 2.0, 3.0)  # nonlinearity values at eta=0.3, mu=1, m_s=3.5
LAPLACIAN_FAMILY = (
    (2.0, ETA1, 0.5),
    (3.0, ETA1, 1.0),
    (2.0, 0.3, 1.5),
)
SNR_GRID_DB = (0.0, 5.0, 10.0, 15.0)


def _db(v: float) -> float:
    return 10.0 ** (v / 10.0)


# ---------------------------------------------------------------------------
# 1. Identity self-test corpus
# ---------------------------------------------------------------------------


def test_identity_corpus_passes_oracles_within_budget():
    t0 = time.perf_counter()
    corpus = selftest.run_corpus()
    oracles = selftest.run_identity_oracles()
    elapsed = time.perf_counter() - t0

    assert len(corpus) >= 10, "corpus must exercise at least ten descriptors"
    bad = [c for c in corpus + oracles if not c.passed]
    assert not bad, "failing self-test cases: " + ", ".join(c.name for c in bad)
    for c in corpus + oracles:
        assert c.tolerance <= 1e-4
        if "derivative" in c.name:
            assert c.tolerance <= 1e-5
    assert elapsed < 300.0, f"identity suite took {elapsed:.1f}s"
    print(f"[identities] {len(corpus)} corpus + {len(oracles)} oracle checks "
          f"in {elapsed:.1f}s, all passed")


# ---------------------------------------------------------------------------
# 2. Density equivalence and normalization over the matrix
# ---------------------------------------------------------------------------


def test_density_matches_mixing_quadrature_on_matrix():
    grid = np.geomspace(0.05, 8.0, 10)
    worst = 0.0
    worst_set = None
    for p in PARAM_MATRIX:
        engine = composite_pdf(p, grid)
        oracle = composite_pdf_quadrature(p, grid)
        rel = float(np.max(np.abs(engine / oracle - 1.0)))
        if rel > worst:
            worst, worst_set = rel, p
        assert rel <= 1e-4, f"density mismatch {rel:.2e} at {p}"
    print(f"[density] worst relative gap {worst:.2e} at {worst_set}")


def test_density_normalization_on_matrix():
    worst = 0.0
    worst_set = None
    for p in PARAM_MATRIX:
        def f(g: float) -> float:
            return float(composite_pdf(p, g)[0])

        head, err1 = integrate.quad(f, 0.0, 2.0, epsabs=1e-10, epsrel=1e-8,
                                    limit=200)
        tail, err2 = integrate.quad(f, 2.0, np.inf, epsabs=1e-10,
                                    epsrel=1e-8, limit=200)
        assert err1 + err2 < 1e-6, "quadrature error bound too weak to judge"
        gap = abs(head + tail - 1.0)
        if gap > worst:
            worst, worst_set = gap, p
        assert gap <= 1e-4, f"normalization off by {gap:.2e} at {p}"
    print(f"[normalization] worst |mass - 1| = {worst:.2e} at {worst_set}")


# ---------------------------------------------------------------------------
# 3. Printed-form ambiguities resolved by numeric adjudication
# ---------------------------------------------------------------------------


def test_ambiguous_formula_readings_are_adjudicated():
    results = selftest.run_adjudications()
    names = {a.name for a in results}
    assert names == {
        "sqrt-kernel argument power",
        "composite-density argument exponent",
        "generalized MGF argument content",
        "scale-derivative argument dependence",
        "Laplacian PSK sector count",
    }
    for a in results:
        assert a.passed, f"{a.name}: adjudication failed"
        assert a.working_rel <= 1e-4, (
            f"{a.name}: working reading off by {a.working_rel:.2e}")
        assert a.alternate_rel >= 1e-2, (
            f"{a.name}: alternate reading not demonstrably wrong "
            f"({a.alternate_rel:.2e})")
    print("[adjudication] " + "; ".join(
        f"{a.name}: {a.working_rel:.1e} vs {a.alternate_rel:.1e}"
        for a in results))


# ---------------------------------------------------------------------------
# 4. Simulation agreement
# ---------------------------------------------------------------------------


def _interval_checks():
    """(label, params-with-SNR, kind, argument) for every curve grid point."""
    checks = []
    for label, p in OUTAGE_FAMILY:
        for th in OUTAGE_THRESHOLDS:
            for db in SNR_GRID_DB:
                checks.append((f"outage-{label}-th{th:.3g}-{db:g}dB",
                               p.with_mean_snr(_db(db)), "outage", th))
    for mu, m in MPSK_FAMILY:
        p = FadingParams(2.0, ETA1, mu, 2.5)
        mod = parse_modulation(f"mpsk:{m}")
        for db in SNR_GRID_DB:
            checks.append((f"mpsk{m}-mu{mu:g}-{db:g}dB",
                           p.with_mean_snr(_db(db)), "sep", mod))
    for a in BINARY_FAMILY:
        p = FadingParams(a, 0.3, 1.0, 3.5)
        for name, mod in (("bpsk", BPSK), ("dbpsk", DBPSK)):
            for db in SNR_GRID_DB:
                checks.append((f"{name}-a{a:g}-{db:g}dB",
                               p.with_mean_snr(_db(db)), "sep", mod))
    for a, e, mu in LAPLACIAN_FAMILY:
        p = FadingParams(a, e, mu, 25.0)
        for db in SNR_GRID_DB:
            checks.append((f"lbpsk-a{a:g}-mu{mu:g}-{db:g}dB",
                           p.with_mean_snr(_db(db)), "sep", LBPSK))
    return checks


def test_simulation_intervals_contain_analytic_values():
    checks = _interval_checks()
    n_checks = len(checks)
    # Simultaneous 95% coverage across all grid points: each per-point
    # interval runs at the Sidak-corrected level, so a fully correct model
    # is inside every interval with probability 0.95.
    level = 0.95 ** (1.0 / n_checks)
    misses = []
    for i, (label, p, kind, arg) in enumerate(checks):
        cfg = SamplerConfig(n_samples=10 ** 6, seed=ACCEPTANCE_SEED + i)
        if kind == "outage":
            analytic = outage(p, arg)
            res = empirical_outage(p, arg, cfg, level=level)
        else:
            analytic = sep(p, arg)
            res = empirical_sep(p, arg, cfg, level=level)
        assert analytic > 0.0
        if not res.contains(analytic):
            misses.append(f"{label}: analytic {analytic:.4e} outside "
                          f"[{res.ci_low:.4e}, {res.ci_high:.4e}]")
    assert not misses, f"{len(misses)}/{n_checks} points missed:\n" + \
        "\n".join(misses)
    print(f"[simulation] {n_checks} interval checks at per-point level "
          f"{level:.5f} (simultaneous 0.95): all contain the analytic value")


def test_simulation_ks_distance_below_critical():
    # One distribution per distinct channel parameter set across the curve
    # families; the SNR scale only relabels the axis, so mean SNR 1 covers
    # every point of each curve.
    dists = [(label, p) for label, p in OUTAGE_FAMILY]
    dists += [(f"mpsk-mu{mu:g}", FadingParams(2.0, ETA1, mu, 2.5))
              for mu in (1.5, 3.5)]
    dists += [(f"binary-a{a:g}", FadingParams(a, 0.3, 1.0, 3.5))
              for a in BINARY_FAMILY]
    dists += [(f"laplacian-a{a:g}-mu{mu:g}", FadingParams(a, e, mu, 25.0))
              for a, e, mu in LAPLACIAN_FAMILY]
    # One test at the 1% critical value exceeds it 1% of the time even when
    # the model is exact, so across ten distributions the single-test bound
    # (1.628) trips about once per ten runs.  Correct to a family-wise 1%
    # with the same Kolmogorov tail inversion that yields 1.628 for one
    # test: P(sqrt(n) D > c) ~ 2 exp(-2 c^2).
    per_test = 1.0 - 0.99 ** (1.0 / len(dists))
    critical = math.sqrt(math.log(2.0 / per_test) / 2.0)
    assert critical > KS_CRITICAL_99  # family-wise bound is the wider one
    stats = {}
    for j, (label, p) in enumerate(dists):
        cfg = SamplerConfig(n_samples=10 ** 6, seed=ACCEPTANCE_SEED + 1000 + j)
        scaled, _, grid = ks_grid(p, cfg, n_grid=21)
        assert np.all(np.diff(grid) > 0)
        stats[label] = scaled
        assert scaled < critical, (
            f"{label}: sqrt(n)*D = {scaled:.3f} >= {critical:.3f}")
    # A real CDF error would lift every statistic, not one tail draw.
    assert float(np.median(list(stats.values()))) < KS_CRITICAL_99
    worst_label = max(stats, key=stats.get)
    print(f"[simulation] worst sqrt(n)*D = {stats[worst_label]:.3f} "
          f"({worst_label}) < {critical:.3f} family-wise on "
          f"{len(dists)} distributions")


# ---------------------------------------------------------------------------
# 5. High-SNR asymptote consistency
# ---------------------------------------------------------------------------

HIGH_SNR_METRICS = ("outage", "bpsk", "dbpsk", "lqpsk")
RATIO_TOLERANCE = {"outage": 0.02, "bpsk": 0.05, "dbpsk": 0.05, "lqpsk": 0.05}

# Pairs whose leading-order high-SNR form has not yet entered its convergence
# regime at 40 dB.  The gap between the exact metric and its one-term
# asymptote decays like (1/snr)^(alpha/2) with coefficients that grow with
# the cluster count, so the mu = 3.5 corner converges last, slowest for the
# exp(-k sqrt(.)) conditionals that weight larger SNR values.  The exact
# values here agree with the engine-free mixing quadrature to better than
# 1e-11, so the gap is a property of the one-term asymptote itself; the
# companion test below pins its decay.  Strict xfail keeps this frozen list
# honest in both directions.
SLOW_CORNER = frozenset(
    [("outage", 1.5, 0.3, 3.5, 1.5), ("outage", 1.5, 0.5, 3.5, 1.5)]
    + [("bpsk", 1.5, 0.3, 3.5, ms) for ms in (1.5, 2.5, 3.5)]
    + [("bpsk", 1.5, 0.5, 3.5, ms) for ms in (1.5, 2.5)]
    + [("dbpsk", 1.5, e, 3.5, ms) for e in (0.3, 0.5)
       for ms in (1.5, 2.5, 3.5)]
    + [("lqpsk", a, e, 3.5, ms) for a in (1.5, 2.0, 3.0)
       for e in (0.3, 0.5) for ms in (1.5, 2.5, 3.5)]
)


def _ratio_error(metric: str, p: FadingParams) -> float:
    if metric == "outage":
        return abs(outage(p, 1.0) / asymptotic_outage(p, 1.0) - 1.0)
    mod = MODULATION_PRESETS[metric]
    return abs(sep(p, mod) / asymptotic_sep(p, mod) - 1.0)


def _ratio_cases():
    cases = []
    for p in PARAM_MATRIX:
        for metric in HIGH_SNR_METRICS:
            key = (metric, p.alpha, p.eta, p.mu, p.m_s)
            marks = ()
            if key in SLOW_CORNER:
                marks = pytest.mark.xfail(
                    strict=True,
                    reason="one-term asymptote not yet converged at 40 dB "
                           "for this corner; see "
                           "test_slow_corner_asymptote_converges",
                )
            cases.append(pytest.param(
                metric, p,
                id=f"{metric}-a{p.alpha:g}-e{p.eta:g}-mu{p.mu:g}-ms{p.m_s:g}",
                marks=marks))
    return cases


@pytest.mark.parametrize("metric,p", _ratio_cases())
def test_asymptote_ratio_at_40db(metric, p):
    err = _ratio_error(metric, p.with_mean_snr(1e4))
    assert err <= RATIO_TOLERANCE[metric], (
        f"{metric} exact/asymptote off by {err:.2%} at 40 dB for {p}")


def test_slow_corner_asymptote_converges():
    assert len(SLOW_CORNER) == 31
    for metric, a, e, mu, ms in sorted(SLOW_CORNER):
        tol = RATIO_TOLERANCE[metric]
        p = FadingParams(a, e, mu, ms)
        err40 = _ratio_error(metric, p.with_mean_snr(1e4))
        err60 = _ratio_error(metric, p.with_mean_snr(1e6))
        assert err40 > tol, (
            f"{metric} at {(a, e, mu, ms)} now converges at 40 dB "
            f"({err40:.2%}); shrink SLOW_CORNER")
        assert err60 <= tol, (
            f"{metric} at {(a, e, mu, ms)} still off by {err60:.2%} at 60 dB")
        assert err60 < err40 / 5.0, (
            f"{metric} at {(a, e, mu, ms)} not contracting "
            f"({err40:.2e} -> {err60:.2e})")
    print(f"[asymptote] all {len(SLOW_CORNER)} slow-corner pairs inside "
          "tolerance by 60 dB with >5x contraction per 20 dB")


def test_diversity_slope_matches_parameters():
    worst = 0.0
    worst_case = None
    for p in PARAM_MATRIX:
        amu = p.alpha * p.mu
        dlog = math.log(10.0 ** 4.5) - math.log(1e4)
        for metric in ("outage", "bpsk"):
            if metric == "outage":
                lo = outage(p.with_mean_snr(1e4), 1.0)
                hi = outage(p.with_mean_snr(10.0 ** 4.5), 1.0)
            else:
                lo = sep(p.with_mean_snr(1e4), BPSK)
                hi = sep(p.with_mean_snr(10.0 ** 4.5), BPSK)
            slope = (math.log(hi) - math.log(lo)) / dlog
            rel = abs(slope + amu) / amu
            if rel > worst:
                worst, worst_case = rel, (metric, p)
            assert rel <= 0.05, (
                f"{metric} slope {slope:.4f} vs -{amu} at {p}")
    print(f"[slope] worst relative slope deviation {worst:.2e} "
          f"at {worst_case}")


# ---------------------------------------------------------------------------
# 6. Curve-shape orderings
# ---------------------------------------------------------------------------


def test_outage_orderings():
    grid_db = (0.0, 5.0, 10.0, 15.0, 20.0)
    for label, p in OUTAGE_FAMILY:
        curves = {}
        for th in OUTAGE_THRESHOLDS:
            vals = [outage(p.with_mean_snr(_db(db)), th) for db in grid_db]
            assert all(a > b for a, b in zip(vals, vals[1:])), (
                f"outage not decreasing in SNR for {label}, th={th}")
            curves[th] = vals
        lo, hi = OUTAGE_THRESHOLDS
        assert all(h > l for l, h in zip(curves[lo], curves[hi])), (
            f"higher threshold must raise outage pointwise for {label}")


def test_mpsk_error_increases_with_constellation_size():
    for mu in (1.5, 3.5):
        p = FadingParams(2.0, ETA1, mu, 2.5)
        for db in (5.0, 10.0):
            vals = [sep(p.with_mean_snr(_db(db)), parse_modulation(f"mpsk:{m}"))
                    for m in (8, 16, 32)]
            assert vals[0] < vals[1] < vals[2], (
                f"MPSK ordering broken at mu={mu}, {db} dB: {vals}")


def test_coherent_binary_beats_noncoherent():
    for a in BINARY_FAMILY:
        p = FadingParams(a, 0.3, 1.0, 3.5)
        for db in SNR_GRID_DB:
            ps = p.with_mean_snr(_db(db))
            assert sep(ps, BPSK) < sep(ps, DBPSK), (
                f"coherent should beat non-coherent at alpha={a}, {db} dB")


def test_error_decreases_with_nonlinearity_at_high_snr():
    for name, mod in (("bpsk", BPSK), ("dbpsk", DBPSK)):
        for db in (15.0, 20.0, 25.0):
            vals = [sep(FadingParams(a, 0.3, 1.0, 3.5, _db(db)), mod)
                    for a in BINARY_FAMILY]
            assert vals[0] > vals[1] > vals[2], (
                f"{name} not decreasing in nonlinearity at {db} dB: {vals}")


# ---------------------------------------------------------------------------
# 7. Special-case limits
# ---------------------------------------------------------------------------


def test_one_cluster_shadowed_channel_matches_closed_form():
    # alpha = 2, mu = 1/2, eta -> 1: the small-scale power is exponential, so
    # mixing with the inverse-gamma shadow gives the shifted-power-law
    # density (1/snr) * (1 + g/(ms*snr))^-(ms+1) exactly.
    grid = np.geomspace(0.05, 8.0, 12)
    for ms in (1.5, 2.5):
        p = FadingParams(2.0, ETA1, 0.5, ms)
        engine = composite_pdf(p, grid)
        oracle = composite_pdf_quadrature(p, grid)
        closed = (1.0 + grid / ms) ** (-(ms + 1.0))
        rel_oracle = float(np.max(np.abs(engine / oracle - 1.0)))
        rel_closed = float(np.max(np.abs(engine / closed - 1.0)))
        assert rel_oracle <= 1e-3, f"vs quadrature: {rel_oracle:.2e}"
        assert rel_closed <= 1e-8, f"vs closed form: {rel_closed:.2e}"
        print(f"[special] one-cluster ms={ms}: {rel_closed:.1e} vs closed "
              f"form, {rel_oracle:.1e} vs quadrature")


def test_weak_shadowing_limit_recovers_unshadowed_density():
    # As the shadowing shape grows the shadow multiplier concentrates at 1
    # with relative corrections O(1/shape).
    grid = np.array([0.3, 1.0, 3.0])
    for p in (FadingParams(2.0, 0.3, 1.5, 2000.0),
              FadingParams(1.5, 0.5, 1.0, 1000.0)):
        shadowed = composite_pdf(p, grid)
        unshadowed = pdf_direct(p, grid)
        rel = float(np.max(np.abs(shadowed / unshadowed - 1.0)))
        assert rel <= 1e-2, (
            f"weak-shadowing gap {rel:.2e} at shape {p.m_s}")
        print(f"[special] shape {p.m_s:g}: weak-shadowing gap {rel:.1e}")
