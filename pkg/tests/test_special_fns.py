"""Contract tests for the special-function layer: pole detection, overflow
reporting, and agreement with elementary identities."""

import math

import numpy as np
import pytest

from foxh_kit.errors import ParameterError, PoleError, RangeOverflowError
from foxh_kit.special_fns import (
    POLE_TOLERANCE,
    bessel_i,
    bessel_i_scaled,
    erfc,
    gamma_real,
    ln_gamma,
    ln_gamma_real,
)


def test_gamma_real_known_values():
    assert gamma_real(5.0) == pytest.approx(24.0, rel=1e-14)
    assert gamma_real(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_gamma_reflection_identity():
    for x in (0.2, 0.37, 0.5, 0.81):
        lhs = gamma_real(x) * gamma_real(1.0 - x)
        assert lhs == pytest.approx(math.pi / math.sin(math.pi * x), rel=1e-12)


def test_gamma_real_pole_detection():
    for pole in (0.0, -1.0, -7.0):
        with pytest.raises(PoleError):
            gamma_real(pole)
        with pytest.raises(PoleError):
            gamma_real(pole + 0.5 * POLE_TOLERANCE)
    # Just outside the tolerance must evaluate.
    assert math.isfinite(gamma_real(-1.0 + 10 * POLE_TOLERANCE))


def test_gamma_real_overflow_is_reported():
    with pytest.raises(RangeOverflowError):
        gamma_real(180.0)


def test_ln_gamma_complex_matches_duplication():
    # Legendre duplication: lnG(2z) = lnG(z) + lnG(z+1/2) + (2z-1) ln 2 - ln sqrt(pi)
    for z in (0.7 + 0.9j, 2.3 - 4.0j):
        lhs = ln_gamma(2 * z)
        rhs = (
            ln_gamma(z)
            + ln_gamma(z + 0.5)
            + (2 * z - 1) * math.log(2.0)
            - 0.5 * math.log(math.pi)
        )
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_ln_gamma_pole_detection_on_axis():
    with pytest.raises(PoleError):
        ln_gamma(-3.0 + 0.0j)
    # Off-axis arguments near negative integers are fine.
    assert np.isfinite(ln_gamma(-3.0 + 1.0j).real)


def test_ln_gamma_array_input():
    z = np.array([1.0 + 1.0j, 2.0 - 0.5j])
    out = ln_gamma(z)
    assert out.shape == (2,)
    assert out[0] == pytest.approx(complex(ln_gamma(z[0])), rel=1e-14)


def test_ln_gamma_real_requires_positive():
    assert ln_gamma_real(6.0) == pytest.approx(math.log(120.0), rel=1e-14)
    with pytest.raises(ParameterError):
        ln_gamma_real(-0.5)


def test_erfc_endpoints():
    assert erfc(0.0) == pytest.approx(1.0, rel=1e-15)
    assert float(erfc(np.inf)) == 0.0


def test_bessel_consistency_between_scaled_and_plain():
    for order in (0.0, 0.5, 2.5):
        for x in (0.1, 1.0, 20.0):
            plain = bessel_i(order, x)
            scaled = bessel_i_scaled(order, x)
            assert plain == pytest.approx(scaled * math.exp(x), rel=1e-12)


def test_bessel_small_argument_series():
    # I_v(x) ~ (x/2)^v / Gamma(v+1) for x -> 0
    order, x = 1.5, 1e-6
    expected = (x / 2.0) ** order / gamma_real(order + 1.0)
    assert bessel_i(order, x) == pytest.approx(expected, rel=1e-6)


def test_bessel_overflow_reported_scaled_safe():
    with pytest.raises(RangeOverflowError):
        bessel_i(0.0, 800.0)
    assert 0.0 < bessel_i_scaled(0.0, 800.0) < 1.0


def test_bessel_order_domain():
    with pytest.raises(ParameterError):
        bessel_i(-1.0, 1.0)
    with pytest.raises(ParameterError):
        bessel_i(0.0, -1.0)
