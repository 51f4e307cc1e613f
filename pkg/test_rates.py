# test_rates.py
import logging
import math

import pytest
from scipy import integrate

import rates
from condensate import (
    bogoliubov_coefficients,
    dispersion,
    mode_wavenumber,
    species_spec,
)
from errors import InvalidArgumentError, QuadratureError
from rates import (
    beliaev_rate,
    beliaev_thermal_factor,
    beliaev_zero_temperature,
    combined_rates,
    landau_integral,
    landau_rate_full,
    landau_rate_lowT,
    loss_channel_rates,
    thermal_occupation,
    three_body_gamma,
)

LANDAU_REFERENCE = 5e-6  # с⁻¹, Rb, 200 пК, 1e13 см⁻³, n = 1
BELIAEV_REFERENCE = 1e-9


@pytest.fixture
def rb_warm():
    return species_spec("rb", 1e19, temperature=200e-12, length=200e-6)


@pytest.fixture
def rb_cold():
    return species_spec("rb", 1e19, temperature=0.0, length=200e-6)


def test_three_body_table():
    assert three_body_gamma(5.8e-30, 1e14) == pytest.approx(0.174, rel=1e-12)
    assert three_body_gamma(4e-30, 1e14) == pytest.approx(0.12, rel=1e-12)
    for D in (5.8e-30, 4e-30):
        assert 500 <= 1 / three_body_gamma(D, 1e13) <= 1000


def test_three_body_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        three_body_gamma(-1.0, 1e13)
    with pytest.raises(InvalidArgumentError):
        three_body_gamma(5.8e-30, 0.0)


def test_loss_channel_rates(rb_cold):
    alpha, beta = bogoliubov_coefficients(mode_wavenumber(1, rb_cold), rb_cold)
    ch = loss_channel_rates(1e-3, alpha, beta)
    assert ch.gamma_minus == pytest.approx(1e-3, rel=1e-8)
    assert ch.gamma_plus == pytest.approx((alpha**2 + beta**2) * 1e-3)
    assert ch.gamma_u - ch.gamma_v == pytest.approx(ch.gamma_minus)
    # шум фононной моды много больше затухания
    assert ch.gamma_plus / ch.gamma_minus > 5


def test_loss_channel_rates_normalization():
    with pytest.raises(InvalidArgumentError):
        loss_channel_rates(1e-3, 1.0, 0.5)
    with pytest.raises(InvalidArgumentError):
        loss_channel_rates(-1e-3, 1.0, 0.0)


def test_landau_low_temperature(rb_warm):
    k = mode_wavenumber(1, rb_warm)
    gamma = landau_rate_lowT(k, rb_warm)
    assert LANDAU_REFERENCE / 2.5 <= gamma <= LANDAU_REFERENCE * 2.5
    assert landau_rate_lowT(2 * k, rb_warm) == pytest.approx(2 * gamma)


def test_landau_full_integral(rb_warm):
    k = mode_wavenumber(1, rb_warm)
    gamma = landau_rate_full(k, rb_warm)
    assert LANDAU_REFERENCE / 2 <= gamma <= LANDAU_REFERENCE * 2
    # линейность по k
    assert landau_rate_full(3 * k, rb_warm) == pytest.approx(3 * gamma, rel=1e-12)


def test_landau_vanishes_at_zero_temperature(rb_cold):
    k = mode_wavenumber(1, rb_cold)
    assert landau_rate_full(k, rb_cold) == 0.0
    assert landau_rate_lowT(k, rb_cold) == 0.0
    assert landau_integral(0.0) == 0.0


def test_landau_integral_is_positive_and_grows():
    values = [landau_integral(tau) for tau in (0.01, 0.05, 0.2)]
    assert all(v > 0 for v in values)
    assert values == sorted(values)


def test_landau_low_temperature_warns_outside_regime(caplog):
    spec = species_spec("rb", 1e19, temperature=5e-9)
    with caplog.at_level(logging.WARNING, logger="rates"):
        landau_rate_lowT(mode_wavenumber(1, spec), spec)
    assert "Low-temperature Landau formula" in caplog.text


def test_beliaev_k5_scaling(rb_cold):
    k = mode_wavenumber(1, rb_cold)
    g1 = beliaev_rate(k, rb_cold)
    for n in (2, 3, 7):
        assert beliaev_rate(n * k, rb_cold) == pytest.approx(n**5 * g1, rel=1e-12)


def test_beliaev_thermal(rb_warm):
    k = mode_wavenumber(1, rb_warm)
    gamma = beliaev_rate(k, rb_warm)
    assert BELIAEV_REFERENCE / 3 <= gamma <= BELIAEV_REFERENCE * 3
    assert gamma > beliaev_zero_temperature(k, rb_warm)
    with pytest.raises(InvalidArgumentError):
        beliaev_rate(0.0, rb_warm)


def test_beliaev_thermal_factor_limits():
    assert beliaev_thermal_factor(math.inf) == 1.0
    assert beliaev_thermal_factor(200.0) == pytest.approx(1.0, abs=1e-4)
    # a → 0: 1 + 60∫x(x−1)²/a dx → 5/a
    assert beliaev_thermal_factor(1e-3) == pytest.approx(5e3, rel=1e-3)


def test_thermal_occupation(rb_warm):
    omega = dispersion(mode_wavenumber(1, rb_warm), rb_warm)
    nbar = thermal_occupation(omega, 200e-12)
    assert nbar == pytest.approx(2.35, rel=0.02)
    assert thermal_occupation(omega, 0.0) == 0.0
    with pytest.raises(InvalidArgumentError):
        thermal_occupation(0.0, 1e-9)
    with pytest.raises(InvalidArgumentError):
        thermal_occupation(omega, -1.0)


def test_combined_rates():
    alpha, beta = math.cosh(0.5), -math.sinh(0.5)
    budget = combined_rates(1e-3, alpha, beta, 2e-6, 3e-7, 2.0)
    thermal = 2e-6 + 3e-7
    ch = budget.combined
    assert ch.gamma_u == pytest.approx(alpha**2 * 1e-3 + 3 * thermal)
    assert ch.gamma_v == pytest.approx(beta**2 * 1e-3 + 2 * thermal)
    assert ch.gamma_minus == pytest.approx(1e-3 + thermal)
    assert ch.gamma_plus == pytest.approx(ch.gamma_u + ch.gamma_v)
    assert budget.thermal_occupation == 2.0
    with pytest.raises(InvalidArgumentError):
        combined_rates(1e-3, alpha, beta, -1.0, 0.0, 0.0)


def test_quadrature_failure_is_reported(monkeypatch):
    def failing_quad(*args, **kwargs):
        return 1.0, 0.5, {"neval": 21}, "roundoff error detected"

    monkeypatch.setattr(integrate, "quad", failing_quad)
    with pytest.raises(QuadratureError) as info:
        landau_integral(0.1)
    assert info.value.estimate == 1.0
    assert info.value.error == 0.5


def test_quadrature_warning_with_small_error_passes(monkeypatch):
    def noisy_quad(*args, **kwargs):
        return 2.0, 1e-14, {"neval": 21}, "minor warning"

    monkeypatch.setattr(rates.integrate, "quad", noisy_quad)
    assert beliaev_thermal_factor(1.0) == pytest.approx(121.0)
