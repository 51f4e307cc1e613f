# rates.py
"""
Скорости каналов декогеренции фононной моды.

Трёхчастичные потери (γ, γ^u, γ^v, γ±), затухание Ландау (полный интеграл
и низкотемпературная асимптотика), затухание Беляева и их тепловая сумма.
"""

import logging

import numpy as np
from scipy import integrate

from condensate import HBAR, K_B, chemical_potential, dispersion, sound_speed
from errors import InvalidArgumentError, QuadratureError
from structures import ChannelRates, CondensateSpec, DampingBudget

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-8
LOW_T_RATIO_LIMIT = 0.1
BELIAEV_SERIES_CUTOFF = 1e-6
QUAD_LIMIT = 200


def three_body_gamma(D: float, rho: float) -> float:
    """γ = 3Dρ², D в см⁶/с, ρ в см⁻³"""
    if D < 0 or rho <= 0:
        raise InvalidArgumentError(f"нужно D ≥ 0 и ρ > 0; получено D={D}, ρ={rho}")
    return 3.0 * D * rho**2


def _check_normalization(alpha: float, beta: float):
    norm = alpha**2 - beta**2
    if abs(norm - 1.0) > NORMALIZATION_TOL * max(1.0, alpha**2):
        raise InvalidArgumentError(f"α² − β² = {norm!r}, ожидалось 1")


def loss_channel_rates(gamma: float, alpha: float, beta: float) -> ChannelRates:
    """γ^u = α²γ, γ^v = β²γ"""
    _check_normalization(alpha, beta)
    if gamma < 0:
        raise InvalidArgumentError(f"γ должно быть ≥ 0, получено {gamma}")
    return ChannelRates(
        gamma_u=alpha**2 * gamma,
        gamma_v=beta**2 * gamma,
        gamma_minus=gamma,
        gamma_plus=(alpha**2 + beta**2) * gamma,
    )


def _quad(func, a, b, quad_tol: float, what: str):
    value, error, info, *rest = integrate.quad(
        func, a, b, epsabs=0.0, epsrel=quad_tol, limit=QUAD_LIMIT, full_output=1
    )
    logger.debug(
        "%s quadrature: value=%.6e error=%.2e evaluations=%d",
        what,
        value,
        error,
        info["neval"],
    )
    if rest and error > 100 * quad_tol * abs(value):
        raise QuadratureError(
            f"квадратура {what} не сошлась: оценка {value:.6e} ± {error:.2e}",
            estimate=value,
            error=error,
        )
    return value, error


def landau_rate_lowT(k: float, spec: CondensateSpec) -> float:
    """γ_L ≈ (3π³/40)·k (k_B T)⁴ / (ρ ħ³ m c⁴), при k_B T ≪ μ"""
    if spec.temperature == 0:
        return 0.0
    c = sound_speed(spec)
    kt = K_B * spec.temperature
    ratio = kt / chemical_potential(spec)
    if ratio > LOW_T_RATIO_LIMIT:
        logger.warning(
            "Low-temperature Landau formula used at k_B T/mu = %.3f (> %.2f)",
            ratio,
            LOW_T_RATIO_LIMIT,
        )
    return (
        (3 * np.pi**3 / 40)
        * k
        * kt**4
        / (spec.density * HBAR**3 * spec.atom_mass * c**4)
    )


def landau_integral(tau: float, quad_tol: float = 1e-8) -> float:
    """
    F_La = 8√π ∫₀^∞ dx (eˣ − e⁻ˣ)⁻² (1 − 1/(2u) − 1/(2u²))²,
    u = √(1 + 4τ²x²), τ = k_B T/μ
    """
    if tau == 0:
        return 0.0

    def integrand(x):
        if x <= 0:
            return 0.0
        u = np.sqrt(1 + 4 * tau**2 * x**2)
        # 1 − 1/(2u) − 1/(2u²) = (2u + 1)(u − 1)/(2u²)
        bracket = (2 * u + 1) * (4 * tau**2 * x**2 / (u + 1)) / (2 * u**2)
        return np.exp(-2 * x) / np.expm1(-2 * x) ** 2 * bracket**2

    value, _ = _quad(integrand, 0.0, np.inf, quad_tol, "Landau")
    return 8 * np.sqrt(np.pi) * value


def landau_rate_full(k: float, spec: CondensateSpec, quad_tol: float = 1e-8) -> float:
    """γ_L = (2√π ħ k a_s² ρ/m)·F_La"""
    if spec.temperature == 0:
        return 0.0
    tau = K_B * spec.temperature / chemical_potential(spec)
    prefactor = (
        2 * np.sqrt(np.pi) * HBAR * k * spec.scattering_length**2 * spec.density
        / spec.atom_mass
    )
    return prefactor * landau_integral(tau, quad_tol)


def beliaev_zero_temperature(k: float, spec: CondensateSpec) -> float:
    """γ⁰ = 3ħk⁵/(640π m ρ)"""
    return 3 * HBAR * k**5 / (640 * np.pi * spec.atom_mass * spec.density)


def beliaev_thermal_factor(a: float, quad_tol: float = 1e-8) -> float:
    """1 + 60∫₀¹ x²(x−1)²/(e^{ax} − 1) dx, a = ħω/k_B T"""
    if np.isinf(a):
        return 1.0

    def integrand(x):
        if x < BELIAEV_SERIES_CUTOFF:
            return x * (x - 1) ** 2 / a * (1 - a * x / 2)
        with np.errstate(over="ignore"):
            return x**2 * (x - 1) ** 2 / np.expm1(a * x)

    value, _ = _quad(integrand, 0.0, 1.0, quad_tol, "Beliaev")
    return 1 + 60 * value


def beliaev_rate(k: float, spec: CondensateSpec, quad_tol: float = 1e-8) -> float:
    if not k > 0:
        raise InvalidArgumentError(f"k должно быть > 0, получено {k}")
    gamma0 = beliaev_zero_temperature(k, spec)
    if spec.temperature == 0:
        return gamma0
    a = HBAR * dispersion(k, spec) / (K_B * spec.temperature)
    return gamma0 * beliaev_thermal_factor(a, quad_tol)


def thermal_occupation(omega: float, T: float) -> float:
    """N̄ = 1/(e^{ħω/k_B T} − 1)"""
    if not omega > 0:
        raise InvalidArgumentError(f"ω должна быть > 0, получено {omega}")
    if T < 0:
        raise InvalidArgumentError(f"T должна быть ≥ 0, получено {T}")
    if T == 0:
        return 0.0
    with np.errstate(over="ignore"):
        return float(1.0 / np.expm1(HBAR * omega / (K_B * T)))


def combined_rates(
    gamma_3b: float,
    alpha: float,
    beta: float,
    gamma_L: float,
    gamma_B: float,
    nbar: float,
) -> DampingBudget:
    """
    γ^u = α²γ_3b + (N̄ + 1)(γ_L + γ_B)
    γ^v = β²γ_3b + N̄(γ_L + γ_B)
    """
    _check_normalization(alpha, beta)
    if min(gamma_3b, gamma_L, gamma_B, nbar) < 0:
        raise InvalidArgumentError("скорости и N̄ должны быть ≥ 0")
    thermal = gamma_L + gamma_B
    combined = ChannelRates(
        gamma_u=alpha**2 * gamma_3b + (nbar + 1) * thermal,
        gamma_v=beta**2 * gamma_3b + nbar * thermal,
        gamma_minus=gamma_3b + thermal,
        gamma_plus=(2 * alpha**2 - 1) * gamma_3b + (2 * nbar + 1) * thermal,
    )
    return DampingBudget(
        gamma_3b=gamma_3b,
        gamma_landau=gamma_L,
        gamma_beliaev=gamma_B,
        thermal_occupation=nbar,
        combined=combined,
    )
