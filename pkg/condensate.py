# condensate.py
"""Величины однородного конденсата: ξ, c_s, дисперсия Боголюбова, распад плотности"""

import logging
from typing import Optional, Tuple

import numpy as np

from errors import InvalidArgumentError
from structures import CondensateSpec, ModeSpec

logger = logging.getLogger(__name__)

HBAR = 1.054571817e-34  # Дж·с
K_B = 1.380649e-23  # Дж/К
BOHR_RADIUS = 5.29177e-11  # м

# масса (кг), длина рассеяния (м), константа трёхчастичных потерь D (см⁶/с)
SPECIES = {
    "rb": {
        "name": "Rb-87",
        "atom_mass": 1.44316e-25,
        "scattering_length": 98 * BOHR_RADIUS,
        "three_body_constant": 5.8e-30,
    },
    "yb": {
        "name": "Yb-168",
        "atom_mass": 2.78839e-25,
        "scattering_length": 250 * BOHR_RADIUS,
        "three_body_constant": 4e-30,
    },
}


def species_spec(
    species: str,
    density: float,
    temperature: float = 0.0,
    length: float = 200e-6,
    aspect_ratio: float = 1.0,
) -> CondensateSpec:
    """CondensateSpec для встроенного вида атомов; density в м⁻³"""
    try:
        params = SPECIES[species.lower()]
    except KeyError:
        raise InvalidArgumentError(
            f"неизвестный вид атомов {species!r}, доступны: {', '.join(SPECIES)}"
        ) from None
    return CondensateSpec(
        atom_mass=params["atom_mass"],
        scattering_length=params["scattering_length"],
        density=density,
        three_body_constant=params["three_body_constant"],
        temperature=temperature,
        length=length,
        aspect_ratio=aspect_ratio,
    )


def healing_length(spec: CondensateSpec) -> float:
    """ξ = 1/√(8π a_s ρ)"""
    return 1.0 / np.sqrt(8 * np.pi * spec.scattering_length * spec.density)


def sound_speed(spec: CondensateSpec) -> float:
    """c_s = ħ/(√2 m ξ)"""
    return HBAR / (np.sqrt(2) * spec.atom_mass * healing_length(spec))


def chemical_potential(spec: CondensateSpec) -> float:
    """μ = m c_s²"""
    return spec.atom_mass * sound_speed(spec) ** 2


def mode_wavenumber(n: int, spec: CondensateSpec) -> float:
    """Стоячая волна: k = nπ/L"""
    if int(n) < 1:
        raise InvalidArgumentError(f"номер гармоники должен быть ≥ 1, получено {n}")
    return int(n) * np.pi / spec.length


def dispersion(k: float, spec: CondensateSpec) -> float:
    """ω_k = c_s k √(1 + ξ²k²/2)"""
    if k < 0:
        raise InvalidArgumentError(f"k должно быть ≥ 0, получено {k}")
    xi = healing_length(spec)
    return sound_speed(spec) * k * np.sqrt(1 + 0.5 * (xi * k) ** 2)


def bogoliubov_coefficients(k: float, spec: CondensateSpec) -> Tuple[float, float]:
    """
    α = (σ⁻¹ + σ)/2, β = (σ⁻¹ − σ)/2, σ = (1 + 2/(ξk)²)^{1/4}.

    Через ln σ: α = cosh(ln σ), β = −sinh(ln σ).
    """
    if not k > 0:
        raise InvalidArgumentError(f"k должно быть > 0, получено {k}")
    xk = healing_length(spec) * k
    log_sigma = 0.25 * np.log1p(2.0 / xk**2)
    alpha = np.cosh(log_sigma)
    beta = -np.sinh(log_sigma)
    return float(alpha), float(beta)


def mode_spec(k: float, spec: CondensateSpec, n: Optional[int] = None) -> ModeSpec:
    alpha, beta = bogoliubov_coefficients(k, spec)
    return ModeSpec(k=k, omega=dispersion(k, spec), alpha=alpha, beta=beta, n=n)


def condensate_density_decay(rho0: float, D: float, t: float) -> float:
    """ρ(t) = ρ₀/√(1 + 2Dρ₀²t), решение dρ/dt = −Dρ³"""
    if rho0 <= 0 or D < 0 or t < 0:
        raise InvalidArgumentError(
            f"нужно ρ₀ > 0, D ≥ 0, t ≥ 0; получено {rho0}, {D}, {t}"
        )
    return rho0 / np.sqrt(1 + 2 * D * rho0**2 * t)


def half_density_time(rho0: float, D: float) -> float:
    """Время, за которое плотность падает вдвое: 3/(2Dρ₀²)"""
    if rho0 <= 0 or D <= 0:
        raise InvalidArgumentError("нужно ρ₀ > 0 и D > 0")
    return 3.0 / (2 * D * rho0**2)
