# scenarios.py
"""
Сценарии воспроизведения оценок: таблица скоростей трёхчастичных потерь,
кривые затухания по гармоникам и пример гравиметрии.
"""

import csv
import dataclasses
import io
import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from condensate import (
    bogoliubov_coefficients,
    dispersion,
    mode_wavenumber,
    species_spec,
)
from dynamics import rwa_trajectory
from errors import InvalidArgumentError, QuadratureError
from gaussian_core import (
    eigen_spectrum,
    mean_phonon_number,
    purity,
    quadrature_variance,
    squeezed_vacuum,
)
from rates import (
    beliaev_rate,
    combined_rates,
    landau_rate_full,
    loss_channel_rates,
    thermal_occupation,
    three_body_gamma,
)
from structures import (
    ChannelRates,
    CondensateSpec,
    DampingBudget,
    DampingRecord,
    EvolutionRecord,
    GravityResult,
    RateMatrices,
    RateRecord,
    ScenarioConfig,
)

logger = logging.getLogger(__name__)

CM3_TO_M3 = 1e6

# Однородный Rb-конденсат для кривых затухания
DAMPING_PRESET = ScenarioConfig(
    species="rb", density=1e13, temperature=200e-12, length=200e-6, mode_index=1
)

# Цилиндрический Yb-конденсат, мода k = 10π/L
GRAVITY_PRESET = ScenarioConfig(
    species="yb",
    density=1e13,
    temperature=0.0,
    length=300e-6,
    mode_index=10,
    squeezing=(1.0, 2.0, 5.0),
    drive_time=10.0,
    reference_mass=0.2,
    reference_time=10.0,
)


def condensate_spec(config: ScenarioConfig) -> CondensateSpec:
    density = config.density * CM3_TO_M3
    if config.species == "custom":
        missing = [
            name
            for name in ("custom_mass", "custom_scattering_length", "custom_three_body")
            if getattr(config, name) is None
        ]
        if missing:
            raise InvalidArgumentError(
                f"для species = custom нужны параметры: {', '.join(missing)}"
            )
        return CondensateSpec(
            atom_mass=config.custom_mass,
            scattering_length=config.custom_scattering_length,
            density=density,
            three_body_constant=config.custom_three_body,
            temperature=config.temperature,
            length=config.length,
            aspect_ratio=config.aspect_ratio,
        )
    return species_spec(
        config.species,
        density,
        temperature=config.temperature,
        length=config.length,
        aspect_ratio=config.aspect_ratio,
    )


def mode_budget(config: ScenarioConfig, n: int) -> DampingBudget:
    """Полный бюджет затухания гармоники n: трёхчастичные потери, Ландау, Беляев, N̄"""
    spec = condensate_spec(config)
    k = mode_wavenumber(n, spec)
    alpha, beta = bogoliubov_coefficients(k, spec)
    gamma_3b = three_body_gamma(spec.three_body_constant, config.density)
    gamma_b = beliaev_rate(k, spec, config.quad_tol)
    if spec.temperature > 0:
        gamma_l = landau_rate_full(k, spec, config.quad_tol)
        nbar = thermal_occupation(dispersion(k, spec), spec.temperature)
    else:
        gamma_l, nbar = 0.0, 0.0
    return combined_rates(gamma_3b, alpha, beta, gamma_l, gamma_b, nbar)


def scenario_rates(
    config: ScenarioConfig, densities: Optional[Sequence[float]] = None
) -> List[RateRecord]:
    """γ = 3Dρ² для вида атомов из конфига; плотности в см⁻³"""
    spec = condensate_spec(config)
    rows = []
    for density in densities or [config.density]:
        gamma = three_body_gamma(spec.three_body_constant, density)
        rows.append(
            RateRecord(
                species=config.species,
                density=density,
                gamma=gamma,
                inverse_gamma=1.0 / gamma if gamma > 0 else math.inf,
            )
        )
    return rows


def scenario_damping_curves(config: ScenarioConfig, n_max: int) -> List[DampingRecord]:
    if int(n_max) < 1:
        raise InvalidArgumentError(f"n_max должно быть ≥ 1, получено {n_max}")
    rows = []
    for n in range(1, int(n_max) + 1):
        try:
            budget = mode_budget(config, n)
        except QuadratureError as e:
            logger.warning("Harmonic %d skipped: %s", n, e)
            nan = float("nan")
            rows.append(DampingRecord(n, nan, nan, nan, nan, nan, error=str(e)))
            continue
        rows.append(
            DampingRecord(
                n=n,
                gamma_minus=budget.combined.gamma_minus,
                gamma_plus=budget.combined.gamma_plus,
                gamma_3b=budget.gamma_3b,
                gamma_landau=budget.gamma_landau,
                gamma_beliaev=budget.gamma_beliaev,
            )
        )
    logger.info("Damping curves computed for %d harmonics", len(rows))
    return rows


def gravity_mode_rates(config: ScenarioConfig) -> tuple[float, ChannelRates]:
    """(γ_3b, скорости моды): при T = 0 только трёхчастичные потери"""
    spec = condensate_spec(config)
    gamma_3b = three_body_gamma(spec.three_body_constant, config.density)
    if spec.temperature > 0:
        return gamma_3b, mode_budget(config, config.mode_index).combined
    k = mode_wavenumber(config.mode_index, spec)
    alpha, beta = bogoliubov_coefficients(k, spec)
    return gamma_3b, loss_channel_rates(gamma_3b, alpha, beta)


def scenario_gravity(config: ScenarioConfig) -> GravityResult:
    """
    Калибровка: эталонная масса за эталонное время даёт |μ| = 1.

    Δm(r, t) = m_ref·(t_ref/t)·e^{−r}, с декогеренцией ×√(1 + e^{2r}γ⁺t).
    """
    t = config.drive_time
    if not (t > 0 and config.reference_mass > 0 and config.reference_time > 0):
        raise InvalidArgumentError("drive_time, reference_mass, reference_time должны быть > 0")
    gamma_3b, rates = gravity_mode_rates(config)
    gamma_plus = rates.gamma_plus

    ideal, decohered, enhancement = [], [], []
    for r in config.squeezing:
        mass = config.reference_mass * (config.reference_time / t) * math.exp(-r)
        factor = math.sqrt(1 + math.exp(2 * r) * gamma_plus * t)
        ideal.append(mass)
        decohered.append(mass * factor)
        enhancement.append(math.exp(r) / factor)
        if enhancement[-1] < 1:
            logger.warning("Squeezing r=%.3g gives no enhancement after decoherence", r)

    logger.info(
        "Gravity scenario: gamma_3b=%.4g gamma_plus=%.4g t=%.3g", gamma_3b, gamma_plus, t
    )
    return GravityResult(
        squeezing=tuple(config.squeezing),
        detectable_mass_ideal=tuple(ideal),
        detectable_mass_decohered=tuple(decohered),
        enhancement_factor=tuple(enhancement),
        gamma_plus_mode=gamma_plus,
        drive_time=t,
        gamma_3b=gamma_3b,
        mode_index=config.mode_index,
    )


def scenario_evolution(
    config: ScenarioConfig,
    r: float,
    times: Sequence[float],
    rates: Optional[ChannelRates] = None,
    theta: float = 0.0,
) -> List[EvolutionRecord]:
    """Сжатый вакуум под затуханием моды config.mode_index (или заданными скоростями)"""
    if rates is None:
        rates = mode_budget(config, config.mode_index).combined
    matrices = RateMatrices.from_channels([rates])
    trajectory = rwa_trajectory(squeezed_vacuum(r, theta), matrices, times)
    rows = []
    for t, state in zip(times, trajectory):
        lm, lp = eigen_spectrum(state, 0)
        rows.append(
            EvolutionRecord(
                t=t,
                lambda_minus=lm,
                lambda_plus=lp,
                purity=purity(state),
                x_variance=quadrature_variance(state, 0),
                mean_phonon_number=mean_phonon_number(state, 0),
            )
        )
    return rows


def gravity_records(result: GravityResult) -> List[dict]:
    return [
        {
            "r": r,
            "detectable_mass_ideal": ideal,
            "detectable_mass_decohered": decohered,
            "enhancement_factor": enh,
            "gamma_plus_mode": result.gamma_plus_mode,
        }
        for r, ideal, decohered, enh in zip(
            result.squeezing,
            result.detectable_mass_ideal,
            result.detectable_mass_decohered,
            result.enhancement_factor,
        )
    ]


# CSV


def format_value(value) -> str:
    """Числа с плавающей точкой: 6 значащих цифр, экспоненциальная запись"""
    if value is None:
        return ""
    if isinstance(value, bool) or isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.5e}"
    return str(value)


def _as_dict(record) -> dict:
    return dataclasses.asdict(record) if dataclasses.is_dataclass(record) else dict(record)


def records_to_csv(records: Iterable) -> str:
    rows = [_as_dict(r) for r in records]
    buffer = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(rows[0].keys())
    for row in rows:
        writer.writerow(format_value(v) for v in row.values())
    return buffer.getvalue()


def write_csv(records: Iterable, path: Path) -> int:
    text = records_to_csv(records)
    Path(path).write_text(text, encoding="utf-8")
    count = max(0, text.count("\n") - 1)
    logger.info("Wrote %d rows to %s", count, path)
    return count
