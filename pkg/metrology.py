# metrology.py
"""
Квантовая информация Фишера гауссовых состояний и схемы измерения.

F = ½Tr[(Σ⁻¹Σ')²]/(1 + P²) + 2P'²/(1 − P⁴) + 2 Re(D'† Σ⁻¹ D')
"""

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import optimize

from dynamics import evolve_rwa
from errors import (
    InvalidArgumentError,
    NoInformationError,
    NumericalConsistencyError,
    SingularPurityError,
)
from gaussian_core import (
    apply_unitary,
    displace,
    eigen_spectrum,
    hermitize,
    purity,
    rotation_matrix,
    squeeze_matrix,
    squeezed_vacuum,
)
from structures import (
    ChannelRates,
    GaussianState,
    QfiEstimate,
    QfiInput,
    RateMatrices,
    SchemeResult,
)

logger = logging.getLogger(__name__)

PURE_THRESHOLD = 1 - 1e-9
PURE_DERIVATIVE_TOL = 1e-12
FD_PURITY_NOISE = 1e-6
NEGATIVE_SLACK = 1e-12

SCHEMES = (
    "displacement-amplitude",
    "displacement-phase",
    "rotation",
    "squeezing",
    "continuous-squeezing",
)


def qfi_gaussian(inp: QfiInput) -> float:
    sigma_inv = np.linalg.inv(inp.sigma)
    prod = sigma_inv @ inp.sigma_prime
    p = inp.purity
    first = 0.5 * np.real(np.trace(prod @ prod)) / (1 + p**2)

    if p >= PURE_THRESHOLD:
        if abs(inp.purity_prime) >= PURE_DERIVATIVE_TOL:
            raise SingularPurityError(
                f"P = {p:.12f} ≈ 1 при P' = {inp.purity_prime:.3e}: средний член расходится"
            )
        second = 0.0
    else:
        second = 2 * inp.purity_prime**2 / (1 - p**4)

    third = 2 * np.real(np.conj(inp.d_prime) @ sigma_inv @ inp.d_prime)
    total = float(first + second + third)
    if total < -NEGATIVE_SLACK:
        raise NumericalConsistencyError(f"отрицательная QFI {total:.3e}")
    return max(total, 0.0)


def _derivatives(family: Callable[[float], GaussianState], theta0: float, h: float):
    plus, minus = family(theta0 + h), family(theta0 - h)
    sigma_p = (plus.covariance - minus.covariance) / (2 * h)
    d_p = (plus.displacement - minus.displacement) / (2 * h)
    p_p = (purity(plus) - purity(minus)) / (2 * h)
    return sigma_p, d_p, p_p


def qfi_finite_difference(
    family: Callable[[float], GaussianState], theta0: float, h: Optional[float] = None
) -> QfiEstimate:
    """
    Центральная разность с одним шагом Ричардсона: f' ≈ (4f'(h/2) − f'(h))/3.

    h по умолчанию 1e-5·max(1, |θ₀|).
    """
    if h is None:
        h = 1e-5 * max(1.0, abs(theta0))
    if not h > 0:
        raise InvalidArgumentError(f"h должно быть > 0, получено {h}")

    base = family(theta0)
    coarse = _derivatives(family, theta0, h)
    fine = _derivatives(family, theta0, h / 2)
    sigma_p, d_p, p_p = ((4 * f - c) / 3 for f, c in zip(fine, coarse))

    p = purity(base)
    if p >= PURE_THRESHOLD and abs(p_p) < FD_PURITY_NOISE:
        p_p = 0.0
    qfi = qfi_gaussian(
        QfiInput(
            sigma=base.covariance,
            sigma_prime=hermitize(sigma_p),
            d_prime=d_p,
            purity=min(p, 1.0),
            purity_prime=float(p_p),
        )
    )
    logger.debug("Finite-difference QFI %.10g at theta0=%g, h=%g", qfi, theta0, h)
    return QfiEstimate(qfi=qfi, step=h)


def cramer_rao(qfi: float) -> float:
    """Δθ = 1/√F"""
    if not qfi > 0:
        raise NoInformationError(f"F = {qfi} ≤ 0: граница Крамера-Рао не определена")
    return 1.0 / math.sqrt(qfi)


def _result(qfi: float, scheme: str, optimal_angle=None) -> SchemeResult:
    delta = cramer_rao(qfi) if qfi > 0 else math.inf
    return SchemeResult(
        qfi=float(qfi), delta_theta=delta, scheme=scheme, optimal_angle=optimal_angle
    )


def qfi_displacement(
    lambda_minus: float, amplitude_mu: float = 0.0, mode: str = "amplitude"
) -> SchemeResult:
    """Амплитуда: 4/λ₋ (φ_μ = 0); фаза: 4|μ|²/λ₋ (φ_μ = π/2)"""
    if not lambda_minus > 0:
        raise InvalidArgumentError(f"λ₋ = {lambda_minus} ≤ 0: некорректная ковариация")
    if mode == "amplitude":
        return _result(4.0 / lambda_minus, "displacement-amplitude", 0.0)
    if mode == "phase":
        if not amplitude_mu > 0:
            raise InvalidArgumentError("для фазовой схемы нужно |μ| > 0")
        return _result(
            4.0 * amplitude_mu**2 / lambda_minus, "displacement-phase", math.pi / 2
        )
    raise InvalidArgumentError(f"неизвестный режим {mode!r}: amplitude или phase")


def qfi_rotation(lambda_minus: float, lambda_plus: float) -> SchemeResult:
    """F = (λ₊ − λ₋)²/(λ₋λ₊ + 1)"""
    if not (lambda_minus > 0 and lambda_plus > 0):
        raise InvalidArgumentError("λ± должны быть > 0")
    if lambda_minus > lambda_plus:
        raise InvalidArgumentError("ожидается λ₋ ≤ λ₊")
    qfi = (lambda_plus - lambda_minus) ** 2 / (lambda_minus * lambda_plus + 1)
    return _result(qfi, "rotation")


def _squeezing_value(lambda_minus, lambda_plus, phi_nu) -> float:
    lm, lp = lambda_minus, lambda_plus
    numerator = lm**2 + 6 * lm * lp + lp**2 - (lm - lp) ** 2 * math.cos(4 * phi_nu)
    return numerator / (2 * (lm * lp + 1))


def qfi_squeezing(lambda_minus: float, lambda_plus: float, phi_nu: float) -> SchemeResult:
    """
    F_s = [λ₋² + 6λ₋λ₊ + λ₊² − (λ₋ − λ₊)²cos 4φ]/(2(λ₋λ₊ + 1)),
    максимум при φ = π/4 + mπ/2
    """
    if not (lambda_minus > 0 and lambda_plus > 0):
        raise InvalidArgumentError("λ± должны быть > 0")
    return _result(
        _squeezing_value(lambda_minus, lambda_plus, phi_nu), "squeezing", math.pi / 4
    )


def qfi_continuous_squeezing(
    lambda_minus: float, lambda_plus: float, phi: float, t: float
) -> SchemeResult:
    """F_Ξ = t²·F_s"""
    if t < 0:
        raise InvalidArgumentError(f"t должно быть ≥ 0, получено {t}")
    if not (lambda_minus > 0 and lambda_plus > 0):
        raise InvalidArgumentError("λ± должны быть > 0")
    qfi = t**2 * _squeezing_value(lambda_minus, lambda_plus, phi)
    return _result(qfi, "continuous-squeezing", math.pi / 4)


def sensitivity_displacement(
    r: float, gamma_plus: float, t: float, d_prime_norm: float
) -> float:
    """Δθ = e^{−r}/(√2|D'|)·√(1 + e^{2r}γ⁺t)"""
    if r < 0 or t < 0 or not d_prime_norm > 0:
        raise InvalidArgumentError("нужно r ≥ 0, t ≥ 0, |D'| > 0")
    return (
        math.exp(-r) / (math.sqrt(2) * d_prime_norm)
        * math.sqrt(1 + math.exp(2 * r) * gamma_plus * t)
    )


def sensitivity_rotation(r: float, gamma_plus: float, t: float) -> float:
    """Δθ ≈ e^{−2r}√(2 + e^{2r}γ⁺t), при e^{2r} ≫ 1"""
    if r < 0 or t < 0:
        raise InvalidArgumentError("нужно r ≥ 0, t ≥ 0")
    if r < 1:
        logger.warning("Rotation sensitivity asymptote used with r = %.3g < 1", r)
    return math.exp(-2 * r) * math.sqrt(2 + math.exp(2 * r) * gamma_plus * t)


def heisenberg_rotation_qfi(r: float) -> float:
    """8n(n + 1), n = sinh²r"""
    n = math.sinh(r) ** 2
    return 8 * n * (n + 1)


def scheme_eigenvalues(r: float, rates: ChannelRates, t: float) -> Tuple[float, float]:
    """λ± сжатого вакуума после времени t в приближении вращающейся волны"""
    state = squeezed_vacuum(r)
    if t > 0 and (rates.gamma_minus != 0 or rates.gamma_plus != 0):
        state = evolve_rwa(state, RateMatrices.from_channels([rates]), t)
    return eigen_spectrum(state, 0)


def evaluate_scheme(
    scheme: str,
    r: float,
    rates: ChannelRates,
    t: float,
    mu: float = 1.0,
    phi: float = math.pi / 4,
) -> SchemeResult:
    lm, lp = scheme_eigenvalues(r, rates, t)
    if scheme == "displacement-amplitude":
        return qfi_displacement(lm, mode="amplitude")
    if scheme == "displacement-phase":
        return qfi_displacement(lm, mu, mode="phase")
    if scheme == "rotation":
        return qfi_rotation(lm, lp)
    if scheme == "squeezing":
        return qfi_squeezing(lm, lp, phi)
    if scheme == "continuous-squeezing":
        return qfi_continuous_squeezing(lm, lp, phi, t)
    raise InvalidArgumentError(
        f"неизвестная схема {scheme!r}, доступны: {', '.join(SCHEMES)}"
    )


def optimal_duration(
    r: float, rates: ChannelRates, phi: float = math.pi / 4, t_max: float = 100.0
) -> Tuple[float, float]:
    """
    Минимум Δ(t) = 1/√(t²F_s(λ±(t))) по t ∈ (0, t_max] при оценке скорости Ξ.
    Возвращает (t_opt, Δ_min).
    """
    if not t_max > 0:
        raise InvalidArgumentError(f"t_max должно быть > 0, получено {t_max}")

    def delta(t):
        lm, lp = scheme_eigenvalues(r, rates, t)
        return 1.0 / (t * math.sqrt(_squeezing_value(lm, lp, phi)))

    res = optimize.minimize_scalar(
        delta, bounds=(t_max * 1e-9, t_max), method="bounded", options={"xatol": 1e-10 * t_max}
    )
    logger.debug("Optimal duration search: t=%.6g delta=%.6g", res.x, res.fun)
    return float(res.x), float(res.fun)


# Семейства состояний для конечных разностей


def displacement_family(state: GaussianState, phi_mu: float = 0.0, mode=0):
    """θ ↦ D(θe^{iφ})·state"""
    return lambda theta: displace(state, mode, theta * np.exp(1j * phi_mu))


def rotation_family(state: GaussianState, mode=0):
    return lambda theta: apply_unitary(state, rotation_matrix(theta), mode=mode)


def squeezing_family(state: GaussianState, phi_nu: float, mode=0):
    return lambda s: apply_unitary(state, squeeze_matrix(s, phi_nu), mode=mode)


def phase_family(state: GaussianState, mu: float, mode=0):
    """θ ↦ D(μe^{iθ})·state"""
    return lambda theta: displace(state, mode, mu * np.exp(1j * theta))
