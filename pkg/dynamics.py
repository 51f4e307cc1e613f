# dynamics.py
"""
Эволюция гауссовых состояний под линдбладовской динамикой.

Замкнутые формулы в приближении вращающейся волны, RK4 для общего
билинейного гамильтониана, система 3x3 в сжатой системе отсчёта и
непрерывное сжатие.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from errors import InstabilityError, InvalidArgumentError, UnsupportedRegimeError
from gaussian_core import hermitize, squeeze_matrix
from structures import (
    BilinearHamiltonian,
    ChannelRates,
    GaussianState,
    RateMatrices,
    SqueezedFrameSpectrum,
    SqueezedFrameState,
)

logger = logging.getLogger(__name__)

RICHARDSON_RTOL = 1e-8
MAX_HALVINGS = 4
EXPM_COND_LIMIT = 1e8
SINGULAR_COND_LIMIT = 1e12
RESONANCE_RTOL = 1e-12


def _check_time(t: float):
    if not (np.isfinite(t) and t >= 0):
        raise InvalidArgumentError(f"t должно быть ≥ 0, получено {t}")


def _check_modes(state: GaussianState, count: int, what: str):
    if count != state.mode_count:
        raise InvalidArgumentError(
            f"{what}: {count} мод, а в состоянии {state.mode_count}"
        )


def evolve_rwa(state: GaussianState, rates: RateMatrices, t: float) -> GaussianState:
    """
    D(t) = e^{−Γ₋t/2} D(0)
    Σ(t) = e^{−Γ₋t/2}(Σ₀ − Σ∞)e^{−Γ₋t/2} + Σ∞, Σ∞ = Γ₊Γ₋⁻¹
    """
    _check_time(t)
    _check_modes(state, rates.mode_count, "скорости")
    if np.any(rates.gamma_minus_diag <= 0):
        raise UnsupportedRegimeError(
            "γ⁻ ≤ 0: Σ∞ не определена, используйте evolve_general"
        )
    gm, gp = rates.expanded()
    decay = np.exp(-gm * t / 2)
    sigma_inf = np.diag(gp / gm).astype(complex)
    covariance = decay[:, None] * (state.covariance - sigma_inf) * decay[None, :]
    covariance = hermitize(covariance + sigma_inf)
    return GaussianState(
        modes=state.modes,
        displacement=decay * state.displacement,
        covariance=covariance,
    )


def rwa_trajectory(
    state: GaussianState, rates: RateMatrices, times: Sequence[float]
) -> List[GaussianState]:
    return [evolve_rwa(state, rates, t) for t in times]


def to_lab_frame(state: GaussianState, omegas, t: float) -> GaussianState:
    """Применить R(ω_I t) к каждой моде сорасположенного состояния"""
    omegas = np.broadcast_to(np.asarray(omegas, dtype=float), (state.mode_count,))
    phases = np.repeat(omegas * t, 2) * np.tile([-1.0, 1.0], state.mode_count)
    rot = np.exp(1j * phases)
    return GaussianState(
        modes=state.modes,
        displacement=rot * state.displacement,
        covariance=hermitize(rot[:, None] * state.covariance * rot.conj()[None, :]),
    )


def drift_matrix(h: BilinearHamiltonian) -> Tuple[np.ndarray, np.ndarray]:
    """
    Генератор линейных уравнений Гейзенберга dζ/dt = Aζ + d для H.

    db_I/dt = −iω_I b_I − Ξ_I b_I† − iΣ_J G_IJ b_J + δ_I
    """
    count = h.mode_count
    size = 2 * count
    a = np.zeros((size, size), dtype=complex)
    d = np.zeros(size, dtype=complex)
    for i in range(count):
        b, bd = 2 * i, 2 * i + 1
        a[b, b] = -1j * h.omegas[i]
        a[bd, bd] = 1j * h.omegas[i]
        a[b, bd] = -h.squeezings[i]
        a[bd, b] = -np.conj(h.squeezings[i])
        d[b] = h.drives[i]
        d[bd] = np.conj(h.drives[i])
        for j in range(count):
            if i != j:
                a[b, 2 * j] = -1j * h.couplings[i, j]
                a[bd, 2 * j + 1] = 1j * np.conj(h.couplings[i, j])
    return a, d


def _default_step(h: BilinearHamiltonian, rates: RateMatrices, t: float) -> float:
    candidates = [t / 100]
    gamma_max = float(np.max(np.abs(rates.gamma_plus_diag), initial=0.0))
    gamma_max = max(gamma_max, float(np.max(np.abs(rates.gamma_minus_diag), initial=0.0)))
    if gamma_max > 0:
        candidates.append(0.01 / gamma_max)
    omega_max = max(
        float(np.max(np.abs(h.omegas), initial=0.0)),
        float(np.max(np.abs(h.squeezings), initial=0.0)),
        float(np.max(np.abs(h.couplings), initial=0.0)),
    )
    if omega_max > 0:
        candidates.append(0.01 / omega_max)
    return min(candidates)


def _rk4_moments(a, d, gm, noise, sigma, disp, t: float, steps: int):
    """Фиксированный шаг RK4 для Σ и D"""
    dt = t / steps
    half = gm / 2
    a_h = a.conj().T

    def rhs(s, v):
        ds = a @ s + s @ a_h - half[:, None] * s - s * half[None, :] + noise
        dv = a @ v + d - half * v
        return ds, dv

    for _ in range(steps):
        k1s, k1v = rhs(sigma, disp)
        k2s, k2v = rhs(sigma + dt / 2 * k1s, disp + dt / 2 * k1v)
        k3s, k3v = rhs(sigma + dt / 2 * k2s, disp + dt / 2 * k2v)
        k4s, k4v = rhs(sigma + dt * k3s, disp + dt * k3v)
        sigma = hermitize(sigma + dt / 6 * (k1s + 2 * k2s + 2 * k3s + k4s))
        disp = disp + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not (np.all(np.isfinite(sigma)) and np.all(np.isfinite(disp))):
            return None, None
    return sigma, disp


def _leading_eigenvalue(a: np.ndarray, gm: np.ndarray) -> complex:
    eig = np.linalg.eigvals(a - np.diag(gm / 2))
    return complex(eig[np.argmax(eig.real)])


def evolve_general(
    state: GaussianState,
    h: BilinearHamiltonian,
    rates: RateMatrices,
    t: float,
    dt: Optional[float] = None,
) -> GaussianState:
    """
    dΣ/dt = AΣ + ΣA† − ½(Γ₋Σ + ΣΓ₋) + N, N = rates.noise_matrix()
    dD/dt = AD + d − ½Γ₋D

    RK4 с проверкой Ричардсона: шаг делится пополам, пока относительное
    изменение результата не станет < 1e-8.
    """
    _check_time(t)
    _check_modes(state, h.mode_count, "гамильтониан")
    _check_modes(state, rates.mode_count, "скорости")
    if dt is not None and not dt > 0:
        raise InvalidArgumentError(f"dt должно быть > 0, получено {dt}")
    if t == 0:
        return state

    a, d = drift_matrix(h)
    gm, _ = rates.expanded()
    noise = rates.noise_matrix()
    leading = _leading_eigenvalue(a, gm)
    if leading.real > 0:
        logger.warning(
            "Drift has growing eigenvalue %.4g%+.4gj, squeezing overwhelms decay",
            leading.real,
            leading.imag,
        )

    step = min(dt if dt is not None else _default_step(h, rates, t), t)
    steps = max(1, math.ceil(t / step - 1e-9))
    sigma0 = np.array(state.covariance)
    disp0 = np.array(state.displacement)

    coarse = _rk4_moments(a, d, gm, noise, sigma0, disp0, t, steps)
    change = float("inf")
    for _ in range(MAX_HALVINGS):
        if coarse[0] is None:
            break
        steps *= 2
        fine = _rk4_moments(a, d, gm, noise, sigma0, disp0, t, steps)
        if fine[0] is None:
            coarse = fine
            break
        scale = max(
            1.0,
            float(np.max(np.abs(fine[0]))),
            float(np.max(np.abs(fine[1]), initial=0.0)),
        )
        change = max(
            float(np.max(np.abs(fine[0] - coarse[0]))),
            float(np.max(np.abs(fine[1] - coarse[1]), initial=0.0)),
        ) / scale
        logger.debug("RK4 steps=%d relative change=%.3e", steps, change)
        coarse = fine
        if change < RICHARDSON_RTOL:
            break
    else:
        logger.warning(
            "Richardson check not met after %d halvings (change %.3e)",
            MAX_HALVINGS,
            change,
        )

    sigma, disp = coarse
    if sigma is None:
        raise InstabilityError(
            f"численное переполнение при t = {t}: ведущее собственное "
            f"значение {leading:.4g}",
            eigenvalue=leading,
        )
    return GaussianState(modes=state.modes, displacement=disp, covariance=sigma)


def variance_pure_decay(x0: float, gamma: float, t: float) -> float:
    """<X²>(t) = 1 + (x₀ − 1)e^{−γt}"""
    if x0 <= 0 or gamma < 0 or t < 0:
        raise InvalidArgumentError("нужно x₀ > 0, γ ≥ 0, t ≥ 0")
    return 1 + (x0 - 1) * np.exp(-gamma * t)


def variance_squeeze_decay(x0: float, xi: float, gamma: float, t: float) -> float:
    """<X²>(t) = x∞ + (x₀ − x∞)e^{−(2Ξ+γ)t}, x∞ = γ/(2Ξ + γ)"""
    if x0 <= 0 or xi < 0 or gamma < 0 or t < 0:
        raise InvalidArgumentError("нужно x₀ > 0, Ξ ≥ 0, γ ≥ 0, t ≥ 0")
    rate = 2 * xi + gamma
    if rate == 0:
        return x0
    x_inf = gamma / rate
    return x_inf + (x0 - x_inf) * np.exp(-rate * t)


def squeezed_frame_matrix(
    omega_tilde: float, xi_tilde: complex, gamma: float
) -> SqueezedFrameSpectrum:
    """
    M = [[γ + 2iω̃, 2Ξ̃, 0], [Ξ̃*, γ, Ξ̃], [0, 2Ξ̃*, γ − 2iω̃]],
    собственные значения γ и γ ± 2√(|Ξ̃|² − ω̃²)
    """
    if not all(np.isfinite(v) for v in (omega_tilde, xi_tilde, gamma)):
        raise InvalidArgumentError("параметры M должны быть конечными")
    xi_c = np.conj(xi_tilde)
    matrix = np.array(
        [
            [gamma + 2j * omega_tilde, 2 * xi_tilde, 0],
            [xi_c, gamma, xi_tilde],
            [0, 2 * xi_c, gamma - 2j * omega_tilde],
        ],
        dtype=complex,
    )
    root = 2 * np.sqrt(complex(abs(xi_tilde) ** 2 - omega_tilde**2))
    eigenvalues = np.array([gamma, gamma + root, gamma - root], dtype=complex)
    unstable = bool(np.any(eigenvalues.real < 0))
    return SqueezedFrameSpectrum(matrix=matrix, eigenvalues=eigenvalues, unstable=unstable)


def squeezed_frame_source(xi_tilde: complex) -> np.ndarray:
    """s = −(Ξ̃, 0, Ξ̃*)"""
    return -np.array([xi_tilde, 0, np.conj(xi_tilde)], dtype=complex)


def squeezed_frame_state(
    state: GaussianState, omega_tilde: float, xi_tilde: complex, gamma: float, mode=0
) -> SqueezedFrameState:
    """w из блока Σ моды: <a²> = Σ₁₂/2, <a†a> = (Σ₁₁ − 1)/2 (центрированные)"""
    block = state.block(mode)
    w1 = block[0, 1] / 2
    w2 = (np.real(block[0, 0]) - 1) / 2
    return SqueezedFrameState(
        w=np.array([w1, w2, np.conj(w1)]),
        omega_tilde=omega_tilde,
        xi_tilde=xi_tilde,
        gamma=gamma,
    )


def _expm_neg(matrix: np.ndarray, t: float) -> np.ndarray:
    """expm(−Mt) через собственное разложение, иначе scaling-and-squaring"""
    lam, vecs = np.linalg.eig(matrix)
    cond = np.linalg.cond(vecs)
    if not np.isfinite(cond) or cond > EXPM_COND_LIMIT:
        logger.debug("Eigenvector condition %.2e, falling back to scipy expm", cond)
        return linalg.expm(-matrix * t)
    return vecs @ np.diag(np.exp(-lam * t)) @ np.linalg.inv(vecs)


def _step_linear(matrix: np.ndarray, source: np.ndarray, w0: np.ndarray, t: float):
    """RK4 для ẇ = s − Mw"""
    norm = max(float(np.max(np.abs(matrix))), 1e-12)
    steps = max(100, math.ceil(t * norm / 0.01))
    dt = t / steps
    w = np.array(w0, dtype=complex)

    def rhs(v):
        return source - matrix @ v

    for _ in range(steps):
        k1 = rhs(w)
        k2 = rhs(w + dt / 2 * k1)
        k3 = rhs(w + dt / 2 * k2)
        k4 = rhs(w + dt * k3)
        w = w + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return w


def evolve_squeezed_frame(sf: SqueezedFrameState, t: float) -> SqueezedFrameState:
    """w(t) = w_ss + expm(−Mt)(w₀ − w_ss), M·w_ss = s"""
    _check_time(t)
    spectrum = squeezed_frame_matrix(sf.omega_tilde, sf.xi_tilde, sf.gamma)
    matrix = spectrum.matrix
    source = squeezed_frame_source(sf.xi_tilde)
    if spectrum.unstable:
        logger.warning("Squeezed-frame system is unstable: %s", spectrum.eigenvalues)

    if np.linalg.cond(matrix) > SINGULAR_COND_LIMIT:
        logger.debug("M is singular, stepping the squeezed-frame system")
        w = _step_linear(matrix, source, sf.w, t)
    else:
        w_ss = np.linalg.solve(matrix, source)
        w = w_ss + _expm_neg(matrix, t) @ (sf.w - w_ss)

    if not np.all(np.isfinite(w)):
        leading = spectrum.eigenvalues[np.argmin(spectrum.eigenvalues.real)]
        raise InstabilityError(
            f"неограниченный рост w при t = {t}: собственное значение {leading:.4g}",
            eigenvalue=complex(leading),
        )
    # w[2] = w[0]* точно
    w[2] = np.conj(w[0])
    return SqueezedFrameState(
        w=w, omega_tilde=sf.omega_tilde, xi_tilde=sf.xi_tilde, gamma=sf.gamma
    )


def evolve_squeezed_frame_mean(
    mean_a: complex, omega_tilde: float, xi_tilde: complex, gamma: float, t: float
) -> complex:
    """d<a>/dt = −(iω̃ + γ/2)<a> − Ξ̃<a†>"""
    _check_time(t)
    gen = np.array(
        [
            [-1j * omega_tilde - gamma / 2, -xi_tilde],
            [-np.conj(xi_tilde), 1j * omega_tilde - gamma / 2],
        ],
        dtype=complex,
    )
    vec = linalg.expm(gen * t) @ np.array([mean_a, np.conj(mean_a)], dtype=complex)
    return complex(vec[0])


def continuous_squeezing_steady(
    xi: float, phi_xi: float, rates: ChannelRates
) -> np.ndarray:
    """Σ_Ξ = −γ⁺/((2Ξ)² − γ⁻²)·(γ⁻I + 2ΞY), Y = [[0, −e^{2iφ}], [−e^{−2iφ}, 0]]"""
    gm, gp = rates.gamma_minus, rates.gamma_plus
    y = np.array(
        [[0, -np.exp(2j * phi_xi)], [-np.exp(-2j * phi_xi), 0]], dtype=complex
    )
    if gp == 0:
        return np.zeros((2, 2), dtype=complex)
    denom = (2 * xi) ** 2 - gm**2
    if abs(denom) <= RESONANCE_RTOL * max((2 * xi) ** 2, gm**2, 1e-300):
        raise UnsupportedRegimeError(
            f"резонанс 2Ξ = γ⁻ ({2 * xi:.6g}): используйте evolve_general"
        )
    return -gp / denom * (gm * np.eye(2) + 2 * xi * y)


def continuous_squeezing_sigma(
    r: float,
    xi: float,
    phi_xi: float,
    rates: ChannelRates,
    t: float,
    theta: Optional[float] = None,
) -> np.ndarray:
    """
    Σ(t) = e^{−γ⁻t} S_Ξ(t)Σ(0)S_Ξ(t) + γ⁺∫₀ᵗ e^{−γ⁻s} S_Ξ(s)² ds, S_Ξ(t) = S(Ξt, φ).

    Вне резонанса 2Ξ = γ⁻ совпадает с Σ_Ξ + e^{−γ⁻t} S_Ξ(Σ(0) − Σ_Ξ) S_Ξ.
    Начальное состояние S(r, θ)|0>, по умолчанию θ = φ.
    """
    _check_time(t)
    if xi < 0:
        raise InvalidArgumentError(f"Ξ должно быть ≥ 0, получено {xi}")
    theta = phi_xi if theta is None else theta
    s0 = squeeze_matrix(r, theta).matrix
    sigma0 = s0 @ s0
    gm, gp = rates.gamma_minus, rates.gamma_plus
    if 2 * xi > gm:
        logger.warning(
            "Continuous squeezing 2*Xi = %.4g exceeds gamma_minus = %.4g, covariance grows",
            2 * xi,
            gm,
        )
    s_t = squeeze_matrix(xi * t, phi_xi).matrix
    y = np.array(
        [[0, -np.exp(2j * phi_xi)], [-np.exp(-2j * phi_xi), 0]], dtype=complex
    )
    # ∫₀ᵗ e^{−γ⁻s}(cosh 2Ξs·I + sinh 2Ξs·Y) ds
    slow = _decay_integral(gm - 2 * xi, t)
    fast = _decay_integral(gm + 2 * xi, t)
    source = gp * ((slow + fast) / 2 * np.eye(2) + (slow - fast) / 2 * y)
    sigma = math.exp(-gm * t) * (s_t @ sigma0 @ s_t) + source
    return hermitize(sigma)


def _decay_integral(rate: float, t: float) -> float:
    """∫₀ᵗ e^{−λs} ds"""
    if rate == 0:
        return t
    return -math.expm1(-rate * t) / rate


def continuous_squeezing_state(
    r: float,
    xi: float,
    phi_xi: float,
    rates: ChannelRates,
    t: float,
    theta: Optional[float] = None,
) -> GaussianState:
    return GaussianState(
        modes=("mode0",),
        displacement=np.zeros(2, dtype=complex),
        covariance=continuous_squeezing_sigma(r, xi, phi_xi, rates, t, theta),
    )
