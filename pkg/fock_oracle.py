# fock_oracle.py
"""
Одномодовое уравнение Линдблада в усечённом фоковском базисе.

Независимая проверка гауссовых формул: плотная матрица ρ, RK4 с
фиксированным шагом.

    dρ/dt = −i[H, ρ] + γ^u(bρb† − ½{b†b, ρ}) + γ^v(b†ρb − ½{bb†, ρ})
    H = ωb†b − (i/2)(Ξb†² − Ξ*b²) + (iδb† − iδ*b)
"""

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import linalg

from errors import InvalidArgumentError, StepSizeError, TruncationError
from gaussian_core import hermitize
from structures import (
    FOCK_TAIL_LIMIT,
    FOCK_TAIL_WIDTH,
    FockDensityMatrix,
    FockMoments,
    GaussianState,
    LindbladGenerator,
)

logger = logging.getLogger(__name__)

MIN_DIM = 8
DEFAULT_DIMS = (61, 121, 241)
TRACE_DRIFT_LIMIT = 1e-9
STEP_RATE_FACTOR = 0.05
STEP_SPECTRAL_FACTOR = 0.25
TAIL_CHECK_EVERY = 10


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def build_generator(
    omega: float = 0.0,
    xi: complex = 0.0,
    delta: complex = 0.0,
    gamma_u: float = 0.0,
    gamma_v: float = 0.0,
    dim: int = 61,
) -> LindbladGenerator:
    if dim < MIN_DIM:
        raise InvalidArgumentError(f"dim должно быть ≥ {MIN_DIM}, получено {dim}")
    if gamma_u < 0 or gamma_v < 0:
        raise InvalidArgumentError("скорости γ^u, γ^v должны быть ≥ 0")
    b = annihilation(dim)
    bd = b.conj().T
    hamiltonian = (
        omega * bd @ b
        - 0.5j * (xi * bd @ bd - np.conj(xi) * b @ b)
        + (1j * delta * bd - 1j * np.conj(delta) * b)
    )
    return LindbladGenerator(
        omega=omega,
        xi=xi,
        delta=delta,
        gamma_u=gamma_u,
        gamma_v=gamma_v,
        dim=dim,
        b=b,
        hamiltonian=hermitize(hamiltonian),
    )


def lindblad_rhs(gen: LindbladGenerator) -> Callable[[np.ndarray], np.ndarray]:
    b = gen.b
    bd = b.conj().T
    h_eff = gen.hamiltonian - 0.5j * (gen.gamma_u * bd @ b + gen.gamma_v * b @ bd)
    h_eff_dag = h_eff.conj().T

    def rhs(rho):
        out = -1j * (h_eff @ rho - rho @ h_eff_dag)
        if gen.gamma_u:
            out += gen.gamma_u * (b @ rho @ bd)
        if gen.gamma_v:
            out += gen.gamma_v * (bd @ rho @ b)
        return out

    return rhs


def _max_step(gen: LindbladGenerator) -> float:
    rate = gen.max_rate
    if rate == 0:
        return math.inf
    return min(STEP_RATE_FACTOR / rate, STEP_SPECTRAL_FACTOR / (gen.dim * rate))


def evolve_rho(
    rho: FockDensityMatrix, gen: LindbladGenerator, t: float, dt: Optional[float] = None
) -> FockDensityMatrix:
    if rho.dim != gen.dim:
        raise InvalidArgumentError(
            f"размерность ρ ({rho.dim}) не совпадает с генератором ({gen.dim})"
        )
    if t < 0:
        raise InvalidArgumentError(f"t должно быть ≥ 0, получено {t}")
    if t == 0:
        return rho

    step = min(_max_step(gen), t if dt is None else dt)
    steps = max(1, math.ceil(t / step - 1e-9))
    h = t / steps
    logger.debug("Fock RK4: dim=%d steps=%d dt=%.3e", gen.dim, steps, h)

    rhs = lindblad_rhs(gen)
    state = np.array(rho.rho)
    for i in range(1, steps + 1):
        k1 = rhs(state)
        k2 = rhs(state + h / 2 * k1)
        k3 = rhs(state + h / 2 * k2)
        k4 = rhs(state + h * k3)
        state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if i % TAIL_CHECK_EVERY == 0 or i == steps:
            _check_tail(state, i * h)

    trace = np.real(np.trace(state))
    drift = abs(trace - 1.0)
    if drift > TRACE_DRIFT_LIMIT:
        raise StepSizeError(
            f"дрейф следа {drift:.2e} > {TRACE_DRIFT_LIMIT:.0e}, уменьшите шаг", drift=drift
        )
    return FockDensityMatrix(project_psd(state))


def _check_tail(state: np.ndarray, t: float):
    tail = float(np.sum(np.real(np.diag(state))[-FOCK_TAIL_WIDTH:]))
    if tail >= FOCK_TAIL_LIMIT:
        raise TruncationError(
            f"населённость последних {FOCK_TAIL_WIDTH} уровней {tail:.2e} при t = {t:.4g}",
            tail=tail,
        )


def project_psd(state: np.ndarray) -> np.ndarray:
    """Ближайшая в норме Фробениуса матрица с λ ≥ 0 и следом 1"""
    values, vectors = np.linalg.eigh(hermitize(state))
    values = np.clip(values, 0.0, None)
    rho = (vectors * values) @ vectors.conj().T
    return hermitize(rho / np.real(np.trace(rho)))


def run_oracle(
    initial: Callable[[int], FockDensityMatrix],
    t: float,
    omega: float = 0.0,
    xi: complex = 0.0,
    delta: complex = 0.0,
    gamma_u: float = 0.0,
    gamma_v: float = 0.0,
    dims: Sequence[int] = DEFAULT_DIMS,
) -> FockDensityMatrix:
    """Эволюция с удвоением N_max при ошибке усечения"""
    error = None
    for dim in dims:
        try:
            rho0 = initial(dim)
            gen = build_generator(omega, xi, delta, gamma_u, gamma_v, dim)
            return evolve_rho(rho0, gen, t)
        except TruncationError as e:
            logger.debug("Truncation at dim=%d (tail %.2e), doubling", dim, e.tail)
            error = e
    raise error


def moments(rho: FockDensityMatrix) -> FockMoments:
    b = annihilation(rho.dim)
    bd = b.conj().T
    x = b + bd
    r = rho.rho
    mean_b = complex(np.trace(r @ b))
    mean_x = np.real(np.trace(r @ x))
    return FockMoments(
        mean_b=mean_b,
        mean_bb=complex(np.trace(r @ b @ b)),
        mean_n=float(np.real(np.trace(r @ bd @ b))),
        x_variance=float(np.real(np.trace(r @ x @ x)) - mean_x**2),
        purity=float(np.real(np.trace(r @ r))),
    )


def covariance_block(rho: FockDensityMatrix) -> GaussianState:
    """Σ и D одной моды по моментам ρ"""
    m = moments(rho)
    s11 = 2 * m.mean_n + 1 - 2 * abs(m.mean_b) ** 2
    s12 = 2 * m.mean_bb - 2 * m.mean_b**2
    return GaussianState(
        modes=("mode0",),
        displacement=np.array([m.mean_b, np.conj(m.mean_b)]),
        covariance=np.array([[s11, s12], [np.conj(s12), s11]], dtype=complex),
    )


def x_fourth_cumulant(rho: FockDensityMatrix) -> float:
    """κ₄ = <δX⁴> − 3<δX²>², δX = X − <X>"""
    b = annihilation(rho.dim)
    x = b + b.conj().T
    mean_x = np.real(np.trace(rho.rho @ x))
    dx = x - mean_x * np.eye(rho.dim)
    dx2 = dx @ dx
    second = np.real(np.trace(rho.rho @ dx2))
    fourth = np.real(np.trace(rho.rho @ dx2 @ dx2))
    return float(fourth - 3 * second**2)


def _pure(psi: np.ndarray) -> FockDensityMatrix:
    psi = psi / np.linalg.norm(psi)
    return FockDensityMatrix(hermitize(np.outer(psi, psi.conj())))


def fock_state(n: int, dim: int) -> FockDensityMatrix:
    if not 0 <= n < dim:
        raise InvalidArgumentError(f"уровень {n} вне базиса 0..{dim - 1}")
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return _pure(psi)


def coherent_state(mu: complex, dim: int) -> FockDensityMatrix:
    """|μ> = e^{−|μ|²/2} Σ μⁿ/√n! |n>"""
    psi = np.zeros(dim, dtype=complex)
    psi[0] = np.exp(-abs(mu) ** 2 / 2)
    for n in range(1, dim):
        psi[n] = psi[n - 1] * mu / np.sqrt(n)
    return _pure(psi)


def fock_squeezed_state(r: float, theta: float, dim: int) -> FockDensityMatrix:
    """S(ζ)|0>, S(ζ) = exp((ζ*b² − ζb†²)/2), ζ = r e^{2iθ}"""
    big = 2 * dim
    b = annihilation(big)
    zeta = r * np.exp(2j * theta)
    generator = 0.5 * (np.conj(zeta) * b @ b - zeta * b.conj().T @ b.conj().T)
    psi = linalg.expm(generator)[:, 0]
    populations = np.abs(psi) ** 2
    tail = float(np.sum(populations[dim - FOCK_TAIL_WIDTH :]))
    if dim < 10 + 8 * math.exp(2 * r) or tail >= FOCK_TAIL_LIMIT:
        raise TruncationError(
            f"dim = {dim} мало для r = {r}: нужно ≥ {10 + 8 * math.exp(2 * r):.0f}",
            tail=tail,
        )
    return _pure(psi[:dim])
