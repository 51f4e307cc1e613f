# gaussian_core.py
"""
Гауссовы состояния фононных мод и симплектические операции над ними.

Базис ζ = (b_1, b_1†, ..., b_M, b_M†). Все операции чистые: возвращают
новое состояние, исходное не меняется.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import InvalidArgumentError, NumericalConsistencyError
from structures import HERMITIAN_RTOL, GaussianState, SymplecticMatrix

logger = logging.getLogger(__name__)


def _require_finite(**values):
    for name, value in values.items():
        if not np.all(np.isfinite(value)):
            raise InvalidArgumentError(f"{name} должно быть конечным, получено {value}")


def hermitize(matrix: np.ndarray) -> np.ndarray:
    """Σ ← (Σ + Σ†)/2"""
    return (matrix + matrix.conj().T) / 2


def _mode_labels(mode_count: int) -> Tuple[str, ...]:
    return tuple(f"mode{i}" for i in range(mode_count))


def vacuum_state(mode_count: int, labels: Optional[Sequence[str]] = None) -> GaussianState:
    """Основное состояние: D = 0, Σ = I"""
    if int(mode_count) < 1:
        raise InvalidArgumentError(f"mode_count должно быть ≥ 1, получено {mode_count}")
    mode_count = int(mode_count)
    labels = tuple(labels) if labels is not None else _mode_labels(mode_count)
    if len(labels) != mode_count:
        raise InvalidArgumentError("число меток не совпадает с числом мод")
    size = 2 * mode_count
    return GaussianState(
        modes=labels,
        displacement=np.zeros(size, dtype=complex),
        covariance=np.eye(size, dtype=complex),
    )


def squeeze_matrix(r: float, theta: float) -> SymplecticMatrix:
    """S(ζ), ζ = r·e^{2iθ}"""
    _require_finite(r=r, theta=theta)
    ch, sh = np.cosh(r), np.sinh(r)
    phase = np.exp(2j * theta)
    return SymplecticMatrix(
        np.array(
            [
                [ch, -phase * sh],
                [-np.conj(phase) * sh, ch],
            ],
            dtype=complex,
        )
    )


def rotation_matrix(theta: float) -> SymplecticMatrix:
    """R(θ) = diag(e^{−iθ}, e^{iθ})"""
    _require_finite(theta=theta)
    return SymplecticMatrix(np.diag([np.exp(-1j * theta), np.exp(1j * theta)]))


def apply_unitary(
    state: GaussianState, s: SymplecticMatrix, mode: Optional[int] = None
) -> GaussianState:
    """
    Σ' = S Σ S†, D' = S D.

    Одномодовый блок можно применить к многомодовому состоянию, указав mode.
    """
    if mode is not None:
        s = s.embed(state.mode_index(mode), state.mode_count)
    if s.matrix.shape != state.covariance.shape:
        raise InvalidArgumentError(
            f"размерность S {s.matrix.shape} не совпадает с Σ {state.covariance.shape}"
        )
    mat = s.matrix
    covariance = hermitize(mat @ state.covariance @ mat.conj().T)
    displacement = mat @ state.displacement
    return GaussianState(
        modes=state.modes, displacement=displacement, covariance=covariance
    )


def displace(state: GaussianState, mode, mu: complex) -> GaussianState:
    """D для моды сдвигается на (μ, μ*), Σ не меняется"""
    idx = state.mode_index(mode)
    _require_finite(mu=mu)
    displacement = np.array(state.displacement)
    displacement[2 * idx] += mu
    displacement[2 * idx + 1] += np.conj(mu)
    return GaussianState(
        modes=state.modes, displacement=displacement, covariance=state.covariance
    )


def squeezed_vacuum(
    r: float, theta: float = 0.0, mode_count: int = 1, mode: int = 0
) -> GaussianState:
    return apply_unitary(vacuum_state(mode_count), squeeze_matrix(r, theta), mode=mode)


def _checked_block(state: GaussianState, mode) -> np.ndarray:
    block = state.block(mode)
    scale = max(float(np.linalg.norm(block)), 1.0)
    asym = float(np.linalg.norm(block - block.conj().T)) / scale
    if asym > HERMITIAN_RTOL:
        raise NumericalConsistencyError(
            f"блок моды {mode} не эрмитов: асимметрия {asym:.3e}"
        )
    return block


def eigen_spectrum(state: GaussianState, mode=0) -> Tuple[float, float]:
    """Собственные значения 2x2 блока моды, λ₋ ≤ λ₊"""
    block = hermitize(_checked_block(state, mode))
    lam = np.linalg.eigvalsh(block)
    if lam[0] <= 0:
        raise NumericalConsistencyError(
            f"блок моды {mode} не положительно определён: λ₋ = {lam[0]:.3e}"
        )
    return float(lam[0]), float(lam[1])


def purity(state: GaussianState) -> float:
    """P = 1/√det Σ"""
    det = float(np.real(np.linalg.det(state.covariance)))
    if det <= 0:
        raise NumericalConsistencyError(f"det Σ = {det:.3e} ≤ 0")
    return 1.0 / np.sqrt(det)


def quadrature_variance(state: GaussianState, mode=0) -> float:
    """<X²> сорасположенной квадратуры: (Σ₁₁ + Σ₂₂)/2 + Re Σ₁₂"""
    block = state.block(mode)
    return float(np.real(block[0, 0] + block[1, 1]) / 2 + np.real(block[0, 1]))


def mean_phonon_number(state: GaussianState, mode=0) -> float:
    """<n> = (Σ₁₁ − 1)/2 + |<b>|²"""
    idx = state.mode_index(mode)
    block = state.block(idx)
    return float((np.real(block[0, 0]) - 1) / 2 + abs(state.displacement[2 * idx]) ** 2)
