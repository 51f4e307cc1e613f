# structures.py
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from errors import InvalidArgumentError, NumericalConsistencyError, TruncationError

HERMITIAN_RTOL = 1e-12
PAIRING_TOL = 1e-10
PHYSICAL_DET_TOL = 1e-9
FOCK_TAIL_LIMIT = 1e-8
FOCK_TAIL_WIDTH = 5


def _frozen_array(value, dtype=complex) -> np.ndarray:
    arr = np.array(value, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


def _relative_asymmetry(matrix: np.ndarray) -> float:
    scale = max(np.linalg.norm(matrix), 1.0)
    return float(np.linalg.norm(matrix - matrix.conj().T) / scale)


def _block_violation(block: np.ndarray) -> Optional[str]:
    """tr > 0 и det ≥ 1 − 1e-9 с поправкой на округление ~ tr²"""
    tr = float(np.real(np.trace(block)))
    if tr <= 0:
        return f"след {tr:.3e} ≤ 0"
    det = float(np.real(np.linalg.det(block)))
    if det < 1.0 - PHYSICAL_DET_TOL - HERMITIAN_RTOL * tr**2:
        return f"det {det:.9g} < 1"
    return None


@dataclass(frozen=True)
class GaussianState:
    """
    Гауссово состояние M фононных мод.

    Базис ζ = (b_1, b_1†, ..., b_M, b_M†), блоки мод идут подряд.
    Σ_IJ = <ζ_I ζ_J† + ζ_J† ζ_I> − 2 D_I D_J*, вакуум: Σ = I.
    """

    modes: Tuple[str, ...]
    displacement: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        modes = tuple(str(m) for m in self.modes)
        if not modes:
            raise InvalidArgumentError("нужна хотя бы одна мода")
        size = 2 * len(modes)
        disp = _frozen_array(self.displacement)
        cov = _frozen_array(self.covariance)

        if disp.shape != (size,):
            raise InvalidArgumentError(
                f"вектор смещения должен иметь длину {size}, получено {disp.shape}"
            )
        if cov.shape != (size, size):
            raise InvalidArgumentError(
                f"ковариационная матрица должна быть {size}x{size}, получено {cov.shape}"
            )
        if not (np.all(np.isfinite(disp)) and np.all(np.isfinite(cov))):
            raise NumericalConsistencyError("состояние содержит нечисловые элементы")

        asym = _relative_asymmetry(cov)
        if asym > HERMITIAN_RTOL:
            raise NumericalConsistencyError(
                f"Σ не эрмитова: относительная асимметрия {asym:.3e}"
            )
        pairing = np.max(np.abs(disp[1::2] - disp[0::2].conj()))
        if pairing > PAIRING_TOL * max(1.0, float(np.max(np.abs(disp)))):
            raise NumericalConsistencyError(
                f"нарушена пара (<b>, <b†>): расхождение {pairing:.3e}"
            )
        for m in range(len(modes)):
            i = 2 * m
            violation = _block_violation(cov[i : i + 2, i : i + 2])
            if violation:
                raise NumericalConsistencyError(f"нефизичный блок моды {modes[m]}: {violation}")
        if len(modes) > 1:
            lowest = float(np.linalg.eigvalsh((cov + cov.conj().T) / 2)[0])
            if lowest <= 0:
                raise NumericalConsistencyError(
                    f"Σ не положительно определена: λ_min = {lowest:.3e}"
                )

        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "displacement", disp)
        object.__setattr__(self, "covariance", cov)

    @property
    def mode_count(self) -> int:
        return len(self.modes)

    def mode_index(self, mode) -> int:
        """Индекс моды по номеру или по метке"""
        if isinstance(mode, str):
            try:
                return self.modes.index(mode)
            except ValueError:
                raise InvalidArgumentError(f"неизвестная мода {mode!r}") from None
        idx = int(mode)
        if not 0 <= idx < self.mode_count:
            raise InvalidArgumentError(
                f"мода {idx} вне диапазона 0..{self.mode_count - 1}"
            )
        return idx

    def block(self, mode) -> np.ndarray:
        i = 2 * self.mode_index(mode)
        return self.covariance[i : i + 2, i : i + 2]

    def is_physical(self) -> bool:
        """Строгий тест по 2x2 блокам: tr > 0, det ≥ 1 − 1e-9 без поправки на округление"""
        for m in range(self.mode_count):
            blk = self.block(m)
            if np.real(np.trace(blk)) <= 0:
                return False
            if np.real(np.linalg.det(blk)) < 1.0 - PHYSICAL_DET_TOL:
                return False
        return True


@dataclass(frozen=True)
class SymplecticMatrix:
    """Блочная 2x2 матрица S(ζ), R(θ) или единица по каждой моде"""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen_array(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise InvalidArgumentError(
                f"симплектическая матрица должна быть 2M x 2M, получено {mat.shape}"
            )
        if not np.all(np.isfinite(mat)):
            raise InvalidArgumentError("симплектическая матрица содержит нечисловые элементы")
        metric = np.diag(np.tile([1.0, -1.0], mat.shape[0] // 2))
        scale = max(float(np.linalg.norm(mat)) ** 2, 1.0)
        for i in range(0, mat.shape[0], 2):
            det = np.linalg.det(mat[i : i + 2, i : i + 2])
            if abs(det - 1.0) > HERMITIAN_RTOL * scale:
                raise InvalidArgumentError(f"det блока {i // 2} = {det:.9g}, ожидалась 1")
        drift = float(np.linalg.norm(mat @ metric @ mat.conj().T - metric))
        if drift > HERMITIAN_RTOL * scale:
            raise InvalidArgumentError(f"матрица не сохраняет метрику ζ: отклонение {drift:.3e}")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, mode_count: int) -> "SymplecticMatrix":
        return cls(np.eye(2 * mode_count, dtype=complex))

    @property
    def mode_count(self) -> int:
        return self.matrix.shape[0] // 2

    def block(self, mode: int) -> np.ndarray:
        i = 2 * mode
        return self.matrix[i : i + 2, i : i + 2]

    def embed(self, mode: int, mode_count: int) -> "SymplecticMatrix":
        """Поместить одномодовый блок в единичную матрицу на место моды"""
        if self.mode_count != 1:
            raise InvalidArgumentError("встраивать можно только одномодовый блок")
        if not 0 <= mode < mode_count:
            raise InvalidArgumentError(f"мода {mode} вне диапазона 0..{mode_count - 1}")
        full = np.eye(2 * mode_count, dtype=complex)
        i = 2 * mode
        full[i : i + 2, i : i + 2] = self.matrix
        return SymplecticMatrix(full)

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        if self.matrix.shape != other.matrix.shape:
            raise InvalidArgumentError("размерности симплектических матриц не совпадают")
        return SymplecticMatrix(self.matrix @ other.matrix)


@dataclass(frozen=True)
class CondensateSpec:
    """
    Однородный конденсат.

    density в м⁻³ (SI), three_body_constant в см⁶/с, как в таблицах
    экспериментов; перевод в м⁶/с через three_body_si.
    """

    atom_mass: float
    scattering_length: float
    density: float
    three_body_constant: float
    temperature: float = 0.0
    length: float = 200e-6
    aspect_ratio: float = 1.0

    def __post_init__(self):
        for name in (
            "atom_mass",
            "scattering_length",
            "density",
            "three_body_constant",
            "length",
            "aspect_ratio",
        ):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} должно быть > 0, получено {value}")
        if not (np.isfinite(self.temperature) and self.temperature >= 0):
            raise InvalidArgumentError(
                f"temperature должна быть ≥ 0, получено {self.temperature}"
            )

    @property
    def three_body_si(self) -> float:
        """D в м⁶/с"""
        return self.three_body_constant * 1e-12


@dataclass(frozen=True)
class ModeSpec:
    k: float
    omega: float
    alpha: float
    beta: float
    n: Optional[int] = None

    def __post_init__(self):
        norm = self.alpha**2 - self.beta**2
        if abs(norm - 1.0) > 1e-10 * max(1.0, self.alpha**2):
            raise NumericalConsistencyError(f"α² − β² = {norm!r}, ожидалось 1")
        if self.k > 0 and self.omega <= 0:
            raise NumericalConsistencyError("ω_k должна быть > 0 при k > 0")


@dataclass(frozen=True)
class ChannelRates:
    """γ^u (прыжок b), γ^v (прыжок b†) и γ± = γ^u ± γ^v"""

    gamma_u: float
    gamma_v: float
    gamma_minus: float
    gamma_plus: float

    def __post_init__(self):
        scale = max(abs(self.gamma_u), abs(self.gamma_v), 1e-300)
        if self.gamma_u < -1e-12 * scale or self.gamma_v < -1e-12 * scale:
            raise InvalidArgumentError(
                f"скорости должны быть ≥ 0: γ^u={self.gamma_u}, γ^v={self.gamma_v}"
            )
        if abs(self.gamma_minus - (self.gamma_u - self.gamma_v)) > 1e-8 * scale:
            raise NumericalConsistencyError("γ⁻ ≠ γ^u − γ^v")
        if abs(self.gamma_plus - (self.gamma_u + self.gamma_v)) > 1e-8 * scale:
            raise NumericalConsistencyError("γ⁺ ≠ γ^u + γ^v")

    @classmethod
    def from_uv(cls, gamma_u: float, gamma_v: float) -> "ChannelRates":
        return cls(
            gamma_u=gamma_u,
            gamma_v=gamma_v,
            gamma_minus=gamma_u - gamma_v,
            gamma_plus=gamma_u + gamma_v,
        )

    @classmethod
    def from_pm(cls, gamma_minus: float, gamma_plus: float) -> "ChannelRates":
        return cls.from_uv((gamma_plus + gamma_minus) / 2, (gamma_plus - gamma_minus) / 2)


@dataclass(frozen=True)
class DampingBudget:
    gamma_3b: float
    gamma_landau: float
    gamma_beliaev: float
    thermal_occupation: float
    combined: ChannelRates

    def __post_init__(self):
        for name in ("gamma_3b", "gamma_landau", "gamma_beliaev", "thermal_occupation"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} должно быть ≥ 0")


@dataclass(frozen=True)
class BilinearHamiltonian:
    """
    H = Σ ω_I b_I†b_I − (i/2)(Ξ_I b_I†² − Ξ_I* b_I²) + (iδ_I b_I† − iδ_I* b_I)
        + Σ_{I≠J} G_IJ b_I† b_J

    couplings G: эрмитова матрица с нулевой диагональю.
    """

    omegas: np.ndarray
    squeezings: np.ndarray
    drives: np.ndarray
    couplings: Optional[np.ndarray] = None

    def __post_init__(self):
        omegas = _frozen_array(np.atleast_1d(self.omegas), dtype=float)
        count = omegas.shape[0]
        squeezings = _frozen_array(np.broadcast_to(self.squeezings, (count,)))
        drives = _frozen_array(np.broadcast_to(self.drives, (count,)))
        if self.couplings is None:
            couplings = _frozen_array(np.zeros((count, count)))
        else:
            couplings = _frozen_array(self.couplings)
        if couplings.shape != (count, count):
            raise InvalidArgumentError(
                f"матрица связей должна быть {count}x{count}, получено {couplings.shape}"
            )
        for arr in (omegas, squeezings, drives, couplings):
            if not np.all(np.isfinite(arr)):
                raise InvalidArgumentError("гамильтониан содержит нечисловые коэффициенты")
        if np.max(np.abs(couplings - couplings.conj().T), initial=0.0) > 1e-12:
            raise InvalidArgumentError("матрица связей должна быть эрмитовой")
        if np.max(np.abs(np.diag(couplings)), initial=0.0) > 0:
            raise InvalidArgumentError("диагональ связей задаётся через omegas")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "squeezings", squeezings)
        object.__setattr__(self, "drives", drives)
        object.__setattr__(self, "couplings", couplings)

    @classmethod
    def free(cls, omegas) -> "BilinearHamiltonian":
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        return cls(omegas=omegas, squeezings=0.0, drives=0.0)

    @property
    def mode_count(self) -> int:
        return self.omegas.shape[0]


@dataclass(frozen=True)
class RateMatrices:
    """Диагонали Γ₋, Γ₊ (и голая Γ для формы без RWA)"""

    gamma_minus_diag: np.ndarray
    gamma_plus_diag: np.ndarray
    gamma_diag: Optional[np.ndarray] = None

    def __post_init__(self):
        gm = _frozen_array(np.atleast_1d(self.gamma_minus_diag), dtype=float)
        gp = _frozen_array(np.atleast_1d(self.gamma_plus_diag), dtype=float)
        if gm.shape != gp.shape or gm.ndim != 1:
            raise InvalidArgumentError("Γ₋ и Γ₊ должны быть векторами одной длины")
        if not (np.all(np.isfinite(gm)) and np.all(np.isfinite(gp))):
            raise InvalidArgumentError("скорости содержат нечисловые элементы")
        if np.any(gp < np.abs(gm) - 1e-12 * np.maximum(np.abs(gm), 1.0)):
            raise InvalidArgumentError("нарушено γ⁺ ≥ |γ⁻|")
        gd = None
        if self.gamma_diag is not None:
            gd = _frozen_array(np.atleast_1d(self.gamma_diag), dtype=float)
            if gd.shape != gm.shape:
                raise InvalidArgumentError("Γ должна иметь ту же длину, что и Γ±")
            if np.any(gd < 0) or np.any(gd > gp + 1e-12 * np.maximum(gp, 1.0)):
                raise InvalidArgumentError("нарушено 0 ≤ γ ≤ γ⁺")
        object.__setattr__(self, "gamma_minus_diag", gm)
        object.__setattr__(self, "gamma_plus_diag", gp)
        object.__setattr__(self, "gamma_diag", gd)

    @classmethod
    def pure_decay(cls, gammas) -> "RateMatrices":
        """Чистый канал распада: γ⁻ = γ⁺ = γ"""
        g = np.atleast_1d(np.asarray(gammas, dtype=float))
        return cls(gamma_minus_diag=g, gamma_plus_diag=g, gamma_diag=g)

    @classmethod
    def bare_loss(cls, gammas, alphas, betas) -> "RateMatrices":
        """
        Атомные потери a = αb + βb† со скоростью γ, β ≤ 0:
        γ⁻ = γ, γ⁺ = γ(α² + β²).
        """
        g = np.atleast_1d(np.asarray(gammas, dtype=float))
        a = np.atleast_1d(np.asarray(alphas, dtype=float))
        b = np.atleast_1d(np.asarray(betas, dtype=float))
        if np.any(b > 0):
            raise InvalidArgumentError("ожидается β ≤ 0")
        return cls(
            gamma_minus_diag=g * (a**2 - b**2),
            gamma_plus_diag=g * (a**2 + b**2),
            gamma_diag=g,
        )

    @classmethod
    def from_channels(cls, channels) -> "RateMatrices":
        channels = list(channels)
        return cls(
            gamma_minus_diag=[c.gamma_minus for c in channels],
            gamma_plus_diag=[c.gamma_plus for c in channels],
        )

    @property
    def mode_count(self) -> int:
        return self.gamma_minus_diag.shape[0]

    def expanded(self) -> Tuple[np.ndarray, np.ndarray]:
        """Γ₋ и Γ₊ в базисе ζ: каждое значение повторено для b и b†"""
        return np.repeat(self.gamma_minus_diag, 2), np.repeat(self.gamma_plus_diag, 2)

    def noise_matrix(self) -> np.ndarray:
        """
        Источник в уравнении для Σ. Без Γ это diag(Γ₊) (RWA); с Γ
        добавляются противовращающиеся члены √(γ⁺² − γ²) между b и b†.
        """
        gp = np.repeat(self.gamma_plus_diag, 2)
        noise = np.diag(gp).astype(complex)
        if self.gamma_diag is None:
            return noise
        counter = np.sqrt(np.clip(self.gamma_plus_diag**2 - self.gamma_diag**2, 0.0, None))
        for i, c in enumerate(counter):
            noise[2 * i, 2 * i + 1] = c
            noise[2 * i + 1, 2 * i] = c
        return noise


@dataclass(frozen=True)
class SqueezedFrameState:
    """w = (<a²>, <a†a>, <a²>*) и параметры H̃"""

    w: np.ndarray
    omega_tilde: float
    xi_tilde: complex
    gamma: float

    def __post_init__(self):
        w = _frozen_array(self.w)
        if w.shape != (3,):
            raise InvalidArgumentError("w должен быть 3-вектором")
        if abs(w[0] - np.conj(w[2])) > 1e-10 * max(1.0, abs(w[0])):
            raise NumericalConsistencyError("w[0] и w[2] должны быть сопряжёнными")
        object.__setattr__(self, "w", w)

    def x_variance(self) -> float:
        """<X²> при нулевом среднем: 2 Re<a²> + 2<a†a> + 1"""
        return float(2 * np.real(self.w[0]) + 2 * np.real(self.w[1]) + 1)


@dataclass(frozen=True)
class SqueezedFrameSpectrum:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    unstable: bool  # Re λ < 0 хотя бы у одного собственного значения


@dataclass(frozen=True)
class QfiInput:
    sigma: np.ndarray
    sigma_prime: np.ndarray
    d_prime: np.ndarray
    purity: float
    purity_prime: float = 0.0

    def __post_init__(self):
        sigma = _frozen_array(self.sigma)
        sigma_prime = _frozen_array(self.sigma_prime)
        d_prime = _frozen_array(self.d_prime)
        n = sigma.shape[0]
        if sigma.shape != (n, n) or sigma_prime.shape != (n, n) or d_prime.shape != (n,):
            raise InvalidArgumentError("размерности Σ, Σ' и D' не согласованы")
        if not 0 < self.purity <= 1 + PHYSICAL_DET_TOL:
            raise InvalidArgumentError(f"чистота вне (0, 1]: {self.purity}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "sigma_prime", sigma_prime)
        object.__setattr__(self, "d_prime", d_prime)


@dataclass(frozen=True)
class SchemeResult:
    qfi: float
    delta_theta: float
    scheme: str  # displacement-amplitude | displacement-phase | rotation | squeezing | continuous-squeezing
    optimal_angle: Optional[float] = None


@dataclass(frozen=True)
class QfiEstimate:
    qfi: float
    step: float


@dataclass(frozen=True)
class FockDensityMatrix:
    """Матрица плотности одной моды в базисе |0>, ..., |N_max>"""

    rho: np.ndarray

    def __post_init__(self):
        rho = _frozen_array(self.rho)
        dim = rho.shape[0]
        if rho.shape != (dim, dim):
            raise InvalidArgumentError("матрица плотности должна быть квадратной")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise NumericalConsistencyError("матрица плотности не эрмитова")
        trace = np.real(np.trace(rho))
        if abs(trace - 1.0) > 1e-10:
            raise NumericalConsistencyError(f"след матрицы плотности {trace!r} ≠ 1")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
            raise NumericalConsistencyError("матрица плотности не положительна")
        tail = float(np.sum(np.real(np.diag(rho))[dim - FOCK_TAIL_WIDTH :]))
        if tail >= FOCK_TAIL_LIMIT:
            raise TruncationError(
                f"населённость хвоста {tail:.2e} ≥ {FOCK_TAIL_LIMIT:.0e}, увеличьте N_max",
                tail=tail,
            )
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True)
class FockMoments:
    mean_b: complex
    mean_bb: complex
    mean_n: float
    x_variance: float
    purity: float


@dataclass(frozen=True)
class LindbladGenerator:
    omega: float
    xi: complex
    delta: complex
    gamma_u: float
    gamma_v: float
    dim: int
    b: np.ndarray = field(repr=False, default=None)
    hamiltonian: np.ndarray = field(repr=False, default=None)

    @property
    def max_rate(self) -> float:
        return max(abs(self.omega), abs(self.xi), abs(self.delta), self.gamma_u, self.gamma_v)


@dataclass(frozen=True)
class ScenarioConfig:
    species: str = "rb"
    density: float = 1e13  # см⁻³
    temperature: float = 200e-12
    length: float = 200e-6
    aspect_ratio: float = 1 / 3
    mode_index: int = 1
    squeezing: Tuple[float, ...] = (1.0, 2.0, 5.0)
    drive_time: float = 10.0
    reference_mass: float = 0.2
    reference_time: float = 10.0
    output_path: Optional[str] = None
    custom_mass: Optional[float] = None
    custom_scattering_length: Optional[float] = None
    custom_three_body: Optional[float] = None
    quad_tol: float = 1e-8


@dataclass(frozen=True)
class GravityResult:
    squeezing: Tuple[float, ...]
    detectable_mass_ideal: Tuple[float, ...]
    detectable_mass_decohered: Tuple[float, ...]
    enhancement_factor: Tuple[float, ...]
    gamma_plus_mode: float
    drive_time: float
    gamma_3b: float = 0.0
    mode_index: int = 10

    def __post_init__(self):
        for ideal, decohered in zip(self.detectable_mass_ideal, self.detectable_mass_decohered):
            if decohered < ideal * (1 - 1e-12):
                raise NumericalConsistencyError(
                    f"масса с декогеренцией {decohered} меньше идеальной {ideal}"
                )


@dataclass(frozen=True)
class RateRecord:
    species: str
    density: float  # см⁻³
    gamma: float
    inverse_gamma: float


@dataclass(frozen=True)
class DampingRecord:
    n: int
    gamma_minus: float
    gamma_plus: float
    gamma_3b: float
    gamma_landau: float
    gamma_beliaev: float
    error: Optional[str] = None


@dataclass(frozen=True)
class EvolutionRecord:
    t: float
    lambda_minus: float
    lambda_plus: float
    purity: float
    x_variance: float
    mean_phonon_number: float
