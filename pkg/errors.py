# errors.py
"""
Исключения библиотеки.

InvalidArgumentError: неверные входные данные (CLI: код 2)
NumericalConsistencyError и потомки: численные проблемы (CLI: код 3)
"""

from typing import Optional


class PhononMetrologyError(Exception):
    """Базовое исключение проекта"""


class InvalidArgumentError(PhononMetrologyError, ValueError):
    """Аргумент вне допустимой области"""


class ConfigError(InvalidArgumentError):
    """Ошибка чтения или валидации конфига"""


class NumericalConsistencyError(PhononMetrologyError, ArithmeticError):
    """Нарушен численный инвариант (эрмитовость, положительность и т.п.)"""


class UnsupportedRegimeError(NumericalConsistencyError):
    """Замкнутая формула не определена в этом режиме"""


class InstabilityError(NumericalConsistencyError):
    def __init__(self, message: str, eigenvalue: Optional[complex] = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class QuadratureError(NumericalConsistencyError):
    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SingularPurityError(NumericalConsistencyError):
    """P ≈ 1 при P' ≠ 0: средний член QFI расходится"""


class NoInformationError(NumericalConsistencyError):
    """F ≤ 0, граница Крамера-Рао не определена"""


class TruncationError(NumericalConsistencyError):
    def __init__(self, message: str, tail: float):
        super().__init__(message)
        self.tail = tail


class StepSizeError(NumericalConsistencyError):
    def __init__(self, message: str, drift: float):
        super().__init__(message)
        self.drift = drift
