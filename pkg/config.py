# config.py
import dataclasses
import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Optional

from errors import ConfigError
from structures import ScenarioConfig

logger = logging.getLogger(__name__)

SPECIES_CHOICES = ("rb", "yb", "custom")

# ключ конфига -> тип значения
SCENARIO_KEYS = {
    "species": str,
    "density": float,
    "temperature": float,
    "length": float,
    "aspect_ratio": float,
    "mode_index": int,
    "squeezing": tuple,
    "drive_time": float,
    "reference_mass": float,
    "reference_time": float,
    "output_path": str,
    "custom_mass": float,
    "custom_scattering_length": float,
    "custom_three_body": float,
    "quad_tol": float,
}

ENV_KEYS = {
    "PHONON_SPECIES": "species",
    "PHONON_DENSITY": "density",
    "PHONON_TEMPERATURE": "temperature",
    "PHONON_DB_FILE": "db_file",
    "PHONON_QUAD_TOL": "quad_tol",
}


def _convert(key: str, value, kind):
    try:
        if kind is tuple:
            if isinstance(value, str):
                value = [v for v in value.replace(",", " ").split() if v]
            return tuple(float(v) for v in value)
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if kind is float:
            if isinstance(value, bool):
                raise ValueError(value)
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: недопустимое значение {value!r}") from None


class Config:
    """Конфигурация сценариев"""

    def __init__(self, config_path: Optional[Path] = None):
        search_paths = [
            config_path,
            Path("phonon_config.toml"),
            Path.home() / ".phonon_metrology" / "config.toml",
        ]
        if config_path is not None and not Path(config_path).exists():
            raise ConfigError(f"конфиг не найден: {config_path}")

        self.data = {}
        self.source: Optional[Path] = None
        self._load_config(search_paths)
        self._load_env()

    def _load_config(self, search_paths: list[Optional[Path]]):
        """Загрузить конфиг из первого найденного файла"""
        for path in search_paths:
            if path and Path(path).exists():
                try:
                    with open(path, "rb") as f:
                        self.data = tomllib.load(f)
                except (OSError, tomllib.TOMLDecodeError) as e:
                    raise ConfigError(f"ошибка чтения {path}: {e}") from e
                self.source = Path(path)
                logger.info("Config loaded from %s", path)
                return

        logger.debug("No config file found, using defaults")

    def _load_env(self):
        """Переменные окружения перезаписывают конфиг"""
        for env, key in ENV_KEYS.items():
            value = os.getenv(env)
            if value is not None:
                self.data[key] = value

        self.db_file = Path(
            str(self._get("db_file", "phonon_metrology.db"))
        ).expanduser()
        self.quad_tol = _convert("quad_tol", self._get("quad_tol", 1e-8), float)

    def _get(self, path: str, default=None):
        """Получить значение из конфига по пути"""
        keys = path.split(".")
        value = self.data
        try:
            for key in keys:
                value = value[key]
            return value
        except (KeyError, TypeError):
            return default

    def overrides(self) -> dict:
        """Заданные в конфиге поля ScenarioConfig с приведёнными типами"""
        result = {}
        for key, value in self.data.items():
            if key in SCENARIO_KEYS:
                result[key] = _convert(key, value, SCENARIO_KEYS[key])
            elif key != "db_file":
                logger.warning("Unknown config key %r ignored", key)
        return result

    def to_scenario(self, base: Optional[ScenarioConfig] = None, **flags) -> ScenarioConfig:
        """
        base ← значения конфига ← явные флаги CLI (None пропускается).
        """
        values = self.overrides()
        values.update({k: v for k, v in flags.items() if v is not None})
        if "species" in values:
            values["species"] = str(values["species"]).lower()
        scenario = dataclasses.replace(base or ScenarioConfig(), **values)
        validate_scenario(scenario)
        return scenario

    def __str__(self):
        return f"Config(source={self.source}, db_file={self.db_file})"


def validate_scenario(scenario: ScenarioConfig):
    species = scenario.species.lower()
    if species not in SPECIES_CHOICES:
        raise ConfigError(
            f"species = {scenario.species!r}, допустимо: {', '.join(SPECIES_CHOICES)}"
        )
    for name in (
        "density",
        "length",
        "aspect_ratio",
        "drive_time",
        "reference_mass",
        "reference_time",
        "quad_tol",
    ):
        value = getattr(scenario, name)
        if not value > 0:
            raise ConfigError(f"{name} должно быть > 0, получено {value}")
    if scenario.temperature < 0:
        raise ConfigError(f"temperature должна быть ≥ 0, получено {scenario.temperature}")
    if scenario.mode_index < 1:
        raise ConfigError(f"mode_index должен быть ≥ 1, получено {scenario.mode_index}")
    if any(r < 0 for r in scenario.squeezing):
        raise ConfigError("значения squeezing должны быть ≥ 0")
    if species == "custom":
        for name in ("custom_mass", "custom_scattering_length", "custom_three_body"):
            value = getattr(scenario, name)
            if value is None or not value > 0:
                raise ConfigError(f"для species = custom нужно {name} > 0")
