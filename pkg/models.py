# models.py
# Peewee ORM модели журнала запусков сценариев

import datetime
from pathlib import Path

from peewee import *


db = SqliteDatabase(None)


class BaseModel(Model):
    """Базовая модель с общей БД"""

    class Meta:
        database = db


class ScenarioRun(BaseModel):
    """Один запуск сценария с параметрами конденсата"""

    kind = TextField(index=True)  # 'damping' | 'gravity'
    species = TextField()
    density = FloatField()  # см⁻³
    temperature = FloatField()
    length = FloatField()
    mode_index = IntegerField()
    created_at = DateTimeField(default=datetime.datetime.utcnow)
    config_json = TextField(null=True)

    class Meta:
        table_name = "scenario_runs"


class DampingRow(BaseModel):
    """Строка кривой затухания для гармоники n"""

    run = ForeignKeyField(ScenarioRun, backref="damping_rows", on_delete="CASCADE")
    n = IntegerField()
    gamma_minus = FloatField(null=True)
    gamma_plus = FloatField(null=True)
    gamma_3b = FloatField(null=True)
    gamma_landau = FloatField(null=True)
    gamma_beliaev = FloatField(null=True)
    error = TextField(null=True)

    class Meta:
        table_name = "damping_rows"
        indexes = ((("run", "n"), True),)


class GravityRow(BaseModel):
    """Детектируемая масса для степени сжатия r"""

    run = ForeignKeyField(ScenarioRun, backref="gravity_rows", on_delete="CASCADE")
    r = FloatField()
    detectable_mass_ideal = FloatField()
    detectable_mass_decohered = FloatField()
    enhancement_factor = FloatField()
    gamma_plus_mode = FloatField()

    class Meta:
        table_name = "gravity_rows"
        indexes = ((("run", "r"), True),)


MODELS = [ScenarioRun, DampingRow, GravityRow]


def init_database(path) -> SqliteDatabase:
    """Открывает БД (путь или ':memory:') и создаёт таблицы"""
    path = str(path)
    if path != ":memory:":
        Path(path).expanduser().parent.mkdir(parents=True, exist_ok=True)
    db.init(path, pragmas={"foreign_keys": 1})
    db.connect(reuse_if_open=True)
    db.create_tables(MODELS)
    return db
