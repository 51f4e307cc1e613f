# ingest.py
import dataclasses
import json
import logging
import math
from typing import List, Optional

from errors import InvalidArgumentError
from models import DampingRow, GravityRow, ScenarioRun, db
from structures import DampingRecord, GravityResult, ScenarioConfig

logger = logging.getLogger(__name__)


def _nullable(value: float) -> Optional[float]:
    return None if value is None or math.isnan(value) else value


def _upsert_run(kind: str, config: ScenarioConfig, run_id: Optional[int]) -> ScenarioRun:
    """Создать запуск или перезаписать параметры существующего"""
    fields = {
        "kind": kind,
        "species": config.species,
        "density": config.density,
        "temperature": config.temperature,
        "length": config.length,
        "mode_index": config.mode_index,
        "config_json": json.dumps(dataclasses.asdict(config)),
    }
    if run_id is None:
        return ScenarioRun.create(**fields)

    run = ScenarioRun.get_or_none(ScenarioRun.id == run_id)
    if run is None:
        return ScenarioRun.create(id=run_id, **fields)
    if run.kind != kind:
        raise InvalidArgumentError(f"запуск #{run_id} имеет тип {run.kind}, а не {kind}")
    for name, value in fields.items():
        setattr(run, name, value)
    run.save()
    return run


def record_damping_run(
    config: ScenarioConfig, records: List[DampingRecord], run_id: Optional[int] = None
) -> ScenarioRun:
    """Записать кривые затухания; повторная запись того же run_id заменяет строки"""
    with db.atomic():
        run = _upsert_run("damping", config, run_id)
        DampingRow.delete().where(DampingRow.run == run).execute()
        rows = [
            {
                "run": run,
                "n": rec.n,
                "gamma_minus": _nullable(rec.gamma_minus),
                "gamma_plus": _nullable(rec.gamma_plus),
                "gamma_3b": _nullable(rec.gamma_3b),
                "gamma_landau": _nullable(rec.gamma_landau),
                "gamma_beliaev": _nullable(rec.gamma_beliaev),
                "error": rec.error,
            }
            for rec in records
        ]
        if rows:
            DampingRow.insert_many(rows).execute()
    logger.info("Recorded damping run #%d (%d rows)", run.id, len(records))
    return run


def record_gravity_run(
    config: ScenarioConfig, result: GravityResult, run_id: Optional[int] = None
) -> ScenarioRun:
    with db.atomic():
        run = _upsert_run("gravity", config, run_id)
        GravityRow.delete().where(GravityRow.run == run).execute()
        for r, ideal, decohered, enh in zip(
            result.squeezing,
            result.detectable_mass_ideal,
            result.detectable_mass_decohered,
            result.enhancement_factor,
        ):
            GravityRow.insert(
                run=run,
                r=r,
                detectable_mass_ideal=ideal,
                detectable_mass_decohered=decohered,
                enhancement_factor=enh,
                gamma_plus_mode=result.gamma_plus_mode,
            ).on_conflict_replace().execute()
    logger.info("Recorded gravity run #%d (%d rows)", run.id, len(result.squeezing))
    return run


def list_runs(kind: Optional[str] = None) -> List[ScenarioRun]:
    query = ScenarioRun.select()
    if kind:
        query = query.where(ScenarioRun.kind == kind)
    return list(query.order_by(ScenarioRun.id))


def run_rows(run_id: int) -> tuple[Optional[ScenarioRun], list]:
    """Запуск и его строки (пустой список, если запуска нет)"""
    run = ScenarioRun.get_or_none(ScenarioRun.id == run_id)
    if run is None:
        return None, []
    if run.kind == "damping":
        rows = list(run.damping_rows.order_by(DampingRow.n))
    else:
        rows = list(run.gravity_rows.order_by(GravityRow.r))
    return run, rows
