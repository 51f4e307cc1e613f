# cli.py
import logging
import math
from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional, Sequence

import click
import typer

from config import Config
from errors import InvalidArgumentError, NumericalConsistencyError
from ingest import list_runs, record_damping_run, record_gravity_run, run_rows
from metrology import SCHEMES, evaluate_scheme
from models import init_database
from scenarios import (
    DAMPING_PRESET,
    GRAVITY_PRESET,
    gravity_records,
    records_to_csv,
    scenario_damping_curves,
    scenario_evolution,
    scenario_gravity,
    scenario_rates,
    write_csv,
)
from structures import ChannelRates, ScenarioConfig

app = typer.Typer(help="Фононная метрология в БЭК: скорости, эволюция, QFI, сценарии")
scenario_app = typer.Typer(help="Воспроизведение оценок: кривые затухания и гравиметрия")
app.add_typer(scenario_app, name="scenario")

DAMPING_COLUMNS = "n, gamma_minus, gamma_plus, gamma_3b, gamma_landau, gamma_beliaev, error"
GRAVITY_COLUMNS = (
    "r, detectable_mass_ideal, detectable_mass_decohered, enhancement_factor, gamma_plus_mode"
)


@contextmanager
def handle_errors():
    """Доменные ошибки -> коды выхода 2 и 3"""
    try:
        yield
    except InvalidArgumentError as e:
        typer.echo(f"❌ {e}", err=True)
        raise typer.Exit(2)
    except NumericalConsistencyError as e:
        typer.echo(f"❌ Численная ошибка: {e}", err=True)
        raise typer.Exit(3)


def _config(ctx: typer.Context) -> Config:
    return ctx.obj["config"]


def _emit(records, out: Optional[Path], cfg: ScenarioConfig):
    if out is None and cfg.output_path:
        out = Path(cfg.output_path)
    if out:
        count = write_csv(records, out)
        typer.echo(f"✅ Записано {count} строк в {out}")
    else:
        typer.echo(records_to_csv(records), nl=False)


@app.callback()
def main(
    ctx: typer.Context,
    config_file: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Путь к конфигу TOML"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Отладочный вывод"),
):
    """
    phonon-metrology: декогеренция фононов БЭК и квантовая информация Фишера
    """
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)
    with handle_errors():
        ctx.obj = {"config": Config(config_file)}


@app.command()
def rates(
    ctx: typer.Context,
    species: Optional[str] = typer.Option(None, "--species", help="rb | yb | custom"),
    density: Optional[List[float]] = typer.Option(
        None, "--density", help="Плотность, см⁻³ (можно повторять)"
    ),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV файл вместо stdout"),
):
    """Скорость трёхчастичных потерь γ = 3Dρ². CSV: species, density, gamma, inverse_gamma"""
    with handle_errors():
        cfg = _config(ctx).to_scenario(
            DAMPING_PRESET, species=species, density=density[0] if density else None
        )
        _emit(scenario_rates(cfg, density or None), out, cfg)


def _time_grid(t_max: float, points: int) -> Sequence[float]:
    if points < 2:
        raise InvalidArgumentError("--points должно быть ≥ 2")
    if not t_max > 0:
        raise InvalidArgumentError("--t-max должно быть > 0")
    return [t_max * i / (points - 1) for i in range(points)]


@app.command()
def evolve(
    ctx: typer.Context,
    r: float = typer.Option(1.0, "--r", help="Начальное сжатие r"),
    t_max: Optional[float] = typer.Option(None, "--t-max", help="Конец интервала, с"),
    points: int = typer.Option(11, "--points", help="Число точек по времени"),
    gamma_minus: Optional[float] = typer.Option(None, "--gamma-minus", help="γ⁻, с⁻¹"),
    gamma_plus: Optional[float] = typer.Option(None, "--gamma-plus", help="γ⁺, с⁻¹"),
    species: Optional[str] = typer.Option(None, "--species", help="rb | yb | custom"),
    density: Optional[float] = typer.Option(None, "--density", help="Плотность, см⁻³"),
    temperature: Optional[float] = typer.Option(None, "--temperature", help="T, К"),
    mode_index: Optional[int] = typer.Option(None, "--mode-index", help="Гармоника n"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV файл вместо stdout"),
):
    """
    Эволюция сжатого вакуума в приближении вращающейся волны.

    Без --gamma-minus/--gamma-plus скорости берутся из бюджета моды.
    CSV: t, lambda_minus, lambda_plus, purity, x_variance, mean_phonon_number
    """
    with handle_errors():
        cfg = _config(ctx).to_scenario(
            DAMPING_PRESET,
            species=species,
            density=density,
            temperature=temperature,
            mode_index=mode_index,
        )
        channel = None
        if gamma_minus is not None or gamma_plus is not None:
            gm = gamma_minus if gamma_minus is not None else gamma_plus
            gp = gamma_plus if gamma_plus is not None else gamma_minus
            channel = ChannelRates.from_pm(gm, gp)
        times = _time_grid(t_max if t_max is not None else cfg.drive_time, points)
        _emit(scenario_evolution(cfg, r, times, channel), out, cfg)


@app.command()
def qfi(
    scheme: str = typer.Option(..., "--scheme", help=" | ".join(SCHEMES)),
    r: float = typer.Option(1.0, "--r", help="Сжатие r"),
    gamma_plus: float = typer.Option(0.0, "--gamma-plus", help="γ⁺, с⁻¹"),
    gamma_minus: Optional[float] = typer.Option(
        None, "--gamma-minus", help="γ⁻, с⁻¹ (по умолчанию = γ⁺)"
    ),
    t: float = typer.Option(0.0, "--t", help="Время, с"),
    mu: float = typer.Option(1.0, "--mu", help="|μ| для фазовой схемы"),
    phi: float = typer.Option(math.pi / 4, "--phi", help="Угол φ для схем сжатия"),
):
    """QFI и граница Крамера-Рао для схемы измерения"""
    with handle_errors():
        gm = gamma_plus if gamma_minus is None else gamma_minus
        result = evaluate_scheme(scheme, r, ChannelRates.from_pm(gm, gamma_plus), t, mu, phi)
        typer.echo(f"F = {result.qfi:.5g}, Δ = {result.delta_theta:.3g}")
        if result.optimal_angle is not None:
            typer.echo(f"   оптимальный угол: {result.optimal_angle:.4f} рад")


@scenario_app.command("damping")
def scenario_damping(
    ctx: typer.Context,
    nmax: int = typer.Option(30, "--nmax", help="Последняя гармоника n"),
    species: Optional[str] = typer.Option(None, "--species", help="rb | yb | custom"),
    density: Optional[float] = typer.Option(None, "--density", help="Плотность, см⁻³"),
    temperature: Optional[float] = typer.Option(None, "--temperature", help="T, К"),
    length: Optional[float] = typer.Option(None, "--length", help="Длина L, м"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV файл вместо stdout"),
    record: bool = typer.Option(False, "--record", help="Сохранить запуск в БД"),
    run_id: Optional[int] = typer.Option(None, "--run-id", help="Перезаписать запуск"),
):
    """Кривые γ⁻, γ⁺ по гармоникам. CSV: n, gamma_minus, gamma_plus, gamma_3b, gamma_landau, gamma_beliaev, error"""
    with handle_errors():
        cfg = _config(ctx).to_scenario(
            DAMPING_PRESET,
            species=species,
            density=density,
            temperature=temperature,
            length=length,
        )
        rows = scenario_damping_curves(cfg, nmax)
        _emit(rows, out, cfg)
        if record:
            init_database(_config(ctx).db_file)
            run = record_damping_run(cfg, rows, run_id)
            typer.echo(f"📊 Запуск #{run.id} сохранён", err=True)


@scenario_app.command("gravity")
def scenario_gravity_command(
    ctx: typer.Context,
    squeeze: Optional[List[float]] = typer.Option(
        None, "--squeeze", help="Сжатие r (можно повторять)"
    ),
    drive_time: Optional[float] = typer.Option(None, "--drive-time", help="Время, с"),
    species: Optional[str] = typer.Option(None, "--species", help="rb | yb | custom"),
    density: Optional[float] = typer.Option(None, "--density", help="Плотность, см⁻³"),
    temperature: Optional[float] = typer.Option(None, "--temperature", help="T, К"),
    length: Optional[float] = typer.Option(None, "--length", help="Длина L, м"),
    mode_index: Optional[int] = typer.Option(None, "--mode-index", help="Гармоника n"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV файл вместо stdout"),
    record: bool = typer.Option(False, "--record", help="Сохранить запуск в БД"),
    run_id: Optional[int] = typer.Option(None, "--run-id", help="Перезаписать запуск"),
):
    """Детектируемая масса источника. CSV: r, detectable_mass_ideal, detectable_mass_decohered, enhancement_factor, gamma_plus_mode"""
    with handle_errors():
        cfg = _config(ctx).to_scenario(
            GRAVITY_PRESET,
            squeezing=tuple(squeeze) if squeeze else None,
            drive_time=drive_time,
            species=species,
            density=density,
            temperature=temperature,
            length=length,
            mode_index=mode_index,
        )
        result = scenario_gravity(cfg)
        _emit(gravity_records(result), out, cfg)
        if record:
            init_database(_config(ctx).db_file)
            run = record_gravity_run(cfg, result, run_id)
            typer.echo(f"📊 Запуск #{run.id} сохранён", err=True)


@app.command()
def history(
    ctx: typer.Context,
    kind: Optional[str] = typer.Option(None, "--kind", help="damping | gravity"),
    run: Optional[int] = typer.Option(None, "--run", help="Показать строки запуска"),
):
    """Показать сохранённые запуски сценариев"""
    with handle_errors():
        init_database(_config(ctx).db_file)
        if run is not None:
            scenario_run, rows = run_rows(run)
            if scenario_run is None:
                typer.echo(f"❌ Запуск #{run} не найден")
                raise typer.Exit(1)
            columns = DAMPING_COLUMNS if scenario_run.kind == "damping" else GRAVITY_COLUMNS
            names = [c.strip() for c in columns.split(",")]
            typer.echo(f"📊 Запуск #{scenario_run.id} ({scenario_run.kind}):")
            records = [{name: getattr(row, name) for name in names} for row in rows]
            typer.echo(records_to_csv(records), nl=False)
            return

        runs = list_runs(kind)
        if not runs:
            typer.echo("❌ Запуски не найдены")
            return
        typer.echo(f"{'ID':<6} {'Тип':<10} {'Атом':<8} {'ρ, см⁻³':<10} {'T, К':<10} {'Дата'}")
        typer.echo("-" * 64)
        for r in runs:
            typer.echo(
                f"{r.id:<6} {r.kind:<10} {r.species:<8} {r.density:<10.3g} "
                f"{r.temperature:<10.3g} {r.created_at:%Y-%m-%d %H:%M}"
            )


def cli_main(argv: Sequence[str]) -> int:
    """Запуск CLI с кодом выхода вместо sys.exit"""
    command = typer.main.get_command(app)
    try:
        rv = command.main(
            args=list(argv), prog_name="phonon-metrology", standalone_mode=False
        )
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        return 1
    return rv if isinstance(rv, int) else 0
