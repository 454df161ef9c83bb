"""
Interfaz de línea de comandos de gradcs

    gradcs run CONFIG.json [--seed S] [--jobs J] [--out DIR] [--export-ensembles]
    gradcs run --preset NOMBRE [--dimension D] [--trials T] ...
    gradcs theory --family legendre --d 4 --s 10 [--eps 0.1] [--csv PATH]
    gradcs validate SUITE|all

Códigos de salida: 0 éxito, 1 fallo en ejecución o validación,
2 configuración o parámetros inválidos
"""

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from application.dto.experiment_dto import ExperimentConfig, TheoryRequest
from application.use_cases.experiment_use_case import series_rows, trial_index_set
from application.use_cases.theory_use_case import format_theory_table
from application.use_cases.validation_use_case import available_suites
from domain.entities.domain import (
    ConfigurationError, GradCSDomainException, KMode, SampleComplexitySetting,
    UnsupportedParametersError
)
from infrastructure.adapters.csv_result_writer import CsvResultWriter
from infrastructure.config.gradcs_config import GradCSSettings, gradcs_settings
from infrastructure.config.gradcs_factory import GradCSFactory
from infrastructure.data.preset_experiments import get_preset_names
from infrastructure.logger.gradcs_logger import (
    gradcs_logger, gradcs_operation_logger, log_gradcs_error, log_gradcs_info, log_gradcs_warning
)
from infrastructure.services.experiment_loader_service import create_experiment_loader_service

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

# ============================================================================
# PARSER
# ============================================================================

def build_parser(settings: GradCSSettings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradcs",
        description="Recuperación dispersa de polinomios con muestras de gradiente",
    )
    parser.add_argument("--log-level", default=settings.log_level,
                        help="Nivel de log (DEBUG, INFO, WARNING...)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Ejecuta un barrido de experimentos")
    run.add_argument("config", nargs="?", help="Archivo JSON de configuración")
    run.add_argument("--preset", choices=get_preset_names(), help="Experimento precargado")
    run.add_argument("--dimension", type=int, default=None,
                     help="Escala de referencia del preajuste (4, 8 o 12)")
    run.add_argument("--trials", type=int, default=None, help="Ensayos por configuración")
    run.add_argument("--seed", type=int, default=None, help="Semilla maestra")
    run.add_argument("--jobs", type=int, default=None, help="Procesos en paralelo")
    run.add_argument("--out", default=None, help="Directorio de salida")
    run.add_argument("--export-ensembles", action="store_true",
                     help="Guarda Λ (index_set.txt) y el ensamble del ensayo 0 de cada configuración")

    theory = sub.add_parser("theory", help="Complejidad muestral teórica")
    theory.add_argument("--config", default=None, help="Petición en JSON (sustituye a los flags)")
    theory.add_argument("--family", default="legendre",
                        choices=["legendre", "chebyshev", "jacobi", "fourier"])
    theory.add_argument("--alpha", type=float, default=0.0)
    theory.add_argument("--beta", type=float, default=0.0)
    theory.add_argument("--density", default="match", choices=["match", "chebyshev", "uniform"])
    theory.add_argument("--d", type=int, required=False, default=None)
    theory.add_argument("--s", type=int, required=False, default=None)
    theory.add_argument("--eps", type=float, default=0.1)
    theory.add_argument("--settings", nargs="+", default=None,
                        choices=[setting.value for setting in SampleComplexitySetting])
    theory.add_argument("--k-mode", default=KMode.EXACT.value, choices=[mode.value for mode in KMode])
    theory.add_argument("--n-columns", type=int, default=None)
    theory.add_argument("--csv", default=None, help="Escribe además la tabla en CSV")

    validate = sub.add_parser("validate", help="Ejecuta suites de validación")
    validate.add_argument("suite", help=f"Una de: {', '.join(available_suites())}")
    validate.add_argument("--out", default=None, help="Escribe el informe en CSV")
    return parser

# ============================================================================
# COMANDOS
# ============================================================================

def _load_experiment(args, settings: GradCSSettings) -> ExperimentConfig:
    loader = create_experiment_loader_service()
    if args.preset and args.config:
        raise ConfigurationError("Use un archivo de configuración o --preset, no ambos")
    if args.preset:
        config = loader.load_preset(args.preset, args.dimension, trials=args.trials or settings.default_trials)
    elif args.config:
        config = loader.load_file(args.config)
    else:
        raise ConfigurationError("Falta el archivo de configuración o --preset")
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        try:
            config = ExperimentConfig.model_validate({**config.model_dump(), **overrides})
        except ValidationError as e:
            raise ConfigurationError("Opciones de línea de comandos inválidas", [str(e)]) from None
    return config

def _write_csv(path: Path, rows: List[dict]) -> None:
    with CsvResultWriter(str(path)) as writer:
        writer.write_rows(rows)

@gradcs_operation_logger("run")
def cmd_run(args, factory: GradCSFactory) -> int:
    config = _load_experiment(args, factory.settings)
    if args.jobs is not None and args.jobs < 1:
        raise ConfigurationError(f"--jobs debe ser ≥ 1 (recibido {args.jobs})")
    out_dir = Path(args.out or factory.settings.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")

    use_case = factory.create_experiment_use_case(args.jobs)
    writer = factory.create_result_writer(str(out_dir / "results.csv"))
    try:
        outcome = use_case.execute(config, writer)
    finally:
        writer.close()

    _write_csv(out_dir / "aggregate.csv", [row.model_dump() for row in outcome.aggregates])
    _write_csv(out_dir / "series_h1.csv", series_rows(outcome.aggregates, "h1"))
    _write_csv(out_dir / "series_linf.csv", series_rows(outcome.aggregates, "linf"))
    _write_csv(out_dir / "timings.csv", outcome.timings())
    (out_dir / "seeds.json").write_text(json.dumps(outcome.seeds, indent=2, sort_keys=True) + "\n",
                                        encoding="utf-8")
    if args.export_ensembles:
        index_set = trial_index_set(config, factory.experiment_limits())
        factory.create_index_set_repository().save_index_set(index_set, str(out_dir / "index_set.txt"))
        exporter = factory.create_ensemble_exporter()
        use_case.export_ensembles(config, exporter, str(out_dir / "ensembles"))
    log_gradcs_info(
        f"✅ {len(outcome.rows)} ensayos escritos en {out_dir} ({len(outcome.aggregates)} configuraciones)"
    )
    return EXIT_OK

@gradcs_operation_logger("theory")
def cmd_theory(args, factory: GradCSFactory) -> int:
    if args.config:
        loader = create_experiment_loader_service()
        request = loader.load_theory_request(Path(args.config).read_text(encoding="utf-8"), args.config)
    else:
        if args.d is None or args.s is None:
            raise ConfigurationError("theory requiere --d y --s (o --config)")
        payload = {
            "family": {"kind": args.family, "alpha": args.alpha, "beta": args.beta},
            "density": args.density, "d": args.d, "s": args.s, "eps": args.eps,
            "k_mode": args.k_mode, "n_columns": args.n_columns,
        }
        if args.settings:
            payload["settings"] = args.settings
        try:
            request = TheoryRequest.model_validate(payload)
        except ValidationError as e:
            raise ConfigurationError("Parámetros teóricos inválidos",
                                     [f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors()]) from None

    rows = factory.create_theory_use_case().execute(request)
    print(format_theory_table(rows))
    if args.csv:
        flat = []
        for row in rows:
            record = row.model_dump(exclude={"factors"})
            record["factors"] = ";".join(f"{name}={value!r}" for name, value in row.factors.items())
            flat.append(record)
        _write_csv(Path(args.csv), flat)
    return EXIT_OK

@gradcs_operation_logger("validate")
def cmd_validate(args, factory: GradCSFactory) -> int:
    checks = factory.create_validation_use_case().execute(args.suite)
    for check in checks:
        print(check.to_line())
    if args.out:
        _write_csv(Path(args.out), [check.model_dump() for check in checks])
    failed = [check for check in checks if not check.passed]
    if failed:
        log_gradcs_warning(f"❌ {len(failed)} de {len(checks)} comprobaciones fallidas")
        return EXIT_FAILURE
    log_gradcs_info(f"✅ {len(checks)} comprobaciones superadas")
    return EXIT_OK

COMMANDS = {"run": cmd_run, "theory": cmd_theory, "validate": cmd_validate}

# ============================================================================
# ENTRADA
# ============================================================================

def main(argv: Optional[List[str]] = None, settings: Optional[GradCSSettings] = None) -> int:
    """Función principal de la CLI; retorna el código de salida"""
    settings = settings or gradcs_settings
    parser = build_parser(settings)
    args = parser.parse_args(argv)

    gradcs_logger.set_level(args.log_level)
    if settings.log_file:
        gradcs_logger.add_file_handler(settings.log_file)
    gradcs_logger.set_context(command=args.command, started_at=time.time())

    factory = GradCSFactory(settings)
    try:
        return COMMANDS[args.command](args, factory)
    except (ConfigurationError, UnsupportedParametersError) as e:
        print(f"error: {e}", file=sys.stderr)
        for line in getattr(e, "diagnostics", []):
            print(f"  {line}", file=sys.stderr)
        return EXIT_CONFIG
    except GradCSDomainException as e:
        log_gradcs_error("Fallo en la ejecución", e)
        return EXIT_FAILURE
    except KeyboardInterrupt:
        log_gradcs_warning("Interrumpido por el usuario; resultados parciales en disco")
        return EXIT_FAILURE
    except Exception as e:
        log_gradcs_error("Error inesperado", e, include_traceback=True)
        return EXIT_FAILURE

if __name__ == "__main__":
    sys.exit(main())
