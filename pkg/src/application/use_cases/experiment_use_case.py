"""
Caso de uso de barridos de experimentos
Modos × θ × m̃ × ensayos, con semillas derivadas de la semilla maestra,
filas escritas en el orden de la configuración y agregados por configuración
"""

from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import logging
from pathlib import Path
import re
from typing import Dict, Iterable, List, Optional

import numpy as np

from domain.entities.domain import (
    EnsembleExporter, IndexSet, MeasurementEnsemble, ResultWriter, SolverConfig, SolverStatus
)
from domain.services.benchmark_functions import test_function as benchmark_oracle
from domain.services.index_sets import DEFAULT_INDEX_SET_CAP, hyperbolic_cross
from domain.services.measurement import DEFAULT_MEMORY_BUDGET_BYTES, derive_seed, points_for_budget
from application.dto.experiment_dto import AggregateRow, ExperimentConfig, ResultRow, SCHEMA_VERSION
from application.use_cases.recovery_use_case import DEFAULT_ERROR_GRID_FACTOR, RecoveryUseCaseImpl

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 8

# ============================================================================
# PLANIFICACIÓN
# ============================================================================

@dataclass(frozen=True)
class ExperimentLimits:
    """Límites y valores por defecto inyectados desde la configuración"""
    solver: SolverConfig = field(default_factory=SolverConfig)
    index_set_cap: int = DEFAULT_INDEX_SET_CAP
    memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES
    error_grid_factor: int = DEFAULT_ERROR_GRID_FACTOR

@dataclass(frozen=True)
class TrialTask:
    """Un ensayo del barrido"""
    mode_index: int
    theta: float
    m_tilde: int
    trial: int
    seed: int

    def key(self, mode_label: str) -> str:
        return f"{mode_label}|theta={self.theta:g}|m_tilde={self.m_tilde}|trial={self.trial}"

def default_m_tilde_grid(n_columns: int, points: int = DEFAULT_GRID_POINTS) -> List[int]:
    """Rejilla geométrica de presupuestos en [N/4, 4N]"""
    grid = np.geomspace(max(1.0, n_columns / 4.0), 4.0 * n_columns, points)
    return sorted({max(1, int(round(value))) for value in grid})

def m_tilde_grid(config: ExperimentConfig, n_columns: int) -> List[int]:
    return list(config.m_tilde_grid) if config.m_tilde_grid else default_m_tilde_grid(n_columns)

def plan_trials(config: ExperimentConfig, n_columns: int) -> List[TrialTask]:
    """Ensayos en el orden de la configuración; cada semilla depende sólo de sus etiquetas"""
    tasks = []
    for mode_index, mode in enumerate(config.modes):
        for theta in config.thetas:
            for budget in m_tilde_grid(config, n_columns):
                for trial in range(config.trials):
                    seed = derive_seed(config.seed, "trial", mode.label, f"{theta:g}", budget, trial)
                    tasks.append(TrialTask(mode_index, theta, budget, trial, seed))
    return tasks

def error_grid_seed(config: ExperimentConfig) -> int:
    """Semilla de la rejilla de error, común a todo el lote"""
    return derive_seed(config.seed, "error-grid")

# ============================================================================
# EJECUCIÓN DE UN ENSAYO
# ============================================================================

def run_trial(config: ExperimentConfig, task: TrialTask, limits: ExperimentLimits) -> ResultRow:
    """
    Ejecuta un ensayo completo: recuperación y errores.

    Función de módulo para poder enviarse a procesos hijos.
    """
    family = config.family_domain()
    mu = config.density_domain()
    mode_spec = config.modes[task.mode_index]
    mode = mode_spec.to_domain()
    oracle = benchmark_oracle(config.function, config.d, validate=False)

    use_case = RecoveryUseCaseImpl(
        config.solver.apply(limits.solver), limits.index_set_cap, limits.memory_budget_bytes
    )
    m = points_for_budget(mode, task.m_tilde)
    result = use_case.recover(oracle, family, mu, config.d, config.s, m, mode,
                              task.theta, config.eta, task.seed)
    n_columns = len(result.approximant.index_set)
    grid_size = config.grid_size or limits.error_grid_factor * n_columns
    errors = use_case.evaluate(oracle, result.approximant, mu, grid_size, error_grid_seed(config))

    diagnostics = result.diagnostics
    return ResultRow(
        experiment=config.name, function=config.function.value, family=family.name,
        density=mu.name, d=config.d, s=config.s, mode=mode.label, theta=task.theta,
        eta=config.eta, seed=task.seed, trial=task.trial, m_budget=task.m_tilde,
        m=diagnostics.m, m_o=diagnostics.m_o, m_g=diagnostics.m_g, m_tilde=diagnostics.m_tilde,
        h1_error=errors.h1_error, linf_error=errors.linf_error,
        status=diagnostics.status.value, iterations=diagnostics.iterations,
        wall_time=diagnostics.wall_time,
    )

def _run_trial_args(args) -> ResultRow:
    return run_trial(*args)

def trial_index_set(config: ExperimentConfig, limits: ExperimentLimits) -> IndexSet:
    """Λ común a todos los ensayos del barrido"""
    family = config.family_domain()
    return hyperbolic_cross(config.d, config.s, signed=family.is_fourier,
                            max_size=limits.index_set_cap)

def trial_ensemble(config: ExperimentConfig, task: TrialTask, limits: ExperimentLimits,
                   index_set: Optional[IndexSet] = None) -> MeasurementEnsemble:
    """Reconstruye el ensamble que usó un ensayo a partir de su semilla"""
    mode = config.modes[task.mode_index].to_domain()
    oracle = benchmark_oracle(config.function, config.d, validate=False)
    use_case = RecoveryUseCaseImpl(None, limits.index_set_cap, limits.memory_budget_bytes)
    return use_case.measurement_ensemble(
        oracle, config.family_domain(), config.density_domain(),
        index_set or trial_index_set(config, limits),
        points_for_budget(mode, task.m_tilde), mode, task.seed,
    )

# ============================================================================
# AGREGADOS Y SERIES
# ============================================================================

def aggregate_rows(rows: Iterable[ResultRow]) -> List[AggregateRow]:
    """Mediana y media por (modo, θ, presupuesto) en orden de primera aparición"""
    groups: Dict[tuple, List[ResultRow]] = {}
    for row in rows:
        groups.setdefault((row.experiment, row.mode, row.theta, row.m_budget), []).append(row)

    aggregates = []
    for (experiment, mode, theta, budget), members in groups.items():
        h1 = np.array([row.h1_error for row in members])
        linf = np.array([row.linf_error for row in members])
        optimal = sum(row.status == SolverStatus.OPTIMAL.value for row in members)
        aggregates.append(AggregateRow(
            experiment=experiment, mode=mode, theta=theta, m_tilde=budget, trials=len(members),
            h1_median=float(np.median(h1)), h1_mean=float(np.mean(h1)),
            linf_median=float(np.median(linf)), linf_mean=float(np.mean(linf)),
            optimal_fraction=optimal / len(members),
        ))
    return aggregates

def series_rows(aggregates: Iterable[AggregateRow], metric: str) -> List[Dict[str, object]]:
    """Datos para figuras: x = m̃, y = mediana, una serie por modo/θ"""
    if metric not in ("h1", "linf"):
        raise ValueError(f"Métrica desconocida: {metric}")
    return [
        {
            "schema_version": SCHEMA_VERSION,
            "series": f"{row.mode}|theta={row.theta:g}",
            "m_tilde": row.m_tilde,
            "median": row.h1_median if metric == "h1" else row.linf_median,
        }
        for row in aggregates
    ]

# ============================================================================
# INTERFACES DE CASOS DE USO
# ============================================================================

@dataclass
class ExperimentOutcome:
    """Resultado de un barrido"""
    rows: List[ResultRow]
    aggregates: List[AggregateRow]
    seeds: Dict[str, int]

    def timings(self) -> List[Dict[str, object]]:
        return [
            {"mode": row.mode, "theta": row.theta, "m_budget": row.m_budget,
             "trial": row.trial, "wall_time": row.wall_time}
            for row in self.rows
        ]

class ExperimentUseCase(ABC):
    """Caso de uso de ejecución de barridos"""

    @abstractmethod
    def execute(self, config: ExperimentConfig, writer: ResultWriter) -> ExperimentOutcome:
        """Ejecuta el barrido y escribe una fila por ensayo"""
        pass

    @abstractmethod
    def export_ensembles(self, config: ExperimentConfig, exporter: EnsembleExporter,
                         directory: str) -> List[str]:
        """Exporta el ensamble del primer ensayo de cada configuración"""
        pass

# ============================================================================
# IMPLEMENTACIONES
# ============================================================================

class ExperimentUseCaseImpl(ExperimentUseCase):
    """Barrido con ejecución secuencial o en un pool de procesos"""

    def __init__(self, limits: Optional[ExperimentLimits] = None, jobs: int = 1):
        if jobs < 1:
            raise ValueError(f"jobs debe ser ≥ 1 (recibido {jobs})")
        self.limits = limits or ExperimentLimits()
        self.jobs = jobs

    def execute(self, config: ExperimentConfig, writer: ResultWriter) -> ExperimentOutcome:
        """
        Ejecuta el barrido completo.

        Las filas se escriben en el orden de la configuración, sea cual sea el
        orden en que terminen los procesos; si un ensayo falla, las filas
        anteriores ya están en disco.
        """
        # Valida el gradiente analítico una sola vez antes del barrido
        benchmark_oracle(config.function, config.d, validate=True)
        n_columns = len(trial_index_set(config, self.limits))
        tasks = plan_trials(config, n_columns)
        labels = [spec.label for spec in config.modes]
        seeds = {task.key(labels[task.mode_index]): task.seed for task in tasks}
        seeds["error_grid"] = error_grid_seed(config)
        logger.info("Experimento '%s': %d ensayos, N=%d, jobs=%d",
                    config.name, len(tasks), n_columns, self.jobs)

        rows: List[ResultRow] = []
        for row in self._results(config, tasks):
            writer.write_row(row.model_dump(include=set(ResultRow.deterministic_columns())))
            rows.append(row)

        return ExperimentOutcome(rows=rows, aggregates=aggregate_rows(rows), seeds=seeds)

    def export_ensembles(self, config: ExperimentConfig, exporter: EnsembleExporter,
                         directory: str) -> List[str]:
        """
        Un contenedor binario por (modo, θ, m̃) con el ensamble del ensayo 0.

        Returns:
            Rutas escritas, en el orden de la configuración
        """
        index_set = trial_index_set(config, self.limits)
        labels = [spec.label for spec in config.modes]
        paths = []
        for task in plan_trials(config, len(index_set)):
            if task.trial != 0:
                continue
            ensemble = trial_ensemble(config, task, self.limits, index_set)
            label = f"{labels[task.mode_index]}_theta{task.theta:g}_m{task.m_tilde}"
            stem = re.sub(r"[^A-Za-z0-9.]+", "_", label).strip("_")
            path = str(Path(directory) / f"{stem}.bin")
            exporter.export_binary(ensemble, path, task.seed)
            paths.append(path)
        logger.info("%d ensambles exportados a %s", len(paths), directory)
        return paths

    def _results(self, config: ExperimentConfig, tasks: List[TrialTask]) -> Iterable[ResultRow]:
        if self.jobs == 1:
            for task in tasks:
                yield run_trial(config, task, self.limits)
            return
        with ProcessPoolExecutor(max_workers=self.jobs) as executor:
            arguments = ((config, task, self.limits) for task in tasks)
            yield from executor.map(_run_trial_args, arguments)

def create_experiment_use_case(limits: Optional[ExperimentLimits] = None,
                               jobs: int = 1) -> ExperimentUseCase:
    """Crea el caso de uso de experimentos"""
    return ExperimentUseCaseImpl(limits, jobs)
