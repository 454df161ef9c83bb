"""
Factory para crear los casos de uso con sus límites y adaptadores
"""

from typing import Optional

from domain.entities.domain import SolverConfig
from application.use_cases.experiment_use_case import (
    ExperimentLimits, ExperimentUseCase, create_experiment_use_case
)
from application.use_cases.recovery_use_case import RecoveryUseCase, create_recovery_use_case
from application.use_cases.theory_use_case import TheoryUseCase, create_theory_use_case
from application.use_cases.validation_use_case import ValidationUseCase, create_validation_use_case
from infrastructure.adapters.csv_result_writer import CsvResultWriter
from infrastructure.adapters.ensemble_binary_exporter import EnsembleBinaryExporter
from infrastructure.adapters.index_set_text_repository import IndexSetTextRepository
from infrastructure.config.gradcs_config import GradCSSettings, gradcs_settings

class GradCSFactory:
    """Factory para crear instancias con la configuración inyectada"""

    def __init__(self, settings: Optional[GradCSSettings] = None):
        self.settings = settings or gradcs_settings

    def solver_config(self, seed: int = 0) -> SolverConfig:
        """Configuración del solver a partir de los valores por defecto"""
        return SolverConfig(
            max_iterations=self.settings.max_iterations,
            feasibility_tol=self.settings.feasibility_tol,
            optimality_tol=self.settings.optimality_tol,
            pareto_root_tol=self.settings.pareto_root_tol,
            seed=seed,
        )

    def experiment_limits(self) -> ExperimentLimits:
        return ExperimentLimits(
            solver=self.solver_config(),
            index_set_cap=self.settings.index_set_cap,
            memory_budget_bytes=self.settings.ensemble_memory_budget_bytes,
            error_grid_factor=self.settings.error_grid_factor,
        )

    def create_recovery_use_case(self) -> RecoveryUseCase:
        return create_recovery_use_case(
            self.solver_config(), self.settings.index_set_cap,
            self.settings.ensemble_memory_budget_bytes,
        )

    def create_experiment_use_case(self, jobs: Optional[int] = None) -> ExperimentUseCase:
        """
        Crea el caso de uso de barridos

        Args:
            jobs: Procesos del pool (por defecto, GRADCS_JOBS)
        """
        return create_experiment_use_case(self.experiment_limits(), jobs or self.settings.jobs)

    def create_theory_use_case(self) -> TheoryUseCase:
        return create_theory_use_case(self.settings.k_search_cap)

    def create_validation_use_case(self) -> ValidationUseCase:
        return create_validation_use_case()

    @staticmethod
    def create_result_writer(path: str) -> CsvResultWriter:
        """Crea solo el escritor CSV"""
        return CsvResultWriter(path)

    @staticmethod
    def create_index_set_repository() -> IndexSetTextRepository:
        return IndexSetTextRepository()

    @staticmethod
    def create_ensemble_exporter() -> EnsembleBinaryExporter:
        return EnsembleBinaryExporter()

# Función de conveniencia
def create_gradcs_factory(settings: Optional[GradCSSettings] = None) -> GradCSFactory:
    return GradCSFactory(settings)
