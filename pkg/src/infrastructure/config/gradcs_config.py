"""
Configuración global de gradcs
Valores por defecto de límites de recursos, solver y salida; sobrescribibles
con variables de entorno GRADCS_* o un archivo .env
"""

from typing import Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

class GradCSSettings(BaseSettings):
    """Configuración del sistema de recuperación"""

    model_config = SettingsConfigDict(
        env_prefix="GRADCS_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Salida
    output_dir: str = "results"

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Límites de recursos
    index_set_cap: int = Field(1_000_000, ge=1)
    k_search_cap: int = Field(10_000_000, ge=1)
    ensemble_memory_budget_mb: int = Field(2048, ge=1)

    # Experimentos
    default_trials: int = Field(10, ge=1)
    error_grid_factor: int = Field(4, ge=1)
    jobs: int = Field(1, ge=1)

    # Solver
    max_iterations: int = Field(10_000, ge=1)
    feasibility_tol: float = Field(1e-9, gt=0.0)
    optimality_tol: float = Field(1e-8, gt=0.0)
    pareto_root_tol: float = Field(1e-8, gt=0.0)

    @property
    def ensemble_memory_budget_bytes(self) -> int:
        return self.ensemble_memory_budget_mb * 1024 ** 2

# Instancia global de configuración
gradcs_settings = GradCSSettings()
