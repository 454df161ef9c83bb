"""
DTOs (Data Transfer Objects) para experimentos, cálculos teóricos y validación
"""

from dataclasses import replace
from typing import Dict, List, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from domain.entities.domain import (
    BasisFamily, BenchmarkFunction, Density, DensityKind, KMode, SampleComplexitySetting,
    SamplingKind, SamplingMode, SolverConfig
)

SCHEMA_VERSION = 1

# ============================================================================
# ESPECIFICACIONES DE PARÁMETROS
# ============================================================================

class FamilySpec(BaseModel):
    """DTO para la familia de la base"""
    model_config = ConfigDict(extra="forbid")

    kind: str = Field("legendre", description="legendre, chebyshev, jacobi o fourier")
    alpha: float = Field(0.0, description="Parámetro α de Jacobi", gt=-1.0)
    beta: float = Field(0.0, description="Parámetro β de Jacobi", gt=-1.0)

    @field_validator("kind")
    @classmethod
    def _known_kind(cls, value: str) -> str:
        value = value.lower()
        if value not in ("legendre", "chebyshev", "jacobi", "fourier"):
            raise ValueError(f"Familia desconocida: {value}")
        return value

    def to_domain(self) -> BasisFamily:
        if self.kind == "legendre":
            return BasisFamily.legendre()
        if self.kind == "chebyshev":
            return BasisFamily.chebyshev()
        if self.kind == "fourier":
            return BasisFamily.fourier()
        return BasisFamily.jacobi(self.alpha, self.beta)

class ModeSpec(BaseModel):
    """DTO para un modo de muestreo"""
    model_config = ConfigDict(extra="forbid")

    kind: SamplingKind = Field(SamplingKind.FULL_GRADIENT, description="Modo de adquisición")
    fraction: float = Field(1.0, description="Fracción p del modo fraccional", ge=0.0, le=1.0)
    random_subset: bool = Field(False, description="Subconjunto aleatorio de puntos con gradiente")

    def to_domain(self) -> SamplingMode:
        return SamplingMode(self.kind, self.fraction, self.random_subset)

    @property
    def label(self) -> str:
        return self.to_domain().label

class SolverOverrides(BaseModel):
    """DTO para sobrescribir parámetros del solver"""
    model_config = ConfigDict(extra="forbid")

    max_iterations: Optional[int] = Field(None, ge=1)
    feasibility_tol: Optional[float] = Field(None, gt=0.0)
    optimality_tol: Optional[float] = Field(None, gt=0.0)
    pareto_root_tol: Optional[float] = Field(None, gt=0.0)
    polish: Optional[bool] = None

    def apply(self, base: SolverConfig) -> SolverConfig:
        return replace(base, **self.model_dump(exclude_none=True))

# ============================================================================
# CONFIGURACIÓN DE EXPERIMENTO
# ============================================================================

class ExperimentConfig(BaseModel):
    """DTO de un barrido modos × θ × m̃ × ensayos"""
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "name": "exp_f3_legendre",
                "function": "F3",
                "family": {"kind": "legendre"},
                "density": "match",
                "d": 4,
                "s": 10,
                "modes": [{"kind": "unaugmented"}, {"kind": "full_gradient"}],
                "thetas": [1.0],
                "trials": 10,
                "seed": 1234,
            }
        },
    )

    name: str = Field("experiment", description="Nombre del experimento", min_length=1, max_length=100)
    function: BenchmarkFunction = Field(BenchmarkFunction.F3, description="Función objetivo")
    family: FamilySpec = Field(default_factory=FamilySpec, description="Familia de la base")
    density: DensityKind = Field(DensityKind.MATCH_ORTHOGONALITY, description="Densidad de muestreo")
    d: int = Field(..., description="Dimensión", ge=1, le=64)
    s: int = Field(..., description="Orden de la cruz hiperbólica", ge=1)
    modes: List[ModeSpec] = Field(default_factory=lambda: [ModeSpec()], min_length=1)
    thetas: List[float] = Field(default_factory=lambda: [1.0], min_length=1,
                                description="Exponentes θ de los pesos w = u^θ")
    m_tilde_grid: Optional[List[int]] = Field(
        None, description="Presupuestos m̃; por defecto 8 puntos geométricos en [N/4, 4N]"
    )
    trials: int = Field(10, description="Ensayos por configuración", ge=1)
    seed: int = Field(0, description="Semilla maestra", ge=0)
    eta: float = Field(1e-12, description="Tolerancia de residuo η del BPDN", ge=0.0)
    grid_size: Optional[int] = Field(None, description="Puntos de la rejilla de error", ge=1)
    solver: SolverOverrides = Field(default_factory=SolverOverrides)

    @field_validator("thetas")
    @classmethod
    def _nonnegative_thetas(cls, value: List[float]) -> List[float]:
        if any(theta < 0 for theta in value):
            raise ValueError("Los exponentes θ deben ser ≥ 0")
        return value

    @field_validator("m_tilde_grid")
    @classmethod
    def _positive_budgets(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (not value or any(m < 1 for m in value)):
            raise ValueError("La rejilla m̃ debe contener presupuestos ≥ 1")
        return value

    @model_validator(mode="after")
    def _check_function_dimension(self) -> "ExperimentConfig":
        if self.function == BenchmarkFunction.F2 and self.d % 2:
            raise ValueError(f"F2 requiere dimensión par (recibido d={self.d})")
        if self.family.kind == "fourier" and self.density == DensityKind.CHEBYSHEV_ARCSINE:
            raise ValueError("La base de Fourier sólo admite muestreo uniforme")
        return self

    def family_domain(self) -> BasisFamily:
        return self.family.to_domain()

    def density_domain(self) -> Density:
        family = self.family_domain()
        if self.density == DensityKind.MATCH_ORTHOGONALITY:
            return Density.matching(family)
        return Density(self.density)

# ============================================================================
# FILAS DE RESULTADOS
# ============================================================================

class ResultRow(BaseModel):
    """Una fila por ensayo; m̃ = m_o + m_g"""
    schema_version: int = SCHEMA_VERSION
    experiment: str
    function: str
    family: str
    density: str
    d: int
    s: int
    mode: str
    theta: float
    eta: float
    seed: int
    trial: int
    m_budget: int = Field(..., description="Presupuesto m̃ pedido en la rejilla")
    m: int
    m_o: int
    m_g: int
    m_tilde: int
    h1_error: float
    linf_error: float
    status: str
    iterations: int
    wall_time: float = Field(0.0, description="Tiempo de pared; se escribe en timings.csv")

    @model_validator(mode="after")
    def _check_cost(self) -> "ResultRow":
        if self.m_tilde != self.m_o + self.m_g:
            raise ValueError(f"m̃={self.m_tilde} ≠ m_o + m_g = {self.m_o + self.m_g}")
        return self

    @classmethod
    def deterministic_columns(cls) -> List[str]:
        return [name for name in cls.model_fields if name != "wall_time"]

class AggregateRow(BaseModel):
    """Mediana y media por configuración (modo, θ, m̃)"""
    schema_version: int = SCHEMA_VERSION
    experiment: str
    mode: str
    theta: float
    m_tilde: int
    trials: int
    h1_median: float
    h1_mean: float
    linf_median: float
    linf_mean: float
    optimal_fraction: float

# ============================================================================
# TEORÍA Y VALIDACIÓN
# ============================================================================

class TheoryRequest(BaseModel):
    """DTO para el cálculo de complejidad muestral"""
    model_config = ConfigDict(extra="forbid")

    family: FamilySpec = Field(default_factory=FamilySpec)
    density: DensityKind = Field(DensityKind.MATCH_ORTHOGONALITY)
    d: int = Field(..., ge=1)
    s: int = Field(..., ge=1)
    eps: float = Field(0.1, gt=0.0, lt=1.0, description="Probabilidad de fallo ε")
    settings: List[SampleComplexitySetting] = Field(
        default_factory=lambda: [SampleComplexitySetting.GRADIENT_AUGMENTED,
                                 SampleComplexitySetting.UNAUGMENTED]
    )
    k_mode: KMode = Field(KMode.EXACT)
    n_columns: Optional[int] = Field(None, ge=1)

    def family_domain(self) -> BasisFamily:
        return self.family.to_domain()

    def density_domain(self) -> Density:
        if self.density == DensityKind.MATCH_ORTHOGONALITY:
            return Density.matching(self.family_domain())
        return Density(self.density)

class TheoryRow(BaseModel):
    """Una fila de la tabla teórica"""
    family: str
    density: str
    d: int
    s: int
    eps: float
    setting: str
    value: float
    factors: Dict[str, float]

class ValidationCheck(BaseModel):
    """Una línea del informe de validación"""
    suite: str
    name: str
    measured: float
    threshold: float
    passed: bool

    def to_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.suite}\t{self.name}\tmeasured={self.measured:.6g}\t"
                f"threshold={self.threshold:.6g}\t{status}")
