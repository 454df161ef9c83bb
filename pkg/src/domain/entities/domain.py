from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

MultiIndex = Tuple[int, ...]
WeightMap = Mapping[MultiIndex, float]

# ============================================================================
# ENUMERACIONES DEL DOMINIO
# ============================================================================

class BasisKind(str, Enum):
    """Familias de autofunciones de Sturm-Liouville soportadas"""
    JACOBI = "jacobi"
    FOURIER = "fourier"

class DensityKind(str, Enum):
    """Densidades de muestreo"""
    MATCH_ORTHOGONALITY = "match"
    CHEBYSHEV_ARCSINE = "chebyshev"
    UNIFORM = "uniform"

class SamplingKind(str, Enum):
    """Modos de adquisición de muestras"""
    UNAUGMENTED = "unaugmented"
    FULL_GRADIENT = "full_gradient"
    FRACTIONAL_GRADIENT = "fractional_gradient"
    INDEPENDENT_GRADIENT = "independent_gradient"

class KMode(str, Enum):
    """Forma de calcular K(s): búsqueda exacta o cota cerrada"""
    EXACT = "exact"
    BOUND = "bound"

class CoherenceKind(str, Enum):
    UPSILON = "upsilon"
    GAMMA1 = "gamma1"
    GAMMA2 = "gamma2"

class SolverStatus(str, Enum):
    OPTIMAL = "optimal"
    ITERATION_LIMIT = "iteration_limit"
    INFEASIBLE = "infeasible"

class SampleComplexitySetting(str, Enum):
    """Escenarios de complejidad muestral"""
    GRADIENT_AUGMENTED = "gradient_augmented"
    UNAUGMENTED = "unaugmented"
    JACOBI_CLOSED_FORM = "jacobi_closed_form"
    LEGENDRE_PRECONDITIONED = "legendre_preconditioned"
    FOURIER = "fourier"

class BenchmarkFunction(str, Enum):
    """Funciones objetivo de los experimentos"""
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"

# ============================================================================
# ENTIDADES DE DOMINIO: BASES Y DENSIDADES
# ============================================================================

@dataclass(frozen=True)
class BasisFamily:
    """
    Descriptor de una base unidimensional ortonormal.

    Jacobi(α, β) sobre (−1, 1) con α, β > −1, o Fourier exp(iπny) sobre [−1, 1).
    Legendre = Jacobi(0, 0) y Chebyshev = Jacobi(−1/2, −1/2).
    """
    kind: BasisKind = BasisKind.JACOBI
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", BasisKind(self.kind))
        if self.kind == BasisKind.FOURIER:
            object.__setattr__(self, "alpha", 0.0)
            object.__setattr__(self, "beta", 0.0)
            return
        alpha, beta = float(self.alpha), float(self.beta)
        if not (math.isfinite(alpha) and math.isfinite(beta)) or alpha <= -1 or beta <= -1:
            raise DomainParameterError(
                f"Jacobi requiere α, β > −1 (recibido α={self.alpha}, β={self.beta})"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def legendre(cls) -> "BasisFamily":
        return cls(BasisKind.JACOBI, 0.0, 0.0)

    @classmethod
    def chebyshev(cls) -> "BasisFamily":
        return cls(BasisKind.JACOBI, -0.5, -0.5)

    @classmethod
    def jacobi(cls, alpha: float, beta: float) -> "BasisFamily":
        return cls(BasisKind.JACOBI, alpha, beta)

    @classmethod
    def fourier(cls) -> "BasisFamily":
        return cls(BasisKind.FOURIER)

    @property
    def is_fourier(self) -> bool:
        return self.kind == BasisKind.FOURIER

    @property
    def is_legendre(self) -> bool:
        return not self.is_fourier and self.alpha == 0.0 and self.beta == 0.0

    @property
    def is_chebyshev(self) -> bool:
        return not self.is_fourier and self.alpha == -0.5 and self.beta == -0.5

    @property
    def name(self) -> str:
        if self.is_fourier:
            return "fourier"
        if self.is_legendre:
            return "legendre"
        if self.is_chebyshev:
            return "chebyshev"
        return f"jacobi({self.alpha:g},{self.beta:g})"

@dataclass(frozen=True)
class Density:
    """
    Densidad de probabilidad de muestreo μ (producto tensorial por coordenada).

    MATCH_ORTHOGONALITY guarda (α, β) de la familia: coincide con ν.
    """
    kind: DensityKind = DensityKind.UNIFORM
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DensityKind(self.kind))
        if self.kind != DensityKind.MATCH_ORTHOGONALITY:
            object.__setattr__(self, "alpha", 0.0)
            object.__setattr__(self, "beta", 0.0)
        elif self.alpha <= -1 or self.beta <= -1:
            raise DomainParameterError("La densidad de ortogonalidad requiere α, β > −1")

    @classmethod
    def uniform(cls) -> "Density":
        return cls(DensityKind.UNIFORM)

    @classmethod
    def chebyshev(cls) -> "Density":
        return cls(DensityKind.CHEBYSHEV_ARCSINE)

    @classmethod
    def matching(cls, family: BasisFamily) -> "Density":
        """Densidad de ortogonalidad ν de la familia"""
        if family.is_fourier:
            return cls.uniform()
        return cls(DensityKind.MATCH_ORTHOGONALITY, family.alpha, family.beta)

    @property
    def law(self) -> str:
        """Ley concreta: 'uniform', 'arcsine' o 'beta'"""
        if self.kind == DensityKind.UNIFORM:
            return "uniform"
        if self.kind == DensityKind.CHEBYSHEV_ARCSINE:
            return "arcsine"
        if self.alpha == 0.0 and self.beta == 0.0:
            return "uniform"
        if self.alpha == -0.5 and self.beta == -0.5:
            return "arcsine"
        return "beta"

    def same_law(self, other: "Density") -> bool:
        if self.law != other.law:
            return False
        if self.law == "beta":
            return (self.alpha, self.beta) == (other.alpha, other.beta)
        return True

    def matches(self, family: BasisFamily) -> bool:
        """True si μ = ν para la familia dada"""
        return self.same_law(Density.matching(family))

    @property
    def name(self) -> str:
        law = self.law
        return f"beta({self.alpha:g},{self.beta:g})" if law == "beta" else law

@dataclass(frozen=True)
class SamplingMode:
    """Modo de muestreo: sin gradiente, gradiente completo, fraccional o independiente"""
    kind: SamplingKind = SamplingKind.FULL_GRADIENT
    fraction: float = 1.0
    random_subset: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", SamplingKind(self.kind))
        if self.kind == SamplingKind.FRACTIONAL_GRADIENT:
            if not 0.0 <= float(self.fraction) <= 1.0:
                raise DomainParameterError(f"La fracción p debe estar en [0, 1] (recibido {self.fraction})")
            object.__setattr__(self, "fraction", float(self.fraction))
        else:
            object.__setattr__(self, "fraction", 0.0 if self.kind == SamplingKind.UNAUGMENTED else 1.0)
            object.__setattr__(self, "random_subset", False)

    @classmethod
    def unaugmented(cls) -> "SamplingMode":
        return cls(SamplingKind.UNAUGMENTED)

    @classmethod
    def full_gradient(cls) -> "SamplingMode":
        return cls(SamplingKind.FULL_GRADIENT)

    @classmethod
    def fractional(cls, fraction: float, random_subset: bool = False) -> "SamplingMode":
        return cls(SamplingKind.FRACTIONAL_GRADIENT, fraction, random_subset)

    @classmethod
    def independent_gradient(cls) -> "SamplingMode":
        return cls(SamplingKind.INDEPENDENT_GRADIENT)

    def gradient_count(self, m: int) -> int:
        """Número m_g de puntos con gradiente para m puntos de función"""
        if self.kind == SamplingKind.UNAUGMENTED:
            return 0
        if self.kind == SamplingKind.FRACTIONAL_GRADIENT:
            # round() evita que 0.1*30 = 3.0000000000000004 suba a 4
            return min(m, math.ceil(round(self.fraction * m, 9)))
        return m

    def cost(self, m: int) -> Tuple[int, int, int]:
        """(m_o, m_g, m̃) según el modelo de coste m̃ = m_o + m_g"""
        m_g = self.gradient_count(m)
        return m, m_g, m + m_g

    @property
    def label(self) -> str:
        if self.kind == SamplingKind.FRACTIONAL_GRADIENT:
            return f"fractional_gradient({self.fraction:g})"
        return self.kind.value

# ============================================================================
# ENTIDADES DE DOMINIO: CONJUNTOS DE ÍNDICES
# ============================================================================

def graded_order_key(index: MultiIndex) -> Tuple[int, MultiIndex]:
    """Clave del orden lexicográfico graduado"""
    return sum(abs(k) for k in index), tuple(index)

@dataclass(frozen=True, eq=False)
class IndexSet:
    """Conjunto finito y ordenado de multi-índices d-dimensionales sin duplicados"""
    dimension: int
    indices: Tuple[MultiIndex, ...]
    _positions: Dict[MultiIndex, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise DomainParameterError(f"La dimensión debe ser ≥ 1 (recibido {self.dimension})")
        normalized = tuple(tuple(int(k) for k in n) for n in self.indices)
        positions: Dict[MultiIndex, int] = {}
        for position, index in enumerate(normalized):
            if len(index) != self.dimension:
                raise DomainParameterError(
                    f"Multi-índice {index} no tiene dimensión {self.dimension}"
                )
            if index in positions:
                raise DomainParameterError(f"Multi-índice duplicado: {index}")
            positions[index] = position
        object.__setattr__(self, "indices", normalized)
        object.__setattr__(self, "_positions", positions)

    @classmethod
    def from_indices(cls, dimension: int, indices, sort: bool = True) -> "IndexSet":
        items = [tuple(int(k) for k in n) for n in indices]
        if sort:
            items = sorted(set(items), key=graded_order_key)
        return cls(dimension, tuple(items))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.indices)

    def __contains__(self, index) -> bool:
        return tuple(index) in self._positions

    def __getitem__(self, position: int) -> MultiIndex:
        return self.indices[position]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexSet):
            return NotImplemented
        return self.dimension == other.dimension and self.indices == other.indices

    def __hash__(self) -> int:
        return hash((self.dimension, self.indices))

    def position(self, index: MultiIndex) -> int:
        try:
            return self._positions[tuple(index)]
        except KeyError:
            raise DomainParameterError(f"{tuple(index)} no pertenece al conjunto de índices") from None

    def as_array(self) -> np.ndarray:
        """Matriz entera N×d"""
        if not self.indices:
            return np.zeros((0, self.dimension), dtype=int)
        return np.asarray(self.indices, dtype=int)

    def as_set(self) -> frozenset:
        return frozenset(self.indices)

    @property
    def max_degree(self) -> int:
        if not self.indices:
            return 0
        return int(np.abs(self.as_array()).max())

@dataclass(frozen=True)
class LowerApproximation:
    """Resultado de la mejor aproximación de s términos en conjuntos inferiores"""
    index_set: IndexSet
    sigma: float
    exact: bool

# ============================================================================
# ENTIDADES DE DOMINIO: MEDICIONES
# ============================================================================

@dataclass(frozen=True, eq=False)
class SampleSet:
    """Puntos de muestreo m×d estrictamente interiores al dominio"""
    points: np.ndarray
    density: Density
    seed: Optional[int] = None

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1])

@dataclass(frozen=True, eq=False)
class MeasurementEnsemble:
    """
    Sistema lineal escalado A = ĀQ⁻¹ con su lado derecho.

    Las filas se apilan por bloques: k=0 (función) y k=1..d (derivadas parciales).
    `block_sizes` da el número de filas de cada bloque.
    """
    a_bar: np.ndarray
    q: np.ndarray
    matrix: np.ndarray
    rhs: np.ndarray
    mode: SamplingMode
    index_set: IndexSet
    points: SampleSet
    gradient_points: Optional[SampleSet]
    block_sizes: Tuple[int, ...]
    m_o: int
    m_g: int

    @property
    def m_tilde(self) -> int:
        return self.m_o + self.m_g

    @property
    def rows(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def columns(self) -> int:
        return int(self.matrix.shape[1])

@dataclass(frozen=True)
class CoherenceEstimate:
    """Estimación numérica (cota inferior) de una coherencia local"""
    kind: CoherenceKind
    value: float
    converged: bool
    evaluations: int

# ============================================================================
# ENTIDADES DE DOMINIO: OPTIMIZACIÓN
# ============================================================================

@dataclass(frozen=True)
class SolverConfig:
    """Parámetros del solver BPDN ponderado"""
    max_iterations: int = 10000
    feasibility_tol: float = 1e-9
    optimality_tol: float = 1e-8
    pareto_root_tol: float = 1e-8
    seed: int = 0
    line_search_window: int = 10
    max_newton_steps: int = 100
    polish: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DomainParameterError("max_iterations debe ser ≥ 1")
        for name in ("feasibility_tol", "optimality_tol", "pareto_root_tol"):
            if not getattr(self, name) > 0:
                raise DomainParameterError(f"{name} debe ser > 0")
        if self.line_search_window < 1:
            raise DomainParameterError("line_search_window debe ser ≥ 1")

@dataclass(frozen=True, eq=False)
class BPDNProblem:
    """min ‖z‖_{1,w} sujeto a ‖Az − y‖₂ ≤ η"""
    matrix: np.ndarray
    rhs: np.ndarray
    weights: np.ndarray
    eta: float = 0.0

    def __post_init__(self):
        matrix = np.atleast_2d(np.asarray(self.matrix))
        rhs = np.asarray(self.rhs).reshape(-1)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if matrix.shape[0] != rhs.shape[0]:
            raise DomainParameterError(
                f"Dimensiones incompatibles: A es {matrix.shape}, y tiene {rhs.shape[0]} entradas"
            )
        if matrix.shape[1] != weights.shape[0]:
            raise DomainParameterError(
                f"Dimensiones incompatibles: A tiene {matrix.shape[1]} columnas, w tiene {weights.shape[0]}"
            )
        if not self.eta >= 0:
            raise DomainParameterError(f"η debe ser ≥ 0 (recibido {self.eta})")
        if weights.size and weights.min() < 1.0 - 1e-12:
            raise DomainParameterError("Los pesos de optimización deben ser ≥ 1")
        if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(rhs))):
            raise DomainParameterError("A e y deben ser finitos")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "eta", float(self.eta))

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.matrix) or np.iscomplexobj(self.rhs)

@dataclass(frozen=True, eq=False)
class SolverResult:
    """Solución del BPDN ponderado con diagnósticos"""
    z: np.ndarray
    residual_norm: float
    objective: float
    iterations: int
    status: SolverStatus
    tau: float = 0.0
    pareto_path: Tuple[Tuple[float, float], ...] = ()
    polished: bool = False

@dataclass(frozen=True)
class SolverTraceRow:
    """Una fila de la traza del solver"""
    iteration: int
    tau: float
    residual: float
    objective: float

# ============================================================================
# ENTIDADES DE DOMINIO: RECUPERACIÓN
# ============================================================================

@dataclass(frozen=True, eq=False)
class Approximant:
    """Coeficientes recuperados x̂ sobre Λ, alineados con el orden de Λ"""
    family: BasisFamily
    index_set: IndexSet
    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients).reshape(-1)
        if coefficients.shape[0] != len(self.index_set):
            raise DomainParameterError(
                f"Se esperaban {len(self.index_set)} coeficientes, recibidos {coefficients.shape[0]}"
            )
        if not np.all(np.isfinite(coefficients)):
            raise DomainParameterError("Los coeficientes deben ser finitos")
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def dimension(self) -> int:
        return self.index_set.dimension

    def as_mapping(self) -> Dict[MultiIndex, complex]:
        return {index: self.coefficients[i] for i, index in enumerate(self.index_set)}

@dataclass(frozen=True, eq=False)
class FunctionOracle:
    """
    Función objetivo con gradiente analítico.

    `value` recibe puntos m×d y devuelve m valores; `gradient` devuelve m×d.
    """
    name: str
    dimension: int
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    analytic_gradient: bool = True

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        try:
            values = np.asarray(self.value(points))
        except Exception as e:
            raise OracleEvaluationError(f"Fallo al evaluar el oráculo '{self.name}': {e}") from e
        if values.shape != (points.shape[0],):
            raise OracleEvaluationError(
                f"El oráculo '{self.name}' devolvió forma {values.shape}, se esperaba ({points.shape[0]},)"
            )
        return values

    def evaluate_gradient(self, points: np.ndarray) -> np.ndarray:
        if self.gradient is None:
            raise OracleEvaluationError(f"El oráculo '{self.name}' no dispone de gradiente")
        points = np.atleast_2d(points)
        try:
            values = np.asarray(self.gradient(points))
        except Exception as e:
            raise OracleEvaluationError(f"Fallo al evaluar el gradiente de '{self.name}': {e}") from e
        if values.shape != points.shape:
            raise OracleEvaluationError(
                f"El gradiente de '{self.name}' devolvió forma {values.shape}, se esperaba {points.shape}"
            )
        return values

@dataclass(frozen=True)
class MonteCarloEstimate:
    """Estimación Monte Carlo con su error estándar"""
    value: float
    standard_error: float
    grid_size: int
    seed: Optional[int]

@dataclass(frozen=True)
class ErrorReport:
    """Errores H̃¹ y L∞ de un aproximante"""
    h1_error: float
    linf_error: float
    grid_size: int
    seed: Optional[int]
    trials: int = 1

    def __post_init__(self):
        if self.h1_error < 0 or self.linf_error < 0:
            raise DomainParameterError("Los errores deben ser no negativos")

@dataclass(frozen=True)
class RecoveryDiagnostics:
    """Diagnósticos de una recuperación"""
    m: int
    m_o: int
    m_g: int
    m_tilde: int
    status: SolverStatus
    iterations: int
    residual_norm: float
    objective: float
    wall_time: float
    seed: Optional[int]

@dataclass(frozen=True, eq=False)
class RecoveryResult:
    approximant: Approximant
    diagnostics: RecoveryDiagnostics
    weights: np.ndarray

@dataclass(frozen=True)
class SampleComplexityEstimate:
    """Lado derecho de una cota de complejidad muestral (constante universal = 1)"""
    setting: SampleComplexitySetting
    value: float
    factors: Dict[str, float] = field(default_factory=dict)

# ============================================================================
# INTERFACES/PUERTOS
# ============================================================================

class ResultWriter(ABC):
    """Puerto para persistir filas de resultados"""

    @abstractmethod
    def write_row(self, row: Mapping[str, Any]) -> None:
        """Escribe una fila y la vuelca a disco"""
        pass

    @abstractmethod
    def close(self) -> None:
        pass

class IndexSetRepository(ABC):
    """Puerto para guardar y leer conjuntos de índices y aproximantes"""

    @abstractmethod
    def save_index_set(self, index_set: IndexSet, path: str) -> None:
        pass

    @abstractmethod
    def load_index_set(self, path: str) -> IndexSet:
        pass

    @abstractmethod
    def save_approximant(self, approximant: Approximant, path: str) -> None:
        pass

    @abstractmethod
    def load_approximant(self, path: str, family: BasisFamily) -> Approximant:
        pass

class EnsembleExporter(ABC):
    """Puerto para exportar ensambles de medición"""

    @abstractmethod
    def export_binary(self, ensemble: MeasurementEnsemble, path: str, seed: Optional[int] = None) -> None:
        pass

    @abstractmethod
    def export_csv(self, ensemble: MeasurementEnsemble, path: str) -> None:
        pass

# ============================================================================
# EXCEPCIONES DE DOMINIO
# ============================================================================

class GradCSDomainException(Exception):
    """Excepción base del dominio"""
    pass

class DomainParameterError(GradCSDomainException, ValueError):
    """Parámetro fuera de rango (grado negativo, α ≤ −1, punto fuera del dominio...)"""
    pass

class UnsupportedParametersError(GradCSDomainException):
    """Parámetros no cubiertos por una cota cerrada"""
    pass

class ResourceLimitError(GradCSDomainException):
    """Se superaría un límite de recursos configurado"""
    pass

class IndexSetTooLargeError(ResourceLimitError):
    pass

class SearchBudgetExceededError(ResourceLimitError):
    pass

class EnsembleTooLargeError(ResourceLimitError):
    pass

class DivergentSupremumError(GradCSDomainException):
    """El supremo en malla sigue creciendo al refinar"""
    pass

class MissingWeightError(GradCSDomainException, KeyError):
    """Falta el peso de un multi-índice"""
    pass

class EmptyIndexSetError(GradCSDomainException):
    pass

class OracleEvaluationError(GradCSDomainException):
    """Fallo al evaluar una función objetivo o su gradiente"""
    pass

class OracleValidationError(GradCSDomainException):
    """El gradiente analítico no coincide con diferencias finitas"""
    pass

class ConfigurationError(GradCSDomainException):
    """Configuración de experimento inválida"""

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])
