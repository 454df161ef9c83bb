"""
Casos de uso de recuperación
Muestreo de la función objetivo (y su gradiente), ensamblado, BPDN ponderado,
reescalado x̂ = Q⁻¹ẑ y errores Monte Carlo H̃¹ y L∞
"""

from abc import ABC, abstractmethod
import logging
import time
from typing import Optional

import numpy as np

from domain.entities.domain import (
    Approximant, BasisFamily, BPDNProblem, Density, ErrorReport, FunctionOracle, IndexSet,
    MeasurementEnsemble, MonteCarloEstimate, MultiIndex, RecoveryDiagnostics, RecoveryResult,
    SamplingKind, SamplingMode, SolverConfig, DomainParameterError
)
from domain.services.index_sets import DEFAULT_INDEX_SET_CAP, hyperbolic_cross, intrinsic_weights
from domain.services.measurement import (
    DEFAULT_MEMORY_BUDGET_BYTES, assemble, derive_seed, sample_points, tau_weights, tensor_design
)
from domain.services.wl1_solver import solve_bpdn

logger = logging.getLogger(__name__)

DEFAULT_ERROR_GRID_FACTOR = 4

# ============================================================================
# EVALUACIÓN DE APROXIMANTES
# ============================================================================

def approximant_values(approx: Approximant, points: np.ndarray) -> np.ndarray:
    """f̂(y_i) = Σ_n x̂_n φ_n(y_i)"""
    values, _ = tensor_design(approx.family, approx.index_set, points)
    return values @ approx.coefficients

def approximant_gradient(approx: Approximant, points: np.ndarray) -> np.ndarray:
    """∇f̂ en cada punto (matriz m×d)"""
    _, partials = tensor_design(approx.family, approx.index_set, points)
    return (partials @ approx.coefficients).T

def expansion_oracle(family: BasisFamily, index_set: IndexSet, coefficients) -> FunctionOracle:
    """Oráculo exacto g = Σ_n x_n φ_n con su gradiente"""
    approx = Approximant(family=family, index_set=index_set, coefficients=coefficients)
    return FunctionOracle(
        name=f"expansion[{len(index_set)}]",
        dimension=index_set.dimension,
        value=lambda y: approximant_values(approx, y),
        gradient=lambda y: approximant_gradient(approx, y),
    )

def basis_function_oracle(family: BasisFamily, n0: MultiIndex) -> FunctionOracle:
    """Oráculo φ_{n₀}"""
    index_set = IndexSet.from_indices(len(n0), [n0])
    oracle = expansion_oracle(family, index_set, [1.0])
    return FunctionOracle(name=f"phi{tuple(n0)}", dimension=len(n0),
                          value=oracle.value, gradient=oracle.gradient)

def optimization_weights(family: BasisFamily, mu: Density, index_set: IndexSet,
                         theta: float) -> np.ndarray:
    """w_n = max(u_n^θ, 1)"""
    if theta < 0:
        raise DomainParameterError(f"θ debe ser ≥ 0 (recibido {theta})")
    if theta == 0:
        return np.ones(len(index_set))
    return np.maximum(intrinsic_weights(family, mu, index_set) ** theta, 1.0)

# ============================================================================
# ERRORES MONTE CARLO
# ============================================================================

def _check_grid(grid_size: int) -> None:
    if grid_size < 1:
        raise DomainParameterError(f"La rejilla de error requiere ≥ 1 punto (recibido {grid_size})")

def h1_error_estimate(oracle: FunctionOracle, approx: Approximant, mu: Density,
                      grid_size: Optional[int] = None, seed: Optional[int] = 0) -> MonteCarloEstimate:
    """
    Estimación Monte Carlo de ‖f − f̂‖_{H̃¹} con puntos de μ.

    Los factores τ_k hacen insesgado el estimador del cuadrado de la norma;
    el error estándar de la raíz se obtiene por el método delta.
    """
    grid_size = grid_size or DEFAULT_ERROR_GRID_FACTOR * len(approx.index_set)
    _check_grid(grid_size)
    points = sample_points(mu, approx.dimension, grid_size, seed).points
    tau = tau_weights(approx.family, mu, points)

    value_diff = oracle.evaluate(points) - approximant_values(approx, points)
    grad_diff = oracle.evaluate_gradient(points) - approximant_gradient(approx, points)
    terms = tau[:, 0] * np.abs(value_diff) ** 2 + np.sum(tau[:, 1:] * np.abs(grad_diff) ** 2, axis=1)

    mean_square = float(np.mean(terms))
    estimate = float(np.sqrt(mean_square))
    if grid_size > 1 and mean_square > 0:
        standard_error = float(np.std(terms, ddof=1) / np.sqrt(grid_size) / (2.0 * estimate))
    else:
        standard_error = 0.0
    return MonteCarloEstimate(value=estimate, standard_error=standard_error,
                              grid_size=grid_size, seed=seed)

def h1_error(oracle: FunctionOracle, approx: Approximant, mu: Density,
             grid_size: Optional[int] = None, seed: Optional[int] = 0) -> float:
    """Error H̃¹ estimado con `grid_size` puntos de μ (por defecto 4|Λ|)"""
    return h1_error_estimate(oracle, approx, mu, grid_size, seed).value

def linf_error(oracle: FunctionOracle, approx: Approximant,
               grid_size: Optional[int] = None, seed: Optional[int] = 0) -> float:
    """
    max |f − f̂| sobre una rejilla uniforme aleatoria.

    Con la misma semilla, una rejilla mayor extiende la anterior, de modo que
    el valor no decrece al aumentar `grid_size`.
    """
    grid_size = grid_size or DEFAULT_ERROR_GRID_FACTOR * len(approx.index_set)
    _check_grid(grid_size)
    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.0, 1.0, size=(grid_size, approx.dimension))
    deviation = oracle.evaluate(points) - approximant_values(approx, points)
    return float(np.max(np.abs(deviation)))

# ============================================================================
# INTERFACES DE CASOS DE USO
# ============================================================================

class RecoveryUseCase(ABC):
    """Caso de uso de recuperación de una función a partir de muestras"""

    @abstractmethod
    def recover(self, oracle: FunctionOracle, family: BasisFamily, mu: Density, d: int, s: int,
                m: int, mode: SamplingMode, theta: float = 1.0, eta: float = 0.0,
                seed: Optional[int] = None, index_set: Optional[IndexSet] = None) -> RecoveryResult:
        """Recupera los coeficientes de la función sobre la cruz hiperbólica"""
        pass

    @abstractmethod
    def evaluate(self, oracle: FunctionOracle, approx: Approximant, mu: Density,
                 grid_size: Optional[int] = None, seed: Optional[int] = 0) -> ErrorReport:
        """Calcula los errores H̃¹ y L∞ del aproximante"""
        pass

# ============================================================================
# IMPLEMENTACIONES
# ============================================================================

class RecoveryUseCaseImpl(RecoveryUseCase):
    """Implementación del caso de uso de recuperación"""

    def __init__(self, solver_config: Optional[SolverConfig] = None,
                 index_set_cap: int = DEFAULT_INDEX_SET_CAP,
                 memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES):
        self.solver_config = solver_config or SolverConfig()
        self.index_set_cap = index_set_cap
        self.memory_budget_bytes = memory_budget_bytes

    def recover(self, oracle: FunctionOracle, family: BasisFamily, mu: Density, d: int, s: int,
                m: int, mode: SamplingMode, theta: float = 1.0, eta: float = 0.0,
                seed: Optional[int] = None, index_set: Optional[IndexSet] = None) -> RecoveryResult:
        """
        Recupera f sobre Λ = cruz hiperbólica(d, s).

        Args:
            oracle: Función objetivo (con gradiente salvo en modo sin gradiente)
            family: Familia de la base
            mu: Densidad de muestreo
            d: Dimensión
            s: Orden de la cruz hiperbólica
            m: Número de puntos de función
            mode: Modo de muestreo
            theta: Exponente de los pesos w = u^θ
            eta: Tolerancia de residuo
            seed: Semilla del ensayo; sin semilla se genera una y se registra
            index_set: Λ explícito en lugar de la cruz hiperbólica

        Returns:
            RecoveryResult con el aproximante x̂ = Q⁻¹ẑ y diagnósticos
        """
        if s < 1 or m < 1:
            raise DomainParameterError(f"Se requiere s ≥ 1 y m ≥ 1 (recibido s={s}, m={m})")
        if oracle.dimension != d:
            raise DomainParameterError(f"El oráculo tiene dimensión {oracle.dimension}, se esperaba {d}")
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1)[0])

        start = time.perf_counter()
        if index_set is None:
            index_set = hyperbolic_cross(d, s, signed=family.is_fourier, max_size=self.index_set_cap)
        weights = optimization_weights(family, mu, index_set, theta)
        ensemble = self.measurement_ensemble(oracle, family, mu, index_set, m, mode, seed)
        problem = BPDNProblem(ensemble.matrix, ensemble.rhs, weights, eta)
        result = solve_bpdn(problem, self.solver_config)
        coefficients = result.z / ensemble.q
        wall_time = time.perf_counter() - start

        diagnostics = RecoveryDiagnostics(
            m=m, m_o=ensemble.m_o, m_g=ensemble.m_g, m_tilde=ensemble.m_tilde,
            status=result.status, iterations=result.iterations,
            residual_norm=result.residual_norm, objective=result.objective,
            wall_time=wall_time, seed=seed,
        )
        logger.debug("Recuperación %s θ=%g m=%d (m̃=%d): %s en %d iteraciones",
                     mode.label, theta, m, ensemble.m_tilde, result.status.value, result.iterations)
        return RecoveryResult(
            approximant=Approximant(family=family, index_set=index_set, coefficients=coefficients),
            diagnostics=diagnostics,
            weights=weights,
        )

    def measurement_ensemble(self, oracle: FunctionOracle, family: BasisFamily, mu: Density,
                             index_set: IndexSet, m: int, mode: SamplingMode,
                             seed: int) -> MeasurementEnsemble:
        """Ensamble de un ensayo; mismas semillas derivadas que `recover`"""
        d = index_set.dimension
        points = sample_points(mu, d, m, derive_seed(seed, "points"))
        gradient_points = None
        if mode.kind == SamplingKind.INDEPENDENT_GRADIENT:
            gradient_points = sample_points(mu, d, m, derive_seed(seed, "gradient"))
        rng = np.random.default_rng(derive_seed(seed, "subset"))
        return assemble(family, mu, index_set, points, oracle, mode, gradient_points, rng,
                        self.memory_budget_bytes)

    def evaluate(self, oracle: FunctionOracle, approx: Approximant, mu: Density,
                 grid_size: Optional[int] = None, seed: Optional[int] = 0) -> ErrorReport:
        grid_size = grid_size or DEFAULT_ERROR_GRID_FACTOR * len(approx.index_set)
        return ErrorReport(
            h1_error=h1_error(oracle, approx, mu, grid_size, derive_seed(seed or 0, "h1-grid")),
            linf_error=linf_error(oracle, approx, grid_size, derive_seed(seed or 0, "linf-grid")),
            grid_size=grid_size,
            seed=seed,
        )

# ============================================================================
# FACTORÍA Y FUNCIONES DE CONVENIENCIA
# ============================================================================

def create_recovery_use_case(solver_config: Optional[SolverConfig] = None,
                             index_set_cap: int = DEFAULT_INDEX_SET_CAP,
                             memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES) -> RecoveryUseCase:
    """Crea el caso de uso de recuperación con sus límites"""
    return RecoveryUseCaseImpl(solver_config, index_set_cap, memory_budget_bytes)

def recover(oracle: FunctionOracle, family: BasisFamily, mu: Density, d: int, s: int, m: int,
            mode: SamplingMode, theta: float = 1.0, eta: float = 0.0, seed: Optional[int] = None,
            solver_config: Optional[SolverConfig] = None,
            index_set: Optional[IndexSet] = None) -> RecoveryResult:
    """Recuperación con los límites por defecto"""
    return create_recovery_use_case(solver_config).recover(
        oracle, family, mu, d, s, m, mode, theta, eta, seed, index_set
    )
