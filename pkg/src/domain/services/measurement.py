"""
Ensamblado de mediciones
Puntos de muestreo tensoriales, factores τ_k, sistema escalado A = ĀQ⁻¹
con bloques de derivadas y diagnóstico de isotropía
"""

import logging
import math
import zlib
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from domain.entities.domain import (
    BasisFamily, Density, FunctionOracle, IndexSet, MeasurementEnsemble, SampleSet,
    SamplingKind, SamplingMode, DomainParameterError, EmptyIndexSetError,
    EnsembleTooLargeError
)
from domain.services.basis1d import (
    basis_deriv_table, basis_table, chi_over_mu, eigenvalues, nu_over_mu, sample_1d
)

logger = logging.getLogger(__name__)

DEFAULT_MEMORY_BUDGET_BYTES = 2048 * 1024 ** 2
# Varias columnas a la vez: 4 errores estándar en lugar de 3
COLUMN_NORM_Z_THRESHOLD = 4.0

SeedLike = Union[int, np.random.SeedSequence, None]

# ============================================================================
# SEMILLAS
# ============================================================================

def derive_seed(master: int, *labels: Union[str, int]) -> int:
    """
    Semilla derivada como función pura de (semilla maestra, etiquetas).

    Las etiquetas de texto se reducen con CRC32, estable entre ejecuciones
    y plataformas.
    """
    key = tuple(
        label if isinstance(label, int) else zlib.crc32(str(label).encode("utf-8"))
        for label in labels
    )
    sequence = np.random.SeedSequence(int(master), spawn_key=key)
    return int(sequence.generate_state(1, dtype=np.uint32)[0])

# ============================================================================
# PUNTOS Y FACTORES τ
# ============================================================================

def sample_points(mu: Density, d: int, m: int, seed: SeedLike = None) -> SampleSet:
    """
    Extrae m puntos i.i.d. de la densidad tensorial μ^⊗d.

    Cada coordenada se muestrea por columnas con el mismo generador, de modo
    que el resultado es determinista dada la semilla.
    """
    if d < 1:
        raise DomainParameterError(f"La dimensión debe ser ≥ 1 (recibido {d})")
    if m < 0:
        raise DomainParameterError(f"m debe ser ≥ 0 (recibido {m})")
    rng = np.random.default_rng(seed)
    points = np.empty((m, d))
    for k in range(d):
        points[:, k] = sample_1d(mu, m, rng)
    recorded = seed if isinstance(seed, int) else None
    return SampleSet(points=points, density=mu, seed=recorded)

def tau_weights(family: BasisFamily, mu: Density, points: np.ndarray) -> np.ndarray:
    """
    Factores τ_0..τ_d en cada punto (matriz m × (d+1)).

    τ_0 = ν(y)/μ(y) y τ_k = χ(y_k)Π_{j≠k}ν(y_j)/μ(y).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m, d = points.shape
    nu_ratio = np.column_stack([nu_over_mu(family, mu, points[:, k]) for k in range(d)]) \
        if m else np.ones((0, d))
    chi_ratio = np.column_stack([chi_over_mu(family, mu, points[:, k]) for k in range(d)]) \
        if m else np.ones((0, d))

    tau = np.empty((m, d + 1))
    tau[:, 0] = np.prod(nu_ratio, axis=1)
    for k in range(d):
        others = np.prod(np.delete(nu_ratio, k, axis=1), axis=1)
        tau[:, k + 1] = chi_ratio[:, k] * others
    return tau

def tau_k(family: BasisFamily, mu: Density, y: Sequence[float], k: int) -> float:
    """τ_k(y) para un único punto y ∈ D, k = 0..d"""
    point = np.asarray(y, dtype=float).reshape(1, -1)
    d = point.shape[1]
    if not 0 <= k <= d:
        raise DomainParameterError(f"k debe estar en 0..{d} (recibido {k})")
    if np.any(np.abs(point) >= 1.0):
        raise DomainParameterError("El punto debe ser interior al dominio")
    return float(tau_weights(family, mu, point)[0, k])

# ============================================================================
# BASE TENSORIAL
# ============================================================================

def tensor_design(family: BasisFamily, index_set: IndexSet,
                  points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Valores y parciales de la base tensorial en los puntos.

    Returns:
        (values m×N, partials d×m×N) con partials[k] = ∂_kφ_n(y_i)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m, d = points.shape
    if d != index_set.dimension:
        raise DomainParameterError(
            f"Los puntos tienen dimensión {d}, el conjunto de índices {index_set.dimension}"
        )
    indices = index_set.as_array()
    p = index_set.max_degree
    if family.is_fourier:
        degrees = np.arange(-p, p + 1)
        offset = p
    else:
        degrees = np.arange(p + 1)
        offset = 0
    columns = indices + offset

    factors = []
    derivs = []
    for k in range(d):
        factors.append(basis_table(family, degrees, points[:, k])[:, columns[:, k]])
        derivs.append(basis_deriv_table(family, degrees, points[:, k])[:, columns[:, k]])

    dtype = complex if family.is_fourier else float
    values = np.ones((m, len(index_set)), dtype=dtype)
    for factor in factors:
        values = values * factor

    partials = np.empty((d, m, len(index_set)), dtype=dtype)
    for k in range(d):
        block = derivs[k]
        for j in range(d):
            if j != k:
                block = block * factors[j]
        partials[k] = block
    return values, partials

def q_scaling(family: BasisFamily, index_set: IndexSet) -> np.ndarray:
    """Diagonal de Q: √(1 + Σ_k λ_{n_k}) en el orden de Λ"""
    indices = index_set.as_array()
    if indices.size == 0:
        return np.ones(0)
    lam = eigenvalues(family, indices).sum(axis=1)
    return np.sqrt(1.0 + lam)

# ============================================================================
# MATRIZ DE DISEÑO
# ============================================================================

@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Ā por bloques, Q y los puntos usados por cada bloque de derivadas"""
    a_bar: np.ndarray
    q: np.ndarray
    block_sizes: Tuple[int, ...]
    m_o: int
    m_g: int
    gradient_points: Optional[np.ndarray]
    function_tau: np.ndarray
    gradient_tau: Optional[np.ndarray]

def measurement_cost(mode: SamplingMode, m: int) -> Tuple[int, int, int]:
    """(m_o, m_g, m̃) con m̃ = m_o + m_g"""
    if m < 0:
        raise DomainParameterError(f"m debe ser ≥ 0 (recibido {m})")
    return mode.cost(m)

def points_for_budget(mode: SamplingMode, m_tilde: int) -> int:
    """Mayor m ≥ 1 tal que m_o + m_g ≤ m̃"""
    if m_tilde < 1:
        raise DomainParameterError(f"El presupuesto m̃ debe ser ≥ 1 (recibido {m_tilde})")
    ratio = 1.0 + (mode.fraction if mode.kind != SamplingKind.UNAUGMENTED else 0.0)
    m = min(m_tilde, int(math.floor(m_tilde / ratio)) + 2)
    while m > 1 and mode.cost(m)[2] > m_tilde:
        m -= 1
    return m

def _gradient_rows(mode: SamplingMode, m: int, m_g: int,
                   rng: Optional[np.random.Generator]) -> np.ndarray:
    if mode.kind == SamplingKind.FRACTIONAL_GRADIENT and mode.random_subset:
        rng = rng if rng is not None else np.random.default_rng(0)
        return np.sort(rng.choice(m, size=m_g, replace=False))
    return np.arange(m_g)

def design_matrix(family: BasisFamily, mu: Density, index_set: IndexSet, points: SampleSet,
                  mode: SamplingMode, gradient_points: Optional[SampleSet] = None,
                  rng: Optional[np.random.Generator] = None,
                  memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES) -> DesignMatrix:
    """
    Construye Ā (bloque de función más bloques de derivadas) y Q.

    Cada bloque k tiene filas (1/√m)·√τ_k(y_i)·∂_kφ_n(y_i). El bloque k=0 se
    calcula con la misma expresión en todos los modos.
    """
    if len(index_set) == 0:
        raise EmptyIndexSetError("El conjunto de índices Λ está vacío")
    m, d = points.size, points.dimension
    if m < 1:
        raise DomainParameterError("Se requiere al menos un punto de muestreo")
    m_o, m_g, _ = mode.cost(m)

    rows = m + d * m_g
    itemsize = 16 if family.is_fourier else 8
    required = 2 * rows * len(index_set) * itemsize
    if required > memory_budget_bytes:
        raise EnsembleTooLargeError(
            f"El ensamble {rows}×{len(index_set)} requiere {required / 1024 ** 2:.1f} MB "
            f"(límite {memory_budget_bytes / 1024 ** 2:.1f} MB)"
        )

    scale = 1.0 / math.sqrt(m)
    values, partials = tensor_design(family, index_set, points.points)
    tau = tau_weights(family, mu, points.points)
    function_block = scale * np.sqrt(tau[:, 0])[:, None] * values

    if m_g == 0:
        return DesignMatrix(
            a_bar=function_block, q=np.ones(len(index_set)), block_sizes=(m,),
            m_o=m_o, m_g=0, gradient_points=None, function_tau=tau, gradient_tau=None
        )

    if mode.kind == SamplingKind.INDEPENDENT_GRADIENT:
        if gradient_points is None or gradient_points.size != m:
            raise DomainParameterError("El modo de gradiente independiente requiere m puntos propios")
        grad_pts = gradient_points.points
        _, grad_partials = tensor_design(family, index_set, grad_pts)
        grad_tau = tau_weights(family, mu, grad_pts)
    else:
        selected = _gradient_rows(mode, m, m_g, rng)
        grad_pts = points.points[selected]
        grad_partials = partials[:, selected, :]
        grad_tau = tau[selected]

    blocks = [function_block]
    for k in range(d):
        blocks.append(scale * np.sqrt(grad_tau[:, k + 1])[:, None] * grad_partials[k])

    return DesignMatrix(
        a_bar=np.vstack(blocks), q=q_scaling(family, index_set),
        block_sizes=(m,) + (m_g,) * d, m_o=m_o, m_g=m_g,
        gradient_points=grad_pts, function_tau=tau, gradient_tau=grad_tau
    )

def assemble(family: BasisFamily, mu: Density, index_set: IndexSet, points: SampleSet,
             oracle: FunctionOracle, mode: SamplingMode,
             gradient_points: Optional[SampleSet] = None,
             rng: Optional[np.random.Generator] = None,
             memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES) -> MeasurementEnsemble:
    """
    Ensambla el sistema escalado A = ĀQ⁻¹ y su lado derecho.

    Args:
        family: Familia de la base
        mu: Densidad de muestreo
        index_set: Conjunto de índices Λ
        points: Puntos de función
        oracle: Función objetivo (con gradiente salvo en modo sin gradiente)
        mode: Modo de muestreo
        gradient_points: Puntos propios para el modo de gradiente independiente
        rng: Generador para el subconjunto aleatorio del modo fraccional

    Returns:
        MeasurementEnsemble inmutable
    """
    design = design_matrix(family, mu, index_set, points, mode, gradient_points, rng,
                           memory_budget_bytes)
    m = points.size
    scale = 1.0 / math.sqrt(m)

    rhs_blocks: List[np.ndarray] = [
        scale * np.sqrt(design.function_tau[:, 0]) * oracle.evaluate(points.points)
    ]
    if design.m_g > 0:
        gradient = oracle.evaluate_gradient(design.gradient_points)
        for k in range(points.dimension):
            rhs_blocks.append(scale * np.sqrt(design.gradient_tau[:, k + 1]) * gradient[:, k])
    rhs = np.concatenate(rhs_blocks)

    grad_set = None
    if design.gradient_points is not None:
        seed = gradient_points.seed if gradient_points is not None else points.seed
        grad_set = SampleSet(points=design.gradient_points, density=mu, seed=seed)

    ensemble = MeasurementEnsemble(
        a_bar=design.a_bar, q=design.q, matrix=design.a_bar / design.q,
        rhs=rhs.astype(design.a_bar.dtype, copy=False), mode=mode, index_set=index_set,
        points=points, gradient_points=grad_set, block_sizes=design.block_sizes,
        m_o=design.m_o, m_g=design.m_g
    )
    logger.debug(
        "Ensamble %s: %d×%d (m_o=%d, m_g=%d)",
        mode.label, ensemble.rows, ensemble.columns, ensemble.m_o, ensemble.m_g
    )
    return ensemble

def function_block(ensemble: MeasurementEnsemble) -> np.ndarray:
    """Bloque k=0 de Ā (filas de valores de función)"""
    return ensemble.a_bar[:ensemble.block_sizes[0]]

# ============================================================================
# ISOTROPÍA
# ============================================================================

@dataclass(frozen=True)
class IsotropyReport:
    """Desviación ‖A*A − I‖ en norma espectral y por entradas"""
    spectral: float
    max_entry: float
    m: int
    seed: Optional[int]

def _fresh_scaled_matrix(family: BasisFamily, mu: Density, index_set: IndexSet, m: int,
                         mode: SamplingMode, seed: int, labels: Tuple[Union[str, int], ...],
                         memory_budget_bytes: int) -> np.ndarray:
    """A = ĀQ⁻¹ con m puntos nuevos derivados de (seed, labels)"""
    d = index_set.dimension
    points = sample_points(mu, d, m, derive_seed(seed, *labels, "points"))
    gradient_points = None
    if mode.kind == SamplingKind.INDEPENDENT_GRADIENT:
        gradient_points = sample_points(mu, d, m, derive_seed(seed, *labels, "gradient"))
    design = design_matrix(family, mu, index_set, points, mode, gradient_points,
                           memory_budget_bytes=memory_budget_bytes)
    return design.a_bar / design.q

def isotropy_deviation(family: BasisFamily, mu: Density, index_set: IndexSet, m: int,
                       seed: int = 0, mode: Optional[SamplingMode] = None,
                       memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES) -> IsotropyReport:
    """
    Ensambla A con m muestras nuevas y mide ‖A*A − I‖.

    Por defecto usa el modo de gradiente completo; E(A*A) = I en ese modo.
    """
    mode = mode or SamplingMode.full_gradient()
    matrix = _fresh_scaled_matrix(family, mu, index_set, m, mode, seed, ("isotropy",),
                                  memory_budget_bytes)
    deviation = matrix.conj().T @ matrix - np.eye(len(index_set))
    return IsotropyReport(
        spectral=float(np.linalg.norm(deviation, 2)),
        max_entry=float(np.abs(deviation).max()),
        m=m,
        seed=seed,
    )

@dataclass(frozen=True, eq=False)
class ColumnNormReport:
    """Media de ‖Ae_j‖² por columna sobre réplicas independientes y su error estándar"""
    mean: np.ndarray
    standard_error: np.ndarray
    m: int
    replicates: int
    seed: Optional[int]

    @property
    def z_scores(self) -> np.ndarray:
        return np.abs(self.mean - 1.0) / np.maximum(self.standard_error, 1e-12)

    @property
    def max_z(self) -> float:
        return float(self.z_scores.max())

def column_norm_check(family: BasisFamily, mu: Density, index_set: IndexSet, m: int = 20,
                      replicates: int = 200, seed: int = 0, mode: Optional[SamplingMode] = None,
                      memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES) -> ColumnNormReport:
    """
    Estima E‖Ae_j‖² (= 1) con `replicates` matrices de m puntos cada una.

    El criterio usual es max_z ≤ COLUMN_NORM_Z_THRESHOLD.
    """
    if replicates < 2:
        raise DomainParameterError(f"Se requieren al menos 2 réplicas (recibido {replicates})")
    mode = mode or SamplingMode.full_gradient()
    norms = np.empty((replicates, len(index_set)))
    for replicate in range(replicates):
        matrix = _fresh_scaled_matrix(family, mu, index_set, m, mode, seed,
                                      ("column-norm", replicate), memory_budget_bytes)
        norms[replicate] = np.sum(np.abs(matrix) ** 2, axis=0)
    report = ColumnNormReport(
        mean=norms.mean(axis=0),
        standard_error=norms.std(axis=0, ddof=1) / math.sqrt(replicates),
        m=m,
        replicates=replicates,
        seed=seed,
    )
    logger.debug("Normas de columna: max z = %.2f sobre %d réplicas", report.max_z, replicates)
    return report
