"""
Coherencias locales del problema de muestreo con derivadas
Estimaciones numéricas (cotas inferiores) de Υ, Γ₁ y Γ₂, sus cotas cerradas
y la comprobación de las cotas de cola sup|g| ≤ ‖x‖_{1,u}
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from domain.entities.domain import (
    BasisFamily, CoherenceEstimate, CoherenceKind, Density, IndexSet, MultiIndex,
    DomainParameterError
)
from domain.services.basis1d import eigenvalues, gauss_quadrature
from domain.services.index_sets import (
    chebyshev_grid, intrinsic_weight, intrinsic_weights, kappa, kappas
)
from domain.services.measurement import q_scaling, sample_points, tau_weights, tensor_design

logger = logging.getLogger(__name__)

MAX_DELTA_SIZE = 20
DEFAULT_GRID_BUDGET = 4096
DEFAULT_MC_SAMPLES = 2000
DEFAULT_SIGN_VECTORS = 512
CONVERGENCE_RTOL = 0.05

# ============================================================================
# MATRICES B(y)
# ============================================================================

def measurement_rows(family: BasisFamily, mu: Density, index_set: IndexSet,
                     points: np.ndarray) -> np.ndarray:
    """
    Filas aleatorias B(y) de cada punto: arreglo M × (d+1) × N con entradas
    √τ_k(y)·∂_kφ_n(y)/√(1+λ_n).
    """
    points = np.atleast_2d(points)
    values, partials = tensor_design(family, index_set, points)
    tau = np.sqrt(tau_weights(family, mu, points))
    q = q_scaling(family, index_set)
    rows = np.empty((points.shape[0], index_set.dimension + 1, len(index_set)), dtype=values.dtype)
    rows[:, 0, :] = tau[:, [0]] * values / q
    for k in range(index_set.dimension):
        rows[:, k + 1, :] = tau[:, [k + 1]] * partials[k] / q
    return rows

def _tensor_nodes(family: BasisFamily, d: int, max_degree: int, budget: int) -> np.ndarray:
    """Malla tensorial de nodos de cuadratura de ν, exacta para la parte polinómica"""
    minimum = 2 * max_degree + 2 if family.is_fourier else max_degree + 2
    count = max(minimum, int(math.floor(budget ** (1.0 / d))))
    nodes, _ = gauss_quadrature(family, count)
    return np.array(list(itertools.product(nodes, repeat=d)))

def _check_delta(delta: IndexSet, index_set: IndexSet, max_size: int) -> None:
    if len(delta) == 0:
        raise DomainParameterError("Δ no puede estar vacío")
    if len(delta) > max_size:
        raise DomainParameterError(f"|Δ| = {len(delta)} supera el máximo {max_size}")
    missing = [n for n in delta if n not in index_set]
    if missing:
        raise DomainParameterError(f"Δ debe estar contenido en Λ (falta {missing[0]})")

def _sign_vectors(size: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Vectores de signos: todos (módulo ±) si caben en `count`, si no una muestra"""
    if size == 1:
        return np.ones((1, 1))
    if 2 ** (size - 1) <= count:
        tails = np.array(list(itertools.product((1.0, -1.0), repeat=size - 1)))
        return np.hstack([np.ones((tails.shape[0], 1)), tails]).T
    return rng.choice((1.0, -1.0), size=(size, count))

# ============================================================================
# ESTIMADORES
# ============================================================================

def _upsilon_values(rows_delta: np.ndarray) -> np.ndarray:
    return np.linalg.norm(rows_delta, ord=2, axis=(1, 2)) ** 2

def _gamma1_values(rows: np.ndarray, delta_cols: np.ndarray, w: np.ndarray) -> np.ndarray:
    gram = np.einsum("mkn,mkj->mnj", rows.conj(), rows[:, :, delta_cols])
    scaled = gram / w[None, :, None] * w[delta_cols][None, None, :]
    return np.abs(scaled).sum(axis=2).max(axis=1)

def _gamma2_value(rows: np.ndarray, delta_cols: np.ndarray, w: np.ndarray,
                  signs: np.ndarray, chunk: int = 256) -> float:
    """max_z max_j media_i |(W⁻¹B*BP_ΔWz)_j|² sobre vectores de signos z"""
    total = np.zeros((rows.shape[2], signs.shape[1]))
    weighted_signs = w[delta_cols][:, None] * signs
    for start in range(0, rows.shape[0], chunk):
        block = rows[start:start + chunk]
        gram = np.einsum("mkn,mkj->mnj", block.conj(), block[:, :, delta_cols])
        products = gram @ weighted_signs
        total += (np.abs(products) ** 2).sum(axis=0)
    total /= rows.shape[0]
    return float((total / w[:, None] ** 2).max())

def local_coherence(family: BasisFamily, mu: Density, delta: IndexSet, which: CoherenceKind,
                    weights: Optional[Sequence[float]] = None,
                    index_set: Optional[IndexSet] = None,
                    grid_budget: int = DEFAULT_GRID_BUDGET,
                    mc_samples: int = DEFAULT_MC_SAMPLES,
                    sign_vectors: int = DEFAULT_SIGN_VECTORS,
                    seed: int = 0,
                    max_delta: int = MAX_DELTA_SIZE) -> CoherenceEstimate:
    """
    Estima numéricamente una coherencia local.

    Υ y Γ₁ son supremos casi seguros: se maximizan sobre una malla tensorial
    de nodos de cuadratura de ν más `mc_samples` puntos de μ. Γ₂ es una
    esperanza: media Monte Carlo bajo μ con supremo sobre vectores de signos.
    Todos los valores son cotas inferiores de la coherencia real.

    Args:
        family: Familia de la base
        mu: Densidad de muestreo
        delta: Conjunto Δ (|Δ| ≤ max_delta)
        which: Coherencia a estimar
        weights: Pesos w alineados con Λ (por defecto, todos 1)
        index_set: Conjunto Λ ⊇ Δ (por defecto Δ)
        grid_budget: Número aproximado de nodos de la malla tensorial
        mc_samples: Puntos aleatorios de μ
        sign_vectors: Máximo de vectores de signos para Γ₂
        seed: Semilla de los puntos aleatorios

    Returns:
        CoherenceEstimate con indicador de convergencia (mitad frente a total)
    """
    which = CoherenceKind(which)
    if mc_samples < 1:
        raise DomainParameterError("mc_samples debe ser ≥ 1")
    index_set = delta if index_set is None else index_set
    _check_delta(delta, index_set, max_delta)
    w = np.ones(len(index_set)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (len(index_set),) or np.any(w <= 0):
        raise DomainParameterError("Los pesos deben ser positivos y estar alineados con Λ")
    delta_cols = np.array([index_set.position(n) for n in delta])
    rng = np.random.default_rng(seed)
    d = delta.dimension

    random_points = sample_points(mu, d, mc_samples, seed).points

    if which == CoherenceKind.GAMMA2:
        rows = measurement_rows(family, mu, index_set, random_points)
        signs = _sign_vectors(len(delta), sign_vectors, rng)
        value = _gamma2_value(rows, delta_cols, w, signs)
        half = _gamma2_value(rows[: max(1, mc_samples // 2)], delta_cols, w, signs)
        evaluations = mc_samples
    else:
        grid = _tensor_nodes(family, d, index_set.max_degree, grid_budget)
        points = np.vstack([grid, random_points])
        rows = measurement_rows(family, mu, index_set, points)
        if which == CoherenceKind.UPSILON:
            values = _upsilon_values(rows[:, :, delta_cols])
        else:
            values = _gamma1_values(rows, delta_cols, w)
        value = float(values.max())
        half = float(np.concatenate([values[: grid.shape[0]],
                                     values[grid.shape[0]: grid.shape[0] + mc_samples // 2]]).max())
        evaluations = points.shape[0]

    converged = abs(value - half) <= CONVERGENCE_RTOL * max(abs(value), 1e-300)
    logger.debug("Coherencia %s: %.6g (convergida=%s, %d evaluaciones)",
                 which.value, value, converged, evaluations)
    return CoherenceEstimate(kind=which, value=value, converged=converged, evaluations=evaluations)

# ============================================================================
# COTAS CERRADAS
# ============================================================================

def _lambdas(family: BasisFamily, index_set: IndexSet) -> np.ndarray:
    return eigenvalues(family, index_set.as_array()).sum(axis=1)

def _weighted_ratio(family: BasisFamily, mu: Density, index_set: IndexSet,
                    w: np.ndarray) -> float:
    """max_{n∈Λ} u²(1+κ)/(w²(1+λ))"""
    u = intrinsic_weights(family, mu, index_set)
    return float(np.max(u ** 2 * (1 + kappas(family, mu, index_set))
                        / (w ** 2 * (1 + _lambdas(family, index_set)))))

def upsilon_bound(family: BasisFamily, mu: Density, delta: IndexSet) -> float:
    """max_{n∈Δ}((1+κ_n)/(1+λ_n))·|Δ|_u"""
    ratio = (1 + kappas(family, mu, delta)) / (1 + _lambdas(family, delta))
    return float(ratio.max() * np.sum(intrinsic_weights(family, mu, delta) ** 2))

def _delta_w(delta: IndexSet, index_set: IndexSet, w: np.ndarray) -> float:
    return float(sum(w[index_set.position(n)] ** 2 for n in delta))

def gamma1_bound(family: BasisFamily, mu: Density, delta: IndexSet, index_set: IndexSet,
                 weights: Sequence[float]) -> float:
    """½|Δ|_u + ½·max_Λ(u²(1+κ)/(w²(1+λ)))·|Δ|_w"""
    w = np.asarray(weights, dtype=float)
    delta_u = float(np.sum(intrinsic_weights(family, mu, delta) ** 2))
    return 0.5 * delta_u + 0.5 * _weighted_ratio(family, mu, index_set, w) * _delta_w(delta, index_set, w)

def gamma2_bound(family: BasisFamily, mu: Density, delta: IndexSet, index_set: IndexSet,
                 weights: Sequence[float]) -> float:
    """max_Λ(u²(1+κ)/(w²(1+λ)))·|Δ|_w"""
    w = np.asarray(weights, dtype=float)
    return _weighted_ratio(family, mu, index_set, w) * _delta_w(delta, index_set, w)

def coherence_sample_complexity(upsilon: float, gamma: float, n_columns: int,
                                delta_w: float, eps: float) -> float:
    """
    Υ·log(N/ε) + Γ·(log(N/ε) + log|Δ|_w·log(|Δ|_w/ε)), constante universal 1.

    Γ = max(Γ₁, Γ₂) para el modelo abstracto de adquisición paralela.
    """
    if not 0 < eps < 1:
        raise DomainParameterError(f"ε debe estar en (0, 1) (recibido {eps})")
    if n_columns < 1 or delta_w < 1:
        raise DomainParameterError("Se requiere N ≥ 1 y |Δ|_w ≥ 1")
    log_n = math.log(n_columns / eps)
    return upsilon * log_n + gamma * (log_n + math.log(delta_w) * math.log(delta_w / eps))

# ============================================================================
# COTAS DE COLA
# ============================================================================

@dataclass(frozen=True)
class TailBoundReport:
    """sup|φ_n| frente a u_n y sup√(Σ τ_k|∂_kφ_n|²) frente a v_n = √(1+λ_n)u_n"""
    index: MultiIndex
    sup_value: float
    u: float
    sup_sobolev: float
    v: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.sup_value <= self.u + self.slack and self.sup_sobolev <= self.v + self.slack

def tail_bound_check(family: BasisFamily, mu: Density, n: MultiIndex,
                     grid_points: int = 128, slack: float = 1e-6) -> TailBoundReport:
    """
    Compara en una malla tensorial interior las cotas puntuales de g = φ_n
    (y de su norma de Sobolev ponderada) con u_n y v_n.
    """
    n = tuple(int(k) for k in n)
    d = len(n)
    index_set = IndexSet.from_indices(d, [n])
    nodes = chebyshev_grid(grid_points, include_endpoints=False)
    points = np.array(list(itertools.product(nodes, repeat=d)))

    values, partials = tensor_design(family, index_set, points)
    tau = tau_weights(family, mu, points)
    sup_value = float(np.max(np.sqrt(tau[:, 0]) * np.abs(values[:, 0])))
    energy = tau[:, 0] * np.abs(values[:, 0]) ** 2
    for k in range(d):
        energy = energy + tau[:, k + 1] * np.abs(partials[k][:, 0]) ** 2
    sup_sobolev = float(np.sqrt(energy.max()))

    u = intrinsic_weight(family, mu, n)
    lam = float(eigenvalues(family, np.array(n)).sum())
    return TailBoundReport(
        index=n, sup_value=sup_value, u=u, sup_sobolev=sup_sobolev,
        v=math.sqrt(1.0 + lam) * u, slack=slack
    )

def kappa_lambda_ratio(family: BasisFamily, mu: Density, n: int) -> float:
    """κ_n / max(λ_n, 1) en una dimensión"""
    lam = float(eigenvalues(family, np.array([n]))[0])
    return kappa(family, mu, (n,)) / max(lam, 1.0)
