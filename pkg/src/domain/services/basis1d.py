"""
Bases unidimensionales de Sturm-Liouville
Polinomios de Jacobi ortonormales (Legendre, Chebyshev) y base de Fourier,
con derivadas, autovalores, densidades y muestreo aleatorio
"""

import logging
import math
from typing import Sequence, Tuple, Union

import numpy as np
from scipy import special

from domain.entities.domain import (
    BasisFamily, Density, DomainParameterError
)

logger = logging.getLogger(__name__)

# Las densidades singulares se evalúan a esta distancia de ±1 como mínimo
ENDPOINT_OFFSET = 1e-12

ArrayLike = Union[float, Sequence[float], np.ndarray]

# ============================================================================
# VALIDACIÓN
# ============================================================================

def _check_degree(family: BasisFamily, n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise DomainParameterError(f"El grado debe ser entero (recibido {n})")
    n = int(n)
    if n < 0 and not family.is_fourier:
        raise DomainParameterError(f"El grado debe ser ≥ 0 para Jacobi (recibido {n})")
    return n

def _check_points(y: ArrayLike) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)) or np.any(np.abs(y) > 1.0):
        raise DomainParameterError("Los puntos deben estar en [−1, 1]")
    return y

def _clamp(y: np.ndarray) -> np.ndarray:
    return np.clip(y, -1.0 + ENDPOINT_OFFSET, 1.0 - ENDPOINT_OFFSET)

def _interior(y: np.ndarray) -> np.ndarray:
    """Desplaza las muestras que caen exactamente en ±1 hacia el interior"""
    y = np.where(y <= -1.0, np.nextafter(-1.0, 0.0), y)
    return np.where(y >= 1.0, np.nextafter(1.0, 0.0), y)

# ============================================================================
# CONSTANTES DE JACOBI
# ============================================================================

def jacobi_mass(alpha: float, beta: float) -> float:
    """c^{(α,β)} = ∫(1−y)^α(1+y)^β dy = 2^{α+β+1} B(α+1, β+1)"""
    if alpha <= -1 or beta <= -1:
        raise DomainParameterError("Se requiere α, β > −1")
    return math.exp((alpha + beta + 1) * math.log(2.0) + special.betaln(alpha + 1, beta + 1))

def _log_norm_consts(alpha: float, beta: float, nmax: int) -> np.ndarray:
    """log κ_n^{(α,β)} para n = 0..nmax"""
    n = np.arange(nmax + 1, dtype=float)
    out = np.empty(nmax + 1)
    out[0] = math.log(jacobi_mass(alpha, beta))
    if nmax >= 1:
        k = n[1:]
        out[1:] = (
            (alpha + beta + 1) * math.log(2.0)
            - np.log(2 * k + alpha + beta + 1)
            + special.gammaln(k + alpha + 1)
            + special.gammaln(k + beta + 1)
            - special.gammaln(k + 1)
            - special.gammaln(k + alpha + beta + 1)
        )
    return out

def jacobi_norm_const(alpha: float, beta: float, n: int) -> float:
    """
    Norma al cuadrado κ_n^{(α,β)} de P_n^{(α,β)} en L²_ω.

    Se calcula en dominio logarítmico; n = 0 usa la forma cerrada de la masa
    (evita 0/0 cuando α + β + 1 = 0).
    """
    if alpha <= -1 or beta <= -1:
        raise DomainParameterError("Se requiere α, β > −1")
    if int(n) != n or n < 0:
        raise DomainParameterError(f"El grado debe ser entero ≥ 0 (recibido {n})")
    return float(math.exp(_log_norm_consts(alpha, beta, int(n))[int(n)]))

def jacobi_max_value(alpha: float, beta: float, n: int) -> float:
    """binom(n+q, n) con q = max(α, β): máximo de |P_n^{(α,β)}| si α, β ≥ −1/2"""
    q = max(alpha, beta)
    return float(math.exp(special.gammaln(n + q + 1) - special.gammaln(n + 1) - special.gammaln(q + 1)))

def jacobi_polynomials(alpha: float, beta: float, nmax: int, y: ArrayLike) -> np.ndarray:
    """
    Tabla sin normalizar P_0..P_nmax de Jacobi por recurrencia de tres términos.

    Devuelve un arreglo de forma y.shape + (nmax+1,).
    """
    y = np.asarray(y, dtype=float)
    out = np.empty(y.shape + (nmax + 1,))
    out[..., 0] = 1.0
    if nmax >= 1:
        out[..., 1] = (alpha + 1) + (alpha + beta + 2) * (y - 1) / 2
    for n in range(2, nmax + 1):
        c = 2 * n + alpha + beta
        a1 = 2 * n * (n + alpha + beta) * (c - 2)
        a2 = (c - 1) * (alpha * alpha - beta * beta)
        a3 = (c - 1) * c * (c - 2)
        a4 = 2 * (n + alpha - 1) * (n + beta - 1) * c
        out[..., n] = ((a2 + a3 * y) * out[..., n - 1] - a4 * out[..., n - 2]) / a1
    return out

def _orthonormal_scale(alpha: float, beta: float, nmax: int) -> np.ndarray:
    """√(c/κ_n): factor que hace ortonormales los P_n respecto de ν"""
    log_kappa = _log_norm_consts(alpha, beta, nmax)
    return np.exp(0.5 * (log_kappa[0] - log_kappa))

# ============================================================================
# EVALUACIÓN VECTORIZADA
# ============================================================================

def basis_table(family: BasisFamily, degrees: Sequence[int], y: ArrayLike) -> np.ndarray:
    """
    Evalúa φ_n(y) para cada grado de `degrees` en cada punto de `y`.

    Returns:
        Matriz len(y) × len(degrees); compleja para Fourier
    """
    degrees = np.asarray([_check_degree(family, n) for n in degrees], dtype=int)
    y = _check_points(y).reshape(-1)
    if family.is_fourier:
        return np.exp(1j * np.pi * np.outer(y, degrees))
    if degrees.size == 0:
        return np.zeros((y.size, 0))
    nmax = int(degrees.max())
    table = jacobi_polynomials(family.alpha, family.beta, nmax, y)
    table *= _orthonormal_scale(family.alpha, family.beta, nmax)
    return table[:, degrees]

def basis_deriv_table(family: BasisFamily, degrees: Sequence[int], y: ArrayLike) -> np.ndarray:
    """Evalúa φ′_n(y); para Jacobi usa P′_n^{(α,β)} = ((n+α+β+1)/2) P_{n−1}^{(α+1,β+1)}"""
    degrees = np.asarray([_check_degree(family, n) for n in degrees], dtype=int)
    y = _check_points(y).reshape(-1)
    if family.is_fourier:
        return 1j * np.pi * degrees * np.exp(1j * np.pi * np.outer(y, degrees))
    if degrees.size == 0:
        return np.zeros((y.size, 0))
    alpha, beta = family.alpha, family.beta
    nmax = int(degrees.max())
    table = np.zeros((y.size, nmax + 1))
    if nmax >= 1:
        shifted = jacobi_polynomials(alpha + 1, beta + 1, nmax - 1, y)
        n = np.arange(1, nmax + 1)
        table[:, 1:] = shifted * ((n + alpha + beta + 1) / 2)
    table *= _orthonormal_scale(alpha, beta, nmax)
    return table[:, degrees]

def _pointwise(table_fn, family: BasisFamily, n: int, y: ArrayLike):
    shape = np.shape(y)
    values = table_fn(family, [n], np.reshape(y, -1))[:, 0].reshape(shape)
    return values[()] if values.ndim == 0 else values

def eval_basis(family: BasisFamily, n: int, y: ArrayLike):
    """φ_n(y), ortonormal respecto de la densidad de probabilidad ν"""
    return _pointwise(basis_table, family, n, y)

def eval_basis_deriv(family: BasisFamily, n: int, y: ArrayLike):
    """φ′_n(y)"""
    return _pointwise(basis_deriv_table, family, n, y)

# ============================================================================
# AUTOVALORES Y DENSIDADES
# ============================================================================

def eigenvalue(family: BasisFamily, n: int) -> float:
    """λ_n: n(n+α+β+1) para Jacobi, n²π² para Fourier"""
    n = _check_degree(family, n)
    if family.is_fourier:
        return float(n * n * math.pi ** 2)
    return float(n * (n + family.alpha + family.beta + 1))

def eigenvalues(family: BasisFamily, degrees: np.ndarray) -> np.ndarray:
    degrees = np.asarray(degrees)
    if family.is_fourier:
        return degrees.astype(float) ** 2 * math.pi ** 2
    if np.any(degrees < 0):
        raise DomainParameterError("Los grados deben ser ≥ 0 para Jacobi")
    return degrees * (degrees + family.alpha + family.beta + 1.0)

def log_density_nu(family: BasisFamily, y: ArrayLike) -> np.ndarray:
    if family.is_fourier:
        return np.full(np.shape(y), math.log(0.5))
    y = _clamp(_check_points(y))
    a, b = family.alpha, family.beta
    return a * np.log1p(-y) + b * np.log1p(y) - math.log(jacobi_mass(a, b))

def log_weight_chi(family: BasisFamily, y: ArrayLike) -> np.ndarray:
    if family.is_fourier:
        return np.full(np.shape(y), math.log(0.5))
    y = _clamp(_check_points(y))
    a, b = family.alpha, family.beta
    return (a + 1) * np.log1p(-y) + (b + 1) * np.log1p(y) - math.log(jacobi_mass(a, b))

def density_nu(family: BasisFamily, y: ArrayLike):
    """Densidad de probabilidad de ortogonalidad ν"""
    values = np.exp(log_density_nu(family, y))
    return values[()] if values.ndim == 0 else values

def weight_chi(family: BasisFamily, y: ArrayLike):
    """Peso de Sturm-Liouville χ"""
    values = np.exp(log_weight_chi(family, y))
    return values[()] if values.ndim == 0 else values

def log_density_pdf(density: Density, y: ArrayLike) -> np.ndarray:
    y = _check_points(y)
    law = density.law
    if law == "uniform":
        return np.full(y.shape, math.log(0.5))
    y = _clamp(y)
    if law == "arcsine":
        return -math.log(math.pi) - 0.5 * (np.log1p(-y) + np.log1p(y))
    a, b = density.alpha, density.beta
    return a * np.log1p(-y) + b * np.log1p(y) - math.log(jacobi_mass(a, b))

def density_pdf(density: Density, y: ArrayLike):
    """Densidad de muestreo μ evaluada en y"""
    values = np.exp(log_density_pdf(density, y))
    return values[()] if values.ndim == 0 else values

# ============================================================================
# MUESTREO Y CUADRATURA
# ============================================================================

def sample_1d(density: Density, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    Extrae `count` muestras i.i.d. de μ.

    Uniforme por transformación afín, arcoseno por y = cos(πU) y Beta escalada
    para el resto de densidades de Jacobi. Las muestras quedan en (−1, 1).
    """
    if count < 0:
        raise DomainParameterError(f"count debe ser ≥ 0 (recibido {count})")
    if count == 0:
        return np.empty(0)
    law = density.law
    if law == "uniform":
        y = 2.0 * rng.random(count) - 1.0
    elif law == "arcsine":
        y = np.cos(np.pi * rng.random(count))
    else:
        y = 2.0 * rng.beta(density.beta + 1.0, density.alpha + 1.0, size=count) - 1.0
    return _interior(y)

def gauss_quadrature(family: BasisFamily, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodos y pesos para integrar contra ν (los pesos suman 1).

    Gauss-Jacobi para Jacobi (exacta hasta grado 2·count − 1); regla de
    trapecios en el toro para Fourier.
    """
    if count < 1:
        raise DomainParameterError("La cuadratura requiere al menos un nodo")
    if family.is_fourier:
        nodes = -1.0 + 2.0 * np.arange(count) / count
        return nodes, np.full(count, 1.0 / count)
    nodes, weights = special.roots_jacobi(count, family.alpha, family.beta)
    return nodes, weights / jacobi_mass(family.alpha, family.beta)

# ============================================================================
# COCIENTES DE DENSIDADES
# ============================================================================

def nu_over_mu(family: BasisFamily, mu: Density, y: ArrayLike) -> np.ndarray:
    """ν/μ; idénticamente 1 cuando μ es la densidad de ortogonalidad"""
    y = _check_points(y)
    if mu.matches(family):
        return np.ones_like(y)
    return np.exp(log_density_nu(family, y) - log_density_pdf(mu, y))

def chi_over_mu(family: BasisFamily, mu: Density, y: ArrayLike) -> np.ndarray:
    """χ/μ; igual a 1 − y² para Jacobi (1 para Fourier) cuando μ = ν"""
    y = _check_points(y)
    if mu.matches(family):
        return np.ones_like(y) if family.is_fourier else (1.0 - y) * (1.0 + y)
    return np.exp(log_weight_chi(family, y) - log_density_pdf(mu, y))
