"""
Funciones de prueba de los experimentos de recuperación
F1 (picos racionales), F2 (cosenos y factores racionales), F3 (exponencial),
con gradientes analíticos validados por diferencias finitas
"""

import logging
from typing import Callable, Dict, List

import numpy as np

from domain.entities.domain import (
    BenchmarkFunction, FunctionOracle, DomainParameterError, OracleValidationError
)

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
FD_TOLERANCE = 1e-5
FD_POINTS = 20

# ============================================================================
# F1: PRODUCTO DE PICOS RACIONALES
# ============================================================================

def _peak_centers(d: int) -> np.ndarray:
    j = np.arange(1, d + 1)
    return (-1.0) ** j / (j + 1.0)

def _f1(d: int) -> FunctionOracle:
    centers = _peak_centers(d)
    width = d / 4.0

    def value(y: np.ndarray) -> np.ndarray:
        return np.prod(width / (width + (y - centers) ** 2), axis=1)

    def gradient(y: np.ndarray) -> np.ndarray:
        shifted = y - centers
        return value(y)[:, None] * (-2.0 * shifted / (width + shifted ** 2))

    return FunctionOracle(name=BenchmarkFunction.F1.value, dimension=d, value=value, gradient=gradient)

# ============================================================================
# F2: COSENOS Y FACTORES RACIONALES
# ============================================================================

def _f2(d: int) -> FunctionOracle:
    if d % 2:
        raise DomainParameterError(f"F2 requiere dimensión par (recibido d={d})")
    half = d // 2
    j = np.arange(1, d + 1, dtype=float)
    freq = 16.0 / 2.0 ** j[half:]
    decay = 1.0 / 4.0 ** j[:half]

    def value(y: np.ndarray) -> np.ndarray:
        numerator = np.prod(np.cos(freq * y[:, half:]), axis=1)
        denominator = np.prod(1.0 - decay * y[:, :half], axis=1)
        return numerator / denominator

    def gradient(y: np.ndarray) -> np.ndarray:
        cosines = np.cos(freq * y[:, half:])
        sines = np.sin(freq * y[:, half:])
        rational = 1.0 - decay * y[:, :half]
        f = value(y)
        out = np.empty_like(y)
        out[:, :half] = f[:, None] * decay / rational
        denominator = np.prod(rational, axis=1)
        for k in range(d - half):
            others = np.prod(np.delete(cosines, k, axis=1), axis=1)
            out[:, half + k] = -freq[k] * sines[:, k] * others / denominator
        return out

    return FunctionOracle(name=BenchmarkFunction.F2.value, dimension=d, value=value, gradient=gradient)

# ============================================================================
# F3: EXPONENCIAL
# ============================================================================

def _f3(d: int) -> FunctionOracle:
    def value(y: np.ndarray) -> np.ndarray:
        return np.exp(-np.sum(y, axis=1) / (2.0 * d))

    def gradient(y: np.ndarray) -> np.ndarray:
        return np.repeat(-value(y)[:, None] / (2.0 * d), d, axis=1)

    return FunctionOracle(name=BenchmarkFunction.F3.value, dimension=d, value=value, gradient=gradient)

_BUILDERS: Dict[BenchmarkFunction, Callable[[int], FunctionOracle]] = {
    BenchmarkFunction.F1: _f1,
    BenchmarkFunction.F2: _f2,
    BenchmarkFunction.F3: _f3,
}

# ============================================================================
# VALIDACIÓN POR DIFERENCIAS FINITAS
# ============================================================================

def finite_difference_gradient(oracle: FunctionOracle, points: np.ndarray,
                               step: float = FD_STEP) -> np.ndarray:
    """Gradiente por diferencias centradas"""
    points = np.atleast_2d(points)
    out = np.empty_like(points)
    for k in range(points.shape[1]):
        shift = np.zeros(points.shape[1])
        shift[k] = step
        out[:, k] = (oracle.evaluate(points + shift) - oracle.evaluate(points - shift)) / (2.0 * step)
    return out

def validate_gradient(oracle: FunctionOracle, count: int = FD_POINTS,
                      tolerance: float = FD_TOLERANCE, seed: int = 0) -> float:
    """
    Compara el gradiente analítico con diferencias finitas en puntos de prueba.

    Returns:
        Máxima discrepancia relativa observada

    Raises:
        OracleValidationError: Si supera la tolerancia
    """
    rng = np.random.default_rng(seed)
    points = rng.uniform(-0.9, 0.9, size=(count, oracle.dimension))
    analytic = oracle.evaluate_gradient(points)
    numeric = finite_difference_gradient(oracle, points)
    discrepancy = float(np.max(np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))))
    if discrepancy > tolerance:
        raise OracleValidationError(
            f"El gradiente de '{oracle.name}' difiere de las diferencias finitas en {discrepancy:.3e}"
        )
    return discrepancy

def test_function(function_id: BenchmarkFunction, d: int, validate: bool = True) -> FunctionOracle:
    """
    Oráculo de una función de prueba con su gradiente analítico.

    Args:
        function_id: F1, F2 o F3
        d: Dimensión (par para F2)
        validate: Comprobar el gradiente por diferencias finitas

    Returns:
        FunctionOracle
    """
    if d < 1:
        raise DomainParameterError(f"La dimensión debe ser ≥ 1 (recibido {d})")
    oracle = _BUILDERS[BenchmarkFunction(function_id)](d)
    if validate:
        validate_gradient(oracle)
    logger.debug("Función de prueba %s con d=%d", oracle.name, d)
    return oracle

test_function.__test__ = False

def available_functions() -> List[str]:
    return [f.value for f in BenchmarkFunction]
