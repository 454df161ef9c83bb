"""
Calculadoras de complejidad muestral
Lado derecho de las cotas m ≳ ... con la constante universal igual a 1,
con desglose de factores (K(s), factor κ/λ y términos logarítmicos)
"""

import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np

from domain.entities.domain import (
    BasisFamily, Density, IndexSet, KMode, SampleComplexityEstimate, SampleComplexitySetting,
    DomainParameterError, UnsupportedParametersError
)
from domain.services.basis1d import eigenvalues
from domain.services.index_sets import (
    K_of_s, hyperbolic_cross, hyperbolic_cross_size, intrinsic_weights, k_bound_exponent, kappas
)

logger = logging.getLogger(__name__)

# ============================================================================
# FACTORES COMUNES
# ============================================================================

def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise DomainParameterError(f"ε debe estar en (0, 1) (recibido {eps})")

def kappa_lambda_factor(family: BasisFamily, mu: Density, index_set: IndexSet) -> float:
    """max_{n∈Λ} (1+κ_n)/(1+λ_n)"""
    lam = eigenvalues(family, index_set.as_array()).sum(axis=1)
    return float(np.max((1.0 + kappas(family, mu, index_set)) / (1.0 + lam)))

def gradient_log_factor(d: int, s: int, k_value: float, eps: float) -> float:
    """min{d + log(s/ε), log(2d)·log(s/ε)} + log K·log(K/ε)"""
    log_s = math.log(s / eps)
    return min(d + log_s, math.log(2 * d) * log_s) + math.log(k_value) * math.log(k_value / eps)

def function_log_factor(d: int, s: int, k_value: float) -> float:
    """min{log(2s) + d, log(2d)·log(2s)} + log K"""
    return min(math.log(2 * s) + d, math.log(2 * d) * math.log(2 * s)) + math.log(k_value)

# ============================================================================
# COTAS POR ESCENARIO
# ============================================================================

def _gradient_augmented(family, mu, d, s, eps, k_mode) -> SampleComplexityEstimate:
    k_value = K_of_s(family, mu, d, s, k_mode)
    ratio = kappa_lambda_factor(family, mu, hyperbolic_cross(d, s, signed=family.is_fourier))
    log_factor = gradient_log_factor(d, s, k_value, eps)
    return SampleComplexityEstimate(
        setting=SampleComplexitySetting.GRADIENT_AUGMENTED,
        value=ratio * k_value * log_factor,
        factors={"K": k_value, "kappa_lambda": ratio, "log": log_factor},
    )

def _unaugmented(family, mu, d, s, eps, k_mode) -> SampleComplexityEstimate:
    k_value = K_of_s(family, mu, d, s, k_mode)
    log_factor = function_log_factor(d, s, k_value)
    return SampleComplexityEstimate(
        setting=SampleComplexitySetting.UNAUGMENTED,
        value=k_value * math.log(1.0 / eps) * log_factor,
        factors={"K": k_value, "log_eps": math.log(1.0 / eps), "log": log_factor},
    )

def _jacobi_closed_form(family, mu, d, s, eps) -> SampleComplexityEstimate:
    if family.is_fourier:
        raise UnsupportedParametersError("La forma cerrada de Jacobi no se aplica a la base de Fourier")
    gamma = k_bound_exponent(family, mu)
    k_value = float(s) ** gamma
    log_factor = math.log(2 * d) * math.log(s / eps) ** 2
    return SampleComplexityEstimate(
        setting=SampleComplexitySetting.JACOBI_CLOSED_FORM,
        value=k_value * log_factor,
        factors={"K": k_value, "gamma": gamma, "log": log_factor},
    )

def _legendre_preconditioned(family, mu, d, s, eps) -> SampleComplexityEstimate:
    if not family.is_legendre or mu.law != "arcsine":
        raise UnsupportedParametersError(
            "La cota precondicionada requiere base de Legendre y muestreo de Chebyshev"
        )
    leading = min(2.0 ** d * s, (math.pi / 2) ** d * s ** (math.log(1 + 4 / math.pi) / math.log(2)))
    log_factor = (d + math.log(s)) * (d + math.log(s / eps))
    return SampleComplexityEstimate(
        setting=SampleComplexitySetting.LEGENDRE_PRECONDITIONED,
        value=leading * log_factor,
        factors={"K": leading, "log": log_factor},
    )

def _fourier(family, mu, d, s, eps, n_columns) -> SampleComplexityEstimate:
    if not family.is_fourier or mu.law != "uniform":
        raise UnsupportedParametersError("La cota de Fourier requiere base de Fourier y muestreo uniforme")
    n = n_columns if n_columns is not None else hyperbolic_cross_size(d, s, signed=True)
    log_factor = math.log(n / eps) + math.log(s) * math.log(s / eps)
    return SampleComplexityEstimate(
        setting=SampleComplexitySetting.FOURIER,
        value=s * log_factor,
        factors={"K": float(s), "N": float(n), "log": log_factor},
    )

def sample_complexity_estimate(family: BasisFamily, mu: Density, d: int, s: int, eps: float,
                               setting: SampleComplexitySetting,
                               k_mode: KMode = KMode.EXACT,
                               n_columns: Optional[int] = None) -> SampleComplexityEstimate:
    """
    Evalúa la cota de complejidad muestral del escenario pedido.

    Args:
        family: Familia de la base
        mu: Densidad de muestreo
        d: Dimensión
        s: Orden de dispersión
        eps: Probabilidad de fallo ε ∈ (0, 1)
        setting: Escenario (gradiente, sin gradiente, Jacobi cerrado, Legendre precondicionado, Fourier)
        k_mode: K(s) exacto o cota cerrada
        n_columns: N para el escenario de Fourier (por defecto, la cruz hiperbólica con signo)

    Returns:
        SampleComplexityEstimate con valor y factores

    Raises:
        UnsupportedParametersError: Parámetros fuera de cobertura
    """
    _check_eps(eps)
    if d < 1 or s < 1:
        raise DomainParameterError(f"Se requiere d ≥ 1 y s ≥ 1 (recibido d={d}, s={s})")
    setting = SampleComplexitySetting(setting)
    if setting == SampleComplexitySetting.GRADIENT_AUGMENTED:
        estimate = _gradient_augmented(family, mu, d, s, eps, k_mode)
    elif setting == SampleComplexitySetting.UNAUGMENTED:
        estimate = _unaugmented(family, mu, d, s, eps, k_mode)
    elif setting == SampleComplexitySetting.JACOBI_CLOSED_FORM:
        estimate = _jacobi_closed_form(family, mu, d, s, eps)
    elif setting == SampleComplexitySetting.LEGENDRE_PRECONDITIONED:
        estimate = _legendre_preconditioned(family, mu, d, s, eps)
    else:
        estimate = _fourier(family, mu, d, s, eps, n_columns)
    logger.debug("Complejidad %s (%s, d=%d, s=%d): %.6g",
                 setting.value, family.name, d, s, estimate.value)
    return estimate

def general_sample_complexity(family: BasisFamily, mu: Density, index_set: IndexSet,
                              delta: IndexSet, weights: Sequence[float],
                              eps: float) -> SampleComplexityEstimate:
    """
    Cota general con Λ, Δ ⊆ Λ y pesos w explícitos:
    max_Λ((1+κ)/(1+λ))·(|Δ|_u + max_Λ(u²/w²)|Δ|_w)·(log(N/ε) + log|Δ|_w·log(|Δ|_w/ε)).
    """
    _check_eps(eps)
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(index_set),) or np.any(w < 1.0 - 1e-12):
        raise DomainParameterError("Los pesos deben estar alineados con Λ y ser ≥ 1")
    if any(n not in index_set for n in delta):
        raise DomainParameterError("Δ debe estar contenido en Λ")

    u = intrinsic_weights(family, mu, index_set)
    positions = [index_set.position(n) for n in delta]
    delta_u = float(np.sum(u[positions] ** 2))
    delta_w = float(np.sum(w[positions] ** 2))
    ratio = kappa_lambda_factor(family, mu, index_set)
    weight_ratio = float(np.max(u ** 2 / w ** 2))
    log_factor = math.log(len(index_set) / eps) + math.log(delta_w) * math.log(delta_w / eps)
    factors: Dict[str, float] = {
        "kappa_lambda": ratio, "delta_u": delta_u, "delta_w": delta_w,
        "u_over_w": weight_ratio, "log": log_factor,
    }
    return SampleComplexityEstimate(
        setting=SampleComplexitySetting.GRADIENT_AUGMENTED,
        value=ratio * (delta_u + weight_ratio * delta_w) * log_factor,
        factors=factors,
    )
