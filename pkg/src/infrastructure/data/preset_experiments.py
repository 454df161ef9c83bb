"""
Experimentos precargados
Protocolos de barrido listos para `gradcs run --preset <nombre>`: ganancia por
gradiente (F1, F2, F3 con Legendre/uniforme y Chebyshev/Chebyshev), barrido
de θ, gradiente fraccional y gradiente en puntos independientes
"""

from typing import Any, Dict, List, Optional

from application.dto.experiment_dto import ExperimentConfig

# (d, s) de las escalas de referencia; d=4, s=10 es la escala de escritorio
REFERENCE_SCALES: Dict[int, int] = {4: 72, 8: 23, 12: 14}
DESK_SCALE = (4, 10)

THETA_SWEEP = [0.0, 0.5, 1.0, 1.5, 2.0]
GRADIENT_FRACTIONS = [0.0, 0.25, 0.5, 1.0]

FAMILIES = {
    "legendre": {"family": {"kind": "legendre"}, "density": "uniform"},
    "chebyshev": {"family": {"kind": "chebyshev"}, "density": "chebyshev"},
}

# ============================================================================
# PROTOCOLOS
# ============================================================================

def _gain(function: str, family: str) -> Dict[str, Any]:
    return {
        "function": function,
        **FAMILIES[family],
        "modes": [{"kind": "unaugmented"}, {"kind": "full_gradient"}],
        "thetas": [1.0],
    }

def _theta_sweep(function: str, family: str) -> Dict[str, Any]:
    return {**_gain(function, family), "thetas": list(THETA_SWEEP)}

def _fractional(family: str) -> Dict[str, Any]:
    return {
        "function": "F3",
        **FAMILIES[family],
        "modes": [{"kind": "fractional_gradient", "fraction": p} for p in GRADIENT_FRACTIONS],
        "thetas": [1.0],
    }

def _independent(family: str) -> Dict[str, Any]:
    return {
        "function": "F1",
        **FAMILIES[family],
        "modes": [
            {"kind": "unaugmented"},
            {"kind": "full_gradient"},
            {"kind": "independent_gradient"},
        ],
        "thetas": [1.0],
    }

PRESET_PROTOCOLS: Dict[str, Dict[str, Any]] = {}
for _family in FAMILIES:
    for _function, _label in (("F1", "peak"), ("F2", "product"), ("F3", "exp")):
        PRESET_PROTOCOLS[f"gain-{_label}-{_family}"] = _gain(_function, _family)
        PRESET_PROTOCOLS[f"theta-{_label}-{_family}"] = _theta_sweep(_function, _family)
    PRESET_PROTOCOLS[f"fractional-{_family}"] = _fractional(_family)
    PRESET_PROTOCOLS[f"independent-{_family}"] = _independent(_family)

# ============================================================================
# CONSULTA
# ============================================================================

def get_preset_names() -> List[str]:
    """Retorna los nombres de los experimentos precargados"""
    return sorted(PRESET_PROTOCOLS)

def get_preset(name: str, dimension: Optional[int] = None, trials: int = 10,
               seed: int = 0) -> ExperimentConfig:
    """
    Construye la configuración de un experimento precargado

    Args:
        name: Nombre del protocolo
        dimension: d de una escala de referencia (4, 8 o 12); None usa la escala de escritorio
        trials: Ensayos por configuración
        seed: Semilla maestra

    Raises:
        KeyError: Protocolo o dimensión desconocidos
    """
    if name not in PRESET_PROTOCOLS:
        raise KeyError(f"Experimento precargado desconocido: {name}")
    if dimension is None:
        d, s = DESK_SCALE
    elif dimension in REFERENCE_SCALES:
        d, s = dimension, REFERENCE_SCALES[dimension]
    else:
        raise KeyError(f"Sin escala de referencia para d={dimension} (disponibles: {sorted(REFERENCE_SCALES)})")
    payload = {
        "name": f"{name}-d{d}-s{s}",
        **PRESET_PROTOCOLS[name],
        "d": d,
        "s": s,
        "trials": trials,
        "seed": seed,
    }
    return ExperimentConfig.model_validate(payload)
