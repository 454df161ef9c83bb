"""
Caso de uso de cálculos teóricos: complejidad muestral y K(s)
"""

from abc import ABC, abstractmethod
import logging
from typing import List

from domain.entities.domain import KMode, SampleComplexitySetting
from domain.services.index_sets import DEFAULT_K_SEARCH_CAP, K_of_s
from domain.services.sample_complexity import sample_complexity_estimate
from application.dto.experiment_dto import TheoryRequest, TheoryRow

logger = logging.getLogger(__name__)

_K_SETTINGS = (SampleComplexitySetting.GRADIENT_AUGMENTED, SampleComplexitySetting.UNAUGMENTED)

class TheoryUseCase(ABC):
    """Caso de uso de la tabla de complejidad muestral"""

    @abstractmethod
    def execute(self, request: TheoryRequest) -> List[TheoryRow]:
        """Una fila por escenario pedido"""
        pass

class TheoryUseCaseImpl(TheoryUseCase):
    """Evalúa cada escenario con la constante universal igual a 1"""

    def __init__(self, k_search_cap: int = DEFAULT_K_SEARCH_CAP):
        self.k_search_cap = k_search_cap

    def execute(self, request: TheoryRequest) -> List[TheoryRow]:
        family = request.family_domain()
        mu = request.density_domain()
        needs_search = any(setting in _K_SETTINGS for setting in request.settings)
        if request.k_mode == KMode.EXACT and needs_search:
            # Calienta la tabla de K(s) respetando el límite configurado
            K_of_s(family, mu, request.d, request.s, request.k_mode, self.k_search_cap)

        rows = []
        for setting in request.settings:
            estimate = sample_complexity_estimate(
                family, mu, request.d, request.s, request.eps, setting,
                k_mode=request.k_mode, n_columns=request.n_columns,
            )
            rows.append(TheoryRow(
                family=family.name, density=mu.name, d=request.d, s=request.s, eps=request.eps,
                setting=setting.value, value=estimate.value, factors=dict(estimate.factors),
            ))
        logger.info("Tabla teórica %s d=%d s=%d: %d escenarios",
                    family.name, request.d, request.s, len(rows))
        return rows

def format_theory_table(rows: List[TheoryRow]) -> str:
    """Tabla de texto con el desglose de factores"""
    lines = [f"{'setting':<26}{'value':>16}  factors"]
    for row in rows:
        factors = ", ".join(f"{name}={value:.6g}" for name, value in row.factors.items())
        lines.append(f"{row.setting:<26}{row.value:>16.6g}  {factors}")
    return "\n".join(lines)

def create_theory_use_case(k_search_cap: int = DEFAULT_K_SEARCH_CAP) -> TheoryUseCase:
    return TheoryUseCaseImpl(k_search_cap)
