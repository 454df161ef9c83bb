"""
Servicio de carga de configuraciones de experimento
Lee archivos JSON, los valida con los DTOs pydantic y traduce cada error a
un diagnóstico "archivo:línea: campo: mensaje"
"""

import json
import logging
import re
from pathlib import Path
from typing import List, Optional, Sequence, Union

from pydantic import ValidationError

from application.dto.experiment_dto import ExperimentConfig, TheoryRequest
from domain.entities.domain import ConfigurationError
from infrastructure.data.preset_experiments import get_preset, get_preset_names

logger = logging.getLogger(__name__)

def locate_field(text: str, loc: Sequence[Union[str, int]]) -> int:
    """
    Línea (base 1) donde aparece la clave más profunda de `loc` en el JSON

    Las claves se buscan en orden, cada una a partir de la anterior; los
    índices de lista se ignoran. Si no se encuentra nada, se retorna 1.
    """
    position, found = 0, None
    for part in loc:
        if not isinstance(part, str):
            continue
        match = re.compile(r'"' + re.escape(part) + r'"\s*:').search(text, position)
        if match is None:
            break
        position = found = match.start()
    if found is None:
        return 1
    return text.count("\n", 0, found) + 1

def format_diagnostics(source: str, text: str, error: ValidationError) -> List[str]:
    diagnostics = []
    for item in error.errors():
        loc = item.get("loc", ())
        field = ".".join(str(part) for part in loc) or "<raíz>"
        diagnostics.append(f"{source}:{locate_field(text, loc)}: {field}: {item.get('msg')}")
    return diagnostics

class ExperimentLoaderService:
    """Servicio para cargar configuraciones de experimento y de teoría"""

    def load_text(self, text: str, source: str = "<config>") -> ExperimentConfig:
        """
        Valida una configuración JSON

        Raises:
            ConfigurationError: JSON mal formado o campos inválidos
        """
        self._check_syntax(text, source)
        try:
            config = ExperimentConfig.model_validate_json(text)
        except ValidationError as e:
            diagnostics = format_diagnostics(source, text, e)
            raise ConfigurationError(f"Configuración inválida en {source}", diagnostics) from None
        logger.info(f"📄 Configuración '{config.name}' cargada desde {source}")
        return config

    def load_file(self, path: str) -> ExperimentConfig:
        return self.load_text(self._read(path), path)

    def load_preset(self, name: str, dimension: Optional[int] = None,
                    trials: int = 10, seed: int = 0) -> ExperimentConfig:
        try:
            return get_preset(name, dimension, trials, seed)
        except KeyError as e:
            raise ConfigurationError(
                str(e.args[0]), [f"Disponibles: {', '.join(get_preset_names())}"]
            ) from None
        except ValidationError as e:
            raise ConfigurationError(f"Preajuste '{name}' inválido", [str(e)]) from None

    def load_theory_request(self, text: str, source: str = "<theory>") -> TheoryRequest:
        self._check_syntax(text, source)
        try:
            return TheoryRequest.model_validate_json(text)
        except ValidationError as e:
            raise ConfigurationError(
                f"Petición teórica inválida en {source}", format_diagnostics(source, text, e)
            ) from None

    @staticmethod
    def dump(config: ExperimentConfig) -> str:
        """Serializa una configuración; volver a cargarla da la misma configuración"""
        return config.model_dump_json(indent=2)

    @staticmethod
    def _read(path: str) -> str:
        try:
            return Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"No se puede leer {path}", [f"{path}:0: {e.strerror}"]) from None

    @staticmethod
    def _check_syntax(text: str, source: str) -> None:
        try:
            json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigurationError(
                f"JSON mal formado en {source}", [f"{source}:{e.lineno}: {e.msg} (columna {e.colno})"]
            ) from None

def create_experiment_loader_service() -> ExperimentLoaderService:
    return ExperimentLoaderService()
