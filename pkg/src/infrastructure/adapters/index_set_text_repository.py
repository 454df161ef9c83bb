"""
Repositorio de texto para conjuntos de índices y aproximantes

Formato: una cabecera "d=<d>" y después un multi-índice por línea con
enteros separados por espacios; los aproximantes añaden una última columna
con el coeficiente ('.17g', o "re+imj" para Fourier). Las líneas vacías y
las que empiezan por '#' se ignoran.
"""

import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np

from domain.entities.domain import (
    Approximant, BasisFamily, IndexSet, IndexSetRepository, DomainParameterError
)
from infrastructure.adapters.csv_result_writer import format_value

logger = logging.getLogger(__name__)

class IndexSetTextRepository(IndexSetRepository):
    """Implementación de IndexSetRepository sobre archivos de texto"""

    def save_index_set(self, index_set: IndexSet, path: str) -> None:
        lines = [f"d={index_set.dimension}"]
        lines.extend(" ".join(str(k) for k in n) for n in index_set)
        self._write(path, lines)

    def load_index_set(self, path: str) -> IndexSet:
        d, records = self._read(path)
        indices = []
        for line_number, fields in records:
            if len(fields) != d:
                raise DomainParameterError(
                    f"{path}:{line_number}: se esperaban {d} enteros, hay {len(fields)} campos"
                )
            indices.append(self._parse_index(path, line_number, fields))
        return IndexSet(d, tuple(indices))

    def save_approximant(self, approximant: Approximant, path: str) -> None:
        lines = [f"d={approximant.dimension}"]
        for n, value in zip(approximant.index_set, approximant.coefficients):
            value = complex(value) if np.iscomplexobj(approximant.coefficients) else float(value)
            lines.append(" ".join(str(k) for k in n) + " " + format_value(value))
        self._write(path, lines)

    def load_approximant(self, path: str, family: BasisFamily) -> Approximant:
        d, records = self._read(path)
        indices, coefficients = [], []
        for line_number, fields in records:
            if len(fields) != d + 1:
                raise DomainParameterError(
                    f"{path}:{line_number}: se esperaban {d} enteros y un coeficiente"
                )
            indices.append(self._parse_index(path, line_number, fields[:d]))
            try:
                coefficients.append(complex(fields[d]) if family.is_fourier else float(fields[d]))
            except ValueError:
                raise DomainParameterError(f"{path}:{line_number}: coeficiente inválido '{fields[d]}'") from None
        index_set = IndexSet(d, tuple(indices))
        dtype = complex if family.is_fourier else float
        return Approximant(family=family, index_set=index_set,
                           coefficients=np.array(coefficients, dtype=dtype))

    @staticmethod
    def _write(path: str, lines: List[str]) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.debug("Escrito %s (%d líneas)", target, len(lines) - 1)

    @staticmethod
    def _parse_index(path: str, line_number: int, fields: List[str]) -> Tuple[int, ...]:
        try:
            return tuple(int(k) for k in fields)
        except ValueError:
            raise DomainParameterError(f"{path}:{line_number}: multi-índice no entero {fields}") from None

    @staticmethod
    def _read(path: str) -> Tuple[int, List[Tuple[int, List[str]]]]:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        d = None
        records = []
        for line_number, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if d is None:
                if not line.startswith("d="):
                    raise DomainParameterError(f"{path}:{line_number}: falta la cabecera 'd=<d>'")
                try:
                    d = int(line[2:])
                except ValueError:
                    raise DomainParameterError(f"{path}:{line_number}: dimensión inválida") from None
                continue
            records.append((line_number, line.split()))
        if d is None:
            raise DomainParameterError(f"{path}: archivo vacío")
        return d, records
