"""
Escritor CSV de filas de resultados
Cabecera fija tomada de la primera fila, flotantes con 17 cifras
significativas y volcado a disco tras cada fila
"""

import csv
import logging
import math
from pathlib import Path
from typing import Any, List, Mapping, Optional

from domain.entities.domain import ResultWriter

logger = logging.getLogger(__name__)

def format_value(value: Any) -> str:
    """Serialización estable: '.17g' para flotantes (ida y vuelta exacta)"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    if isinstance(value, complex):
        return f"{format(value.real, '.17g')}{format(value.imag, '+.17g')}j"
    return str(value)

class CsvResultWriter(ResultWriter):
    """Implementación de ResultWriter sobre un archivo CSV"""

    def __init__(self, path: str, columns: Optional[List[str]] = None):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.columns = list(columns) if columns else None
        self._file = open(self.path, "w", encoding="utf-8", newline="")
        self._writer = None
        self.rows_written = 0
        if self.columns:
            self._start(self.columns)

    def _start(self, columns: List[str]):
        self._writer = csv.DictWriter(self._file, fieldnames=columns, lineterminator="\n")
        self._writer.writeheader()

    def write_row(self, row: Mapping[str, Any]) -> None:
        if self._file.closed:
            raise ValueError(f"El escritor de {self.path} está cerrado")
        if self._writer is None:
            self.columns = list(row.keys())
            self._start(self.columns)
        missing = [column for column in self.columns if column not in row]
        if missing or len(row) != len(self.columns):
            raise ValueError(f"La fila no tiene el conjunto de columnas declarado (faltan {missing})")
        self._writer.writerow({column: format_value(row[column]) for column in self.columns})
        self._file.flush()
        self.rows_written += 1

    def write_rows(self, rows) -> None:
        for row in rows:
            self.write_row(row)

    def close(self) -> None:
        if not self._file.closed:
            self._file.close()
            logger.debug("CSV %s cerrado con %d filas", self.path, self.rows_written)

    def __enter__(self) -> "CsvResultWriter":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

def read_rows(path: str) -> List[dict]:
    """Lee un CSV escrito por CsvResultWriter como lista de diccionarios de texto"""
    with open(path, encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))
