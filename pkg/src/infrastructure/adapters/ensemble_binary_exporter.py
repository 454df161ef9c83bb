"""
Exportador de ensambles de medición

Contenedor binario:
    8 bytes   magic b"GRADCSE1"
    uint32    longitud L de la cabecera (little-endian)
    L bytes   cabecera JSON UTF-8 (dims, modo, semilla, tipo)
    payload   matriz A en orden de columnas y después y, en float64
              little-endian; los complejos se guardan como pares (re, im)
"""

import json
import struct
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from domain.entities.domain import EnsembleExporter, MeasurementEnsemble, DomainParameterError
from infrastructure.adapters.csv_result_writer import CsvResultWriter
from infrastructure.logger.gradcs_logger import gradcs_logger

MAGIC = b"GRADCSE1"

class EnsembleBinaryExporter(EnsembleExporter):
    """Implementación de EnsembleExporter con contenedor binario y CSV de depuración"""

    def export_binary(self, ensemble: MeasurementEnsemble, path: str, seed: Optional[int] = None) -> None:
        is_complex = bool(np.iscomplexobj(ensemble.matrix) or np.iscomplexobj(ensemble.rhs))
        dtype = "<c16" if is_complex else "<f8"
        header = {
            "rows": ensemble.rows,
            "columns": ensemble.columns,
            "dimension": ensemble.index_set.dimension,
            "block_sizes": list(ensemble.block_sizes),
            "m_o": ensemble.m_o,
            "m_g": ensemble.m_g,
            "mode": ensemble.mode.kind.value,
            "fraction": ensemble.mode.fraction,
            "seed": seed if seed is not None else ensemble.points.seed,
            "complex": is_complex,
        }
        encoded = json.dumps(header, sort_keys=True).encode("utf-8")
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "wb") as handle:
            handle.write(MAGIC)
            handle.write(struct.pack("<I", len(encoded)))
            handle.write(encoded)
            handle.write(np.asarray(ensemble.matrix).astype(dtype).tobytes(order="F"))
            handle.write(np.asarray(ensemble.rhs).astype(dtype).tobytes())
        gradcs_logger.gradcs_debug(
            f"Ensamble exportado a {target}: {ensemble.rows}x{ensemble.columns} ({dtype})"
        )

    def export_csv(self, ensemble: MeasurementEnsemble, path: str) -> None:
        """Una fila por medición: bloque, columnas de A y y"""
        matrix = np.asarray(ensemble.matrix)
        columns = ["block"] + [f"a{j}" for j in range(ensemble.columns)] + ["y"]
        blocks = np.repeat(np.arange(len(ensemble.block_sizes)), ensemble.block_sizes)
        with CsvResultWriter(path, columns) as writer:
            for i in range(ensemble.rows):
                row = {"block": int(blocks[i]), "y": _scalar(ensemble.rhs[i])}
                row.update({f"a{j}": _scalar(matrix[i, j]) for j in range(ensemble.columns)})
                writer.write_row(row)

def load_binary(path: str) -> Tuple[dict, np.ndarray, np.ndarray]:
    """Lee un contenedor escrito por export_binary: (cabecera, A, y)"""
    data = Path(path).read_bytes()
    if data[:len(MAGIC)] != MAGIC:
        raise DomainParameterError(f"{path}: no es un contenedor de ensamble")
    offset = len(MAGIC)
    (length,) = struct.unpack_from("<I", data, offset)
    offset += 4
    header = json.loads(data[offset:offset + length].decode("utf-8"))
    offset += length
    dtype = np.dtype("<c16" if header["complex"] else "<f8")
    rows, columns = header["rows"], header["columns"]
    payload = np.frombuffer(data, dtype=dtype, offset=offset)
    if payload.size != rows * columns + rows:
        raise DomainParameterError(f"{path}: tamaño de payload inconsistente con la cabecera")
    matrix = payload[:rows * columns].reshape((rows, columns), order="F")
    return header, matrix, payload[rows * columns:].copy()

def _scalar(value):
    value = complex(value)
    return value if value.imag != 0.0 else value.real
