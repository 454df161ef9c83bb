"""
Logger de gradcs
Salida en consola con colores por nivel, archivo opcional, contexto de
ejecución y métricas de rendimiento (duración y memoria residente)
"""

import functools
import json
import logging
import sys
import time
import traceback
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import psutil
from colorama import Fore, Style, just_fix_windows_console

just_fix_windows_console()

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(funcName)s:%(lineno)d | %(message)s"

class GradCSFormatter(logging.Formatter):
    """Formatter con colores por nivel y etiqueta de contexto"""

    LEVEL_COLORS = {
        "DEBUG": Fore.CYAN,
        "INFO": Fore.GREEN,
        "WARNING": Fore.YELLOW,
        "ERROR": Fore.RED,
        "CRITICAL": Fore.MAGENTA,
    }

    def __init__(self, use_colors: bool = True):
        super().__init__(LOG_FORMAT)
        self.use_colors = use_colors

    def format(self, record: logging.LogRecord) -> str:
        context = getattr(record, "gradcs_context", None)
        if context:
            record.msg = f"[{context}] {record.msg}"
            record.gradcs_context = None
        record.asctime = datetime.fromtimestamp(record.created).strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
        formatted = super().format(record)
        if not self.use_colors:
            return formatted
        return f"{self.LEVEL_COLORS.get(record.levelname, '')}{formatted}{Style.RESET_ALL}"

class GradCSLogger:
    """
    Logger de la aplicación
    Envuelve logging.getLogger("gradcs") con manejadores de consola y archivo
    """

    def __init__(self, name: str = "gradcs", log_file: Optional[str] = None, level: str = "INFO"):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(getattr(logging, level.upper(), logging.INFO))
        self.logger.propagate = False

        # Evitar duplicación de handlers
        if not self.logger.handlers:
            self._setup_handlers(log_file)

        self.context: Dict[str, Any] = {
            "component": "gradcs",
            "initialized_at": datetime.now().isoformat(),
        }

    def _setup_handlers(self, log_file: Optional[str] = None):
        """Configura los handlers del logger"""
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(GradCSFormatter(use_colors=sys.stderr.isatty()))
        self.logger.addHandler(console_handler)

        if log_file:
            self.add_file_handler(log_file)

    def add_file_handler(self, log_file: str):
        """Añade un archivo de log sin colores (nivel INFO o superior)"""
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        for handler in self.logger.handlers:
            if isinstance(handler, logging.FileHandler) and Path(handler.baseFilename) == log_path.resolve():
                return
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(GradCSFormatter(use_colors=False))
        self.logger.addHandler(file_handler)

    def set_level(self, level: str):
        self.logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    def set_context(self, **context):
        """Actualiza el contexto global"""
        self.context.update(context)

    def gradcs_debug(self, message: str):
        self.logger.debug(message, extra={"gradcs_context": "DEBUG"}, stacklevel=2)

    def gradcs_info(self, message: str):
        self.logger.info(message, extra={"gradcs_context": "INFO"}, stacklevel=2)

    def gradcs_warning(self, message: str):
        self.logger.warning(message, extra={"gradcs_context": "WARNING"}, stacklevel=2)

    def gradcs_error(self, message: str, error: Optional[Exception] = None,
                     include_traceback: bool = False):
        """Log de error con tipo de excepción y, opcionalmente, traza"""
        details = ""
        if error is not None:
            details = f" | Error: {error} | Type: {type(error).__name__}"
            if include_traceback:
                details += f" | Traceback: {traceback.format_exc()}"
        self.logger.error(f"{message}{details}", extra={"gradcs_context": "ERROR"}, stacklevel=2)

    def gradcs_performance_log(self, operation: str, duration: float, **kwargs):
        """Log de rendimiento con memoria residente del proceso"""
        rss_mb = psutil.Process().memory_info().rss / 1024 ** 2
        perf_info = {
            "operation": operation,
            "duration_ms": round(duration * 1000, 2),
            "rss_mb": round(rss_mb, 1),
            "command": self.context.get("command"),
            **kwargs,
        }
        self.logger.info(
            f"PERFORMANCE | Operation: {operation} | Duration: {duration:.3f}s | RSS: {rss_mb:.1f} MB",
            extra={"gradcs_context": "PERFORMANCE"}, stacklevel=2,
        )
        self.logger.debug(f"PERF-DETAILS: {json.dumps(perf_info)}",
                          extra={"gradcs_context": "PERFORMANCE"}, stacklevel=2)

# Instancia global del logger
gradcs_logger = GradCSLogger()

# Funciones de conveniencia
def log_gradcs_info(message: str):
    gradcs_logger.gradcs_info(message)

def log_gradcs_warning(message: str):
    gradcs_logger.gradcs_warning(message)

def log_gradcs_error(message: str, error: Optional[Exception] = None, **kwargs):
    gradcs_logger.gradcs_error(message, error, **kwargs)

def gradcs_operation_logger(operation: str) -> Callable:
    """Decorador que registra inicio, éxito con duración o error de una operación"""

    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            gradcs_logger.gradcs_debug(f"Inicio de {operation}")
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                gradcs_logger.gradcs_error(f"Fallo en {operation}", e)
                raise
            gradcs_logger.gradcs_performance_log(operation, time.perf_counter() - start)
            return result
        return wrapper

    return decorator
