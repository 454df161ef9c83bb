"""
GRADCS - Logger Module
Logging con colores, archivo opcional y métricas de rendimiento
"""

from .gradcs_logger import (
    GradCSFormatter,
    GradCSLogger,
    gradcs_logger,
    gradcs_operation_logger,
    log_gradcs_error,
    log_gradcs_info,
    log_gradcs_warning
)

__all__ = [
    # Logger classes and instances
    "GradCSFormatter",
    "GradCSLogger",
    "gradcs_logger",

    # Logging functions
    "gradcs_operation_logger",
    "log_gradcs_error",
    "log_gradcs_info",
    "log_gradcs_warning"
]
