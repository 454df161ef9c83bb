"""Configuración común de pytest"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Añadir el directorio src al path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from domain.entities.domain import BasisFamily, Density  # noqa: E402

def pytest_configure(config):
    config.addinivalue_line("markers", "slow: pruebas de tendencia que ejecutan barridos completos")

@pytest.fixture
def legendre():
    return BasisFamily.legendre()

@pytest.fixture
def chebyshev():
    return BasisFamily.chebyshev()

@pytest.fixture
def fourier():
    return BasisFamily.fourier()

@pytest.fixture
def uniform():
    return Density.uniform()

@pytest.fixture
def rng():
    return np.random.default_rng(2024)
