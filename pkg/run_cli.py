#!/usr/bin/env python3
"""
Script para ejecutar la CLI de gradcs
Ejemplos:
    python run_cli.py run experiments/minimal.json --out results/minimal
    python run_cli.py run --preset gain-exp-legendre --jobs 4
    python run_cli.py theory --family chebyshev --d 4 --s 10
    python run_cli.py validate all
"""

import sys
import logging
from pathlib import Path

from dotenv import load_dotenv

# Añadir el directorio src al path
sys.path.append(str(Path(__file__).parent / "src"))

load_dotenv()

# Configurar logging de los módulos de dominio y aplicación
logging.basicConfig(
    level=logging.WARNING,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

if __name__ == "__main__":
    from infrastructure.cli.main import main

    sys.exit(main())
