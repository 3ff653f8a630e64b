"""
Punto de entrada de nestfield

    python app.py fit-image --seed 0 --seed 1
    python app.py pinn --config conv.toml --set model.width=32
    python app.py verify
"""

import sys
from pathlib import Path

# Agregar el directorio raíz al path
sys.path.insert(0, str(Path(__file__).parent))

from src.cli.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
