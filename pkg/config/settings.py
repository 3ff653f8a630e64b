"""
Configuración central del laboratorio nestfield
Carga variables de entorno y define los valores por defecto a escala de escritorio
"""

import os
from pathlib import Path
from dotenv import load_dotenv
from typing import Dict, Any

# Cargar variables de entorno
load_dotenv()

class Settings:
    """Configuración centralizada de la aplicación"""
    
    # Rutas base
    BASE_DIR = Path(__file__).parent.parent
    OUTPUT_DIR = Path(os.getenv("NESTFIELD_OUTPUT_ROOT", str(BASE_DIR / "runs")))
    LOGS_DIR = BASE_DIR / "logs"
    
    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = os.getenv("LOG_FILE", "logs/nestfield.log")
    LOG_EVERY = int(os.getenv("LOG_EVERY", "100"))  # épocas entre líneas de progreso
    
    # Arquitectura por defecto a escala de escritorio
    DEFAULT_WIDTH = int(os.getenv("DEFAULT_WIDTH", "64"))
    DEFAULT_DEPTH = int(os.getenv("DEFAULT_DEPTH", "2"))
    DEFAULT_NUM_FREQUENCIES = int(os.getenv("DEFAULT_NUM_FREQUENCIES", "16"))
    
    # Tamaños de las señales
    DEFAULT_IMAGE_SIZE = int(os.getenv("DEFAULT_IMAGE_SIZE", "64"))
    DEFAULT_VOLUME_RESOLUTION = int(os.getenv("DEFAULT_VOLUME_RESOLUTION", "32"))
    DEFAULT_CT_ANGLES = int(os.getenv("DEFAULT_CT_ANGLES", "60"))
    
    # Entrenamiento
    DEFAULT_LR = float(os.getenv("DEFAULT_LR", "0.005"))  # tasa inicial de los presets
    DEFAULT_JOBS = int(os.getenv("DEFAULT_JOBS", "1"))
    
    @classmethod
    def create_directories(cls):
        """Crear directorios necesarios si no existen"""
        for directory in [cls.OUTPUT_DIR, cls.LOGS_DIR]:
            directory.mkdir(parents=True, exist_ok=True)
    
    @classmethod
    def summary(cls) -> Dict[str, Any]:
        """Resumen de la configuración efectiva (para `--json` y logs)"""
        return {
            "output_dir": str(cls.OUTPUT_DIR),
            "log_level": cls.LOG_LEVEL,
            "width": cls.DEFAULT_WIDTH,
            "depth": cls.DEFAULT_DEPTH,
            "num_frequencies": cls.DEFAULT_NUM_FREQUENCIES,
            "lr": cls.DEFAULT_LR,
            "jobs": cls.DEFAULT_JOBS,
        }

# Instancia global de configuración
settings = Settings()
settings.create_directories()
