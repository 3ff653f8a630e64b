# Lectura y escritura de artefactos
from src.formats.checkpoints import read_checkpoint, write_checkpoint
from src.formats.config_file import load_config, parse_config, save_config, serialize_config
from src.formats.images import read_image, write_image
from src.formats.results import read_results, write_result
from src.formats.tables import read_grid_csv, read_table, write_grid_csv, write_table

__all__ = [
    "read_checkpoint",
    "write_checkpoint",
    "load_config",
    "parse_config",
    "save_config",
    "serialize_config",
    "read_image",
    "write_image",
    "read_results",
    "write_result",
    "read_grid_csv",
    "read_table",
    "write_grid_csv",
    "write_table",
]
