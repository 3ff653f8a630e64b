"""
Tablas CSV (pandas) y grillas numéricas con cabecera de dimensiones

Grillas: la primera línea lista las dimensiones separadas por comas; luego
cada fila es el último eje, en orden row-major, con 17 dígitos significativos.
"""

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from src.utils.errors import FormatError

FLOAT_FORMAT = "%.17g"


def write_table(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def write_grid_csv(values: np.ndarray, path: Union[str, Path]) -> Path:
    """Sinogramas (ángulos × detectores), volúmenes R³ o campos 2D"""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim < 1:
        raise FormatError("La grilla debe tener al menos una dimensión")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = values.reshape(-1, values.shape[-1])
    np.savetxt(path, rows, fmt=FLOAT_FORMAT, delimiter=",",
               header=",".join(str(n) for n in values.shape), comments="")
    return path


def read_grid_csv(path: Union[str, Path]) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError("Archivo de grilla vacío", line=1)
    try:
        dims = tuple(int(n) for n in lines[0].split(","))
    except ValueError:
        raise FormatError(f"Cabecera de dimensiones inválida: {lines[0]!r}", line=1)
    rows = []
    for number, line in enumerate(lines[1:], start=2):
        try:
            rows.append([float(v) for v in line.split(",")])
        except ValueError:
            raise FormatError(f"Valor no numérico: {line!r}", line=number)
    values = np.asarray(rows, dtype=np.float64)
    if values.size != int(np.prod(dims)):
        raise FormatError(f"Se esperaban {int(np.prod(dims))} valores, hay {values.size}", line=len(lines))
    return values.reshape(dims)
