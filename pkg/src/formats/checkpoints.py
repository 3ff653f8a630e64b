"""
Checkpoints de modelos en texto

    NESTFIELD-CHECKPOINT 1
    architecture {descriptor JSON}
    layout [["nombre", [forma...]], ...]
    count N
    N líneas, un valor por línea con 17 dígitos significativos

Los parámetros siguen el orden de declaración del modelo; la lectura
reproduce los valores bit a bit.
"""

import json
from collections import OrderedDict
from pathlib import Path
from typing import List, Union

import numpy as np
from pydantic import ValidationError

from src.models.networks import Model
from src.utils.data_models import Architecture
from src.utils.errors import FormatError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MAGIC = "NESTFIELD-CHECKPOINT 1"


def write_checkpoint(model: Model, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    layout = [[name, list(p.shape)] for name, p in model.params.items()]
    flat = model.flat_parameters()
    lines = [
        MAGIC,
        "architecture " + json.dumps(model.architecture.model_dump(mode="json"), sort_keys=True),
        "layout " + json.dumps(layout),
        f"count {flat.size}",
    ]
    lines.extend(format(float(v), ".17g") for v in flat)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug(f"Checkpoint escrito: {path} ({flat.size} parámetros)")
    return path


def _field(lines: List[str], index: int, prefix: str) -> str:
    if index >= len(lines) or not lines[index].startswith(prefix + " "):
        raise FormatError(f"Se esperaba '{prefix}'", line=index + 1)
    return lines[index][len(prefix) + 1:]


def read_checkpoint(path: Union[str, Path]) -> Model:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != MAGIC:
        raise FormatError("Cabecera de checkpoint desconocida", line=1)
    try:
        architecture = Architecture.model_validate(json.loads(_field(lines, 1, "architecture")))
        layout = json.loads(_field(lines, 2, "layout"))
    except (json.JSONDecodeError, ValidationError) as e:
        raise FormatError(f"Descriptor inválido: {e}", line=2)
    try:
        count = int(_field(lines, 3, "count"))
    except ValueError:
        raise FormatError("Conteo de parámetros inválido", line=4)

    values = lines[4:4 + count]
    if len(values) != count:
        raise FormatError(f"Se esperaban {count} valores, hay {len(values)}", line=len(lines))
    flat = np.empty(count)
    for i, text in enumerate(values):
        try:
            flat[i] = float(text)
        except ValueError:
            raise FormatError(f"Valor inválido {text!r}", line=5 + i)

    params: "OrderedDict[str, np.ndarray]" = OrderedDict()
    offset = 0
    for name, shape in layout:
        size = int(np.prod(shape)) if shape else 1
        params[name] = flat[offset:offset + size].reshape(shape).copy()
        offset += size
    if offset != count:
        raise FormatError(f"El layout describe {offset} valores y el archivo tiene {count}", line=3)
    return Model(architecture, params)
