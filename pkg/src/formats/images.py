"""
Lectura y escritura de imágenes PGM (P5) y PPM (P6) de 8 bits

Cabecera: número mágico, ancho, alto y maxval (255) separados por espacios;
se admiten comentarios '#' hasta fin de línea. Tras maxval viene un único
byte de espacio y luego H·W·C bytes por filas. Cuantización v ↦ round(255 v)
acotado a [0, 255]; lectura b ↦ b/255.
"""

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from src.operators.grids import ImageGrid
from src.utils.errors import FormatError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MAXVAL = 255
_WHITESPACE = b" \t\r\n"


def _header_tokens(data: bytes, count: int) -> Tuple[List[bytes], int]:
    """Leer `count` tokens de la cabecera; devuelve los tokens y el offset del payload"""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise FormatError("Cabecera truncada", offset=pos)
        byte = data[pos:pos + 1]
        if byte in (b" ", b"\t", b"\r", b"\n"):
            pos += 1
        elif byte == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise FormatError("Comentario sin fin de línea en la cabecera", offset=pos)
            pos = end + 1
        else:
            start = pos
            while pos < len(data) and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b"#":
                pos += 1
            tokens.append(data[start:pos])
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise FormatError("Falta el separador tras la cabecera", offset=pos)
    return tokens, pos + 1


def read_image(path: Union[str, Path]) -> ImageGrid:
    data = Path(path).read_bytes()
    tokens, offset = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"Número mágico no soportado: {magic!r}", offset=0)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError("Dimensiones o maxval no numéricos", offset=0)
    if width < 1 or height < 1:
        raise FormatError(f"Dimensiones inválidas {width}×{height}", offset=0)
    if maxval != MAXVAL:
        raise FormatError(f"Solo se admite maxval {MAXVAL}, se encontró {maxval}", offset=0)

    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    payload = data[offset:offset + expected]
    if len(payload) < expected:
        raise FormatError(f"Datos truncados: se esperaban {expected} bytes, hay {len(payload)}",
                          offset=offset + len(payload))
    values = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / MAXVAL
    return ImageGrid(values.reshape(height, width, channels))


def quantize(values: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(values, dtype=np.float64) * MAXVAL), 0, MAXVAL).astype(np.uint8)


def write_image(img: ImageGrid, path: Union[str, Path]) -> Path:
    """P5 para un canal, P6 para tres"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    magic = "P5" if img.channels == 1 else "P6"
    header = f"{magic}\n{img.width} {img.height}\n{MAXVAL}\n".encode("ascii")
    path.write_bytes(header + quantize(img.values).tobytes())
    logger.debug(f"Imagen escrita: {path}")
    return path
