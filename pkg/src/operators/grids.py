"""
Señales muestreadas y mediciones de las tareas de visión

Convención de coordenadas: el centro del píxel (fila i, columna j) de una
imagen H×W está en (x, y) = (−1 + (2j+1)/W, −1 + (2i+1)/H). Los arreglos
planos recorren las filas en orden (row-major).
"""

from dataclasses import dataclass, field
from typing import List, Literal, Tuple

import numpy as np

from src.utils.errors import DomainError, NonFiniteInputError


def pixel_centers(n: int) -> np.ndarray:
    """Centros de n celdas uniformes sobre [−1, 1], simétricos respecto de 0"""
    return (2.0 * np.arange(n) + 1.0 - n) / n


@dataclass
class ImageGrid:
    """Imagen (H, W, C) en float64"""

    values: np.ndarray
    clip: Literal["none", "unit"] = "unit"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 2:
            values = values[:, :, None]
        if values.ndim != 3 or values.shape[2] not in (1, 3):
            raise DomainError(f"Imagen con forma inválida: {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteInputError("La imagen contiene valores no finitos")
        if self.clip == "unit":
            values = np.clip(values, 0.0, 1.0)
        self.values = values

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.values.shape

    def coordinates(self) -> np.ndarray:
        """Centros de píxel (H·W, 2) como (x, y)"""
        ys, xs = np.meshgrid(pixel_centers(self.height), pixel_centers(self.width), indexing="ij")
        return np.stack([xs.ravel(), ys.ravel()], axis=1)

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1, self.channels)

    def luminance(self) -> np.ndarray:
        """Promedio de canales (H, W)"""
        return self.values.mean(axis=2)

    @classmethod
    def from_flat(cls, flat: np.ndarray, height: int, width: int, clip: str = "unit") -> "ImageGrid":
        flat = np.asarray(flat, dtype=np.float64)
        return cls(flat.reshape(height, width, -1), clip=clip)


@dataclass
class VoxelGrid:
    """Volumen binario R×R×R; values[i, j, k] corresponde a (x_i, y_j, z_k)"""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 3 or len(set(values.shape)) != 1:
            raise DomainError(f"Volumen con forma inválida: {values.shape}")
        if not np.all((values == 0.0) | (values == 1.0)):
            raise DomainError("El volumen debe ser binario")
        self.values = values

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    def coordinates(self) -> np.ndarray:
        c = pixel_centers(self.resolution)
        xs, ys, zs = np.meshgrid(c, c, c, indexing="ij")
        return np.stack([xs.ravel(), ys.ravel(), zs.ravel()], axis=1)

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1, 1)

    def occupied_fraction(self) -> float:
        return float(self.values.mean())


@dataclass
class Sinogram:
    """Proyecciones (ángulos × detectores)"""

    angles: np.ndarray
    detector_bins: int
    values: np.ndarray

    def __post_init__(self):
        self.angles = np.asarray(self.angles, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.angles.size, self.detector_bins):
            raise DomainError(f"Sinograma {self.values.shape} no coincide con "
                              f"{self.angles.size} ángulos × {self.detector_bins} detectores")


@dataclass
class View:
    """Vista de baja resolución con su movimiento y sus coordenadas exactas"""

    image: ImageGrid
    shift: Tuple[float, float]
    rotation: float
    coords: np.ndarray


@dataclass
class MultiviewSet:
    views: List[View] = field(default_factory=list)
    high_res_shape: Tuple[int, int] = (0, 0)

    def coordinates(self) -> np.ndarray:
        """Unión de las coordenadas de todas las vistas, en el marco de alta resolución"""
        return np.concatenate([v.coords for v in self.views], axis=0)

    def targets(self) -> np.ndarray:
        return np.concatenate([v.image.flat() for v in self.views], axis=0)
