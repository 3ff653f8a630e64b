"""
Vistas múltiples con movimiento subpíxel para superresolución
"""

import numpy as np

from src.operators.grids import ImageGrid, MultiviewSet, View
from src.operators.images import downsample_box, sample_bilinear
from src.utils.errors import DomainError


def _motion(coords: np.ndarray, shift_xy: np.ndarray, rotation: float) -> np.ndarray:
    """p ↦ R(θ) p + t en coordenadas normalizadas"""
    c, s = np.cos(rotation), np.sin(rotation)
    rot = np.array([[c, -s], [s, c]])
    return coords @ rot.T + shift_xy


def make_multiview(
    img: ImageGrid,
    n_views: int,
    k: int,
    max_shift: float = 1.0,
    max_rot: float = np.deg2rad(1.0),
    rng_seed: int = 0,
) -> MultiviewSet:
    """
    Generar `n_views` imágenes de baja resolución desplazadas y rotadas.

    La vista 0 no tiene movimiento. `max_shift` está en píxeles de alta
    resolución y `max_rot` en radianes.
    """
    if n_views < 1:
        raise DomainError(f"n_views debe ser >= 1 (se recibió {n_views})")
    rng = np.random.default_rng(rng_seed)
    low = downsample_box(ImageGrid(np.zeros(img.shape)), k)
    block_centers = low.coordinates()
    pixel = np.array([2.0 / img.width, 2.0 / img.height])

    views = []
    for index in range(n_views):
        if index == 0:
            shift, rotation = np.zeros(2), 0.0
        else:
            shift = rng.uniform(-max_shift, max_shift, size=2)
            rotation = float(rng.uniform(-max_rot, max_rot))
        if not np.any(shift) and rotation == 0.0:
            view = downsample_box(img, k)
            coords = block_centers.copy()
        else:
            warped_coords = _motion(img.coordinates(), shift * pixel, rotation)
            warped = ImageGrid.from_flat(sample_bilinear(img, warped_coords), img.height, img.width, clip=img.clip)
            view = downsample_box(warped, k)
            coords = _motion(block_centers, shift * pixel, rotation)
        views.append(View(image=view, shift=(float(shift[0]), float(shift[1])), rotation=rotation, coords=coords))
    return MultiviewSet(views=views, high_res_shape=(img.height, img.width))
