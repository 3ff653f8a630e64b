"""
Volúmenes de ocupación analíticos
"""

from typing import Sequence

import numpy as np

from src.operators.grids import VoxelGrid, pixel_centers
from src.utils.errors import DomainError

SPHERE_RADIUS = 0.5
TORUS_RADII = (0.5, 0.2)
TWO_SPHERES = ((-0.4, 0.3), (0.4, 0.3))


def occupancy_analytic(shape: str, resolution: int, offset: Sequence[float] = (0.0, 0.0, 0.0)) -> VoxelGrid:
    """Vóxel = 1 si su centro cumple la desigualdad implícita de la forma"""
    if resolution < 8:
        raise DomainError(f"La resolución debe ser >= 8 (se recibió {resolution})")
    c = pixel_centers(resolution)
    xs, ys, zs = np.meshgrid(c, c, c, indexing="ij")
    xs, ys, zs = xs - offset[0], ys - offset[1], zs - offset[2]

    if shape == "sphere":
        inside = xs ** 2 + ys ** 2 + zs ** 2 <= SPHERE_RADIUS ** 2
    elif shape == "torus":
        major, minor = TORUS_RADII
        inside = (np.sqrt(xs ** 2 + ys ** 2) - major) ** 2 + zs ** 2 <= minor ** 2
    elif shape == "two_spheres":
        inside = np.zeros_like(xs, dtype=bool)
        for center, radius in TWO_SPHERES:
            inside |= (xs - center) ** 2 + ys ** 2 + zs ** 2 <= radius ** 2
    else:
        raise DomainError(f"Forma desconocida: {shape}")
    return VoxelGrid(inside.astype(np.float64))
