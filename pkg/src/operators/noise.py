"""
Ruido de conteo de fotones
"""

import numpy as np

from src.operators.grids import ImageGrid
from src.utils.errors import DomainError


def poisson_photon_noise(img: ImageGrid, max_count: float = 30.0, rng_seed: int = 0) -> ImageGrid:
    """Poisson con media valor·max_count, dividido por max_count; sin recorte"""
    if max_count <= 0:
        raise DomainError(f"max_count debe ser > 0 (se recibió {max_count})")
    if img.values.min() < 0.0 or img.values.max() > 1.0:
        raise DomainError("La imagen limpia debe estar en [0, 1]")
    rng = np.random.default_rng(rng_seed)
    counts = rng.poisson(img.values * max_count)
    return ImageGrid(counts / max_count, clip="none")
