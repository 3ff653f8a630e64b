"""
Calidad de imagen: PSNR y SSIM
"""

from typing import Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.operators.grids import ImageGrid
from src.utils.errors import DomainError

ImageLike = Union[ImageGrid, np.ndarray]

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


def _values(img: ImageLike) -> np.ndarray:
    return img.values if isinstance(img, ImageGrid) else np.asarray(img, dtype=np.float64)


def psnr(a: ImageLike, b: ImageLike, peak: float = 1.0) -> float:
    """10·log10(peak²/MSE); MSE = 0 devuelve +inf"""
    va, vb = _values(a), _values(b)
    if va.shape != vb.shape:
        raise DomainError(f"Formas distintas: {va.shape} y {vb.shape}")
    mse = float(np.mean((va - vb) ** 2))
    if mse == 0.0:
        return float("inf")
    return float(10.0 * np.log10(peak * peak / mse))


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    offsets = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    window = np.outer(g, g)
    return window / window.sum()


def _luminance(values: np.ndarray) -> np.ndarray:
    """Imágenes en color se comparan sobre el promedio de canales"""
    return values.mean(axis=2) if values.ndim == 3 else values


def ssim(a: ImageLike, b: ImageLike, peak: float = 1.0) -> float:
    """SSIM medio con ventana gaussiana 11×11 (σ = 1.5), solo ventanas completas"""
    va, vb = _luminance(_values(a)), _luminance(_values(b))
    if va.shape != vb.shape:
        raise DomainError(f"Formas distintas: {va.shape} y {vb.shape}")
    if min(va.shape) < SSIM_WINDOW:
        raise DomainError(f"SSIM requiere al menos {SSIM_WINDOW}×{SSIM_WINDOW} píxeles, la imagen es {va.shape}")

    window = gaussian_window()

    def local_mean(x: np.ndarray) -> np.ndarray:
        return np.einsum("ijkl,kl->ij", sliding_window_view(x, window.shape), window)

    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    mu_a, mu_b = local_mean(va), local_mean(vb)
    var_a = local_mean(va * va) - mu_a * mu_a
    var_b = local_mean(vb * vb) - mu_b * mu_b
    cov = local_mean(va * vb) - mu_a * mu_b
    numerator = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    denominator = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.clip(np.mean(numerator / denominator), -1.0, 1.0))
