"""
Imágenes procedurales, submuestreo por bloques e interpolación bilineal
"""

import numpy as np

from src.operators.grids import ImageGrid, pixel_centers
from src.utils.errors import DomainError


def _checker(height: int, width: int) -> np.ndarray:
    block = max(1, min(height, width) // 8)
    rows = np.arange(height)[:, None] // block
    cols = np.arange(width)[None, :] // block
    return ((rows + cols) % 2).astype(np.float64)


def _bandlimited(height: int, width: int, rng: np.random.Generator, max_frequency: int = 6) -> np.ndarray:
    """Serie de Fourier 2D truncada con coeficientes aleatorios que decaen"""
    ys, xs = np.meshgrid(pixel_centers(height), pixel_centers(width), indexing="ij")
    field = np.zeros((height, width))
    for kx in range(max_frequency + 1):
        for ky in range(max_frequency + 1):
            amplitude = rng.normal() / (1.0 + kx * kx + ky * ky)
            phase = rng.uniform(-np.pi, np.pi)
            field += amplitude * np.cos(np.pi * (kx * xs + ky * ys) + phase)
    return field


def _disk_scene(height: int, width: int, rng: np.random.Generator, disks: int = 6) -> np.ndarray:
    ys, xs = np.meshgrid(pixel_centers(height), pixel_centers(width), indexing="ij")
    scene = np.full((height, width), 0.1)
    for _ in range(disks):
        cx, cy = rng.uniform(-0.7, 0.7, size=2)
        radius = rng.uniform(0.1, 0.4)
        scene[(xs - cx) ** 2 + (ys - cy) ** 2 <= radius ** 2] = rng.uniform(0.3, 1.0)
    return scene


def procedural_image(kind: str, height: int, width: int, channels: int = 1, rng_seed: int = 0) -> ImageGrid:
    """Imagen de prueba determinista dada la semilla"""
    if height < 8 or width < 8:
        raise DomainError(f"La imagen debe ser al menos de 8×8 (se pidió {height}×{width})")
    if channels not in (1, 3):
        raise DomainError(f"Canales no soportados: {channels}")
    rng = np.random.default_rng(rng_seed)

    if kind == "checker":
        plane = _checker(height, width)
        return ImageGrid(np.repeat(plane[:, :, None], channels, axis=2))
    if kind == "bandlimited":
        values = np.stack([_bandlimited(height, width, rng) for _ in range(channels)], axis=2)
        lo, hi = values.min(), values.max()
        return ImageGrid((values - lo) / (hi - lo))
    if kind == "disk_scene":
        return ImageGrid(np.stack([_disk_scene(height, width, rng) for _ in range(channels)], axis=2))
    raise DomainError(f"Tipo de imagen desconocido: {kind}")


def downsample_box(img: ImageGrid, k: int) -> ImageGrid:
    """Cada píxel de salida es la media de su bloque k×k, por canal"""
    h, w, c = img.shape
    if k < 1 or h % k or w % k:
        raise DomainError(f"El factor {k} no divide la imagen {h}×{w}")
    if k == 1:
        return ImageGrid(img.values.copy(), clip=img.clip)
    blocks = img.values.reshape(h // k, k, w // k, k, c)
    return ImageGrid(blocks.mean(axis=(1, 3)), clip=img.clip)


def sample_bilinear(img: ImageGrid, coords: np.ndarray) -> np.ndarray:
    """Muestrear la imagen en coordenadas (N, 2) de [−1, 1]²; el borde se extiende"""
    h, w, c = img.shape
    col = np.clip((coords[:, 0] + 1.0) * w / 2.0 - 0.5, 0.0, w - 1.0)
    row = np.clip((coords[:, 1] + 1.0) * h / 2.0 - 0.5, 0.0, h - 1.0)
    c0 = np.minimum(np.floor(col).astype(int), max(w - 2, 0))
    r0 = np.minimum(np.floor(row).astype(int), max(h - 2, 0))
    c1 = np.minimum(c0 + 1, w - 1)
    r1 = np.minimum(r0 + 1, h - 1)
    fc = (col - c0)[:, None]
    fr = (row - r0)[:, None]
    v = img.values
    top = v[r0, c0] * (1.0 - fc) + v[r0, c1] * fc
    bottom = v[r1, c0] * (1.0 - fc) + v[r1, c1] * fc
    return top * (1.0 - fr) + bottom * fr


def upsample_bilinear(img: ImageGrid, k: int) -> ImageGrid:
    """Interpolación bilineal a una grilla k veces más fina"""
    target = ImageGrid(np.zeros((img.height * k, img.width * k, img.channels)))
    values = sample_bilinear(img, target.coordinates())
    return ImageGrid.from_flat(values, img.height * k, img.width * k, clip=img.clip)
