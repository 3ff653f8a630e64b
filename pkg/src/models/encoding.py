"""
Codificación de coordenadas en rasgos de Fourier

Orden fijo de los rasgos: por eje, luego por frecuencia, y dentro de cada
frecuencia [α_i cos(2π β_i x_j), α_i sin(2π β_i x_j)].
"""

import numpy as np

from src.autodiff import functional as F
from src.utils.data_models import EncodingSpec
from src.utils.errors import DomainError

# [−1, 1] ocupa un período de β = 1
DOMAIN_SCALE = 0.5


def fourier_matrix(spec: EncodingSpec, input_dim: int) -> np.ndarray:
    """Matriz B (d × d·K) con B[j, j·K + i] = 2π β_i"""
    betas = np.asarray(spec.betas(), dtype=np.float64)
    k = spec.num_frequencies
    matrix = np.zeros((input_dim, input_dim * k))
    for j in range(input_dim):
        matrix[j, j * k:(j + 1) * k] = 2.0 * np.pi * betas
    return matrix


def encode(spec: EncodingSpec, x: F.Operand) -> F.Operand:
    """Codificar un lote (N, d) o una sola coordenada (d,)"""
    shape = F.value_of(x).shape
    if len(shape) not in (1, 2) or shape[-1] < 1:
        raise DomainError(f"Coordenadas con forma inválida: {shape}")
    if spec.kind == "identity":
        return x

    single = len(shape) == 1
    batch = F.reshape(x, (1, shape[0])) if single else x
    n, d = F.value_of(batch).shape
    k = spec.num_frequencies
    alphas = np.tile(np.asarray(spec.alphas(), dtype=np.float64), d)

    phase = F.matmul(batch, fourier_matrix(spec, d))
    cos = F.reshape(F.cos(phase) * alphas, (n, d * k, 1))
    sin = F.reshape(F.sin(phase) * alphas, (n, d * k, 1))
    features = F.reshape(F.concat([cos, sin], axis=-1), (n, 2 * d * k))
    return F.reshape(features, (2 * d * k,)) if single else features


def encode_coordinates(spec: EncodingSpec, x: F.Operand) -> F.Operand:
    """
    Codificar coordenadas del dominio [−1, 1]^d de las redes.

    Con β_i = i todos los rasgos tienen período 1; se escala x por
    DOMAIN_SCALE para que el período base cubra el dominio completo y dos
    puntos distintos del interior no compartan rasgos.
    """
    if spec.kind == "identity":
        return x
    return encode(spec, x * DOMAIN_SCALE)


def alias_free_frequencies(samples: int) -> int:
    """
    Mayor K cuyas frecuencias β_i = i no se solapan en una grilla de `samples` centros.

    Tras `encode_coordinates`, β da β ciclos sobre [−1, 1]; el límite de
    Nyquist de la grilla es samples / 2 ciclos.
    """
    if samples < 1:
        raise DomainError(f"La grilla debe tener al menos una muestra, tiene {samples}")
    return max(1, (samples - 1) // 2)
