"""
Ecuación de convección 1D: u_t + β u_x = 0 en [0, 2π] × [0, 1]

Condición inicial u0(x) = sin(x) con frontera periódica; la solución exacta
es sin(x − β t).
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.autodiff import functional as F
from src.utils.errors import DomainError

X_MAX = 2.0 * np.pi
T_MAX = 1.0

# Coordenadas físicas a las de la red: x/π − 1 en [−1, 1] y t en [0, 1]
COORDINATE_SCALE = np.array([2.0 / X_MAX, 1.0 / T_MAX])
COORDINATE_SHIFT = np.array([1.0, 0.0])


@dataclass(frozen=True)
class ConvectionProblem:
    beta: float = 10.0
    n_ic: int = 256
    n_bc: int = 100
    n_col: int = 10000
    rng_seed: int = 0

    def __post_init__(self):
        if self.beta <= 0:
            raise DomainError(f"β debe ser > 0 (se recibió {self.beta})")
        if min(self.n_ic, self.n_bc, self.n_col) < 1:
            raise DomainError("Los conteos de puntos deben ser >= 1")


@dataclass(frozen=True)
class ConvectionPoints:
    """Conjuntos (N, 2) de coordenadas (x, t)"""

    ic: np.ndarray
    bc_left: np.ndarray
    bc_right: np.ndarray
    collocation: np.ndarray


def convection_exact(x, t, beta: float):
    return np.sin(np.asarray(x, dtype=np.float64) - beta * np.asarray(t, dtype=np.float64))


def exact_field(beta: float):
    """Solución exacta construida con primitivas: coords (N, 2) → u (N, 1)"""

    def field(coords: F.Operand) -> F.Operand:
        x = coords[:, 0:1]
        t = coords[:, 1:2]
        return F.sin(x - t * beta)

    return field


def normalize_coordinates(coords: F.Operand) -> F.Operand:
    return coords * COORDINATE_SCALE - COORDINATE_SHIFT


def sample_convection_points(problem: ConvectionProblem) -> ConvectionPoints:
    """Puntos de condición inicial, pares de frontera y colocación (deterministas)"""
    rng = np.random.default_rng(problem.rng_seed)
    ic_x = rng.uniform(0.0, X_MAX, size=problem.n_ic)
    bc_t = rng.uniform(0.0, T_MAX, size=problem.n_bc)
    col_x = rng.uniform(0.0, X_MAX, size=problem.n_col)
    col_t = rng.uniform(0.0, T_MAX, size=problem.n_col)
    return ConvectionPoints(
        ic=np.stack([ic_x, np.zeros(problem.n_ic)], axis=1),
        bc_left=np.stack([np.zeros(problem.n_bc), bc_t], axis=1),
        bc_right=np.stack([np.full(problem.n_bc, X_MAX), bc_t], axis=1),
        collocation=np.stack([col_x, col_t], axis=1),
    )


def evaluation_grid(beta: float, nx: int = 256, nt: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """Grilla regular (nt·nx, 2) y la solución exacta sobre ella"""
    xs = np.linspace(0.0, X_MAX, nx)
    ts = np.linspace(0.0, T_MAX, nt)
    tt, xx = np.meshgrid(ts, xs, indexing="ij")
    coords = np.stack([xx.ravel(), tt.ravel()], axis=1)
    return coords, convection_exact(coords[:, 0], coords[:, 1], beta)
