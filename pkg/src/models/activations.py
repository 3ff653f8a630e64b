"""
Activaciones de las capas ocultas, incluida la subred ReLU entrenable

ρ(h) = w2ᵀ ReLU(w1 h + b1) + b2, aplicada elemento a elemento.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
import pandas as pd

from src.autodiff import functional as F
from src.utils.data_models import ActivationSpec
from src.utils.errors import DomainError

INIT_W1 = (1.0, 1.0, 1.0)
INIT_B1 = (-0.2, -0.1, 0.0)
INIT_W2 = (1.0, 1.0, -1.0)
INIT_B2 = 0.0


@dataclass
class LearnedActivation:
    """Parámetros de una subred ρ; los campos pueden ser arreglos o nodos"""

    w1: Any
    b1: Any
    w2: Any
    b2: Any

    @classmethod
    def initial(cls) -> "LearnedActivation":
        """Valores de inicialización de la subred"""
        return cls(
            w1=np.array(INIT_W1),
            b1=np.array(INIT_B1),
            w2=np.array(INIT_W2),
            b2=np.array(INIT_B2),
        )

    @classmethod
    def from_params(cls, params, prefix: str) -> "LearnedActivation":
        return cls(*(params[f"{prefix}.{name}"] for name in ("w1", "b1", "w2", "b2")))


def rho_eval(a: LearnedActivation, h: F.Operand) -> F.Operand:
    """Evaluar ρ sobre cualquier forma de h; devuelve la misma forma"""
    return F.call("rho", h, a.w1, a.b1, a.w2, a.b2)


def apply_activation(spec: ActivationSpec, z: F.Operand, learned: LearnedActivation = None) -> F.Operand:
    """Aplicar la activación de una capa oculta"""
    if spec.kind == "relu":
        return F.relu(z)
    if spec.kind == "sine":
        return F.sin(z * spec.omega0)
    if spec.kind == "gaussian":
        return F.exp(-F.square(z * spec.s0))
    if spec.kind == "gabor_real":
        return F.cos(z * spec.omega0) * F.exp(-F.square(z * spec.s0))
    if spec.kind == "learned":
        if learned is None:
            raise DomainError("La activación 'learned' requiere sus parámetros")
        return rho_eval(learned, z)
    return z


def sample_activation(a: LearnedActivation, lo: float = -3.0, hi: float = 3.0, points: int = 601) -> pd.DataFrame:
    """Tabla (h, ρ(h)) sobre una grilla uniforme"""
    grid = np.linspace(lo, hi, points)
    values = rho_eval(
        LearnedActivation(*(np.asarray(F.value_of(p), dtype=np.float64) for p in (a.w1, a.b1, a.w2, a.b2))),
        grid,
    )
    return pd.DataFrame({"h": grid, "rho": values})
