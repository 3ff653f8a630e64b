"""
Optimizador Adam sobre el vector plano de parámetros
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.utils.errors import DomainError, NonFiniteInputError


@dataclass
class AdamState:
    """Momentos por parámetro y contador de pasos"""

    m: np.ndarray
    v: np.ndarray
    lr: float
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def create(cls, size: int, lr: float, **kwargs) -> "AdamState":
        return cls(m=np.zeros(size), v=np.zeros(size), lr=lr, **kwargs)


def adam_step(state: AdamState, params: np.ndarray, grads: np.ndarray, lr: Optional[float] = None) -> np.ndarray:
    """
    Un paso de Adam con corrección de sesgo; actualiza `state` y devuelve
    los parámetros nuevos. `lr` reemplaza la tasa del estado (planificación).
    """
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise DomainError(f"Longitudes distintas: parámetros {params.shape}, "
                          f"gradientes {grads.shape}, estado {state.m.shape}")
    bad = np.flatnonzero(~np.isfinite(grads))
    if bad.size:
        raise NonFiniteInputError(f"Gradiente no finito en el parámetro {bad[0]}", index=int(bad[0]))
    if lr is not None:
        state.lr = lr

    state.t += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads * grads
    m_hat = state.m / (1.0 - state.beta1 ** state.t)
    v_hat = state.v / (1.0 - state.beta2 ** state.t)
    return params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
