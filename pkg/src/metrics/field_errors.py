"""
Métricas de campos: IOU de ocupación y errores de la solución PINN
"""

from typing import Tuple

import numpy as np

from src.operators.grids import VoxelGrid
from src.utils.errors import DomainError


def iou(pred, truth, threshold: float = 0.5) -> float:
    """|pred ∧ truth| / |pred ∨ truth| tras umbralizar; unión vacía → 1.0"""
    p = np.asarray(pred.values if isinstance(pred, VoxelGrid) else pred, dtype=np.float64)
    t = np.asarray(truth.values if isinstance(truth, VoxelGrid) else truth, dtype=np.float64)
    if p.size != t.size:
        raise DomainError(f"Resoluciones distintas: {p.shape} y {t.shape}")
    p = p.ravel() >= threshold
    t = t.ravel() >= 0.5
    union = np.count_nonzero(p | t)
    if union == 0:
        return 1.0
    return float(np.count_nonzero(p & t) / union)


def error_metrics(pred, truth) -> Tuple[float, float, float]:
    """(error absoluto medio, error relativo ℓ2, varianza explicada)"""
    p = np.asarray(pred, dtype=np.float64).ravel()
    t = np.asarray(truth, dtype=np.float64).ravel()
    if p.shape != t.shape:
        raise DomainError(f"Longitudes distintas: {p.size} y {t.size}")
    norm = np.linalg.norm(t)
    if norm == 0.0:
        raise DomainError("Error relativo indefinido: la solución de referencia tiene norma cero")
    variance = np.var(t)
    if variance == 0.0:
        raise DomainError("Varianza explicada indefinida: la referencia es constante")
    residual = t - p
    abs_err = float(np.mean(np.abs(residual)))
    rel_err = float(np.linalg.norm(residual) / norm)
    explained_var = float(1.0 - np.var(residual) / variance)
    return abs_err, rel_err, explained_var
