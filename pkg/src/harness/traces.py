"""
Trazas de las activaciones aprendidas a lo largo del entrenamiento
"""

from collections import OrderedDict
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Union

import numpy as np
import pandas as pd

from src.formats.tables import write_table
from src.models.activations import LearnedActivation, sample_activation
from src.models.networks import Model
from src.utils.logger import get_logger

logger = get_logger(__name__)

Snapshot = Dict[str, np.ndarray]


def slope_changes(table: pd.DataFrame, tol: float = 1e-9) -> int:
    """Máximo número de quiebres (cambios de pendiente) entre las columnas ρ de una muestra"""
    h = table["h"].to_numpy()
    columns = [c for c in table.columns if c != "h"]
    worst = 0
    for column in columns:
        slopes = np.diff(table[column].to_numpy()) / np.diff(h)
        changed = np.abs(np.diff(slopes)) > tol * np.maximum(1.0, np.abs(slopes[1:]))
        starts = np.count_nonzero(changed[1:] & ~changed[:-1]) + int(changed[0]) if changed.size else 0
        worst = max(worst, starts)
    return worst


def snapshot_epochs(total: int) -> List[int]:
    """{0, E/2, E}"""
    return sorted({0, total // 2, total})


class ActivationRecorder:
    """Callback de entrenamiento que copia los parámetros ρ en las épocas pedidas"""

    def __init__(self, epochs: Iterable[int]):
        self.epochs = set(epochs)
        self.snapshots: "OrderedDict[int, Snapshot]" = OrderedDict()

    def __call__(self, epoch: int, model: Model, loss, lr) -> None:
        if epoch in self.epochs and model.has_learned_activations():
            self.snapshots[epoch] = {name: p.copy() for name, p in model.params.items() if name.startswith("rho.")}
        return None


def activation_tables(model: Model, snapshots: Optional[Mapping[Union[int, str], Snapshot]] = None) -> List[pd.DataFrame]:
    """Una tabla por capa: columna h y una columna ρ por instantánea (y subred)"""
    if not model.has_learned_activations():
        return []
    if not snapshots:
        snapshots = {"current": model.params}
    arch = model.architecture
    tables = []
    for layer in range(arch.depth):
        table: Optional[pd.DataFrame] = None
        for label, params in snapshots.items():
            for k in range(arch.subnetworks):
                sample = sample_activation(LearnedActivation.from_params(params, f"rho.{layer}.{k}"))
                if table is None:
                    table = sample[["h"]].copy()
                column = f"rho_epoch_{label}" if arch.subnetworks == 1 else f"rho{k}_epoch_{label}"
                table[column] = sample["rho"].to_numpy()
        tables.append(table)
    return tables


def dump_activation_traces(model: Model, snapshots: Optional[Mapping[Union[int, str], Snapshot]],
                           out_dir: Union[str, Path]) -> List[Path]:
    """Escribir activations_layer<l>.csv por capa; sin activaciones aprendidas no escribe nada"""
    if not model.has_learned_activations():
        logger.warning(f"El modelo '{model.architecture.kind}' no tiene activaciones aprendidas; no hay trazas")
        return []
    out_dir = Path(out_dir)
    paths = [
        write_table(table, out_dir / f"activations_layer{layer}.csv")
        for layer, table in enumerate(activation_tables(model, snapshots))
    ]
    logger.info(f"Trazas de activación escritas: {len(paths)} capas en {out_dir}")
    return paths
