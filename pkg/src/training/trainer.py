"""
Bucle de entrenamiento de lote completo

Cada época construye una cinta nueva, evalúa la pérdida sobre todos los
puntos, hace backward y un paso de Adam. No hay términos de regularización
ni recorte de gradientes.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.settings import settings
from src.autodiff import functional as F
from src.autodiff.tape import Node, Tape
from src.models.networks import Model, forward
from src.operators.convection import ConvectionPoints, normalize_coordinates
from src.training.losses import l2_loss, pinn_loss
from src.training.optimizer import AdamState, adam_step
from src.training.schedule import Schedule
from src.utils.data_models import LossSpec
from src.utils.errors import DivergenceError, DomainError, NonFiniteInputError
from src.utils.logger import get_logger

logger = get_logger(__name__)

# cb(epoch, model, loss, lr) -> métricas opcionales para la fila de la curva
Callback = Callable[[int, Model, Optional[float], float], Optional[Dict[str, float]]]


@dataclass
class TaskBatch:
    """Datos de entrenamiento de una tarea (lote completo)"""

    coords: Optional[np.ndarray] = None
    targets: Optional[np.ndarray] = None
    # Medición aplicada a las predicciones (N, C) antes de comparar con targets
    operator: Optional[Callable[[F.Operand], F.Operand]] = None
    points: Optional[ConvectionPoints] = None


@dataclass
class TrainingResult:
    model: Model
    curve: pd.DataFrame
    final_loss: float
    terms: Dict[str, float] = field(default_factory=dict)


def model_field(model: Model, tape: Tape, params) -> Callable[[F.Operand], F.Operand]:
    """u(x, t) de la red sobre coordenadas físicas de convección"""

    def field_(coords: F.Operand) -> F.Operand:
        return forward(model, tape, normalize_coordinates(coords), params)

    return field_


def compute_loss(tape: Tape, model: Model, params, batch: TaskBatch, loss: LossSpec) -> Tuple[Node, Dict[str, float]]:
    """Grabar la pérdida de la tarea en la cinta"""
    if loss.kind == "pinn_convection":
        if batch.points is None:
            raise DomainError("La pérdida PINN requiere puntos de convección")
        return pinn_loss(tape, model_field(model, tape, params), batch.points, loss.beta,
                         (loss.w_ic, loss.w_bc, loss.w_pde))
    if batch.coords is None or batch.targets is None:
        raise DomainError("La pérdida ℓ2 requiere coordenadas y objetivos")
    preds = forward(model, tape, batch.coords, params)
    if batch.operator is not None:
        preds = batch.operator(preds)
    return l2_loss(tape, preds, batch.targets), {}


def train(
    model: Model,
    batch: TaskBatch,
    loss: LossSpec,
    epochs: int,
    schedule: Schedule,
    rng_seed: int = 0,
    callbacks: Sequence[Callback] = (),
) -> TrainingResult:
    """
    Entrenar `model` en el lugar durante `epochs` pasos de lote completo.

    Los callbacks se llaman con la época 0 antes de entrenar y después de cada
    época e = 1..E. La curva tiene una fila por época con el lr usado y la
    pérdida antes del paso. El entrenamiento no consume aleatoriedad;
    `rng_seed` solo se registra.
    """
    if epochs < 1:
        raise DomainError(f"epochs debe ser >= 1 (se recibió {epochs})")
    logger.info(f"Entrenando {model} por {epochs} épocas (semilla {rng_seed}, pérdida {loss.kind})")

    def notify(epoch: int, value: Optional[float], lr: float) -> Dict[str, float]:
        extra: Dict[str, float] = {}
        for callback in callbacks:
            extra.update(callback(epoch, model, value, lr) or {})
        return extra

    notify(0, None, schedule.lr(0))
    state = AdamState.create(model.parameter_count(), schedule.lr0)
    rows: List[Dict[str, float]] = []
    value, terms = float("nan"), {}

    for epoch in range(1, epochs + 1):
        lr = schedule.lr(epoch - 1)
        tape = Tape()
        try:
            bound = model.bind(tape)
            loss_node, terms = compute_loss(tape, model, bound, batch, loss)
            value = float(loss_node.value)
            grads = model.flatten_gradients(tape.backward(loss_node), bound)
            model.assign_flat(adam_step(state, model.flat_parameters(), grads, lr))
        except NonFiniteInputError as e:
            logger.error(f"Divergencia en la época {epoch}: {e}")
            raise DivergenceError(f"La pérdida dejó de ser finita en la época {epoch}: {e}", epoch) from e

        row = {"epoch": epoch, "lr": lr, "loss": value}
        row.update({f"loss_{name}": term for name, term in terms.items()})
        row.update(notify(epoch, value, lr))
        rows.append(row)
        if epoch % settings.LOG_EVERY == 0 or epoch == epochs:
            logger.info(f"Época {epoch}/{epochs} | lr={lr:.3e} | pérdida={value:.6e}")

    return TrainingResult(model=model, curve=pd.DataFrame(rows), final_loss=value, terms=terms)
