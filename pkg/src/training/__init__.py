# Pérdidas, optimizador, planificación y bucle de entrenamiento
from src.training.losses import convection_residual, l2_loss, pinn_loss
from src.training.optimizer import AdamState, adam_step
from src.training.schedule import Schedule
from src.training.trainer import TaskBatch, TrainingResult, train

__all__ = [
    "convection_residual",
    "l2_loss",
    "pinn_loss",
    "AdamState",
    "adam_step",
    "Schedule",
    "TaskBatch",
    "TrainingResult",
    "train",
]
