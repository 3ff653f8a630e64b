# Orquestación de experimentos, barridos y verificación
from src.harness.experiment import TASK_ORDERING, evaluate_convection, experiment_dir, prepare_task, run_experiment
from src.harness.sweeps import (
    SweepResult,
    run_lr_sweep,
    run_model_comparison,
    run_scale_sweep,
    run_seed_sweep,
    select_best,
)
from src.harness.traces import ActivationRecorder, dump_activation_traces, slope_changes, snapshot_epochs
from src.harness.verification import run_verification

__all__ = [
    "TASK_ORDERING",
    "evaluate_convection",
    "experiment_dir",
    "prepare_task",
    "run_experiment",
    "SweepResult",
    "run_lr_sweep",
    "run_model_comparison",
    "run_scale_sweep",
    "run_seed_sweep",
    "select_best",
    "ActivationRecorder",
    "dump_activation_traces",
    "slope_changes",
    "snapshot_epochs",
    "run_verification",
]
