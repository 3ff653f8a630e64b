"""
Barridos: semillas (mejor de N), tasas de aprendizaje, factores de escala y
comparación de arquitecturas
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from src.formats.results import write_result
from src.formats.tables import write_table
from src.harness.experiment import TASK_ORDERING, experiment_dir, run_experiment
from src.utils.data_models import ExperimentConfig, ResultRecord
from src.utils.errors import DomainError
from src.utils.logger import get_logger

logger = get_logger(__name__)

SECONDARY_METRIC = {
    "image": "ssim", "sisr": "ssim", "misr": "ssim", "denoise": "ssim", "ct": "ssim",
    "occupancy": None, "pinn_convection": "explained_var",
}


@dataclass
class SweepResult:
    best: ResultRecord
    records: List[ResultRecord]


def _metric(record: ResultRecord, name: str) -> Optional[float]:
    return getattr(record.metrics, name)


def select_best(task: str, records: Sequence[ResultRecord]) -> ResultRecord:
    """Mejor registro según la métrica de la tarea; ante empate gana la primera semilla"""
    if not records:
        raise DomainError("No hay registros para elegir")
    name, maximize = TASK_ORDERING[task]
    best = records[0]
    for record in records[1:]:
        value, current = _metric(record, name), _metric(best, name)
        if (value > current) if maximize else (value < current):
            best = record
    return best


def _run(args) -> ResultRecord:
    cfg, seed = args
    return run_experiment(cfg, seed)


def run_seed_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Una corrida por semilla (en paralelo si jobs > 1); persiste todos los registros"""
    cfg = cfg.resolved()
    jobs = [(cfg, seed) for seed in cfg.seeds]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_run, jobs))
    else:
        records = [_run(job) for job in jobs]

    results_path = experiment_dir(cfg) / "results.jsonl"
    results_path.unlink(missing_ok=True)
    for record in records:
        write_result(record, results_path)
    best = select_best(cfg.task, records)
    metric = TASK_ORDERING[cfg.task][0]
    logger.info(f"{cfg.name}: mejor semilla {best.seed} con {metric}={_metric(best, metric)} "
                f"entre {len(records)} corridas")
    return SweepResult(best=best, records=records)


def _sweep_path(cfg: ExperimentConfig, label: str) -> Path:
    root = Path(cfg.output_dir) if cfg.output_dir else experiment_dir(cfg).parent
    return root / f"{cfg.name}-{label}.csv"


def _row(task: str, best: ResultRecord) -> Dict[str, object]:
    metric = TASK_ORDERING[task][0]
    row: Dict[str, object] = {"best_seed": best.seed, metric: _metric(best, metric)}
    secondary = SECONDARY_METRIC[task]
    if secondary is not None:
        row[secondary] = _metric(best, secondary)
    return row


def run_lr_sweep(cfg: ExperimentConfig, lrs: Sequence[float]) -> pd.DataFrame:
    """Barrido de semillas por cada tasa; tabla ordenada por lr ascendente"""
    if not lrs:
        raise DomainError("La lista de tasas de aprendizaje está vacía")
    rows = []
    for lr in sorted(lrs):
        variant = cfg.model_copy(update={"training": cfg.training.model_copy(update={"lr": float(lr)})})
        rows.append({"lr": float(lr), **_row(cfg.task, run_seed_sweep(variant).best)})
    table = pd.DataFrame(rows)
    path = write_table(table, _sweep_path(cfg, "lr-sweep"))
    logger.info(f"Barrido de lr escrito en {path}")
    return table


def run_scale_sweep(cfg: ExperimentConfig, factors: Sequence[int]) -> pd.DataFrame:
    """SISR o MISR por factor de submuestreo: PSNR y SSIM de la mejor semilla"""
    if cfg.task not in ("sisr", "misr"):
        raise DomainError(f"El barrido de escala requiere sisr o misr (tarea: {cfg.task})")
    size = cfg.data.image_size
    bad = [k for k in factors if k < 1 or size % k]
    if not factors or bad:
        raise DomainError(f"Factores que no dividen el tamaño {size}: {bad or 'lista vacía'}")
    rows = []
    for k in factors:
        variant = cfg.model_copy(update={"data": cfg.data.model_copy(update={"scale": int(k)})})
        best = run_seed_sweep(variant).best
        row = {"factor": int(k), "psnr_db": best.metrics.psnr_db, "ssim": best.metrics.ssim,
               "best_seed": best.seed}
        row.update(best.metrics.reference)
        rows.append(row)
    table = pd.DataFrame(rows)
    path = write_table(table, _sweep_path(cfg, "scale-sweep"))
    logger.info(f"Barrido de escala escrito en {path}")
    return table


def run_model_comparison(cfg: ExperimentConfig, kinds: Sequence[str]) -> pd.DataFrame:
    """
    Misma tarea y semillas para varias arquitecturas. ω0 y s0 se toman del
    preset de la tarea para cada tipo.
    """
    if not kinds:
        raise DomainError("La lista de arquitecturas está vacía")
    rows = []
    for kind in kinds:
        model = cfg.model.model_copy(update={"kind": kind, "omega0": None, "s0": None})
        best = run_seed_sweep(cfg.model_copy(update={"model": model})).best
        rows.append({"model": kind, **_row(cfg.task, best), "parameter_count": best.parameter_count})
    table = pd.DataFrame(rows)
    path = write_table(table, _sweep_path(cfg, "comparison"))
    logger.info(f"Comparación de modelos escrita en {path}")
    return table
