"""
Orquestación de una corrida: datos de la tarea, entrenamiento, evaluación y
artefactos

Cada corrida escribe en <output>/<nombre>-<hash8>/seed-<n>/:
reconstrucción (PGM/PPM o CSV), curve.csv, model.ckpt, trazas de
activación (si las hay) y result.jsonl.
"""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from config.settings import settings
from src.autodiff import functional as F
from src.formats.checkpoints import write_checkpoint
from src.formats.images import read_image, write_image
from src.formats.results import write_result
from src.formats.tables import write_grid_csv, write_table
from src.harness.traces import ActivationRecorder, dump_activation_traces, snapshot_epochs
from src.metrics.field_errors import error_metrics, iou
from src.metrics.image_quality import SSIM_WINDOW, psnr, ssim
from src.models.encoding import alias_free_frequencies
from src.models.networks import Model, build_model, forward
from src.operators.convection import (
    ConvectionProblem,
    evaluation_grid,
    normalize_coordinates,
    sample_convection_points,
)
from src.operators.grids import ImageGrid
from src.operators.images import downsample_box, procedural_image, upsample_bilinear
from src.operators.multiview import make_multiview
from src.operators.noise import poisson_photon_noise
from src.operators.occupancy import occupancy_analytic
from src.operators.radon import RadonOperator
from src.training.schedule import Schedule
from src.training.trainer import TaskBatch, train
from src.utils.data_models import ExperimentConfig, MetricReport, ModelSpec, ResultRecord
from src.utils.errors import DivergenceError, DomainError
from src.utils.logger import get_logger

logger = get_logger(__name__)

IMAGE_TASKS = ("image", "sisr", "misr", "denoise", "ct")

# Métrica que decide la mejor semilla por tarea y si se maximiza
TASK_ORDERING: Dict[str, Tuple[str, bool]] = {
    "image": ("psnr_db", True),
    "sisr": ("psnr_db", True),
    "misr": ("psnr_db", True),
    "denoise": ("psnr_db", True),
    "ct": ("psnr_db", True),
    "occupancy": ("iou", True),
    "pinn_convection": ("rel_err", False),
}


@dataclass
class PreparedTask:
    """Datos de entrenamiento y evaluación de una tarea"""

    batch: TaskBatch
    input_dim: int
    output_dim: int
    # modelo -> (métricas, reconstrucción)
    evaluate: Callable[[Model], Tuple[MetricReport, object]]
    # (directorio, reconstrucción) -> artefactos escritos
    save: Callable[[Path, object], Dict[str, str]]
    reference: Dict[str, float] = field(default_factory=dict)
    # lado de la grilla de entrenamiento; acota K de la codificación
    grid_side: Optional[int] = None


def experiment_dir(cfg: ExperimentConfig) -> Path:
    root = Path(cfg.output_dir) if cfg.output_dir else settings.OUTPUT_DIR
    return root / f"{cfg.name}-{cfg.config_hash()[:8]}"


def image_report(recon: ImageGrid, truth: ImageGrid) -> MetricReport:
    """PSNR siempre; SSIM solo si la imagen admite la ventana completa"""
    ssim_value = ssim(recon, truth) if min(truth.height, truth.width) >= SSIM_WINDOW else None
    return MetricReport(psnr_db=psnr(recon, truth), ssim=ssim_value)


def _image_reference(prefix: str, candidate: ImageGrid, truth: ImageGrid) -> Dict[str, float]:
    report = image_report(candidate, truth)
    reference = {f"{prefix}_psnr_db": report.psnr_db}
    if report.ssim is not None:
        reference[f"{prefix}_ssim"] = report.ssim
    return reference


def load_image(cfg: ExperimentConfig, channels: Optional[int] = None) -> ImageGrid:
    data = cfg.data
    if data.image_path:
        img = read_image(data.image_path)
    else:
        img = procedural_image(data.image_kind, data.image_size, data.image_size,
                               channels or data.channels, data.data_seed)
    if channels == 1 and img.channels != 1:
        img = ImageGrid(img.luminance())
    return img


def _image_task(batch: TaskBatch, truth: ImageGrid, reference: Dict[str, float], grid_side: int) -> PreparedTask:
    coords = truth.coordinates()

    def evaluate(model: Model) -> Tuple[MetricReport, ImageGrid]:
        recon = ImageGrid.from_flat(model.predict(coords), truth.height, truth.width)
        report = image_report(recon, truth)
        report.reference = dict(reference)
        return report, recon

    def save(run_dir: Path, recon: ImageGrid) -> Dict[str, str]:
        suffix = "pgm" if recon.channels == 1 else "ppm"
        return {"reconstruction": str(write_image(recon, run_dir / f"reconstruction.{suffix}"))}

    return PreparedTask(batch, 2, truth.channels, evaluate, save, reference, grid_side)


def evaluate_convection(field_fn: Callable[[np.ndarray], np.ndarray], beta: float,
                        nx: int = 256, nt: int = 100) -> Tuple[MetricReport, pd.DataFrame]:
    """Errores de una solución u(x, t) sobre la grilla regular de evaluación"""
    coords, exact = evaluation_grid(beta, nx, nt)
    predicted = np.asarray(field_fn(coords), dtype=np.float64).ravel()
    abs_err, rel_err, explained_var = error_metrics(predicted, exact)
    table = pd.DataFrame({"x": coords[:, 0], "t": coords[:, 1], "u_pred": predicted, "u_exact": exact})
    return MetricReport(abs_err=abs_err, rel_err=rel_err, explained_var=explained_var), table


def prepare_task(cfg: ExperimentConfig) -> PreparedTask:
    """Construir señales, mediciones y evaluador de la tarea"""
    data = cfg.data
    task = cfg.task

    if task == "image":
        img = load_image(cfg)
        return _image_task(TaskBatch(img.coordinates(), img.flat()), img, {}, min(img.height, img.width))

    if task == "sisr":
        hr = load_image(cfg)
        lr = downsample_box(hr, data.scale)
        reference = _image_reference("bilinear", upsample_bilinear(lr, data.scale), hr)
        return _image_task(TaskBatch(lr.coordinates(), lr.flat()), hr, reference, min(lr.height, lr.width))

    if task == "misr":
        hr = load_image(cfg)
        views = make_multiview(hr, data.n_views, data.scale, data.max_shift,
                               np.deg2rad(data.max_rotation_deg), data.data_seed)
        reference = _image_reference("bilinear", upsample_bilinear(views.views[0].image, data.scale), hr)
        return _image_task(TaskBatch(views.coordinates(), views.targets()), hr, reference,
                           min(views.views[0].image.height, views.views[0].image.width))

    if task == "denoise":
        clean = load_image(cfg)
        noisy = poisson_photon_noise(clean, data.max_count, data.data_seed)
        reference = _image_reference("noisy", noisy, clean)
        return _image_task(TaskBatch(clean.coordinates(), noisy.flat()), clean, reference, min(clean.height, clean.width))

    if task == "ct":
        phantom = load_image(cfg, channels=1)
        angles = np.linspace(0.0, np.pi, data.ct_angles, endpoint=False)
        operator = RadonOperator(phantom.height, phantom.width, angles)
        measured = operator.forward(phantom.values[:, :, 0])
        shape = (phantom.height, phantom.width)

        def measure(preds: F.Operand) -> F.Operand:
            return operator.apply(F.reshape(preds, shape))

        prepared = _image_task(TaskBatch(phantom.coordinates(), measured, operator=measure), phantom, {},
                               min(phantom.height, phantom.width))
        save_image = prepared.save

        def save(run_dir: Path, recon: ImageGrid) -> Dict[str, str]:
            artifacts = save_image(run_dir, recon)
            artifacts["sinogram"] = str(write_grid_csv(measured, run_dir / "sinogram.csv"))
            return artifacts

        prepared.save = save
        return prepared

    if task == "occupancy":
        volume = occupancy_analytic(data.shape, data.volume_resolution)
        coords = volume.coordinates()

        def evaluate(model: Model) -> Tuple[MetricReport, np.ndarray]:
            predicted = model.predict(coords).reshape(volume.values.shape)
            return MetricReport(iou=iou(predicted, volume)), predicted

        def save(run_dir: Path, predicted: np.ndarray) -> Dict[str, str]:
            return {"volume": str(write_grid_csv(predicted, run_dir / "volume.csv"))}

        return PreparedTask(TaskBatch(coords, volume.flat()), 3, 1, evaluate, save,
                            grid_side=data.volume_resolution)

    if task == "pinn_convection":
        problem = ConvectionProblem(beta=data.beta, n_ic=data.n_ic, n_bc=data.n_bc,
                                    n_col=data.n_col, rng_seed=data.data_seed)

        def evaluate(model: Model) -> Tuple[MetricReport, pd.DataFrame]:
            return evaluate_convection(lambda c: forward(model, None, normalize_coordinates(c)),
                                       data.beta, data.eval_nx, data.eval_nt)

        def save(run_dir: Path, table: pd.DataFrame) -> Dict[str, str]:
            return {"solution": str(write_table(table, run_dir / "solution.csv"))}

        return PreparedTask(TaskBatch(points=sample_convection_points(problem)), 2, 1, evaluate, save)

    raise DomainError(f"Tarea desconocida: {task}")


def encoding_limited(cfg: ExperimentConfig, prepared: PreparedTask) -> ModelSpec:
    """Sección [model] con K acotado a las frecuencias sin solapamiento de la grilla"""
    spec = cfg.model
    if prepared.grid_side is None or spec.kind not in ("nestnet", "ffn"):
        return spec
    limit = alias_free_frequencies(prepared.grid_side)
    if spec.num_frequencies <= limit:
        return spec
    logger.warning(f"{cfg.name}: K={spec.num_frequencies} se solapa en una grilla de {prepared.grid_side} "
                   f"muestras; se usa K={limit}")
    return spec.model_copy(update={"num_frequencies": limit})


def metric_callback(prepared: PreparedTask, metric: str, every: int, total: int):
    """Callback que agrega la métrica de la tarea a la curva cada `every` épocas"""

    def callback(epoch: int, model: Model, loss, lr) -> Optional[Dict[str, float]]:
        if epoch == 0 or (epoch % every and epoch != total):
            return None
        report, _ = prepared.evaluate(model)
        return {metric: getattr(report, metric)}

    return callback


def run_experiment(cfg: ExperimentConfig, seed: int) -> ResultRecord:
    """Corrida completa de (configuración, semilla); escribe sus artefactos"""
    cfg = cfg.resolved()
    config_hash = cfg.config_hash()
    run_dir = experiment_dir(cfg) / f"seed-{seed}"
    run_dir.mkdir(parents=True, exist_ok=True)
    epochs = cfg.training.epochs
    logger.info(f"Iniciando {cfg.name} [{cfg.task}/{cfg.model.kind}] semilla {seed} → {run_dir}")

    start = time.perf_counter()
    prepared = prepare_task(cfg)
    model = build_model(encoding_limited(cfg, prepared), prepared.input_dim, prepared.output_dim, seed)
    schedule = Schedule.from_spec(cfg.training.schedule, epochs, cfg.training.lr)
    metric = TASK_ORDERING[cfg.task][0]
    recorder = ActivationRecorder(snapshot_epochs(epochs))
    callbacks = [recorder, metric_callback(prepared, metric, cfg.training.curve_every, epochs)]

    try:
        result = train(model, prepared.batch, cfg.loss_spec(), epochs, schedule, rng_seed=seed, callbacks=callbacks)
    except DivergenceError as e:
        logger.error(f"{cfg.name} semilla {seed} divergió: {e}")
        raise DivergenceError(f"{cfg.name} (semilla {seed}, lr {cfg.training.lr}): {e}", e.epoch) from e

    report, reconstruction = prepared.evaluate(model)
    artifacts = prepared.save(run_dir, reconstruction)
    curve_path = write_table(result.curve, run_dir / "curve.csv")
    artifacts["checkpoint"] = str(write_checkpoint(model, run_dir / "model.ckpt"))
    for index, path in enumerate(dump_activation_traces(model, recorder.snapshots, run_dir)):
        artifacts[f"activations_{index}"] = str(path)

    record = ResultRecord(
        config_hash=config_hash,
        name=cfg.name,
        task=cfg.task,
        model_kind=cfg.model.kind,
        seed=seed,
        metrics=report,
        curve_path=str(curve_path),
        artifacts=artifacts,
        wall_seconds=time.perf_counter() - start,
        parameter_count=model.parameter_count(),
        epochs=epochs,
        lr=cfg.training.lr,
    )
    result_path = run_dir / "result.jsonl"
    result_path.unlink(missing_ok=True)
    write_result(record, result_path)
    logger.info(f"Terminado {cfg.name} semilla {seed}: {report.summary()} ({record.wall_seconds:.1f} s)")
    return record
