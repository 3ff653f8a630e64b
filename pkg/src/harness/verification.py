"""
Conjunto de oráculos ejecutables: gradientes, tangentes, operador de Radon,
métricas, activaciones y formatos de archivo
"""

import tempfile
from pathlib import Path
from typing import Callable, List

import numpy as np

from src.autodiff import functional as F
from src.autodiff.dual import dual_seed
from src.autodiff.gradcheck import analytic_gradient, finite_difference_check
from src.autodiff.tape import Tape
from src.formats.checkpoints import read_checkpoint, write_checkpoint
from src.formats.config_file import parse_config, serialize_config
from src.formats.images import read_image, write_image
from src.formats.results import read_results, write_result
from src.harness.traces import slope_changes
from src.metrics.field_errors import error_metrics, iou
from src.metrics.image_quality import psnr, ssim
from src.models.activations import LearnedActivation, rho_eval, sample_activation
from src.models.networks import build_nestnet, forward
from src.operators.convection import ConvectionProblem, exact_field, sample_convection_points
from src.operators.grids import ImageGrid
from src.operators.radon import RadonOperator, radon_adjoint_check
from src.training.losses import convection_residual, l2_loss, pinn_loss
from src.training.trainer import model_field
from src.utils.data_models import (
    EncodingSpec,
    ExperimentConfig,
    MetricReport,
    ResultRecord,
    VerificationCheck,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

GRADCHECK_H = 1e-6
# piso del error relativo como fracción de max|∇f|
GRADCHECK_RELATIVE_FLOOR = 1e-3
PRIMITIVE_TOL = 1e-6
TANGENT_TOL = 1e-10
LINEARITY_TOL = 1e-12
NETWORK_TOL = 1e-5
SECOND_ORDER_TOL = 1e-4
RESIDUAL_TOL = 1e-10
RADON_SYMMETRY_TOL = 1e-2


def _check(name: str, value: float, tolerance: float, detail: str = "") -> VerificationCheck:
    return VerificationCheck(name=name, value=float(value), tolerance=tolerance,
                             passed=bool(value <= tolerance), detail=detail)


def _relative(a, b) -> float:
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


# --- diferenciación automática -------------------------------------------------

PRIMITIVE_CASES = {
    "sin": lambda t, p: F.sum(F.sin(p)),
    "cos": lambda t, p: F.sum(F.cos(p)),
    "exp": lambda t, p: F.sum(F.exp(p)),
    "square": lambda t, p: F.sum(F.square(p)),
    "sqrt": lambda t, p: F.sum(F.sqrt(F.square(p) + 1.0)),
    "relu": lambda t, p: F.sum(F.relu(p) * p),
    "mul": lambda t, p: F.sum(p[0:3] * p[3:6]),
    "div": lambda t, p: F.sum(p[0:3] / (F.square(p[3:6]) + 1.0)),
    "max": lambda t, p: F.sum(F.maximum(p[0:3], p[3:6] * 1.5)),
    "matmul": lambda t, p: F.sum(F.matmul(F.reshape(p, (2, 3)), F.transpose(F.reshape(p, (2, 3))))),
    "mean": lambda t, p: F.mean(F.square(p) - p),
    "concat": lambda t, p: F.sum(F.square(F.concat([p, p * 2.0], axis=0))),
    "rho": lambda t, p: F.sum(F.call("rho", p, p[0:3] * 0.5, p[3:6] * 0.1, p[0:3], p[5]) * p),
    "rho_slope": lambda t, p: F.sum(F.call("rho_slope", p, p[0:3] * 0.5, p[3:6] * 0.1, p[3:6]) * p),
}

# Sin puntos sobre quiebres de relu/max
PRIMITIVE_POINT = np.array([-1.3, 0.7, 2.1, -0.4, 1.1, 0.9])


def check_primitives() -> List[VerificationCheck]:
    checks = []
    for name, fn in PRIMITIVE_CASES.items():
        report = finite_difference_check(fn, PRIMITIVE_POINT, h=GRADCHECK_H)
        checks.append(_check(f"gradiente de {name}", report.max_rel_error, PRIMITIVE_TOL))
    return checks


def _smooth_scalar(x):
    return F.sum(F.sin(x) * F.exp(x * 0.3) + F.square(x))


def check_tangent_adjoint(rng: np.random.Generator) -> VerificationCheck:
    """⟨∇f, v⟩ en modo inverso contra la tangente directa en la dirección v"""
    point = rng.uniform(-1.0, 1.0, size=5)
    direction = rng.normal(size=5)
    tape = Tape()
    x = tape.leaf(point, trainable=True)
    out = _smooth_scalar(dual_seed(tape, x, direction))
    tangent = float(out.tangent.value)
    adjoint = float(np.dot(tape.backward(out.primal)[x], direction))
    return _check("tangente vs adjunta", _relative(tangent, adjoint), TANGENT_TOL)


def check_backward_linearity(rng: np.random.Generator) -> VerificationCheck:
    """∇(a f + b g) = a ∇f + b ∇g"""
    point = rng.uniform(-1.0, 1.0, size=5)
    a, b = 0.7, -1.3

    def f(t, p):
        return _smooth_scalar(p)

    def g(t, p):
        return F.sum(F.cos(p) * p)

    def combined(t, p):
        return f(t, p) * a + g(t, p) * b

    expected = a * analytic_gradient(f, point) + b * analytic_gradient(g, point)
    return _check("linealidad de backward", _relative(analytic_gradient(combined, point), expected),
                  LINEARITY_TOL)


def _gradcheck_net(seed: int = 0):
    return build_nestnet(32, 2, EncodingSpec(kind="fourier", num_frequencies=8), seed)


def check_network_gradients(rng: np.random.Generator) -> List[VerificationCheck]:
    """NestNet (32, 2, K=8): ℓ2 y PINN contra diferencias centrales en 50 parámetros"""
    model = _gradcheck_net()
    point = model.flat_parameters()
    coords_idx = rng.choice(point.size, size=50, replace=False)
    coords = rng.uniform(-1.0, 1.0, size=(16, 2))
    targets = rng.uniform(0.0, 1.0, size=(16, 1))
    problem = ConvectionProblem(n_ic=8, n_bc=4, n_col=16, rng_seed=0)
    points = sample_convection_points(problem)

    def l2(tape, flat):
        return l2_loss(tape, forward(model, tape, coords, model.bind_flat(flat)), targets)

    def pinn(tape, flat):
        return pinn_loss(tape, model_field(model, tape, model.bind_flat(flat)), points, problem.beta)[0]

    checks = []
    for name, fn in (("ℓ2", l2), ("PINN", pinn)):
        report = finite_difference_check(fn, point, h=GRADCHECK_H, coords=coords_idx,
                                         relative_floor=GRADCHECK_RELATIVE_FLOOR)
        checks.append(_check(f"gradiente NestNet ({name})", report.max_rel_error, NETWORK_TOL,
                             f"{report.checked} coordenadas, {len(report.non_smooth)} con quiebre"))
    return checks


def check_second_order(rng: np.random.Generator) -> List[VerificationCheck]:
    """Residuo exacto nulo y gradiente del residuo respecto de θ"""
    beta = 10.0
    coords = np.stack([rng.uniform(0.0, 2.0 * np.pi, 100), rng.uniform(0.0, 1.0, 100)], axis=1)
    tape = Tape()
    residual = convection_residual(tape, exact_field(beta), coords, beta)
    checks = [_check("residuo de la solución exacta", float(np.max(np.abs(residual.value))), RESIDUAL_TOL)]

    model = _gradcheck_net(1)
    collocation = coords[:16]
    weights = rng.normal(size=(16, 1))

    def projected(t, flat):
        field = model_field(model, t, model.bind_flat(flat))
        return F.sum(convection_residual(t, field, collocation, beta) * weights)

    report = finite_difference_check(projected, model.flat_parameters(), h=GRADCHECK_H,
                                     coords=rng.choice(model.parameter_count(), size=50, replace=False))
    checks.append(_check("gradiente del residuo (segundo orden)", report.max_rel_error, SECOND_ORDER_TOL))
    return checks


# --- operador de Radon ----------------------------------------------------------

def _profile_spread(profiles: np.ndarray) -> float:
    """Mayor desvío de un perfil respecto del primero, relativo a su máximo"""
    return float(np.max(np.abs(profiles - profiles[0])) / np.max(np.abs(profiles[0])))


def check_radon(rng: np.random.Generator) -> List[VerificationCheck]:
    size = 32
    angles = np.linspace(0.0, np.pi, 12, endpoint=False)
    operator = RadonOperator(size, size, angles)
    x = rng.uniform(0.0, 1.0, size=(size, size))
    y = rng.uniform(-1.0, 1.0, size=(size, size))
    a, b = 0.7, -1.3
    linearity = _relative(operator.forward(a * x + b * y), a * operator.forward(x) + b * operator.forward(y))
    mass = float(np.max(np.abs(operator.forward(x).sum(axis=1) - x.sum())) / x.sum())

    xy = ImageGrid(np.zeros((size, size))).coordinates()
    r2 = np.sum(xy ** 2, axis=1).reshape(size, size)
    # en múltiplos de π/2 la grilla se mapea sobre sí misma: el disco debe coincidir al redondeo
    disk = (r2 <= 0.25).astype(np.float64)
    lattice = _profile_spread(RadonOperator(size, size, [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]).forward(disk))
    # en ángulos arbitrarios se usa una gaussiana (σ = 4 píxeles): el borde pixelado del disco no es simétrico
    blob = np.exp(-r2 / (2.0 * 0.25 ** 2))
    arbitrary = _profile_spread(RadonOperator(size, size, angles + 0.1).forward(blob))

    return [
        _check("linealidad de Radon", linearity, 1e-10),
        _check("adjunta de Radon", radon_adjoint_check(size, angles, rng_seed=int(rng.integers(1 << 31))), 1e-9),
        _check("conservación de masa", mass, 1e-6),
        _check("simetría rotacional (múltiplos de π/2)", lattice, 1e-6, "disco de radio 0.5"),
        _check("simetría rotacional (ángulos arbitrarios)", arbitrary, RADON_SYMMETRY_TOL,
               "gaussiana σ = 4 píxeles, 12 ángulos fuera de la grilla"),
    ]


# --- métricas y activaciones -----------------------------------------------------

def check_metrics(rng: np.random.Generator) -> List[VerificationCheck]:
    img = rng.uniform(0.2, 0.8, size=(16, 16))
    truth = np.array([1.0, 1.0, 0.0, 0.0])
    field = rng.normal(size=64)
    errors = error_metrics(field, field)
    return [
        _check("psnr(x, x) = inf", 0.0 if psnr(img, img) == float("inf") else 1.0, 0.0),
        _check("psnr con error 0.1 = 20 dB", abs(psnr(img + 0.1, img) - 20.0), 1e-9),
        _check("ssim(x, x) = 1", abs(ssim(img, img) - 1.0), 1e-12),
        _check("iou idéntico", abs(iou(truth, truth) - 1.0), 0.0),
        _check("iou disjunto", iou(1.0 - truth, truth), 0.0),
        _check("iou mitad", abs(iou(np.array([1.0, 0.0, 0.0, 0.0]), truth) - 0.5), 0.0),
        _check("errores de predicción perfecta", max(errors[0], errors[1], abs(errors[2] - 1.0)), 0.0),
    ]


def check_activation_init() -> List[VerificationCheck]:
    """ρ inicial pasa por (0, 0), (1, 0.7), (−1, 0) y es lineal a trozos"""
    initial = LearnedActivation.initial()
    values = rho_eval(initial, np.array([0.0, 1.0, -1.0]))
    kinks = slope_changes(sample_activation(initial))
    return [
        _check("ρ inicial en (0, 1, −1)", float(np.max(np.abs(values - np.array([0.0, 0.7, 0.0])))), 1e-12),
        _check("quiebres de ρ inicial <= 3", float(max(0, kinks - 3)), 0.0, f"{kinks} quiebres"),
    ]


# --- formatos --------------------------------------------------------------------

def check_round_trips(rng: np.random.Generator) -> List[VerificationCheck]:
    cfg = ExperimentConfig(name="verificacion", task="pinn_convection", seeds=[0, 3])
    record = ResultRecord(
        config_hash="0123456789abcdef", name="verificacion", task="image", model_kind="nestnet", seed=0,
        metrics=MetricReport(psnr_db=1.0 / 3.0, ssim=0.1 + 0.2), wall_seconds=np.pi, parameter_count=7,
        epochs=1, lr=5e-3,
    )
    img = ImageGrid(rng.uniform(0.0, 1.0, size=(9, 7, 3)))
    model = _gradcheck_net(2)

    with tempfile.TemporaryDirectory() as tmp:
        tmp_dir = Path(tmp)
        config_ok = parse_config(serialize_config(cfg)) == cfg
        write_result(record, tmp_dir / "results.jsonl")
        result_ok = read_results(tmp_dir / "results.jsonl") == [record]
        image_err = float(np.max(np.abs(read_image(write_image(img, tmp_dir / "img.ppm")).values - img.values)))
        loaded = read_checkpoint(write_checkpoint(model, tmp_dir / "model.ckpt"))
        ckpt_ok = loaded.architecture == model.architecture and \
            np.array_equal(loaded.flat_parameters(), model.flat_parameters())

    return [
        _check("configuración ida y vuelta", 0.0 if config_ok else 1.0, 0.0),
        _check("resultados ida y vuelta", 0.0 if result_ok else 1.0, 0.0),
        _check("imagen ida y vuelta", image_err, 0.5 / 255.0),
        _check("checkpoint ida y vuelta", 0.0 if ckpt_ok else 1.0, 0.0),
    ]


def run_verification(seed: int = 0) -> List[VerificationCheck]:
    """Ejecutar todos los oráculos; cada chequeo informa error, tolerancia y estado"""
    rng = np.random.default_rng(seed)
    groups: List[Callable[[], object]] = [
        check_primitives,
        lambda: check_tangent_adjoint(rng),
        lambda: check_backward_linearity(rng),
        lambda: check_network_gradients(rng),
        lambda: check_second_order(rng),
        lambda: check_radon(rng),
        lambda: check_metrics(rng),
        check_activation_init,
        lambda: check_round_trips(rng),
    ]
    checks: List[VerificationCheck] = []
    for group in groups:
        result = group()
        checks.extend(result if isinstance(result, list) else [result])

    failed = [c for c in checks if not c.passed]
    for check in failed:
        logger.error(check.line())
    logger.info(f"Verificación: {len(checks) - len(failed)}/{len(checks)} chequeos superados")
    return checks
