"""
Verificación de gradientes por diferencias finitas centrales
"""

from typing import Callable, Iterable, List, Optional

import numpy as np

from src.autodiff.tape import Node, Tape
from src.utils.data_models import GradientCheckReport
from src.utils.logger import get_logger

logger = get_logger(__name__)

ScalarFn = Callable[[Tape, Node], Node]


def _evaluate(fn: ScalarFn, point: np.ndarray) -> float:
    tape = Tape()
    return float(fn(tape, tape.constant(point)).value)


def analytic_gradient(fn: ScalarFn, point) -> np.ndarray:
    """Gradiente en modo inverso de `fn` respecto de su vector de parámetros"""
    tape = Tape()
    params = tape.leaf(np.asarray(point, dtype=np.float64), trainable=True)
    return tape.backward(fn(tape, params))[params]


def finite_difference_check(
    fn: ScalarFn,
    point,
    h: float = 1e-6,
    coords: Optional[Iterable[int]] = None,
    kink_tol: float = 1e-3,
    floor: float = 1e-5,
    relative_floor: float = 0.0,
) -> GradientCheckReport:
    """
    Comparar el gradiente analítico con diferencias centrales por coordenada.

    `fn(tape, params)` debe devolver un nodo escalar. Una coordenada donde los
    cocientes hacia adelante y hacia atrás difieren más de
    `kink_tol·max(1, |central|)` se marca como no suave y se omite del máximo.
    El denominador del error relativo no baja de `floor` ni de
    `relative_floor·max|∇f|`.
    """
    point = np.asarray(point, dtype=np.float64).ravel()
    grad = analytic_gradient(fn, point).ravel()
    center = _evaluate(fn, point)
    indices = list(range(point.size)) if coords is None else [int(i) for i in coords]
    floor = max(floor, relative_floor * float(np.max(np.abs(grad), initial=0.0)))

    errors: List[float] = []
    non_smooth: List[int] = []
    for i in indices:
        step = np.zeros_like(point)
        step[i] = h
        f_plus = _evaluate(fn, point + step)
        f_minus = _evaluate(fn, point - step)
        central = (f_plus - f_minus) / (2.0 * h)
        forward = (f_plus - center) / h
        backward = (center - f_minus) / h
        if abs(forward - backward) > kink_tol * max(1.0, abs(central)):
            non_smooth.append(i)
            continue
        errors.append(abs(grad[i] - central) / max(abs(grad[i]), abs(central), floor))

    report = GradientCheckReport(
        max_rel_error=max(errors) if errors else 0.0,
        checked=len(errors),
        non_smooth=non_smooth,
        h=h,
    )
    logger.debug(f"Chequeo de gradiente: {report.checked} coordenadas, error máximo {report.max_rel_error:.3e}")
    return report
