"""
Pérdidas: ℓ2 punto a punto y pérdida compuesta PINN de convección
"""

from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from src.autodiff import functional as F
from src.autodiff.dual import dual_seed
from src.autodiff.tape import Node, Tape
from src.operators.convection import ConvectionPoints
from src.utils.errors import DomainError

Field = Callable[[F.Operand], F.Operand]


def l2_loss(tape: Tape, preds: F.Operand, targets) -> Node:
    """Media de las diferencias al cuadrado, canal por canal"""
    targets = np.asarray(targets, dtype=np.float64)
    shape = F.value_of(preds).shape
    if shape != targets.shape:
        raise DomainError(f"Predicciones {shape} y objetivos {targets.shape} no coinciden")
    loss = F.mean(F.square(preds - targets))
    return loss if isinstance(loss, Node) else tape.constant(loss)


def directional_derivative(tape: Tape, field: Field, coords: np.ndarray, direction: Sequence[float]) -> Node:
    """Derivada de u a lo largo de `direction` en (x, t): una sola pasada primal y una tangente"""
    direction = np.asarray(direction, dtype=np.float64)
    if direction.shape != (coords.shape[1],):
        raise DomainError(f"Dirección {direction.shape} para coordenadas {coords.shape}")
    points = tape.constant(coords)
    return field(dual_seed(tape, points, direction)).tangent


def convection_residual(tape: Tape, field: Field, coords: np.ndarray, beta: float) -> Node:
    """R(u) = u_t + β u_x en los puntos dados, forma (N, 1)"""
    # u_t + β u_x es la derivada direccional según (β, 1)
    return directional_derivative(tape, field, coords, (beta, 1.0))


def pinn_loss(
    tape: Tape,
    field: Field,
    points: ConvectionPoints,
    beta: float,
    weights: Sequence[float] = (1.0, 1.0, 1.0),
) -> Tuple[Node, Dict[str, float]]:
    """
    Suma ponderada de los términos IC, BC y PDE (cada uno como media).

    `field` recibe coordenadas físicas (N, 2) y devuelve u (N, 1). Un término
    con peso 0 no se construye.
    """
    w_ic, w_bc, w_pde = weights
    if min(weights) < 0:
        raise DomainError("Los pesos de la pérdida PINN deben ser >= 0")
    terms: Dict[str, Node] = {}
    if w_ic > 0:
        u0 = np.sin(points.ic[:, 0:1])
        terms["ic"] = F.mean(F.square(field(tape.constant(points.ic)) - u0))
    if w_bc > 0:
        left = field(tape.constant(points.bc_left))
        right = field(tape.constant(points.bc_right))
        terms["bc"] = F.mean(F.square(left - right))
    if w_pde > 0:
        terms["pde"] = F.mean(F.square(convection_residual(tape, field, points.collocation, beta)))

    total = None
    for name, weight in (("ic", w_ic), ("bc", w_bc), ("pde", w_pde)):
        if name in terms:
            term = terms[name] * weight
            total = term if total is None else total + term
    if total is None:
        total = tape.constant(0.0)
    return total, {name: float(node.value) for name, node in terms.items()}
