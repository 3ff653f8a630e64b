"""
Funciones de conveniencia sobre Node, DualNode y arreglos numpy

`call` despacha cada primitiva según sus operandos: con algún DualNode
propaga tangentes, con algún Node graba en la cinta y con solo arreglos
evalúa directamente en numpy (sin cinta).
"""

from typing import Sequence, Union

import numpy as np

from src.autodiff.dual import DualNode, dual_apply, lift
from src.autodiff.primitives import evaluate
from src.autodiff.tape import Node
from src.utils.errors import TapeMismatchError

Operand = Union[Node, DualNode, np.ndarray, float]


def _tape_of(operands: Sequence[Operand]):
    tape = None
    for operand in operands:
        if isinstance(operand, (Node, DualNode)):
            if tape is None:
                tape = operand.tape
            elif operand.tape is not tape:
                raise TapeMismatchError("operandos de cintas distintas")
    return tape


def call(op: str, *operands: Operand, **attrs) -> Operand:
    """Aplicar `op` eligiendo el modo según el tipo de los operandos"""
    tape = _tape_of(operands)
    if tape is None:
        return evaluate(op, list(operands), **attrs)
    if any(isinstance(o, DualNode) for o in operands):
        duals = [
            o if isinstance(o, DualNode) else lift(tape, o if isinstance(o, Node) else tape.constant(o))
            for o in operands
        ]
        return dual_apply(tape, op, duals, **attrs)
    nodes = [o if isinstance(o, Node) else tape.constant(o) for o in operands]
    return tape.apply(op, nodes, **attrs)


def sin(x: Operand) -> Operand:
    return call("sin", x)


def cos(x: Operand) -> Operand:
    return call("cos", x)


def exp(x: Operand) -> Operand:
    return call("exp", x)


def relu(x: Operand) -> Operand:
    return call("relu", x)


def square(x: Operand) -> Operand:
    return call("square", x)


def sqrt(x: Operand) -> Operand:
    return call("sqrt", x)


def maximum(a: Operand, b: Operand) -> Operand:
    return call("max", a, b)


def transpose(x: Operand) -> Operand:
    return call("transpose", x)


def matmul(a: Operand, b: Operand) -> Operand:
    return call("matmul", a, b)


def sum(x: Operand, axis=None, keepdims: bool = False) -> Operand:  # noqa: A001
    return call("sum", x, axis=axis, keepdims=keepdims)


def mean(x: Operand, axis=None, keepdims: bool = False) -> Operand:
    return call("mean", x, axis=axis, keepdims=keepdims)


def reshape(x: Operand, shape) -> Operand:
    return call("reshape", x, shape=tuple(shape))


def concat(operands: Sequence[Operand], axis: int = 0) -> Operand:
    return call("concat", *operands, axis=axis)


def linear_map(x: Operand, forward, adjoint) -> Operand:
    """Operador lineal fijo con su transpuesta exacta (p. ej. la transformada de Radon)"""
    return call("linear_map", x, forward=forward, adjoint=adjoint)


def dot(a: Operand, b: Operand) -> Operand:
    return sum(call("mul", a, b))


def value_of(x: Operand) -> np.ndarray:
    """Valor numérico de cualquier operando"""
    if isinstance(x, (Node, DualNode)):
        return x.value
    return np.asarray(x, dtype=np.float64)
