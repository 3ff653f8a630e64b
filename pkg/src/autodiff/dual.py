"""
Tangentes en modo directo grabadas como nodos de la cinta

Un DualNode lleva el primal y su derivada direccional. Como la tangente es
un nodo más de la cinta, `backward` puede diferenciarla respecto de los
parámetros (directo-sobre-inverso).
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.autodiff.primitives import get_primitive
from src.autodiff.tape import Node, Tape
from src.utils.errors import DomainError, TapeMismatchError


@dataclass(frozen=True)
class DualNode:
    """Par (primal, tangente) sobre una misma cinta"""

    primal: Node
    tangent: Node

    __array_ufunc__ = None

    def __post_init__(self):
        if self.primal.tape is not self.tangent.tape:
            raise TapeMismatchError("primal y tangente deben vivir en la misma cinta")

    @property
    def tape(self) -> Tape:
        return self.primal.tape

    @property
    def value(self) -> np.ndarray:
        return self.primal.value

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.primal.shape

    @property
    def T(self):
        from src.autodiff import functional as F
        return F.transpose(self)

    def __add__(self, other):
        from src.autodiff import functional as F
        return F.call("add", self, other)

    def __radd__(self, other):
        from src.autodiff import functional as F
        return F.call("add", other, self)

    def __sub__(self, other):
        from src.autodiff import functional as F
        return F.call("sub", self, other)

    def __rsub__(self, other):
        from src.autodiff import functional as F
        return F.call("sub", other, self)

    def __mul__(self, other):
        from src.autodiff import functional as F
        return F.call("mul", self, other)

    def __rmul__(self, other):
        from src.autodiff import functional as F
        return F.call("mul", other, self)

    def __truediv__(self, other):
        from src.autodiff import functional as F
        return F.call("div", self, other)

    def __rtruediv__(self, other):
        from src.autodiff import functional as F
        return F.call("div", other, self)

    def __matmul__(self, other):
        from src.autodiff import functional as F
        return F.call("matmul", self, other)

    def __rmatmul__(self, other):
        from src.autodiff import functional as F
        return F.call("matmul", other, self)

    def __neg__(self):
        from src.autodiff import functional as F
        return F.call("neg", self)

    def __getitem__(self, key):
        from src.autodiff import functional as F
        return F.call("getitem", self, key=key)


def dual_seed(tape: Tape, input: Node, direction) -> DualNode:
    """Sembrar una dirección sobre una hoja; la tangente es una constante"""
    if not tape.is_leaf(input):
        raise DomainError(f"dual_seed requiere una hoja, el nodo {input.id} es '{tape.op_of(input)}'")
    seed = np.broadcast_to(np.asarray(direction, dtype=np.float64), input.shape)
    return DualNode(input, tape.constant(seed.copy()))


def lift(tape: Tape, node: Node) -> DualNode:
    """Tratar un nodo como constante respecto de la dirección sembrada"""
    return DualNode(node, tape.zeros_like(node))


def dual_apply(tape: Tape, op: str, inputs: Sequence[DualNode], **attrs) -> DualNode:
    """Aplicar una primitiva al primal y su regla de cadena a la tangente"""
    primal = tape.apply(op, [d.primal for d in inputs], **attrs)
    tangents = [None if tape.is_zero(d.tangent) else d.tangent for d in inputs]
    tangent = None
    if any(t is not None for t in tangents):
        tangent = get_primitive(op).jvp(tape, [d.primal for d in inputs], tangents, primal, attrs)
    if tangent is None:
        tangent = tape.zeros_like(primal)
    return DualNode(primal, tangent)
