"""
Cinta de diferenciación automática en modo inverso

Los nodos se agregan en orden topológico por construcción: cada entrada de
una operación es un nodo anterior de la misma cinta. Cada nodo guarda su
valor primal (float64) ya calculado.
"""

from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from src.autodiff.primitives import get_primitive
from src.utils.errors import DomainError, NonFiniteInputError, TapeMismatchError
from src.utils.logger import get_logger

logger = get_logger(__name__)

LEAF = "leaf"


class Node:
    """Referencia a una entrada de la cinta"""

    __slots__ = ("tape", "id")
    # numpy delega los operadores binarios en los métodos reflejados del nodo
    __array_ufunc__ = None

    def __init__(self, tape: "Tape", node_id: int):
        self.tape = tape
        self.id = node_id

    @property
    def value(self) -> np.ndarray:
        return self.tape.value_of(self)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def T(self):
        from src.autodiff import functional as F
        return F.transpose(self)

    def item(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"Node(id={self.id}, op={self.tape.op_of(self)}, shape={self.shape})"

    # Operadores: se despachan por functional para admitir mezcla con DualNode
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


class GradientMap(dict):
    """Adjuntos por id de nodo; acepta también el propio Node como clave"""

    def __getitem__(self, key: Union[Node, int]) -> np.ndarray:
        return super().__getitem__(key.id if isinstance(key, Node) else key)

    def __contains__(self, key) -> bool:
        return super().__contains__(key.id if isinstance(key, Node) else key)


class Tape:
    """Secuencia de operaciones grabadas, solo de anexado"""

    def __init__(self):
        self._ops: List[str] = []
        self._inputs: List[Tuple[int, ...]] = []
        self._values: List[np.ndarray] = []
        self._attrs: List[Dict[str, Any]] = []
        self._trainable: List[int] = []
        self._zeros: set = set()

    def __len__(self) -> int:
        return len(self._ops)

    # --- consulta -----------------------------------------------------------

    def _check(self, node: Node) -> Node:
        if not isinstance(node, Node):
            raise TypeError(f"Se esperaba un Node, se recibió {type(node).__name__}")
        if node.tape is not self:
            raise TapeMismatchError(f"El nodo {node.id} pertenece a otra cinta")
        return node

    def value_of(self, node: Node) -> np.ndarray:
        return self._values[self._check(node).id]

    def op_of(self, node: Node) -> str:
        return self._ops[self._check(node).id]

    def is_leaf(self, node: Node) -> bool:
        return self.op_of(node) == LEAF

    def is_zero(self, node: Node) -> bool:
        """Nodo constante creado como cero estructural (tangente nula)"""
        return self._check(node).id in self._zeros

    @property
    def trainable(self) -> Tuple[Node, ...]:
        return tuple(Node(self, i) for i in self._trainable)

    # --- grabación ----------------------------------------------------------

    def _push(self, op: str, inputs: Tuple[int, ...], value: np.ndarray, attrs: Dict[str, Any]) -> Node:
        self._ops.append(op)
        self._inputs.append(inputs)
        self._values.append(value)
        self._attrs.append(attrs)
        return Node(self, len(self._ops) - 1)

    def leaf(self, value, trainable: bool = False) -> Node:
        """Crear una hoja; si es entrenable se registra para recolectar su gradiente"""
        array = np.array(value, dtype=np.float64)
        if not np.all(np.isfinite(array)):
            raise NonFiniteInputError(f"Valor de hoja no finito: {value!r}")
        node = self._push(LEAF, (), array, {})
        if trainable:
            self._trainable.append(node.id)
        return node

    def constant(self, value) -> Node:
        return self.leaf(value, trainable=False)

    def zeros_like(self, node: Node) -> Node:
        zero = self.constant(np.zeros(self.value_of(node).shape))
        self._zeros.add(zero.id)
        return zero

    def apply(self, op: str, inputs: Sequence[Node], **attrs) -> Node:
        """Grabar una operación elemental y calcular su valor primal"""
        primitive = get_primitive(op)
        if primitive.arity >= 0 and len(inputs) != primitive.arity:
            raise DomainError(f"'{op}' espera {primitive.arity} entradas, recibió {len(inputs)}")
        ids = tuple(self._check(node).id for node in inputs)
        value = primitive.forward([self._values[i] for i in ids], attrs)
        value = np.asarray(value, dtype=np.float64)
        if not np.all(np.isfinite(value)):
            raise NonFiniteInputError(f"'{op}' produjo un valor no finito")
        return self._push(op, ids, value, attrs)

    # --- evaluación ---------------------------------------------------------

    def replay(self) -> List[np.ndarray]:
        """Reevaluar toda la cinta desde sus hojas"""
        values: List[np.ndarray] = []
        for op, ids, cached, attrs in zip(self._ops, self._inputs, self._values, self._attrs):
            if op == LEAF:
                values.append(cached.copy())
            else:
                values.append(np.asarray(get_primitive(op).forward([values[i] for i in ids], attrs),
                                         dtype=np.float64))
        return values

    def backward(self, output: Node) -> GradientMap:
        """Acumulación inversa desde un nodo escalar; visita cada nodo una sola vez"""
        self._check(output)
        out_value = self._values[output.id]
        if out_value.size != 1:
            raise DomainError(f"backward requiere una salida escalar, forma {out_value.shape}")

        adjoints: Dict[int, np.ndarray] = {output.id: np.ones_like(out_value)}
        leaf_adjoints: Dict[int, np.ndarray] = {}
        for i in range(output.id, -1, -1):
            grad = adjoints.pop(i, None)
            if grad is None:
                continue
            op = self._ops[i]
            if op == LEAF:
                leaf_adjoints[i] = grad
                continue
            ids = self._inputs[i]
            grads = get_primitive(op).vjp(grad, [self._values[j] for j in ids], self._values[i], self._attrs[i])
            for j, g in zip(ids, grads):
                if g is None:
                    continue
                adjoints[j] = adjoints[j] + g if j in adjoints else g

        return GradientMap({
            pid: np.asarray(leaf_adjoints.get(pid, np.zeros_like(self._values[pid])), dtype=np.float64)
            for pid in self._trainable
        })


def tape_new() -> Tape:
    """Crear una cinta vacía"""
    return Tape()


def leaf(tape: Tape, value, trainable: bool = False) -> Node:
    return tape.leaf(value, trainable=trainable)


def apply(tape: Tape, op: str, inputs: Iterable[Node], **attrs) -> Node:
    return tape.apply(op, list(inputs), **attrs)


def backward(tape: Tape, output: Node) -> GradientMap:
    return tape.backward(output)
