"""
Registro de primitivas de la cinta

Cada primitiva define su evaluación numérica (float64), su regla inversa
(vector-Jacobiano, numérica) y su regla tangente. La regla tangente se
construye con operaciones de la propia cinta, de modo que las tangentes
siguen siendo diferenciables en modo inverso.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import DomainError

Array = np.ndarray


@dataclass(frozen=True)
class Primitive:
    """Definición de una operación elemental"""

    name: str
    arity: int  # -1 = variádica
    forward: Callable[[Sequence[Array], Dict[str, Any]], Array]
    vjp: Callable[[Array, Sequence[Array], Array, Dict[str, Any]], Tuple[Optional[Array], ...]]
    # (tape, primales, tangentes | None, salida, attrs) -> nodo tangente | None
    jvp: Callable[..., Any] = field(repr=False)


def unbroadcast(grad: Array, shape: Tuple[int, ...]) -> Array:
    """Sumar el adjunto sobre los ejes que se difundieron en la operación directa"""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _sum_tangents(tape, *terms):
    terms = [t for t in terms if t is not None]
    if not terms:
        return None
    total = terms[0]
    for term in terms[1:]:
        total = tape.apply("add", [total, term])
    return total


# --- binarias ---------------------------------------------------------------

def _add_jvp(tape, primals, tangents, out, attrs):
    return _sum_tangents(tape, *tangents)


def _sub_jvp(tape, primals, tangents, out, attrs):
    ta, tb = tangents
    if tb is None:
        return ta
    neg_tb = tape.apply("neg", [tb])
    return neg_tb if ta is None else tape.apply("sub", [ta, tb])


def _mul_jvp(tape, primals, tangents, out, attrs):
    a, b = primals
    ta, tb = tangents
    return _sum_tangents(
        tape,
        tape.apply("mul", [ta, b]) if ta is not None else None,
        tape.apply("mul", [a, tb]) if tb is not None else None,
    )


def _div_forward(values, attrs):
    a, b = values
    if np.any(b == 0):
        raise DomainError("división por cero en 'div'")
    return a / b


def _div_jvp(tape, primals, tangents, out, attrs):
    _, b = primals
    ta, tb = tangents
    num = ta
    if tb is not None:
        scaled = tape.apply("mul", [out, tb])
        num = tape.apply("neg", [scaled]) if ta is None else tape.apply("sub", [ta, scaled])
    return tape.apply("div", [num, b])


def _max_vjp(g, values, out, attrs):
    a, b = values
    mask = a >= b
    return unbroadcast(g * mask, a.shape), unbroadcast(g * ~mask, b.shape)


def _max_jvp(tape, primals, tangents, out, attrs):
    a, b = primals
    mask = (a.value >= b.value).astype(np.float64)
    ta, tb = tangents
    return _sum_tangents(
        tape,
        tape.apply("mul", [ta, tape.constant(mask)]) if ta is not None else None,
        tape.apply("mul", [tb, tape.constant(1.0 - mask)]) if tb is not None else None,
    )


# --- unarias ----------------------------------------------------------------

def _sqrt_forward(values, attrs):
    (a,) = values
    if np.any(a < 0):
        raise DomainError("raíz cuadrada de un valor negativo en 'sqrt'")
    return np.sqrt(a)


def _unary_jvp(derivative: Callable):
    """Tangente de la forma f'(a)·ȧ, con f'(a) construido sobre la cinta"""

    def jvp(tape, primals, tangents, out, attrs):
        (t,) = tangents
        return tape.apply("mul", [derivative(tape, primals[0], out), t])

    return jvp


def _linear_jvp(name: str):
    """Operaciones lineales: la tangente es la misma operación aplicada a ȧ"""

    def jvp(tape, primals, tangents, out, attrs):
        (t,) = tangents
        return tape.apply(name, [t], **attrs)

    return jvp


def _relu_jvp(tape, primals, tangents, out, attrs):
    (t,) = tangents
    # derivada de ReLU en 0 definida como 0
    step = (primals[0].value > 0).astype(np.float64)
    return tape.apply("mul", [t, tape.constant(step)])


# --- tensoriales ------------------------------------------------------------

def _matmul_forward(values, attrs):
    a, b = values
    if a.ndim != 2 or b.ndim != 2:
        raise DomainError(f"'matmul' requiere matrices 2-D, recibió {a.shape} y {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise DomainError(f"dimensiones incompatibles en 'matmul': {a.shape} @ {b.shape}")
    return a @ b


def _matmul_jvp(tape, primals, tangents, out, attrs):
    a, b = primals
    ta, tb = tangents
    return _sum_tangents(
        tape,
        tape.apply("matmul", [ta, b]) if ta is not None else None,
        tape.apply("matmul", [a, tb]) if tb is not None else None,
    )


def _reduce_vjp(scale_by_count: bool):
    def vjp(g, values, out, attrs):
        (a,) = values
        axis = attrs.get("axis")
        keepdims = attrs.get("keepdims", False)
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        g = np.broadcast_to(g, a.shape)
        if scale_by_count:
            count = a.size if axis is None else np.prod([a.shape[i] for i in np.atleast_1d(axis)])
            g = g / count
        return (np.array(g, dtype=np.float64),)

    return vjp


def _getitem_vjp(g, values, out, attrs):
    (a,) = values
    grad = np.zeros_like(a)
    np.add.at(grad, attrs["key"], g)
    return (grad,)


def _concat_forward(values, attrs):
    return np.concatenate(values, axis=attrs.get("axis", 0))


def _concat_vjp(g, values, out, attrs):
    axis = attrs.get("axis", 0)
    bounds = np.cumsum([v.shape[axis] for v in values])[:-1]
    return tuple(np.split(g, bounds, axis=axis))


def _concat_jvp(tape, primals, tangents, out, attrs):
    if all(t is None for t in tangents):
        return None
    filled = [t if t is not None else tape.zeros_like(p) for p, t in zip(primals, tangents)]
    return tape.apply("concat", filled, **attrs)


def _linear_map_forward(values, attrs):
    (a,) = values
    return np.asarray(attrs["forward"](a), dtype=np.float64)


def _linear_map_vjp(g, values, out, attrs):
    return (np.asarray(attrs["adjoint"](g), dtype=np.float64),)




# --- activación aprendida fusionada -------------------------------------------
# ρ(h) = Σ_j w2_j ReLU(w1_j h + b1_j) + b2 con w1, b1, w2 de forma (J,) y b2
# escalar; cada rama se evalúa sobre la forma de h, sin eje extra.

def _rho_branches(h: Array, w1: Array, b1: Array):
    """Preactivación de cada rama, w1_j h + b1_j"""
    for j in range(w1.shape[0]):
        pre = np.multiply(h, w1[j])
        pre += b1[j]
        yield j, pre


def _rho_forward(values, attrs):
    h, w1, b1, w2, b2 = values
    out = np.full(h.shape, float(b2))
    for j, pre in _rho_branches(h, w1, b1):
        np.maximum(pre, 0.0, out=pre)
        pre *= w2[j]
        out += pre
    return out


def _rho_vjp(g, values, out, attrs):
    h, w1, b1, w2, b2 = values
    gh = np.zeros_like(h)
    gw1, gb1, gw2 = np.zeros_like(w1), np.zeros_like(b1), np.zeros_like(w2)
    for j, pre in _rho_branches(h, w1, b1):
        active = pre > 0
        g_active = np.where(active, g, 0.0)
        gw2[j] = np.vdot(g_active, pre)
        gb1[j] = w2[j] * g_active.sum()
        gw1[j] = w2[j] * np.vdot(g_active, h)
        gh += (w2[j] * w1[j]) * g_active
    return gh, gw1, gb1, gw2, np.array(g.sum()).reshape(np.shape(b2))


def _rho_masks(tape, h, w1, b1):
    """Máscaras de rama activa apiladas en el último eje, como constante"""
    masks = [pre > 0 for _, pre in _rho_branches(h.value, w1.value, b1.value)]
    return tape.constant(np.stack(masks, axis=-1).astype(np.float64))


def _rho_jvp(tape, primals, tangents, out, attrs):
    h, w1, b1, w2, _ = primals
    th, tw1, tb1, tw2, tb2 = tangents
    terms = []
    if th is not None:
        slope = tape.apply("rho_slope", [h, w1, b1, w2])
        terms.append(tape.apply("mul", [slope, th]))
    if tw1 is not None or tb1 is not None or tw2 is not None:
        # ramas de los parámetros: h[..., None] contra los vectores (J,)
        masks = _rho_masks(tape, h, w1, b1)
        h_axis = tape.apply("reshape", [h], shape=h.shape + (1,))
        if tw1 is not None or tb1 is not None:
            pre_tangent = _sum_tangents(
                tape,
                tape.apply("mul", [h_axis, tw1]) if tw1 is not None else None,
                tb1,
            )
            weighted = tape.apply("mul", [tape.apply("mul", [masks, w2]), pre_tangent])
            terms.append(tape.apply("sum", [weighted], axis=-1))
        if tw2 is not None:
            pre = tape.apply("add", [tape.apply("mul", [h_axis, w1]), b1])
            active = tape.apply("mul", [masks, pre])
            terms.append(tape.apply("sum", [tape.apply("mul", [active, tw2])], axis=-1))
    if tb2 is not None:
        terms.append(tape.apply("add", [tape.zeros_like(out), tb2]))
    return _sum_tangents(tape, *terms)


def _rho_slope_forward(values, attrs):
    h, w1, b1, w2 = values
    slope = np.zeros(h.shape)
    for j, pre in _rho_branches(h, w1, b1):
        slope += (w2[j] * w1[j]) * (pre > 0)
    return slope


def _rho_slope_vjp(g, values, out, attrs):
    # constante a trozos en h y b1: sus adjuntos son nulos salvo en los quiebres
    h, w1, b1, w2 = values
    gw1, gw2 = np.zeros_like(w1), np.zeros_like(w2)
    for j, pre in _rho_branches(h, w1, b1):
        total = g.sum(where=pre > 0)
        gw1[j] = w2[j] * total
        gw2[j] = w1[j] * total
    return None, gw1, None, gw2


def _rho_slope_jvp(tape, primals, tangents, out, attrs):
    h, w1, b1, w2 = primals
    _, tw1, _, tw2 = tangents
    if tw1 is None and tw2 is None:
        return None
    masks = _rho_masks(tape, h, w1, b1)
    rate = _sum_tangents(
        tape,
        tape.apply("mul", [w2, tw1]) if tw1 is not None else None,
        tape.apply("mul", [w1, tw2]) if tw2 is not None else None,
    )
    return tape.apply("sum", [tape.apply("mul", [masks, rate])], axis=-1)


PRIMITIVES: Dict[str, Primitive] = {}


def register(primitive: Primitive) -> Primitive:
    """Agregar una primitiva al registro"""
    PRIMITIVES[primitive.name] = primitive
    return primitive


register(Primitive(
    "add", 2,
    lambda v, at: v[0] + v[1],
    lambda g, v, o, at: (unbroadcast(g, v[0].shape), unbroadcast(g, v[1].shape)),
    _add_jvp,
))
register(Primitive(
    "sub", 2,
    lambda v, at: v[0] - v[1],
    lambda g, v, o, at: (unbroadcast(g, v[0].shape), unbroadcast(-g, v[1].shape)),
    _sub_jvp,
))
register(Primitive(
    "mul", 2,
    lambda v, at: v[0] * v[1],
    lambda g, v, o, at: (unbroadcast(g * v[1], v[0].shape), unbroadcast(g * v[0], v[1].shape)),
    _mul_jvp,
))
register(Primitive(
    "div", 2,
    _div_forward,
    lambda g, v, o, at: (unbroadcast(g / v[1], v[0].shape), unbroadcast(-g * o / v[1], v[1].shape)),
    _div_jvp,
))
register(Primitive(
    "max", 2,
    lambda v, at: np.maximum(v[0], v[1]),
    _max_vjp,
    _max_jvp,
))
register(Primitive("neg", 1, lambda v, at: -v[0], lambda g, v, o, at: (-g,), _linear_jvp("neg")))
register(Primitive(
    "sin", 1,
    lambda v, at: np.sin(v[0]),
    lambda g, v, o, at: (g * np.cos(v[0]),),
    _unary_jvp(lambda tape, a, out: tape.apply("cos", [a])),
))
register(Primitive(
    "cos", 1,
    lambda v, at: np.cos(v[0]),
    lambda g, v, o, at: (-g * np.sin(v[0]),),
    _unary_jvp(lambda tape, a, out: tape.apply("neg", [tape.apply("sin", [a])])),
))
register(Primitive(
    "exp", 1,
    lambda v, at: np.exp(v[0]),
    lambda g, v, o, at: (g * o,),
    _unary_jvp(lambda tape, a, out: out),
))
register(Primitive(
    "relu", 1,
    lambda v, at: np.maximum(v[0], 0.0),
    lambda g, v, o, at: (g * (v[0] > 0),),
    _relu_jvp,
))
register(Primitive(
    "square", 1,
    lambda v, at: v[0] * v[0],
    lambda g, v, o, at: (2.0 * g * v[0],),
    _unary_jvp(lambda tape, a, out: tape.apply("mul", [tape.constant(2.0), a])),
))
register(Primitive(
    "sqrt", 1,
    _sqrt_forward,
    lambda g, v, o, at: (g / (2.0 * o),),
    _unary_jvp(lambda tape, a, out: tape.apply("div", [tape.constant(0.5), out])),
))
register(Primitive("matmul", 2, _matmul_forward,
                   lambda g, v, o, at: (g @ v[1].T, v[0].T @ g), _matmul_jvp))
register(Primitive("transpose", 1, lambda v, at: v[0].T,
                   lambda g, v, o, at: (g.T,), _linear_jvp("transpose")))
register(Primitive(
    "sum", 1,
    lambda v, at: np.sum(v[0], axis=at.get("axis"), keepdims=at.get("keepdims", False)),
    _reduce_vjp(scale_by_count=False),
    _linear_jvp("sum"),
))
register(Primitive(
    "mean", 1,
    lambda v, at: np.mean(v[0], axis=at.get("axis"), keepdims=at.get("keepdims", False)),
    _reduce_vjp(scale_by_count=True),
    _linear_jvp("mean"),
))
register(Primitive("reshape", 1, lambda v, at: np.reshape(v[0], at["shape"]),
                   lambda g, v, o, at: (g.reshape(v[0].shape),), _linear_jvp("reshape")))
register(Primitive("getitem", 1, lambda v, at: np.array(v[0][at["key"]], dtype=np.float64),
                   _getitem_vjp, _linear_jvp("getitem")))
register(Primitive("concat", -1, _concat_forward, _concat_vjp, _concat_jvp))
register(Primitive("linear_map", 1, _linear_map_forward, _linear_map_vjp, _linear_jvp("linear_map")))
register(Primitive("rho", 5, _rho_forward, _rho_vjp, _rho_jvp))
register(Primitive("rho_slope", 4, _rho_slope_forward, _rho_slope_vjp, _rho_slope_jvp))


def get_primitive(name: str) -> Primitive:
    """Obtener la primitiva registrada con ese nombre"""
    if name not in PRIMITIVES:
        raise DomainError(f"Operación no soportada: {name}")
    return PRIMITIVES[name]


def evaluate(name: str, values: List[Array], **attrs) -> Array:
    """Evaluación numérica directa, sin grabar en ninguna cinta"""
    primitive = get_primitive(name)
    if primitive.arity >= 0 and len(values) != primitive.arity:
        raise DomainError(f"'{name}' espera {primitive.arity} entradas, recibió {len(values)}")
    return primitive.forward([np.asarray(v, dtype=np.float64) for v in values], attrs)
