"""
Arquitecturas: NestNet de altura 2 y redes de referencia

Los parámetros viven en un diccionario ordenado de arreglos float64. El orden
de declaración es el orden de los vectores planos (optimizador, checkpoints).
Pesos W con forma (salida × entrada); un lote (N, entrada) se propaga como
X Wᵀ + b.
"""

import math
from collections import OrderedDict
from typing import Dict, List, Optional

import numpy as np

from src.autodiff import functional as F
from src.autodiff.tape import GradientMap, Node, Tape
from src.models.activations import LearnedActivation, apply_activation
from src.models.encoding import encode_coordinates
from src.utils.data_models import ActivationSpec, Architecture, EncodingSpec, ModelSpec
from src.utils.errors import DomainError
from src.utils.logger import get_logger

logger = get_logger(__name__)

BASELINE_KINDS = ("mlp_relu", "ffn", "siren", "gaussian", "wire_real", "mfn")

# Activación esperada por cada red de referencia
_BASELINE_ACTIVATION = {
    "mlp_relu": "relu",
    "ffn": "relu",
    "siren": "sine",
    "gaussian": "gaussian",
    "wire_real": "gabor_real",
    "mfn": "none",
}


class Model:
    """Red de coordenadas: descriptor de arquitectura + parámetros"""

    def __init__(self, architecture: Architecture, params: "OrderedDict[str, np.ndarray]"):
        self.architecture = architecture
        self.params = params

    def __repr__(self) -> str:
        arch = self.architecture
        return f"Model(kind={arch.kind}, width={arch.width}, depth={arch.depth}, params={self.parameter_count()})"

    @property
    def parameter_names(self) -> List[str]:
        return list(self.params.keys())

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def has_learned_activations(self) -> bool:
        return any(spec.kind == "learned" for spec in self.architecture.activations)

    def learned_activations(self, layer: int) -> List[LearnedActivation]:
        """Subredes ρ de una capa oculta (como arreglos)"""
        return [
            LearnedActivation.from_params(self.params, f"rho.{layer}.{k}")
            for k in range(self.architecture.subnetworks)
        ]

    def clone(self) -> "Model":
        return Model(self.architecture.model_copy(deep=True),
                     OrderedDict((name, p.copy()) for name, p in self.params.items()))

    # --- vectores planos ----------------------------------------------------

    def flat_parameters(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params.values()])

    def assign_flat(self, flat: np.ndarray) -> None:
        """Reemplazar todos los parámetros desde un vector plano"""
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != self.parameter_count():
            raise DomainError(f"Vector de {flat.size} valores para {self.parameter_count()} parámetros")
        offset = 0
        for name, p in self.params.items():
            self.params[name] = flat[offset:offset + p.size].reshape(p.shape).copy()
            offset += p.size

    def bind(self, tape: Tape, trainable: bool = True) -> Dict[str, Node]:
        """Una hoja por parámetro, en orden de declaración"""
        return OrderedDict((name, tape.leaf(p, trainable=trainable)) for name, p in self.params.items())

    def bind_flat(self, flat: F.Operand) -> Dict[str, F.Operand]:
        """Repartir un vector plano (nodo o arreglo) en parámetros con nombre"""
        size = F.value_of(flat).size
        if size != self.parameter_count():
            raise DomainError(f"Vector de {size} valores para {self.parameter_count()} parámetros")
        bound: Dict[str, F.Operand] = OrderedDict()
        offset = 0
        for name, p in self.params.items():
            bound[name] = F.reshape(flat[offset:offset + p.size], p.shape)
            offset += p.size
        return bound

    def flatten_gradients(self, grads: GradientMap, bound: Dict[str, Node]) -> np.ndarray:
        return np.concatenate([np.asarray(grads[bound[name]]).ravel() for name in self.params])

    def predict(self, x) -> np.ndarray:
        """Evaluación numérica sin cinta"""
        return np.asarray(forward(self, None, np.asarray(x, dtype=np.float64)), dtype=np.float64)


def _affine(h: F.Operand, weight, bias) -> F.Operand:
    return F.matmul(h, F.transpose(weight)) + bias


def _learned_layer(model: Model, params, layer: int, z: F.Operand) -> F.Operand:
    """ρ de la capa; con r > 1 subredes, la neurona n usa la subred n mod r"""
    r = model.architecture.subnetworks
    subnets = [LearnedActivation.from_params(params, f"rho.{layer}.{k}") for k in range(r)]
    spec = model.architecture.activations[layer]
    if r == 1:
        return apply_activation(spec, z, subnets[0])
    width = F.value_of(z).shape[-1]
    out = None
    for k, subnet in enumerate(subnets):
        mask = (np.arange(width) % r == k).astype(np.float64)
        term = apply_activation(spec, z, subnet) * mask
        out = term if out is None else out + term
    return out


def forward(model: Model, tape: Optional[Tape], x: F.Operand, params=None) -> F.Operand:
    """
    Propagar un lote de coordenadas (N, d).

    Con `params` (nodos de `model.bind`) el cómputo se graba en la cinta; sin
    ellos se usan los arreglos del modelo como constantes, y si además `x` es
    un arreglo la evaluación es numpy pura.
    """
    arch = model.architecture
    shape = F.value_of(x).shape
    if len(shape) != 2 or shape[1] != arch.input_dim:
        raise DomainError(f"Se esperaban coordenadas (N, {arch.input_dim}), se recibió {shape}")
    if params is None:
        params = model.params

    if arch.arch_kind == "mfn":
        return _forward_mfn(model, x, params)

    h = encode_coordinates(arch.encoding, x)
    for layer in range(arch.depth):
        z = _affine(h, params[f"layers.{layer}.W"], params[f"layers.{layer}.b"])
        spec = arch.activations[layer]
        h = _learned_layer(model, params, layer, z) if spec.kind == "learned" else apply_activation(spec, z)
    return _affine(h, params[f"layers.{arch.depth}.W"], params[f"layers.{arch.depth}.b"])


def _forward_mfn(model: Model, x: F.Operand, params) -> F.Operand:
    """z1 = g1(x); z_{i+1} = (W_i z_i + b_i) ∘ g_{i+1}(x); salida afín"""
    arch = model.architecture

    def filter_(i: int) -> F.Operand:
        return F.sin(F.matmul(x, params[f"filters.{i}.omega"]) + params[f"filters.{i}.phi"])

    z = filter_(0)
    for layer in range(arch.depth):
        z = _affine(z, params[f"layers.{layer}.W"], params[f"layers.{layer}.b"]) * filter_(layer + 1)
    return _affine(z, params[f"layers.{arch.depth}.W"], params[f"layers.{arch.depth}.b"])


# --- construcción -----------------------------------------------------------

def _uniform(rng: np.random.Generator, bound: float, shape) -> np.ndarray:
    return rng.uniform(-bound, bound, size=shape)


def _init_stack(arch: Architecture, rng: np.random.Generator, scheme: str) -> "OrderedDict[str, np.ndarray]":
    """Capas afines según el esquema: relu, siren o bounded"""
    dims = [arch.encoded_dim()] + [arch.width] * arch.depth + [arch.output_dim]
    params: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for layer, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
        if scheme == "siren":
            omega0 = arch.activations[0].omega0
            bound = 1.0 / fan_in if layer == 0 else math.sqrt(6.0 / fan_in) / omega0
        elif scheme == "relu":
            bound = math.sqrt(6.0 / fan_in)
        else:
            bound = 1.0 / math.sqrt(fan_in)
        params[f"layers.{layer}.W"] = _uniform(rng, bound, (fan_out, fan_in))
        params[f"layers.{layer}.b"] = _uniform(rng, 1.0 / math.sqrt(fan_in), (fan_out,))
    return params


def build_nestnet(
    width: int,
    depth: int,
    encoding: EncodingSpec,
    rng_seed: int,
    input_dim: int = 2,
    output_dim: int = 1,
    subnetworks: int = 1,
) -> Model:
    """NestNet de altura 2: MLP ReLU cuyas neuronas se activan con subredes ρ"""
    if width < 1 or depth < 1:
        raise DomainError(f"width y depth deben ser >= 1 (width={width}, depth={depth})")
    arch = Architecture(
        kind="nestnet",
        input_dim=input_dim,
        output_dim=output_dim,
        width=width,
        depth=depth,
        encoding=encoding,
        activations=[ActivationSpec(kind="learned")] * depth,
        subnetworks=subnetworks,
    )
    rng = np.random.default_rng(rng_seed)
    params = _init_stack(arch, rng, "relu")
    init = LearnedActivation.initial()
    for layer in range(depth):
        for k in range(subnetworks):
            for name in ("w1", "b1", "w2", "b2"):
                params[f"rho.{layer}.{k}.{name}"] = np.array(getattr(init, name), dtype=np.float64)
    return Model(arch, params)


def build_baseline(
    kind: str,
    width: int,
    depth: int,
    hyper: Optional[ActivationSpec],
    rng_seed: int,
    input_dim: int = 2,
    output_dim: int = 1,
    num_frequencies: int = 16,
    frequency_scale: float = 16.0,
) -> Model:
    """Red de referencia con la activación e inicialización propias de su tipo"""
    if kind not in BASELINE_KINDS:
        raise DomainError(f"Tipo de red desconocido: {kind}")
    if width < 1 or depth < 1:
        raise DomainError(f"width y depth deben ser >= 1 (width={width}, depth={depth})")
    expected = _BASELINE_ACTIVATION[kind]
    if hyper is None:
        if expected not in ("relu", "none"):
            raise DomainError(f"'{kind}' requiere hiperparámetros de activación '{expected}'")
        hyper = ActivationSpec(kind=expected)
    elif hyper.kind != expected:
        raise DomainError(f"'{kind}' usa la activación '{expected}', se recibió '{hyper.kind}'")

    if kind == "wire_real":
        # se reduce el ancho en √2 para igualar el número de parámetros
        width = max(1, round(width / math.sqrt(2.0)))
    encoding = EncodingSpec(kind="fourier", num_frequencies=num_frequencies) if kind == "ffn" \
        else EncodingSpec(kind="identity")
    arch = Architecture(
        kind=kind,
        arch_kind="mfn" if kind == "mfn" else "mlp_stack",
        input_dim=input_dim,
        output_dim=output_dim,
        width=width,
        depth=depth,
        encoding=encoding,
        activations=[hyper] * depth,
        frequency_scale=frequency_scale,
    )
    rng = np.random.default_rng(rng_seed)

    if kind == "mfn":
        params: "OrderedDict[str, np.ndarray]" = OrderedDict()
        for i in range(depth + 1):
            params[f"filters.{i}.omega"] = _uniform(rng, frequency_scale, (input_dim, width))
            params[f"filters.{i}.phi"] = rng.uniform(-np.pi, np.pi, size=(width,))
        dims = [width] * (depth + 1) + [output_dim]
        for layer, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
            bound = math.sqrt(1.0 / fan_in)
            params[f"layers.{layer}.W"] = _uniform(rng, bound, (fan_out, fan_in))
            params[f"layers.{layer}.b"] = _uniform(rng, bound, (fan_out,))
        return Model(arch, params)

    scheme = {"mlp_relu": "relu", "ffn": "relu", "siren": "siren"}.get(kind, "bounded")
    return Model(arch, _init_stack(arch, rng, scheme))


def build_model(spec: ModelSpec, input_dim: int, output_dim: int, seed: int) -> Model:
    """Construir la red descrita por la sección [model] (ya resuelta)"""
    if spec.kind == "nestnet":
        model = build_nestnet(
            spec.width, spec.depth, EncodingSpec(kind="fourier", num_frequencies=spec.num_frequencies),
            seed, input_dim=input_dim, output_dim=output_dim, subnetworks=spec.subnetworks or 1,
        )
    else:
        hyper = {
            "siren": lambda: ActivationSpec(kind="sine", omega0=spec.omega0),
            "gaussian": lambda: ActivationSpec(kind="gaussian", s0=spec.s0),
            "wire_real": lambda: ActivationSpec(kind="gabor_real", omega0=spec.omega0, s0=spec.s0),
        }.get(spec.kind, lambda: None)()
        model = build_baseline(
            spec.kind, spec.width, spec.depth, hyper, seed, input_dim=input_dim, output_dim=output_dim,
            num_frequencies=spec.num_frequencies, frequency_scale=spec.frequency_scale,
        )
    logger.debug(f"Modelo construido: {model}")
    return model
