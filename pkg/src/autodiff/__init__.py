# Diferenciación automática: cinta inversa y tangentes directas
from src.autodiff.tape import GradientMap, Node, Tape, apply, backward, leaf, tape_new
from src.autodiff.dual import DualNode, dual_apply, dual_seed

__all__ = [
    "GradientMap",
    "Node",
    "Tape",
    "apply",
    "backward",
    "leaf",
    "tape_new",
    "DualNode",
    "dual_apply",
    "dual_seed",
]
