# Codificaciones, activaciones y arquitecturas
from src.models.activations import LearnedActivation, rho_eval, sample_activation
from src.models.encoding import encode
from src.models.networks import Model, build_baseline, build_model, build_nestnet, forward

__all__ = [
    "LearnedActivation",
    "rho_eval",
    "sample_activation",
    "encode",
    "Model",
    "build_baseline",
    "build_model",
    "build_nestnet",
    "forward",
]
