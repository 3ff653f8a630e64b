# Señales de prueba y operadores de medición
from src.operators.convection import (
    ConvectionPoints,
    ConvectionProblem,
    convection_exact,
    sample_convection_points,
)
from src.operators.grids import ImageGrid, MultiviewSet, Sinogram, VoxelGrid
from src.operators.images import downsample_box, procedural_image, upsample_bilinear
from src.operators.multiview import make_multiview
from src.operators.noise import poisson_photon_noise
from src.operators.occupancy import occupancy_analytic
from src.operators.radon import RadonOperator, radon, radon_adjoint_check

__all__ = [
    "ConvectionPoints",
    "ConvectionProblem",
    "convection_exact",
    "sample_convection_points",
    "ImageGrid",
    "MultiviewSet",
    "Sinogram",
    "VoxelGrid",
    "downsample_box",
    "procedural_image",
    "upsample_bilinear",
    "make_multiview",
    "poisson_photon_noise",
    "occupancy_analytic",
    "RadonOperator",
    "radon",
    "radon_adjoint_check",
]
