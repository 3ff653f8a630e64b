"""
Fixtures compartidas: directorios de salida, modelos y configuraciones mínimas
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.models.networks import build_nestnet  # noqa: E402
from src.utils.data_models import EncodingSpec, ExperimentConfig  # noqa: E402


@pytest.fixture
def output_dir(tmp_path):
    """Raíz de artefactos aislada por test"""
    return tmp_path / "runs"


@pytest.fixture
def tiny_nestnet():
    return build_nestnet(8, 2, EncodingSpec(kind="fourier", num_frequencies=2), rng_seed=0)


TINY_DATA = {
    "image_size": 16,
    "volume_resolution": 8,
    "ct_angles": 6,
    "n_ic": 8,
    "n_bc": 4,
    "n_col": 16,
    "eval_nx": 8,
    "eval_nt": 4,
}


@pytest.fixture
def tiny_config(output_dir):
    """Fábrica de configuraciones de escritorio muy pequeñas"""

    def make(task: str = "image", epochs: int = 3, **data) -> ExperimentConfig:
        return ExperimentConfig.model_validate({
            "name": f"tiny-{task}",
            "task": task,
            "output_dir": str(output_dir),
            "model": {"width": 8, "depth": 2, "num_frequencies": 2},
            "training": {"epochs": epochs},
            "data": {**TINY_DATA, **data},
        })

    return make
