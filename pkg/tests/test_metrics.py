"""
Tests de métricas de imagen y de campos
"""

import numpy as np
import pytest

from src.metrics.field_errors import error_metrics, iou
from src.metrics.image_quality import gaussian_window, psnr, ssim
from src.operators.grids import ImageGrid, VoxelGrid
from src.utils.errors import DomainError


class TestPSNR:
    """Tests de PSNR"""

    def test_identical_is_infinite(self):
        img = np.random.default_rng(0).uniform(size=(8, 8))
        assert psnr(img, img) == float("inf")

    def test_uniform_error(self):
        """Error uniforme 0.1 → 20 dB"""
        img = np.full((8, 8), 0.4)
        assert psnr(img + 0.1, img) == pytest.approx(20.0, abs=1e-9)

    def test_accepts_image_grids(self):
        a = ImageGrid(np.zeros((4, 4, 3)))
        b = ImageGrid(np.full((4, 4, 3), 0.01))
        assert psnr(a, b) == pytest.approx(40.0)

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            psnr(np.zeros((4, 4)), np.zeros((4, 5)))

    def test_decreases_with_error(self):
        """Más error uniforme, menos dB"""
        img = np.full((8, 8), 0.3)
        values = [psnr(img + e, img) for e in (0.01, 0.05, 0.1, 0.4)]
        assert values == sorted(values, reverse=True)

    def test_symmetric(self):
        rng = np.random.default_rng(5)
        a, b = rng.uniform(size=(2, 8, 8))
        assert psnr(a, b) == psnr(b, a)


class TestSSIM:
    """Tests de SSIM"""

    def test_window_is_normalized(self):
        window = gaussian_window()
        assert window.shape == (11, 11)
        assert window.sum() == pytest.approx(1.0)

    def test_identical_is_one(self):
        img = np.random.default_rng(1).uniform(size=(16, 16))
        assert ssim(img, img) == pytest.approx(1.0, abs=1e-12)

    def test_noise_lowers_ssim(self):
        rng = np.random.default_rng(2)
        img = rng.uniform(size=(24, 24))
        assert ssim(img, np.clip(img + rng.normal(0, 0.2, img.shape), 0, 1)) < 0.9

    def test_color_uses_channel_mean(self):
        img = np.random.default_rng(3).uniform(size=(16, 16, 3))
        gray = np.repeat(img.mean(axis=2, keepdims=True), 3, axis=2)
        assert ssim(img, gray) == pytest.approx(1.0, abs=1e-12)

    def test_too_small(self):
        with pytest.raises(DomainError, match="11"):
            ssim(np.zeros((8, 8)), np.zeros((8, 8)))

    def test_symmetric(self):
        rng = np.random.default_rng(6)
        a, b = rng.uniform(size=(2, 16, 16))
        assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-14)


class TestIOU:
    """Tests de IOU"""

    def test_identities(self):
        truth = np.array([1.0, 1.0, 0.0, 0.0])
        assert iou(truth, truth) == 1.0
        assert iou(1.0 - truth, truth) == 0.0
        assert iou(np.array([1.0, 0.0, 0.0, 0.0]), truth) == 0.5

    def test_empty_union(self):
        assert iou(np.zeros(8), np.zeros(8)) == 1.0

    def test_threshold(self):
        truth = VoxelGrid(np.ones((2, 2, 2)))
        assert iou(np.full((2, 2, 2), 0.6), truth) == 1.0
        assert iou(np.full((2, 2, 2), 0.6), truth, threshold=0.7) == 0.0

    def test_resolution_mismatch(self):
        with pytest.raises(DomainError):
            iou(np.zeros(8), np.zeros(27))

    def test_symmetric(self):
        rng = np.random.default_rng(7)
        a, b = rng.uniform(size=(2, 4, 4, 4))
        assert iou(a, b) == iou(b, a)


class TestErrorMetrics:
    """Tests de los errores de la solución"""

    def test_perfect_prediction(self):
        truth = np.sin(np.linspace(0, 6, 50))
        assert error_metrics(truth, truth) == (0.0, 0.0, 1.0)

    def test_values(self):
        truth = np.array([1.0, -1.0, 1.0, -1.0])
        abs_err, rel_err, explained = error_metrics(truth * 0.5, truth)
        assert abs_err == pytest.approx(0.5)
        assert rel_err == pytest.approx(0.5)
        assert explained == pytest.approx(0.75)

    def test_zero_reference(self):
        with pytest.raises(DomainError, match="norma cero"):
            error_metrics(np.ones(3), np.zeros(3))

    def test_constant_reference(self):
        with pytest.raises(DomainError, match="constante"):
            error_metrics(np.ones(3), np.full(3, 2.0))

    def test_explained_variance_ignores_shift(self):
        """Sumar la misma constante a ambos no cambia la varianza explicada"""
        rng = np.random.default_rng(8)
        truth = rng.normal(size=40)
        pred = truth + rng.normal(0, 0.3, size=40)
        _, _, base = error_metrics(pred, truth)
        _, _, shifted = error_metrics(pred + 7.5, truth + 7.5)
        assert shifted == pytest.approx(base, rel=1e-10)
