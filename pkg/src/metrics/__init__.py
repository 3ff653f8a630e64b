# Métricas de evaluación
from src.metrics.field_errors import error_metrics, iou
from src.metrics.image_quality import psnr, ssim

__all__ = ["error_metrics", "iou", "psnr", "ssim"]
