"""
Planificación de la tasa de aprendizaje
"""

from dataclasses import dataclass

from src.utils.data_models import ScheduleSpec
from src.utils.errors import DomainError


@dataclass(frozen=True)
class Schedule:
    """constant, o exponencial de lr0 a lr0·final_fraction en la última época"""

    kind: str
    total_epochs: int
    lr0: float
    final_fraction: float = 0.1

    def __post_init__(self):
        if self.kind not in ("constant", "exponential"):
            raise DomainError(f"Planificación desconocida: {self.kind}")
        if self.total_epochs < 1 or self.lr0 <= 0 or not 0 < self.final_fraction <= 1:
            raise DomainError("Planificación inválida: épocas >= 1, lr0 > 0, 0 < final_fraction <= 1")

    @classmethod
    def from_spec(cls, spec: ScheduleSpec, total_epochs: int, lr0: float) -> "Schedule":
        return cls(kind=spec.kind, total_epochs=total_epochs, lr0=lr0, final_fraction=spec.final_fraction)

    def lr(self, epoch: int) -> float:
        """Tasa de la época (base 0)"""
        if self.kind == "constant" or self.total_epochs == 1:
            return self.lr0
        return self.lr0 * self.final_fraction ** (epoch / (self.total_epochs - 1))
