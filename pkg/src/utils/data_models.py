"""
Modelos de datos usando Pydantic para validación y estructura
"""

import hashlib
import json
import math
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import settings

TaskKind = Literal["image", "occupancy", "sisr", "misr", "denoise", "ct", "pinn_convection"]
ModelKind = Literal["nestnet", "mlp_relu", "ffn", "siren", "gaussian", "wire_real", "mfn"]

# Valores por tarea; rellenan lo que el usuario no fija
TASK_PRESETS: Dict[str, Dict[str, Any]] = {
    "image": {"lr": settings.DEFAULT_LR, "epochs": 2000, "siren_omega0": 30.0, "gaussian_s0": 30.0,
              "wire_omega0": 20.0, "wire_s0": 30.0},
    "occupancy": {"lr": settings.DEFAULT_LR, "epochs": 200, "siren_omega0": 10.0, "gaussian_s0": 40.0,
                  "wire_omega0": 10.0, "wire_s0": 40.0},
    "sisr": {"lr": 0.01, "epochs": 2000, "siren_omega0": 8.0, "gaussian_s0": 6.0,
             "wire_omega0": 8.0, "wire_s0": 6.0},
    "misr": {"lr": settings.DEFAULT_LR, "epochs": 2000, "siren_omega0": 5.0, "gaussian_s0": 5.0,
             "wire_omega0": 5.0, "wire_s0": 5.0},
    "denoise": {"lr": settings.DEFAULT_LR, "epochs": 2000, "siren_omega0": 5.0, "gaussian_s0": 5.0,
                "wire_omega0": 5.0, "wire_s0": 5.0},
    "ct": {"lr": settings.DEFAULT_LR, "epochs": 5000, "siren_omega0": 10.0, "gaussian_s0": 10.0,
           "wire_omega0": 10.0, "wire_s0": 10.0},
    "pinn_convection": {"lr": settings.DEFAULT_LR, "epochs": 20000, "siren_omega0": 1.0, "gaussian_s0": 1.0,
                        "wire_omega0": 1.0, "wire_s0": 1.0},
}


def task_preset(task: str) -> Dict[str, Any]:
    """Hiperparámetros por defecto de una tarea"""
    if task not in TASK_PRESETS:
        raise ValueError(f"Tarea desconocida: {task}")
    return dict(TASK_PRESETS[task])


class EncodingSpec(BaseModel):
    """Codificación de coordenadas (identidad o rasgos de Fourier por eje)"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["identity", "fourier"] = Field("identity", description="Tipo de codificación")
    num_frequencies: int = Field(settings.DEFAULT_NUM_FREQUENCIES, ge=1, description="Frecuencias K por eje")
    coefficients: Optional[List[float]] = Field(None, description="Coeficientes α_i (por defecto 1)")
    frequencies: Optional[List[float]] = Field(None, description="Frecuencias β_i (por defecto i)")

    @field_validator("coefficients")
    @classmethod
    def positive_coefficients(cls, v):
        """Los coeficientes deben ser estrictamente positivos"""
        if v is not None and any(a <= 0 for a in v):
            raise ValueError("los coeficientes α_i deben ser > 0")
        return v

    @model_validator(mode="after")
    def lengths_match(self):
        for name in ("coefficients", "frequencies"):
            values = getattr(self, name)
            if values is not None and len(values) != self.num_frequencies:
                raise ValueError(f"'{name}' debe tener {self.num_frequencies} elementos")
        return self

    def alphas(self) -> List[float]:
        return list(self.coefficients) if self.coefficients is not None else [1.0] * self.num_frequencies

    def betas(self) -> List[float]:
        if self.frequencies is not None:
            return list(self.frequencies)
        return [float(i) for i in range(1, self.num_frequencies + 1)]

    def output_dim(self, input_dim: int) -> int:
        if self.kind == "identity":
            return input_dim
        return 2 * self.num_frequencies * input_dim


class ActivationSpec(BaseModel):
    """Activación de una capa oculta"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["relu", "sine", "gaussian", "gabor_real", "learned", "none"] = Field(
        "relu", description="Tipo de activación"
    )
    omega0: Optional[float] = Field(None, gt=0, description="Frecuencia ω0 (sine, gabor_real)")
    s0: Optional[float] = Field(None, gt=0, description="Escala s0 (gaussian, gabor_real)")

    @model_validator(mode="after")
    def required_hyperparameters(self):
        """Validar que cada tipo traiga sus parámetros"""
        if self.kind in ("sine", "gabor_real") and self.omega0 is None:
            raise ValueError(f"La activación '{self.kind}' requiere omega0")
        if self.kind in ("gaussian", "gabor_real") and self.s0 is None:
            raise ValueError(f"La activación '{self.kind}' requiere s0")
        return self


class ModelSpec(BaseModel):
    """Sección [model] de la configuración"""

    model_config = ConfigDict(extra="forbid")

    kind: ModelKind = Field("nestnet", description="Arquitectura")
    width: int = Field(settings.DEFAULT_WIDTH, ge=1, description="Neuronas por capa oculta")
    depth: int = Field(settings.DEFAULT_DEPTH, ge=1, description="Capas ocultas")
    num_frequencies: int = Field(settings.DEFAULT_NUM_FREQUENCIES, ge=1, description="K de la codificación")
    omega0: Optional[float] = Field(None, gt=0, description="ω0 de SIREN/WIRE (preset si falta)")
    s0: Optional[float] = Field(None, gt=0, description="s0 de Gaussian/WIRE (preset si falta)")
    subnetworks: Optional[int] = Field(None, ge=1, description="Subredes ρ por capa (1 = compartida)")
    frequency_scale: float = Field(16.0, gt=0, description="Escala de frecuencias de los filtros MFN")


class ScheduleSpec(BaseModel):
    """Planificación de la tasa de aprendizaje"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["constant", "exponential"] = Field("exponential", description="Tipo de planificación")
    final_fraction: float = Field(0.1, gt=0, le=1.0, description="lr(E-1)/lr(0) para la exponencial")


class LossSpec(BaseModel):
    """Pérdida de entrenamiento"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["pointwise_l2", "pinn_convection"] = Field("pointwise_l2")
    beta: float = Field(10.0, gt=0, description="Coeficiente convectivo")
    w_ic: float = Field(1.0, ge=0)
    w_bc: float = Field(1.0, ge=0)
    w_pde: float = Field(1.0, ge=0)


class TrainingSpec(BaseModel):
    """Sección [training] de la configuración"""

    model_config = ConfigDict(extra="forbid")

    epochs: Optional[int] = Field(None, ge=1, description="Épocas (preset si falta)")
    lr: Optional[float] = Field(None, gt=0, description="Tasa inicial (preset si falta)")
    schedule: ScheduleSpec = Field(default_factory=ScheduleSpec)
    curve_every: int = Field(1, ge=1, description="Épocas entre evaluaciones de la métrica")
    pinn_weights: List[float] = Field(default_factory=lambda: [1.0, 1.0, 1.0],
                                      description="Pesos (IC, BC, PDE)")

    @field_validator("pinn_weights")
    @classmethod
    def three_nonnegative(cls, v):
        if len(v) != 3 or any(w < 0 for w in v):
            raise ValueError("pinn_weights requiere tres pesos no negativos")
        return v


class TaskSpec(BaseModel):
    """Sección [data]: perillas específicas de cada tarea"""

    model_config = ConfigDict(extra="forbid")

    data_seed: int = Field(0, description="Semilla de las señales y mediciones")
    image_kind: Literal["bandlimited", "checker", "disk_scene"] = Field("bandlimited")
    image_path: Optional[str] = Field(None, description="Imagen PGM/PPM propia en lugar de la procedural")
    image_size: int = Field(settings.DEFAULT_IMAGE_SIZE, ge=8)
    channels: Literal[1, 3] = Field(1)
    scale: int = Field(4, ge=1, description="Factor de submuestreo (SISR/MISR)")
    n_views: int = Field(4, ge=1)
    max_shift: float = Field(1.0, ge=0, description="Desplazamiento máximo en píxeles de alta resolución")
    max_rotation_deg: float = Field(1.0, ge=0)
    max_count: float = Field(30.0, gt=0, description="Cuenta media máxima de fotones")
    ct_angles: int = Field(settings.DEFAULT_CT_ANGLES, ge=1)
    shape: Literal["sphere", "torus", "two_spheres"] = Field("sphere")
    volume_resolution: int = Field(settings.DEFAULT_VOLUME_RESOLUTION, ge=8)
    beta: float = Field(10.0, gt=0)
    n_ic: int = Field(256, ge=1)
    n_bc: int = Field(100, ge=1)
    n_col: int = Field(10000, ge=1)
    eval_nx: int = Field(256, ge=2)
    eval_nt: int = Field(100, ge=2)


class ExperimentConfig(BaseModel):
    """Configuración completa de un experimento"""

    model_config = ConfigDict(extra="forbid")

    name: str = Field("experiment", min_length=1, description="Nombre del experimento")
    task: TaskKind = Field(..., description="Tarea")
    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)
    output_dir: Optional[str] = Field(None, description="Raíz de artefactos (NESTFIELD_OUTPUT_ROOT si falta)")
    jobs: int = Field(settings.DEFAULT_JOBS, ge=1)
    model: ModelSpec = Field(default_factory=ModelSpec)
    training: TrainingSpec = Field(default_factory=TrainingSpec)
    data: TaskSpec = Field(default_factory=TaskSpec)

    @field_validator("name")
    @classmethod
    def clean_name(cls, v):
        return v.strip().replace(" ", "_")

    def resolved(self) -> "ExperimentConfig":
        """Copia con los valores del preset de la tarea en los campos sin fijar"""
        preset = task_preset(self.task)
        model = self.model.model_copy()
        if model.omega0 is None:
            model.omega0 = preset["wire_omega0"] if model.kind == "wire_real" else preset["siren_omega0"]
        if model.s0 is None:
            model.s0 = preset["wire_s0"] if model.kind == "wire_real" else preset["gaussian_s0"]
        if model.subnetworks is None:
            model.subnetworks = 1
        training = self.training.model_copy()
        if training.epochs is None:
            training.epochs = preset["epochs"]
        if training.lr is None:
            training.lr = preset["lr"]
        return self.model_copy(update={"model": model, "training": training})

    def loss_spec(self) -> LossSpec:
        if self.task == "pinn_convection":
            w_ic, w_bc, w_pde = self.training.pinn_weights
            return LossSpec(kind="pinn_convection", beta=self.data.beta, w_ic=w_ic, w_bc=w_bc, w_pde=w_pde)
        return LossSpec(kind="pointwise_l2")

    def semantic_dict(self) -> Dict[str, Any]:
        """Campos que determinan el resultado (sin nombre, semillas, salida ni jobs)"""
        return self.resolved().model_dump(mode="json", exclude={"name", "seeds", "output_dir", "jobs"})

    def config_hash(self) -> str:
        """sha256 del JSON canónico de los campos semánticos"""
        canonical = json.dumps(self.semantic_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class MetricReport(BaseModel):
    """Métricas finales de una corrida; cada una es opcional según la tarea"""

    psnr_db: Optional[float] = Field(None, description="PSNR en dB (inf si MSE = 0)")
    ssim: Optional[float] = Field(None, ge=-1.0, le=1.0)
    iou: Optional[float] = Field(None, ge=0.0, le=1.0)
    abs_err: Optional[float] = Field(None, ge=0.0)
    rel_err: Optional[float] = Field(None, ge=0.0)
    explained_var: Optional[float] = Field(None, le=1.0)
    reference: Dict[str, float] = Field(default_factory=dict,
                                        description="Métricas de referencia (bilineal, imagen ruidosa)")

    def summary(self) -> str:
        """Línea legible con las métricas presentes"""
        parts = []
        for name in ("psnr_db", "ssim", "iou", "abs_err", "rel_err", "explained_var"):
            value = getattr(self, name)
            if value is not None:
                parts.append(f"{name}={value:.6g}" if math.isfinite(value) else f"{name}={value}")
        return " ".join(parts)


class ResultRecord(BaseModel):
    """Registro de una corrida (configuración, semilla)"""

    config_hash: str = Field(..., min_length=8)
    name: str
    task: TaskKind
    model_kind: ModelKind
    seed: int
    metrics: MetricReport
    curve_path: Optional[str] = Field(None, description="CSV de la curva de aprendizaje")
    artifacts: Dict[str, str] = Field(default_factory=dict, description="Rutas de artefactos por tipo")
    wall_seconds: float = Field(..., ge=0.0)
    parameter_count: int = Field(..., ge=0)
    epochs: int = Field(..., ge=1)
    lr: float = Field(..., gt=0)


class GradientCheckReport(BaseModel):
    """Resultado de la comparación gradiente analítico vs diferencias finitas"""

    max_rel_error: float = Field(..., ge=0.0)
    checked: int = Field(..., ge=0, description="Coordenadas comparadas")
    non_smooth: List[int] = Field(default_factory=list, description="Coordenadas omitidas por quiebre")
    h: float = Field(..., gt=0)

    def passed(self, tol: float) -> bool:
        return self.max_rel_error <= tol


class VerificationCheck(BaseModel):
    """Un chequeo del conjunto de oráculos"""

    name: str
    value: float = Field(..., description="Error medido (o 0/1 en chequeos exactos)")
    tolerance: float = Field(..., ge=0.0)
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "OK   " if self.passed else "FALLA"
        return f"[{status}] {self.name}: {self.value:.3e} (tol {self.tolerance:.0e}) {self.detail}".rstrip()


class Architecture(BaseModel):
    """Descriptor serializable de una red (se guarda en los checkpoints)"""

    model_config = ConfigDict(extra="forbid")

    kind: ModelKind
    arch_kind: Literal["mlp_stack", "mfn"] = "mlp_stack"
    input_dim: int = Field(..., ge=1)
    output_dim: int = Field(..., ge=1)
    width: int = Field(..., ge=1)
    depth: int = Field(..., ge=1)
    encoding: EncodingSpec = Field(default_factory=EncodingSpec)
    activations: List[ActivationSpec] = Field(default_factory=list)
    subnetworks: int = Field(1, ge=1)
    frequency_scale: float = Field(16.0, gt=0)

    @model_validator(mode="after")
    def one_activation_per_hidden_layer(self):
        if len(self.activations) != self.depth:
            raise ValueError(f"Se esperaban {self.depth} activaciones, hay {len(self.activations)}")
        return self

    def encoded_dim(self) -> int:
        return self.encoding.output_dim(self.input_dim)
