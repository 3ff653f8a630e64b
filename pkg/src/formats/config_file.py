"""
Documento de configuración TOML ↔ ExperimentConfig

Secciones: claves de nivel superior (name, task, seeds, output_dir, jobs) y
las tablas [model], [training], [training.schedule] y [data]. Las claves
desconocidas, los tipos inválidos y las claves duplicadas se informan con su
número de línea.
"""

import re
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

import toml
from pydantic import ValidationError

from src.utils.data_models import ExperimentConfig
from src.utils.errors import ConfigError
from src.utils.logger import get_logger

logger = get_logger(__name__)

_SECTION = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\-]+)\s*\]\s*(#.*)?$")
_KEY = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*=")


def _scan_keys(text: str) -> Dict[Tuple[str, ...], int]:
    """Mapa ruta de clave → línea; rechaza claves y secciones duplicadas"""
    seen: Dict[Tuple[str, ...], int] = {}
    section: Tuple[str, ...] = ()
    for number, line in enumerate(text.splitlines(), start=1):
        header = _SECTION.match(line)
        if header:
            section = tuple(header.group(1).split("."))
            if section in seen:
                raise ConfigError(f"sección duplicada '[{header.group(1)}]'", line=number)
            seen[section] = number
            continue
        key = _KEY.match(line)
        if key:
            path = section + (key.group(1),)
            if path in seen:
                raise ConfigError(f"clave duplicada '{'.'.join(path)}'", line=number)
            seen[path] = number
    return seen


def _line_of(lines: Dict[Tuple[str, ...], int], loc: Sequence[Any]) -> Optional[int]:
    path = tuple(str(part) for part in loc if not isinstance(part, int))
    while path:
        if path in lines:
            return lines[path]
        path = path[:-1]
    return None


def parse_value(raw: str) -> Any:
    """Interpretar un valor de `--set` como TOML; si no es válido, como texto"""
    try:
        return toml.loads(f"value = {raw}")["value"]
    except toml.TomlDecodeError:
        return raw


def apply_overrides(data: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """Aplicar 'seccion.clave=valor' sobre el diccionario del documento"""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override sin '=': {item!r}")
        key, raw = item.split("=", 1)
        parts = [p for p in key.strip().split(".") if p]
        if not parts:
            raise ConfigError(f"override sin clave: {item!r}")
        target = data
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(f"'{part}' no es una sección en el override {item!r}")
        target[parts[-1]] = parse_value(raw.strip())
    return data


def parse_config(text: str, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """Texto TOML (+ overrides) → ExperimentConfig validada"""
    lines = _scan_keys(text)
    try:
        data = toml.loads(text)
    except toml.TomlDecodeError as e:
        raise ConfigError(f"TOML inválido: {e.msg}", line=e.lineno)
    apply_overrides(data, overrides)
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"{where}: {first['msg']}", line=_line_of(lines, first["loc"]))


def serialize_config(cfg: ExperimentConfig) -> str:
    body = toml.dumps(cfg.model_dump(mode="json", exclude_none=True))
    return f"# configuración de experimento nestfield\n{body}"


def load_config(path: Union[str, Path], overrides: Iterable[str] = ()) -> ExperimentConfig:
    path = Path(path)
    logger.info(f"Cargando configuración: {path}")
    return parse_config(path.read_text(encoding="utf-8"), overrides)


def save_config(cfg: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_config(cfg), encoding="utf-8")
    return path
