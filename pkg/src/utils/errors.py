"""
Jerarquía de excepciones de nestfield
"""

from typing import Optional


class NestFieldError(Exception):
    """Error base del laboratorio"""


class NonFiniteInputError(NestFieldError, ValueError):
    """Valor no finito (hoja, gradiente o pérdida)"""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class DomainError(NestFieldError, ValueError):
    """Argumento fuera del dominio de la operación (división por cero, sqrt negativa, aridad)"""


class TapeMismatchError(NestFieldError, ValueError):
    """Nodos que pertenecen a cintas distintas"""


class DivergenceError(NonFiniteInputError):
    """La pérdida de entrenamiento dejó de ser finita"""

    def __init__(self, message: str, epoch: int):
        super().__init__(message)
        self.epoch = epoch


class ConfigError(NestFieldError, ValueError):
    """Configuración inválida; `line` indica la línea del documento si se conoce"""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"línea {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(NestFieldError, ValueError):
    """Archivo mal formado; `offset` es el byte o `line` la línea del fallo"""

    def __init__(self, message: str, offset: Optional[int] = None, line: Optional[int] = None):
        if offset is not None:
            message = f"{message} (byte {offset})"
        elif line is not None:
            message = f"{message} (línea {line})"
        super().__init__(message)
        self.offset = offset
        self.line = line
