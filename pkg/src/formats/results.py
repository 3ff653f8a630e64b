"""
Registros de resultados en JSON Lines (un ResultRecord por línea)

Los floats se escriben con su representación más corta que se relee
idéntica; un PSNR infinito se escribe como Infinity.
"""

from pathlib import Path
from typing import List, Union

import jsonlines
from pydantic import ValidationError

from src.utils.data_models import ResultRecord
from src.utils.errors import FormatError

Sink = Union[str, Path, jsonlines.Writer]


def write_result(record: ResultRecord, sink: Sink) -> None:
    """Agregar un registro al final del archivo (o de un writer abierto)"""
    payload = record.model_dump(mode="python")
    if isinstance(sink, jsonlines.Writer):
        sink.write(payload)
        return
    path = Path(sink)
    path.parent.mkdir(parents=True, exist_ok=True)
    with jsonlines.open(path, mode="a") as writer:
        writer.write(payload)


def read_results(path: Union[str, Path]) -> List[ResultRecord]:
    records: List[ResultRecord] = []
    with jsonlines.open(Path(path)) as reader:
        try:
            for number, obj in enumerate(reader.iter(type=dict, skip_empty=False), start=1):
                try:
                    records.append(ResultRecord.model_validate(obj))
                except ValidationError as e:
                    raise FormatError(f"Registro inválido: {e.errors()[0]['msg']}", line=number)
        except jsonlines.InvalidLineError as e:
            raise FormatError(f"Línea JSON inválida: {e}", line=e.lineno)
    return records
