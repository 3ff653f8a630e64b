"""
Línea de comandos de nestfield

Cada subcomando de tarea ejecuta un barrido de semillas y escribe sus
artefactos; los barridos y la comparación de modelos escriben además una
tabla CSV. Las líneas de resumen van a stdout y el registro a stderr.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from config.settings import settings
from src.formats.checkpoints import read_checkpoint
from src.formats.config_file import load_config, parse_config
from src.harness.sweeps import run_lr_sweep, run_model_comparison, run_scale_sweep, run_seed_sweep
from src.harness.traces import dump_activation_traces
from src.harness.verification import run_verification
from src.utils.data_models import ExperimentConfig
from src.utils.errors import NestFieldError
from src.utils.logger import get_logger

logger = get_logger(__name__)

TASK_COMMANDS: Dict[str, str] = {
    "fit-image": "image",
    "fit-occupancy": "occupancy",
    "sisr": "sisr",
    "misr": "misr",
    "denoise": "denoise",
    "ct": "ct",
    "pinn": "pinn_convection",
}
TASK_NAMES = sorted(set(TASK_COMMANDS.values()))


def _float_list(raw: str) -> List[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"lista de números inválida: {raw!r}")


def _int_list(raw: str) -> List[int]:
    try:
        return [int(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"lista de enteros inválida: {raw!r}")


def _str_list(raw: str) -> List[str]:
    return [v.strip() for v in raw.split(",") if v.strip()]


def _add_config_flags(parser: argparse.ArgumentParser, with_task: bool = False) -> None:
    parser.add_argument("--config", help="Documento de configuración TOML")
    parser.add_argument("--set", action="append", default=[], metavar="CLAVE=VALOR",
                        help="Override sobre el documento (p. ej. model.width=32); repetible")
    parser.add_argument("--seed", action="append", type=int, dest="seeds", metavar="N",
                        help="Semilla de inicialización; repetible (campo seeds)")
    parser.add_argument("--out", help="Raíz de artefactos (campo output_dir)")
    parser.add_argument("--jobs", type=int, help="Procesos en paralelo (campo jobs)")
    parser.add_argument("--json", action="store_true", help="Resumen en JSON por línea")
    if with_task:
        parser.add_argument("--task", choices=TASK_NAMES, help="Tarea (si no la fija --config)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nestfield",
        description="Laboratorio de campos neuronales: ajuste, barridos y verificación",
    )
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMANDO")
    sub.required = True

    for command, task in TASK_COMMANDS.items():
        _add_config_flags(sub.add_parser(command, help=f"Entrenar la tarea {task}"))

    lr = sub.add_parser("sweep-lr", help="Barrido de tasas de aprendizaje")
    _add_config_flags(lr, with_task=True)
    lr.add_argument("--lrs", type=_float_list, required=True, help="Tasas separadas por comas")

    scale = sub.add_parser("sweep-scale", help="Barrido de factores de escala (sisr/misr)")
    _add_config_flags(scale, with_task=True)
    scale.add_argument("--factors", type=_int_list, required=True, help="Factores separados por comas")

    compare = sub.add_parser("compare", help="Comparar arquitecturas en la misma tarea")
    _add_config_flags(compare, with_task=True)
    compare.add_argument("--kinds", type=_str_list, required=True,
                         help="Arquitecturas separadas por comas (nestnet,mlp_relu,ffn,siren,...)")

    dump = sub.add_parser("dump-activations", help="Tablas de ρ de un checkpoint")
    dump.add_argument("--checkpoint", required=True, help="Archivo model.ckpt")
    dump.add_argument("--out", help="Directorio de salida (por defecto el del checkpoint)")

    verify = sub.add_parser("verify", help="Ejecutar los oráculos de verificación")
    verify.add_argument("--seed", type=int, default=0, help="Semilla de los puntos de prueba")
    verify.add_argument("--json", action="store_true", help="Resultados en JSON por línea")
    return parser


def flag_overrides(args: argparse.Namespace) -> List[str]:
    """Los flags se traducen a overrides de campos del documento, después de --set"""
    overrides = list(args.set)
    if args.seeds:
        overrides.append(f"seeds=[{', '.join(str(s) for s in args.seeds)}]")
    if args.out is not None:
        overrides.append(f"output_dir={json.dumps(args.out)}")
    if args.jobs is not None:
        overrides.append(f"jobs={args.jobs}")
    return overrides


def resolve_config(args: argparse.Namespace, task: Optional[str] = None) -> ExperimentConfig:
    """Documento (o valores por defecto de la tarea) más overrides de la línea de comandos"""
    overrides = flag_overrides(args)
    task = task or getattr(args, "task", None)
    if args.config:
        cfg = load_config(args.config, overrides)
        if task and cfg.task != task:
            raise NestFieldError(f"{args.config} define la tarea '{cfg.task}', el subcomando pide '{task}'")
        return cfg
    if not task:
        raise NestFieldError("Indique --config o --task")
    return parse_config(f'name = "{task}"\ntask = "{task}"\n', overrides)


def _emit(lines: Sequence[str]) -> None:
    for line in lines:
        print(line)


def _cmd_task(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, TASK_COMMANDS[args.command])
    result = run_seed_sweep(cfg)
    if args.json:
        _emit([r.model_dump_json() for r in result.records])
    else:
        lines = [f"{r.name} [{r.model_kind}] semilla {r.seed}: {r.metrics.summary()}" for r in result.records]
        lines.append(f"mejor semilla: {result.best.seed} ({result.best.metrics.summary()})")
        _emit(lines)
    return 0


def _emit_table(args: argparse.Namespace, table) -> int:
    if args.json:
        _emit(table.to_json(orient="records", lines=True).splitlines())
    else:
        _emit([table.to_string(index=False)])
    return 0


def _cmd_sweep_lr(args: argparse.Namespace) -> int:
    return _emit_table(args, run_lr_sweep(resolve_config(args), args.lrs))


def _cmd_sweep_scale(args: argparse.Namespace) -> int:
    return _emit_table(args, run_scale_sweep(resolve_config(args), args.factors))


def _cmd_compare(args: argparse.Namespace) -> int:
    return _emit_table(args, run_model_comparison(resolve_config(args), args.kinds))


def _cmd_dump(args: argparse.Namespace) -> int:
    checkpoint = Path(args.checkpoint)
    model = read_checkpoint(checkpoint)
    paths = dump_activation_traces(model, None, args.out or checkpoint.parent)
    if not paths:
        raise NestFieldError(f"El modelo '{model.architecture.kind}' no tiene activaciones aprendidas")
    _emit([str(p) for p in paths])
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    checks = run_verification(args.seed)
    if args.json:
        _emit([c.model_dump_json() for c in checks])
    else:
        passed = sum(c.passed for c in checks)
        _emit([c.line() for c in checks] + [f"{passed}/{len(checks)} chequeos superados"])
    return 0 if all(c.passed for c in checks) else 1


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    **{command: _cmd_task for command in TASK_COMMANDS},
    "sweep-lr": _cmd_sweep_lr,
    "sweep-scale": _cmd_sweep_scale,
    "compare": _cmd_compare,
    "dump-activations": _cmd_dump,
    "verify": _cmd_verify,
}


def _error_chain(error: BaseException) -> List[str]:
    lines = [f"error: {error}"]
    cause = error.__cause__ or error.__context__
    while cause is not None:
        lines.append(f"  causado por {type(cause).__name__}: {cause}")
        cause = cause.__cause__ or cause.__context__
    return lines


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Punto de entrada; devuelve el código de salida (2 uso, 1 error de ejecución)"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logger.debug(f"Configuración efectiva: {settings.summary()}")
    try:
        return COMMANDS[args.command](args)
    except (NestFieldError, OSError) as e:
        logger.error(f"Falló '{args.command}': {e}")
        for line in _error_chain(e):
            print(line, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
