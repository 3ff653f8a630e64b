"""
Tests de la línea de comandos
"""

import json

import pytest

from src.cli.main import build_parser, flag_overrides, main, resolve_config
from src.utils.errors import NestFieldError

TINY = [
    "--set", "training.epochs=2",
    "--set", "model.width=8",
    "--set", "model.num_frequencies=2",
    "--set", "data.image_size=16",
    "--set", "data.n_col=16",
    "--set", "data.n_ic=8",
    "--set", "data.n_bc=4",
    "--set", "data.eval_nx=8",
    "--set", "data.eval_nt=4",
]


class TestParser:
    """Tests de argumentos y configuración efectiva"""

    def test_unknown_subcommand(self, capsys):
        assert main(["entrenar-todo"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_missing_subcommand(self):
        assert main([]) == 2

    def test_flags_map_to_fields(self, tmp_path):
        args = build_parser().parse_args(["pinn", "--seed", "3", "--seed", "4", "--out", str(tmp_path), "--jobs", "2"])
        cfg = resolve_config(args, "pinn_convection")
        assert cfg.seeds == [3, 4]
        assert cfg.output_dir == str(tmp_path)
        assert cfg.jobs == 2

    def test_set_overrides_file(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text('task = "image"\n[model]\nwidth = 16\n', encoding="utf-8")
        args = build_parser().parse_args(["fit-image", "--config", str(path), "--set", "model.width=24"])
        assert resolve_config(args, "image").model.width == 24

    def test_flags_after_set(self):
        args = build_parser().parse_args(["sisr", "--set", "jobs=3", "--jobs", "1"])
        assert flag_overrides(args) == ["jobs=3", "jobs=1"]

    def test_task_mismatch(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text('task = "ct"\n', encoding="utf-8")
        args = build_parser().parse_args(["pinn", "--config", str(path)])
        with pytest.raises(NestFieldError, match="ct"):
            resolve_config(args, "pinn_convection")

    def test_sweep_requires_task(self):
        args = build_parser().parse_args(["sweep-lr", "--lrs", "0.01"])
        with pytest.raises(NestFieldError, match="--task"):
            resolve_config(args)


class TestCommands:
    """Tests de los subcomandos de punta a punta"""

    def test_pinn_run(self, tmp_path, capsys):
        code = main(["pinn", "--seed", "0", "--out", str(tmp_path)] + TINY)
        out = capsys.readouterr().out
        assert code == 0
        assert "rel_err=" in out
        assert list(tmp_path.glob("*/seed-0/solution.csv"))

    def test_json_summary(self, tmp_path, capsys):
        code = main(["fit-image", "--json", "--out", str(tmp_path)] + TINY)
        lines = capsys.readouterr().out.strip().splitlines()
        assert code == 0
        assert json.loads(lines[0])["task"] == "image"

    def test_sweep_lr_table(self, tmp_path, capsys):
        code = main(["sweep-lr", "--task", "image", "--lrs", "0.01,0.001", "--out", str(tmp_path)] + TINY)
        assert code == 0
        assert "lr" in capsys.readouterr().out
        assert (tmp_path / "image-lr-sweep.csv").exists()

    def test_dump_activations(self, tmp_path, capsys):
        main(["fit-image", "--out", str(tmp_path)] + TINY)
        checkpoint = next(tmp_path.glob("*/seed-0/model.ckpt"))
        target = tmp_path / "trazas"
        assert main(["dump-activations", "--checkpoint", str(checkpoint), "--out", str(target)]) == 0
        assert (target / "activations_layer0.csv").exists()

    def test_dump_baseline_fails(self, tmp_path, capsys):
        main(["fit-image", "--out", str(tmp_path), "--set", "model.kind=\"siren\""] + TINY)
        checkpoint = next(tmp_path.glob("*/seed-0/model.ckpt"))
        assert main(["dump-activations", "--checkpoint", str(checkpoint)]) == 1
        assert "no tiene activaciones" in capsys.readouterr().err

    def test_runtime_error_chain(self, tmp_path, capsys):
        code = main(["fit-image", "--config", str(tmp_path / "no-existe.toml")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_config_error(self, tmp_path, capsys):
        code = main(["fit-image", "--out", str(tmp_path), "--set", "model.width=0"])
        assert code == 1
        assert "model.width" in capsys.readouterr().err

    def test_verify(self, capsys):
        assert main(["verify"]) == 0
        assert "chequeos superados" in capsys.readouterr().out
