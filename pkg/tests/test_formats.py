"""
Tests de lectura y escritura de artefactos
"""

import numpy as np
import pandas as pd
import pytest

from src.formats.checkpoints import MAGIC, read_checkpoint, write_checkpoint
from src.formats.config_file import load_config, parse_config, save_config, serialize_config
from src.formats.images import read_image, write_image
from src.formats.results import read_results, write_result
from src.formats.tables import read_grid_csv, read_table, write_grid_csv, write_table
from src.operators.grids import ImageGrid
from src.utils.data_models import ExperimentConfig, MetricReport, ResultRecord
from src.utils.errors import ConfigError, FormatError


def _record(seed: int = 0, psnr_db: float = 1.0 / 3.0) -> ResultRecord:
    return ResultRecord(
        config_hash="a" * 64, name="prueba", task="image", model_kind="nestnet", seed=seed,
        metrics=MetricReport(psnr_db=psnr_db, ssim=0.1 + 0.2, reference={"bilinear_psnr_db": 21.5}),
        wall_seconds=0.25, parameter_count=10, epochs=5, lr=5e-3,
    )


class TestImages:
    """Tests de PGM/PPM"""

    @pytest.mark.parametrize("channels,suffix", [(1, "pgm"), (3, "ppm")])
    def test_round_trip_within_half_step(self, tmp_path, channels, suffix):
        img = ImageGrid(np.random.default_rng(0).uniform(size=(5, 7, channels)))
        loaded = read_image(write_image(img, tmp_path / f"img.{suffix}"))
        assert loaded.shape == img.shape
        assert np.max(np.abs(loaded.values - img.values)) <= 0.5 / 255 + 1e-12

    def test_header_layout(self, tmp_path):
        path = write_image(ImageGrid(np.ones((2, 3))), tmp_path / "img.pgm")
        assert path.read_bytes() == b"P5\n3 2\n255\n" + bytes([255] * 6)

    def test_header_comments(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# comentario\n2 1\n255\n" + bytes([0, 255]))
        np.testing.assert_array_equal(read_image(path).values.ravel(), [0.0, 1.0])

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "t.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes([1, 2]))
        with pytest.raises(FormatError, match="byte 13"):
            read_image(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "m.pgm"
        path.write_bytes(b"P2\n1 1\n255\n0")
        with pytest.raises(FormatError, match="mágico"):
            read_image(path)

    def test_unsupported_maxval(self, tmp_path):
        path = tmp_path / "v.pgm"
        path.write_bytes(b"P5\n1 1\n65535\n" + bytes([0, 0]))
        with pytest.raises(FormatError, match="maxval"):
            read_image(path)


class TestConfig:
    """Tests del documento TOML"""

    def test_round_trip(self):
        cfg = ExperimentConfig.model_validate({
            "name": "conv", "task": "pinn_convection", "seeds": [0, 1, 2],
            "model": {"kind": "siren", "width": 32, "omega0": 1.0},
            "training": {"epochs": 100, "lr": 1e-3, "schedule": {"kind": "constant"}},
            "data": {"beta": 30.0},
        })
        assert parse_config(serialize_config(cfg)) == cfg

    def test_file_round_trip(self, tmp_path):
        cfg = ExperimentConfig(task="image")
        assert load_config(save_config(cfg, tmp_path / "cfg.toml")) == cfg

    def test_overrides(self):
        cfg = parse_config('task = "image"\n[model]\nwidth = 16\n', ["model.width=32", "seeds=[3, 4]"])
        assert cfg.model.width == 32
        assert cfg.seeds == [3, 4]

    def test_override_equals_editing(self):
        """Un override produce la misma configuración que editar el archivo"""
        edited = parse_config('task = "sisr"\n[data]\nscale = 2\n')
        overridden = parse_config('task = "sisr"\n[data]\nscale = 4\n', ["data.scale=2"])
        assert edited == overridden
        assert edited.config_hash() == overridden.config_hash()

    def test_unknown_key_line(self):
        with pytest.raises(ConfigError, match="línea 3"):
            parse_config('task = "image"\n[model]\nwidht = 3\n')

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="línea 4: clave duplicada"):
            parse_config('task = "image"\n[model]\nwidth = 3\nwidth = 4\n')

    def test_invalid_type(self):
        with pytest.raises(ConfigError, match="línea 2"):
            parse_config('task = "image"\njobs = "muchos"\n')

    def test_invalid_toml(self):
        with pytest.raises(ConfigError, match="TOML"):
            parse_config('task = "image"\n[model\n')

    def test_override_without_equals(self):
        with pytest.raises(ConfigError, match="sin '='"):
            parse_config('task = "image"\n', ["model.width"])


class TestResults:
    """Tests del flujo JSONL"""

    def test_round_trip_is_exact(self, tmp_path):
        records = [_record(0), _record(1, float("inf"))]
        for record in records:
            write_result(record, tmp_path / "results.jsonl")
        assert read_results(tmp_path / "results.jsonl") == records

    def test_invalid_record_line(self, tmp_path):
        path = tmp_path / "results.jsonl"
        write_result(_record(), path)
        with path.open("a", encoding="utf-8") as handle:
            handle.write('{"seed": 1}\n')
        with pytest.raises(FormatError, match="línea 2"):
            read_results(path)

    def test_invalid_json_line(self, tmp_path):
        path = tmp_path / "results.jsonl"
        path.write_text("{no es json\n", encoding="utf-8")
        with pytest.raises(FormatError, match="línea 1"):
            read_results(path)


class TestTables:
    """Tests de CSV"""

    def test_table_round_trip(self, tmp_path):
        df = pd.DataFrame({"epoch": [1, 2], "loss": [1.0 / 3.0, np.pi]})
        loaded = read_table(write_table(df, tmp_path / "curve.csv"))
        pd.testing.assert_frame_equal(loaded, df)

    def test_grid_round_trip(self, tmp_path):
        values = np.random.default_rng(0).normal(size=(3, 4, 5))
        path = write_grid_csv(values, tmp_path / "volume.csv")
        assert path.read_text().splitlines()[0] == "3,4,5"
        np.testing.assert_array_equal(read_grid_csv(path), values)

    def test_grid_wrong_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("2,2\n1,2\n", encoding="utf-8")
        with pytest.raises(FormatError, match="Se esperaban 4"):
            read_grid_csv(path)


class TestCheckpoints:
    """Tests de checkpoints"""

    def test_round_trip_is_bit_exact(self, tmp_path, tiny_nestnet):
        path = write_checkpoint(tiny_nestnet, tmp_path / "model.ckpt")
        loaded = read_checkpoint(path)
        assert loaded.architecture == tiny_nestnet.architecture
        assert loaded.parameter_names == tiny_nestnet.parameter_names
        np.testing.assert_array_equal(loaded.flat_parameters(), tiny_nestnet.flat_parameters())
        coords = np.random.default_rng(0).uniform(-1, 1, size=(4, 2))
        np.testing.assert_array_equal(loaded.predict(coords), tiny_nestnet.predict(coords))

    def test_header(self, tmp_path, tiny_nestnet):
        lines = write_checkpoint(tiny_nestnet, tmp_path / "model.ckpt").read_text().splitlines()
        assert lines[0] == MAGIC
        assert lines[3] == f"count {tiny_nestnet.parameter_count()}"

    def test_truncated(self, tmp_path, tiny_nestnet):
        path = write_checkpoint(tiny_nestnet, tmp_path / "model.ckpt")
        path.write_text("\n".join(path.read_text().splitlines()[:10]) + "\n")
        with pytest.raises(FormatError, match="Se esperaban"):
            read_checkpoint(path)

    def test_unknown_header(self, tmp_path):
        path = tmp_path / "x.ckpt"
        path.write_text("OTRO FORMATO\n")
        with pytest.raises(FormatError, match="línea 1"):
            read_checkpoint(path)
