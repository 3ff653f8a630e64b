"""
Tests de codificación, activaciones y arquitecturas
"""

import math

import numpy as np
import pytest

from src.autodiff.tape import Tape
from src.models.activations import LearnedActivation, apply_activation, rho_eval, sample_activation
from src.models.encoding import alias_free_frequencies, encode, encode_coordinates
from src.models.networks import build_baseline, build_model, build_nestnet, forward
from src.operators.images import procedural_image
from src.training.losses import l2_loss
from src.training.schedule import Schedule
from src.training.trainer import TaskBatch, train
from src.utils.data_models import ActivationSpec, EncodingSpec, LossSpec, ModelSpec
from src.utils.errors import DomainError


class TestEncoding:
    """Tests de los rasgos de Fourier"""

    def test_identity_passthrough(self):
        x = np.array([[0.1, -0.4]])
        np.testing.assert_array_equal(encode(EncodingSpec(kind="identity"), x), x)

    def test_feature_order(self):
        """Por eje, por frecuencia: [cos, sin]"""
        spec = EncodingSpec(kind="fourier", num_frequencies=2)
        features = encode(spec, np.array([0.25]))
        expected = [np.cos(np.pi / 2), np.sin(np.pi / 2), np.cos(np.pi), np.sin(np.pi)]
        np.testing.assert_allclose(features, expected, atol=1e-15)

    def test_output_dimension(self):
        spec = EncodingSpec(kind="fourier", num_frequencies=4)
        assert encode(spec, np.zeros((5, 3))).shape == (5, 24)
        assert spec.output_dim(3) == 24

    def test_coefficients_scale_features(self):
        spec = EncodingSpec(kind="fourier", num_frequencies=1, coefficients=[0.5])
        np.testing.assert_allclose(encode(spec, np.array([0.0])), [0.5, 0.0])

    def test_invalid_coefficients(self):
        with pytest.raises(ValueError):
            EncodingSpec(kind="fourier", num_frequencies=2, coefficients=[1.0, -1.0])
        with pytest.raises(ValueError):
            EncodingSpec(kind="fourier", num_frequencies=2, frequencies=[1.0])

    def test_features_bounded_by_coefficients(self):
        """Cada rasgo queda en [−α_i, α_i]"""
        alphas = [2.0, 0.5, 0.25]
        spec = EncodingSpec(kind="fourier", num_frequencies=3, coefficients=alphas)
        x = np.random.default_rng(0).uniform(-1, 1, size=(200, 2))
        bound = np.tile(np.repeat(alphas, 2), 2)
        assert np.all(np.abs(encode(spec, x)) <= bound + 1e-15)

    def test_domain_points_do_not_share_features(self):
        """x y x + 1 coinciden en `encode` pero no tras escalar al dominio"""
        spec = EncodingSpec(kind="fourier", num_frequencies=4)
        x = np.array([[-0.5, -0.25], [0.5, 0.75]])
        raw = encode(spec, x)
        np.testing.assert_allclose(raw[0], raw[1], atol=1e-12)
        scaled = encode_coordinates(spec, x)
        assert np.abs(scaled[0] - scaled[1]).max() > 0.5

    def test_alias_free_frequencies(self):
        assert alias_free_frequencies(64) == 31
        assert alias_free_frequencies(16) == 7
        assert alias_free_frequencies(2) == 1
        with pytest.raises(DomainError):
            alias_free_frequencies(0)


class TestLearnedActivation:
    """Tests de la subred ρ"""

    def test_initial_points(self):
        """ρ inicial pasa por (0, 0), (1, 0.7) y (−1, 0)"""
        values = rho_eval(LearnedActivation.initial(), np.array([0.0, 1.0, -1.0]))
        np.testing.assert_allclose(values, [0.0, 0.7, 0.0], atol=1e-15)

    def test_preserves_shape(self):
        assert rho_eval(LearnedActivation.initial(), np.zeros((4, 3))).shape == (4, 3)

    def test_sample_table(self):
        table = sample_activation(LearnedActivation.initial())
        assert list(table.columns) == ["h", "rho"]
        assert len(table) == 601
        assert table["h"].iloc[0] == -3.0 and table["h"].iloc[-1] == 3.0

    def test_learned_requires_parameters(self):
        with pytest.raises(DomainError):
            apply_activation(ActivationSpec(kind="learned"), np.zeros(2))

    def test_hyperparameters_required(self):
        with pytest.raises(ValueError):
            ActivationSpec(kind="sine")
        with pytest.raises(ValueError):
            ActivationSpec(kind="gabor_real", omega0=10.0)


class TestNestNet:
    """Tests de construcción y propagación de NestNet"""

    def test_parameter_count(self, tiny_nestnet):
        """width 8, depth 2, K=2: 72 + 72 + 9 afines y 2·10 de ρ"""
        assert tiny_nestnet.parameter_count() == 173
        assert "rho.1.0.w2" in tiny_nestnet.parameter_names

    def test_forward_shape(self, tiny_nestnet):
        assert tiny_nestnet.predict(np.zeros((7, 2))).shape == (7, 1)

    def test_dimension_mismatch(self, tiny_nestnet):
        with pytest.raises(DomainError, match="coordenadas"):
            tiny_nestnet.predict(np.zeros((3, 3)))

    def test_same_seed_same_parameters(self):
        spec = EncodingSpec(kind="fourier", num_frequencies=2)
        a = build_nestnet(8, 2, spec, rng_seed=4)
        b = build_nestnet(8, 2, spec, rng_seed=4)
        np.testing.assert_array_equal(a.flat_parameters(), b.flat_parameters())

    def test_taped_forward_matches_numpy(self, tiny_nestnet):
        coords = np.random.default_rng(0).uniform(-1, 1, size=(5, 2))
        tape = Tape()
        taped = forward(tiny_nestnet, tape, coords, tiny_nestnet.bind(tape))
        np.testing.assert_allclose(taped.value, tiny_nestnet.predict(coords), rtol=0, atol=1e-14)

    def test_bind_flat_matches_bind(self, tiny_nestnet):
        """Gradiente por parámetros separados y por vector plano coinciden"""
        coords = np.random.default_rng(1).uniform(-1, 1, size=(6, 2))
        targets = np.zeros((6, 1))

        tape = Tape()
        bound = tiny_nestnet.bind(tape)
        grads = tiny_nestnet.flatten_gradients(
            tape.backward(l2_loss(tape, forward(tiny_nestnet, tape, coords, bound), targets)), bound)

        tape = Tape()
        flat = tape.leaf(tiny_nestnet.flat_parameters(), trainable=True)
        loss = l2_loss(tape, forward(tiny_nestnet, tape, coords, tiny_nestnet.bind_flat(flat)), targets)
        np.testing.assert_allclose(tape.backward(loss)[flat], grads, rtol=1e-12, atol=1e-15)

    def test_round_robin_subnetworks(self):
        """Con r = 2 cada capa tiene dos subredes y la red se evalúa"""
        model = build_nestnet(4, 1, EncodingSpec(kind="identity"), rng_seed=0, subnetworks=2)
        assert "rho.0.1.b2" in model.parameter_names
        model.params["rho.0.1.b2"] = np.array(5.0)
        shifted = model.predict(np.zeros((1, 2)))
        model.params["rho.0.1.b2"] = np.array(0.0)
        # la subred 1 solo alimenta a las neuronas impares
        w_odd = model.params["layers.1.W"][0, 1::2].sum()
        assert (shifted - model.predict(np.zeros((1, 2)))).item() == pytest.approx(5.0 * w_odd)

    def test_assign_flat_size(self, tiny_nestnet):
        with pytest.raises(DomainError):
            tiny_nestnet.assign_flat(np.zeros(3))

    def test_one_step_moves_every_rho_parameter(self, tiny_nestnet):
        """Tras un paso de Adam cambian w1, b1, w2 y b2 de cada subred"""
        rng = np.random.default_rng(2)
        batch = TaskBatch(coords=rng.uniform(-1, 1, size=(32, 2)), targets=rng.uniform(0, 1, size=(32, 1)))
        before = {name: p.copy() for name, p in tiny_nestnet.params.items() if name.startswith("rho.")}
        train(tiny_nestnet, batch, LossSpec(), 1, Schedule("constant", 1, 1e-3))
        for name, value in before.items():
            assert np.all(tiny_nestnet.params[name] != value), name


class TestImageFit:
    """Ajuste corto de una imagen con rasgos de Fourier"""

    @pytest.mark.parametrize("kind", ["nestnet", "ffn"])
    def test_fit_beats_mean_predictor(self, kind):
        """El error final queda claramente por debajo de la varianza de la imagen"""
        img = procedural_image("bandlimited", 16, 16, rng_seed=0)
        targets = img.flat()
        model = build_model(ModelSpec(kind=kind, width=32, depth=2, num_frequencies=7), 2, 1, seed=0)
        result = train(model, TaskBatch(img.coordinates(), targets), LossSpec(), 300,
                       Schedule("constant", 300, 5e-3))
        assert result.final_loss < 0.5 * targets.var()


class TestBaselines:
    """Tests de las redes de referencia"""

    @pytest.mark.parametrize("kind,hyper", [
        ("mlp_relu", None),
        ("ffn", None),
        ("siren", ActivationSpec(kind="sine", omega0=30.0)),
        ("gaussian", ActivationSpec(kind="gaussian", s0=10.0)),
        ("wire_real", ActivationSpec(kind="gabor_real", omega0=20.0, s0=30.0)),
        ("mfn", None),
    ])
    def test_forward_shape(self, kind, hyper):
        model = build_baseline(kind, 8, 2, hyper, rng_seed=0, input_dim=2, output_dim=3, num_frequencies=2)
        assert model.predict(np.zeros((4, 2))).shape == (4, 3)
        assert not model.has_learned_activations()

    def test_siren_first_layer_bound(self):
        model = build_baseline("siren", 16, 2, ActivationSpec(kind="sine", omega0=30.0), rng_seed=0)
        assert np.abs(model.params["layers.0.W"]).max() <= 1.0 / 2
        assert np.abs(model.params["layers.1.W"]).max() <= math.sqrt(6.0 / 16) / 30.0

    def test_wire_width_reduced(self):
        model = build_baseline("wire_real", 64, 1, ActivationSpec(kind="gabor_real", omega0=20.0, s0=30.0), 0)
        assert model.architecture.width == 45

    def test_wrong_activation(self):
        with pytest.raises(DomainError):
            build_baseline("siren", 8, 2, ActivationSpec(kind="gaussian", s0=1.0), 0)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            build_baseline("transformer", 8, 2, None, 0)

    def test_build_model_from_spec(self):
        spec = ModelSpec(kind="siren", width=8, depth=2, omega0=30.0)
        model = build_model(spec, input_dim=3, output_dim=1, seed=0)
        assert model.architecture.kind == "siren"
        assert model.architecture.input_dim == 3
