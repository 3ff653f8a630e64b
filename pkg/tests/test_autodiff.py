"""
Tests de la cinta, las tangentes directas y el chequeo de gradientes
"""

import numpy as np
import pytest

from src.autodiff import functional as F
from src.autodiff.dual import dual_seed
from src.autodiff.gradcheck import analytic_gradient, finite_difference_check
from src.autodiff.tape import Node, Tape, apply, backward, leaf, tape_new
from src.utils.errors import DomainError, NonFiniteInputError, TapeMismatchError


class TestTape:
    """Tests de grabación y acumulación inversa"""

    def test_sin_at_zero(self):
        """sin(0) = 0 y su gradiente es 1"""
        tape = tape_new()
        x = leaf(tape, 0.0, trainable=True)
        y = apply(tape, "sin", [x])
        assert y.value == 0.0
        assert backward(tape, y)[x] == pytest.approx(1.0)

    def test_square_gradient(self):
        """square(3) = 9 con gradiente 6"""
        tape = Tape()
        x = tape.leaf(3.0, trainable=True)
        y = F.square(x)
        assert float(y.value) == 9.0
        assert float(tape.backward(y)[x]) == pytest.approx(6.0)

    def test_product_gradients(self):
        """f = x·y con x=2, y=5"""
        tape = Tape()
        x = tape.leaf(2.0, trainable=True)
        y = tape.leaf(5.0, trainable=True)
        grads = tape.backward(x * y)
        assert float(grads[x]) == 5.0
        assert float(grads[y]) == 2.0

    def test_fan_out_accumulates(self):
        """Un nodo usado dos veces acumula ambos adjuntos"""
        tape = Tape()
        x = tape.leaf(1.5, trainable=True)
        y = x * x + x
        assert float(tape.backward(y)[x]) == pytest.approx(4.0)

    def test_broadcast_adjoint_is_summed(self):
        """El adjunto de un sesgo difundido se suma sobre el lote"""
        tape = Tape()
        b = tape.leaf(np.zeros(3), trainable=True)
        out = F.sum(np.ones((4, 3)) + b)
        np.testing.assert_array_equal(tape.backward(out)[b], np.full(3, 4.0))

    def test_untouched_leaf_has_zero_gradient(self):
        """Una hoja entrenable que no influye recibe gradiente cero"""
        tape = Tape()
        x = tape.leaf(2.0, trainable=True)
        unused = tape.leaf(np.ones(2), trainable=True)
        grads = tape.backward(F.square(x))
        np.testing.assert_array_equal(grads[unused], np.zeros(2))

    def test_replay_is_deterministic(self):
        """Reevaluar la cinta reproduce los valores guardados"""
        tape = Tape()
        x = tape.leaf(np.linspace(-1, 1, 5), trainable=True)
        F.sum(F.exp(F.sin(x)) * x)
        cached = [tape.value_of(Node(tape, i)) for i in range(len(tape))]
        for before, replayed in zip(cached, tape.replay()):
            np.testing.assert_array_equal(before, replayed)

    def test_backward_requires_scalar(self):
        tape = Tape()
        x = tape.leaf(np.ones(3), trainable=True)
        with pytest.raises(DomainError, match="escalar"):
            tape.backward(x * 2.0)


class TestTapeErrors:
    """Tests de dominio y de entradas inválidas"""

    def test_non_finite_leaf(self):
        with pytest.raises(NonFiniteInputError):
            Tape().leaf(float("nan"))

    def test_division_by_zero(self):
        tape = Tape()
        with pytest.raises(DomainError, match="división por cero"):
            tape.leaf(1.0) / tape.leaf(0.0)

    def test_sqrt_of_negative(self):
        tape = Tape()
        with pytest.raises(DomainError, match="negativo"):
            F.sqrt(tape.leaf(-1.0))

    def test_unknown_operation(self):
        tape = Tape()
        with pytest.raises(DomainError, match="no soportada"):
            tape.apply("tanh", [tape.leaf(1.0)])

    def test_wrong_arity(self):
        tape = Tape()
        with pytest.raises(DomainError, match="espera 2"):
            tape.apply("add", [tape.leaf(1.0)])

    def test_nodes_from_different_tapes(self):
        a = Tape().leaf(1.0)
        b = Tape().leaf(2.0)
        with pytest.raises(TapeMismatchError):
            a + b

    def test_exp_overflow_is_non_finite(self):
        tape = Tape()
        with pytest.raises(NonFiniteInputError):
            F.exp(tape.leaf(1000.0))


class TestDual:
    """Tests de las tangentes directas grabadas en la cinta"""

    def test_seed_requires_leaf(self):
        tape = Tape()
        x = tape.leaf(1.0)
        with pytest.raises(DomainError, match="hoja"):
            dual_seed(tape, x * 2.0, 1.0)

    def test_tangent_of_sin(self):
        """d/dx sin(x) = cos(x)"""
        tape = Tape()
        x = tape.leaf(0.3)
        out = F.sin(dual_seed(tape, x, 1.0))
        assert float(out.tangent.value) == pytest.approx(np.cos(0.3))

    def test_tangent_matches_adjoint(self):
        """⟨∇f, v⟩ coincide con la tangente en la dirección v"""
        tape = Tape()
        point = np.array([0.2, -0.7, 1.1])
        direction = np.array([1.0, -2.0, 0.5])
        x = tape.leaf(point, trainable=True)
        out = F.sum(F.sin(x) * F.exp(x * 0.3) + F.square(x))
        d = dual_seed(tape, x, direction)
        dual = F.sum(F.sin(d) * F.exp(d * 0.3) + F.square(d))
        assert float(dual.tangent.value) == pytest.approx(float(np.dot(tape.backward(out)[x], direction)), rel=1e-12)

    def test_second_derivative_through_tangent(self):
        """La tangente es diferenciable: d/dx (d/dx x³) = 6x"""
        tape = Tape()
        x = tape.leaf(1.5, trainable=True)
        d = dual_seed(tape, x, 1.0)
        cube = d * d * d
        assert float(cube.tangent.value) == pytest.approx(3 * 1.5 ** 2)
        assert float(tape.backward(cube.tangent)[x]) == pytest.approx(6 * 1.5)

    def test_relu_tangent_at_zero_is_zero(self):
        tape = Tape()
        x = tape.leaf(0.0)
        assert float(F.relu(dual_seed(tape, x, 1.0)).tangent.value) == 0.0


class TestGradientCheck:
    """Tests del chequeo por diferencias finitas"""

    def test_smooth_function_passes(self):
        report = finite_difference_check(lambda t, p: F.sum(F.sin(p) * p), np.array([0.3, -1.2, 2.0]))
        assert report.checked == 3
        assert report.passed(1e-6)

    def test_relu_kink_is_skipped(self):
        """Una coordenada sobre el quiebre de relu se marca como no suave"""
        report = finite_difference_check(lambda t, p: F.sum(F.relu(p)), np.array([0.0, 1.0]))
        assert report.non_smooth == [0]
        assert report.checked == 1

    def test_analytic_gradient_of_mean(self):
        grad = analytic_gradient(lambda t, p: F.mean(F.square(p)), np.array([1.0, 2.0]))
        np.testing.assert_allclose(grad, [1.0, 2.0])

    def test_relative_floor_bounds_small_coordinates(self):
        """Una coordenada diminuta junto a una enorme no domina el error"""
        point = np.array([1e3, 1e-4])
        loose = finite_difference_check(lambda t, p: F.sum(F.square(p)), point)
        floored = finite_difference_check(lambda t, p: F.sum(F.square(p)), point, relative_floor=1e-3)
        assert floored.max_rel_error <= 1e-4
        assert loose.max_rel_error >= floored.max_rel_error


class TestFusedActivation:
    """ρ fusionada contra su forma desarmada w2ᵀ ReLU(w1 h + b1) + b2"""

    W1 = np.array([0.8, -1.3, 1.1])
    B1 = np.array([-0.2, 0.4, 0.05])
    W2 = np.array([1.2, -0.7, 0.9])
    B2 = 0.3

    def _leaves(self, tape, h):
        return (tape.leaf(h, trainable=True),) + tuple(
            tape.leaf(p, trainable=True) for p in (self.W1, self.B1, self.W2, self.B2))

    @staticmethod
    def _unfused(h, w1, b1, w2, b2):
        out = b2
        for j in range(3):
            out = out + F.relu(h * w1[j] + b1[j]) * w2[j]
        return out

    def _h(self):
        return np.random.default_rng(3).uniform(-2, 2, size=(5, 4))

    def test_values_match_formula(self):
        h = self._h()
        expected = self.B2 + sum(self.W2[j] * np.maximum(self.W1[j] * h + self.B1[j], 0.0) for j in range(3))
        fused = F.call("rho", h, self.W1, self.B1, self.W2, np.array(self.B2))
        np.testing.assert_allclose(fused, expected, rtol=1e-14, atol=1e-14)
        assert fused.shape == h.shape

    def test_gradients_match_unfused(self):
        h = self._h()
        weights = np.random.default_rng(4).normal(size=h.shape)
        tape = Tape()
        leaves = self._leaves(tape, h)
        fused = tape.backward(F.sum(F.call("rho", *leaves) * weights))
        tape = Tape()
        plain = self._leaves(tape, h)
        unfused = tape.backward(F.sum(self._unfused(*plain) * weights))
        for a, b in zip(leaves, plain):
            np.testing.assert_allclose(fused[a], unfused[b], rtol=1e-12, atol=1e-12)

    def test_tangent_and_its_gradient_match_unfused(self):
        """La tangente en h y su gradiente respecto de w1, b1 y w2 coinciden"""
        h = self._h()
        results = []
        for fn in (lambda *p: F.call("rho", *p), self._unfused):
            tape = Tape()
            leaves = self._leaves(tape, h)
            x = tape.leaf(h)
            out = fn(dual_seed(tape, x, 1.0), *leaves[1:])
            grads = tape.backward(F.sum(F.square(out.tangent)))
            results.append((out.tangent.value, [grads[p] for p in leaves[1:4]]))
        (t_fused, g_fused), (t_plain, g_plain) = results
        np.testing.assert_allclose(t_fused, t_plain, rtol=1e-14, atol=1e-14)
        for a, b in zip(g_fused, g_plain):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)

    def test_parameter_tangents_match_unfused(self):
        """Tangentes sembradas sobre los parámetros de ρ"""
        h = self._h()
        values = []
        for fn in (lambda *p: F.call("rho", *p), self._unfused):
            tape = Tape()
            params = [tape.leaf(p) for p in (self.W1, self.B1, self.W2, self.B2)]
            seeded = [dual_seed(tape, p, d) for p, d in
                      zip(params, ([0.3, -0.1, 0.2], [1.0, 0.5, -0.4], [-0.6, 0.2, 0.7], 0.9))]
            values.append(fn(tape.constant(h), *seeded).tangent.value)
        np.testing.assert_allclose(values[0], values[1], rtol=1e-12, atol=1e-12)
