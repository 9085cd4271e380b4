import numpy as np
import pytest

from src.td3.mlp import Mlp, NetworkShapeError, OutputActivation, sigmoid

STEP = 1e-5


def weighted_output(net, x, dy):
    return float(np.sum(net(x) * dy))


def assert_matches_finite_differences(net, x, dy):
    """Every parameter gradient agrees with central differences."""
    _, cache = net.forward(x)
    grads, dx = net.backward(cache, dy)

    for param, grad in zip(net.parameters(), grads.arrays()):
        numeric = np.zeros_like(param)
        for idx in np.ndindex(param.shape):
            original = param[idx]
            param[idx] = original + STEP
            plus = weighted_output(net, x, dy)
            param[idx] = original - STEP
            minus = weighted_output(net, x, dy)
            param[idx] = original
            numeric[idx] = (plus - minus) / (2 * STEP)
        scale = np.maximum(np.abs(grad) + np.abs(numeric), 1e-6)
        assert np.all(np.abs(grad - numeric) <= 1e-4 * scale)

    numeric_dx = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        shifted = x.copy()
        shifted[idx] += STEP
        plus = weighted_output(net, shifted, dy)
        shifted[idx] -= 2 * STEP
        minus = weighted_output(net, shifted, dy)
        numeric_dx[idx] = (plus - minus) / (2 * STEP)
    scale = np.maximum(np.abs(dx) + np.abs(numeric_dx), 1e-6)
    assert np.all(np.abs(dx - numeric_dx) <= 1e-4 * scale)


class TestForward:
    """Forward pass."""

    def test_should_output_zero_for_zero_weights(self):
        """A zero identity network maps everything to 0."""
        net = Mlp.zeros((3, 5, 2))
        np.testing.assert_array_equal(net(np.ones(3)), np.zeros(2))

    def test_should_squash_into_action_bounds(self, rng):
        """Squashed outputs lie in [low, high] even for huge inputs."""
        net = Mlp.initialize((2, 8, 3), rng, OutputActivation.SQUASH, low=-1.0, high=2.0)
        y = net(np.array([[1e6, -1e6], [0.0, 0.0]]))

        assert np.all(np.isfinite(y))
        assert np.all((y >= -1.0) & (y <= 2.0))

    def test_should_center_zero_squash_network(self):
        """A zero squashed network outputs the interval midpoint."""
        net = Mlp.zeros((2, 4, 1), OutputActivation.SQUASH)
        assert net(np.zeros(2))[0] == pytest.approx(0.5)

    def test_should_accept_single_rows_and_batches(self, rng):
        """Vector input gives a vector, matrix input a matrix."""
        net = Mlp.initialize((4, 6, 2), rng)
        x = rng.normal(size=(5, 4))

        assert net(x[0]).shape == (2,)
        assert net(x).shape == (5, 2)
        np.testing.assert_allclose(net(x)[0], net(x[0]))

    def test_should_reject_wrong_input_width(self, rng):
        net = Mlp.initialize((4, 6, 2), rng)
        with pytest.raises(NetworkShapeError):
            net(np.ones(3))

    def test_should_reject_inconsistent_layers(self):
        with pytest.raises(NetworkShapeError):
            Mlp((2, 3), [np.zeros((3, 2))], [np.zeros(3)])

    def test_should_not_overflow_sigmoid(self):
        """Sigmoid saturates cleanly at extreme inputs."""
        np.testing.assert_allclose(sigmoid(np.array([-1000.0, 0.0, 1000.0])), [0.0, 0.5, 1.0])


class TestBackward:
    """Backpropagation against numerical differentiation."""

    def test_should_match_finite_differences_for_identity_output(self, rng):
        net = Mlp.initialize((4, 8, 6, 2), rng)
        x = rng.normal(size=(3, 4))
        dy = rng.normal(size=(3, 2))
        assert_matches_finite_differences(net, x, dy)

    def test_should_match_finite_differences_for_squashed_output(self, rng):
        net = Mlp.initialize((3, 7, 2), rng, OutputActivation.SQUASH, low=0.0, high=1.0)
        x = rng.normal(size=(4, 3))
        dy = rng.normal(size=(4, 2))
        assert_matches_finite_differences(net, x, dy)

    def test_should_give_zero_gradients_for_zero_upstream(self, rng):
        net = Mlp.initialize((3, 5, 2), rng)
        _, cache = net.forward(rng.normal(size=(2, 3)))
        grads, dx = net.backward(cache, np.zeros((2, 2)))

        assert all(not np.any(g) for g in grads.arrays())
        assert not np.any(dx)

    def test_should_scale_linearly_with_upstream(self, rng):
        """Doubling dy doubles every gradient."""
        net = Mlp.initialize((3, 5, 2), rng)
        _, cache = net.forward(rng.normal(size=(2, 3)))
        dy = rng.normal(size=(2, 2))
        single, _ = net.backward(cache, dy)
        double, _ = net.backward(cache, 2 * dy)

        for a, b in zip(single.arrays(), double.arrays()):
            np.testing.assert_allclose(b, 2 * a)

    def test_should_reject_mismatched_upstream(self, rng):
        net = Mlp.initialize((3, 5, 2), rng)
        _, cache = net.forward(rng.normal(size=(2, 3)))
        with pytest.raises(NetworkShapeError):
            net.backward(cache, np.ones((2, 3)))


class TestCopyAndSerialization:
    def test_should_copy_independently(self, rng):
        """Changing a copy leaves the original untouched."""
        net = Mlp.initialize((2, 3, 1), rng)
        clone = net.copy()
        clone.weights[0] += 1.0
        assert not np.array_equal(net.weights[0], clone.weights[0])

    def test_should_rebuild_from_dict(self, rng):
        """from_dict(to_dict()) gives the same function."""
        net = Mlp.initialize((3, 4, 2), rng, OutputActivation.SQUASH, low=0.0, high=1.0)
        rebuilt = Mlp.from_dict(net.to_dict())
        x = rng.normal(size=(5, 3))
        np.testing.assert_array_equal(rebuilt(x), net(x))
