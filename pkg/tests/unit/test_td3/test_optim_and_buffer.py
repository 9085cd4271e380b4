import numpy as np
import pytest

from src.td3.mlp import NetworkShapeError
from src.td3.optim import Adam
from src.td3.replay_buffer import ReplayBuffer


class TestAdam:
    """Adam updates."""

    def test_should_take_learning_rate_sized_first_step(self):
        """The bias-corrected first step moves by lr against the gradient."""
        p = np.array([1.0])
        opt = Adam.for_params([p], lr=0.001)
        opt.step([p], [np.array([3.0])])
        assert p[0] == pytest.approx(0.999, abs=1e-9)

    def test_should_minimize_quadratic(self):
        """Gradient 2p drives p toward 0."""
        p = np.array([5.0, -3.0])
        opt = Adam.for_params([p], lr=0.1)
        for _ in range(2000):
            opt.step([p], [2 * p])
        np.testing.assert_allclose(p, [0.0, 0.0], atol=0.05)

    def test_should_update_in_place(self):
        p = np.ones(3)
        alias = p
        Adam.for_params([p]).step([p], [np.ones(3)])
        assert alias is p
        assert np.all(p < 1.0)

    def test_should_reject_mismatched_lists(self):
        p = np.ones(2)
        opt = Adam.for_params([p])
        with pytest.raises(NetworkShapeError):
            opt.step([p, p], [p, p])


def fill(buffer, count):
    for k in range(count):
        buffer.add(np.full(2, k), np.full(1, k / 10), float(k), np.full(2, k + 1), k % 2 == 0)


class TestReplayBuffer:
    """FIFO replay memory."""

    def test_should_evict_oldest_when_full(self):
        """After 8 inserts into capacity 5 only the last 5 remain."""
        buffer = ReplayBuffer(5, obs_dim=2, action_dim=1)
        fill(buffer, 8)

        assert len(buffer) == 5
        np.testing.assert_array_equal(buffer.transitions().rewards, [3, 4, 5, 6, 7])

    def test_should_keep_insertion_order_before_wrapping(self):
        buffer = ReplayBuffer(10, obs_dim=2, action_dim=1)
        fill(buffer, 4)
        batch = buffer.transitions()

        np.testing.assert_array_equal(batch.rewards, [0, 1, 2, 3])
        np.testing.assert_array_equal(batch.dones, [1.0, 0.0, 1.0, 0.0])
        np.testing.assert_array_equal(batch.next_states[2], [3, 3])

    def test_should_sample_stored_transitions(self, rng):
        """Samples are copies of stored rows."""
        buffer = ReplayBuffer(10, obs_dim=2, action_dim=1)
        fill(buffer, 6)
        batch = buffer.sample(4, rng)

        assert len(batch) == 4
        for state, reward in zip(batch.states, batch.rewards):
            assert state[0] == reward

    def test_should_refuse_oversized_sample(self, rng):
        buffer = ReplayBuffer(10, obs_dim=2, action_dim=1)
        fill(buffer, 3)
        with pytest.raises(ValueError):
            buffer.sample(4, rng)

    def test_should_reject_zero_capacity(self):
        with pytest.raises(ValueError):
            ReplayBuffer(0, obs_dim=2, action_dim=1)
