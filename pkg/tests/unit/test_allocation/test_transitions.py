import numpy as np
import pytest

from src.allocation.transitions import (
    ActionDomainError,
    ActionShapeError,
    GridSizeError,
    build_transition,
    n_actions,
    transition_pattern,
)


def brute_force_actions(n):
    count = 0
    for row in range(n):
        for col in range(n):
            for d_row in (-1, 0, 1):
                for d_col in (-1, 0, 1):
                    if 0 <= row + d_row < n and 0 <= col + d_col < n:
                        count += 1
    return count


def self_only(n):
    return np.array([1.0 if dest == src else 0.0 for dest, src in transition_pattern(n)])


class TestActionCount:
    """Size of the action vector."""

    @pytest.mark.parametrize("n, expected", [(2, 16), (3, 49), (4, 100)])
    def test_should_match_known_sizes(self, n, expected):
        assert n_actions(n) == expected

    def test_should_agree_with_enumeration(self):
        """The closed form counts every in-grid neighbor pair."""
        for n in range(2, 9):
            assert n_actions(n) == brute_force_actions(n)
            assert len(transition_pattern(n)) == n_actions(n)

    def test_should_reject_grid_below_two(self):
        with pytest.raises(GridSizeError):
            n_actions(1)


class TestBuildTransition:
    """Column-stochastic matrices from action vectors."""

    def test_should_spread_uniform_action_evenly_on_2x2(self):
        """All ones on a 2x2 grid gives 1/4 everywhere."""
        transition = build_transition(np.ones(16), 2).toarray()
        np.testing.assert_allclose(transition, np.full((4, 4), 0.25))

    def test_should_have_unit_column_sums(self, rng):
        """Every column of a random action's matrix sums to 1."""
        for n in (2, 3, 5):
            transition = build_transition(rng.uniform(0, 1, n_actions(n)), n)
            np.testing.assert_allclose(transition.sum(axis=0), np.ones(n * n), atol=1e-12)

    def test_should_be_identity_for_self_only_action(self):
        """Keeping all mass in place gives the identity."""
        transition = build_transition(self_only(3), 3).toarray()
        np.testing.assert_array_equal(transition, np.eye(9))

    def test_should_fall_back_to_identity_for_zero_action(self):
        """All-zero columns become self-transitions."""
        transition = build_transition(np.zeros(n_actions(3)), 3).toarray()
        np.testing.assert_array_equal(transition, np.eye(9))

    def test_should_only_move_mass_to_adjacent_cells(self, rng):
        """Entries between cells more than one step apart are zero."""
        n = 4
        transition = build_transition(rng.uniform(0, 1, n_actions(n)), n).toarray()
        for dest in range(n * n):
            for src in range(n * n):
                far = abs(dest // n - src // n) > 1 or abs(dest % n - src % n) > 1
                if far:
                    assert transition[dest, src] == 0.0

    def test_should_reject_wrong_length(self):
        with pytest.raises(ActionShapeError):
            build_transition(np.ones(10), 3)

    @pytest.mark.parametrize("bad", [-0.1, 1.5, np.nan])
    def test_should_reject_entries_outside_unit_interval(self, bad):
        """Negative, too large and NaN entries are refused."""
        action = np.ones(n_actions(2))
        action[3] = bad
        with pytest.raises(ActionDomainError):
            build_transition(action, 2)
