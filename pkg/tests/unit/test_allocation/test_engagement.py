import numpy as np
import pytest

from src.allocation.engagement import UnitScale, resolve_engagements

EQUAL_UNITS = UnitScale(100.0, 100.0)


class TestResolveEngagements:
    """Per-cell low-level game outcomes."""

    def test_should_destroy_all_intruders_when_outnumbered(self, reference_table):
        """Ratio 2 wipes out the cell's intruder mass."""
        outcome = resolve_engagements(0.2, 0.1, EQUAL_UNITS, reference_table)

        assert outcome.ratio[0] == pytest.approx(2.0)
        assert outcome.destroyed[0] == pytest.approx(0.1)
        assert outcome.any_engaged

    def test_should_destroy_in_proportion_below_parity(self, reference_table):
        """Half the defenders destroy half the intruders."""
        outcome = resolve_engagements(0.05, 0.1, EQUAL_UNITS, reference_table)
        assert outcome.destroyed[0] == pytest.approx(0.05)

    def test_should_scale_ratio_by_unit_counts(self, reference_table):
        """Fewer intruder units per unit of mass doubles the ratio."""
        outcome = resolve_engagements(0.1, 0.1, UnitScale(100.0, 50.0), reference_table)
        assert outcome.ratio[0] == pytest.approx(2.0)

    def test_should_ignore_cells_below_threshold(self, reference_table):
        """Traces of mass do not fight."""
        outcome = resolve_engagements([1e-7, 0.5], [0.5, 1e-7], EQUAL_UNITS, reference_table)

        assert not outcome.any_engaged
        np.testing.assert_array_equal(outcome.destroyed, [0.0, 0.0])
        assert outcome.mean_score(np.ones(2)) == 0.0

    def test_should_score_with_capture_table(self, reference_table):
        """Ratio 5 under pure distance scores 2.0 / 3.373 literally."""
        outcome = resolve_engagements(
            0.5, 0.1, EQUAL_UNITS, reference_table, orientation="literal"
        )
        assert outcome.score[0] == pytest.approx(0.593, abs=1e-3)

    def test_should_never_destroy_more_than_present(self, reference_table, rng):
        """Destroyed mass stays within [0, intruder] cell by cell."""
        defender = rng.uniform(0, 1, 200)
        intruder = rng.uniform(0, 1, 200)
        outcome = resolve_engagements(defender, intruder, EQUAL_UNITS, reference_table)

        assert np.all(outcome.destroyed >= 0.0)
        assert np.all(outcome.destroyed <= intruder)

    def test_should_weight_mean_score_by_given_mass(self, reference_table):
        """mean_score averages engaged cells by weight."""
        outcome = resolve_engagements([0.5, 0.1], [0.1, 0.1], EQUAL_UNITS, reference_table)
        weights = np.array([1.0, 3.0])
        expected = (outcome.score[0] + 3.0 * outcome.score[1]) / 4.0
        assert outcome.mean_score(weights) == pytest.approx(expected)

    def test_should_reject_negative_densities(self, reference_table):
        with pytest.raises(ValueError):
            resolve_engagements(-0.1, 0.1, EQUAL_UNITS, reference_table)
