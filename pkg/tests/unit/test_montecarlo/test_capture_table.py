import pytest

from src.montecarlo.capture_table import (
    CaptureTimeTable,
    REFERENCE_MEANS,
    build_capture_table,
)
from src.montecarlo.harness import McConfig, PursuitSuite

PURE = PursuitSuite.PURE_DISTANCE.value
AREA = PursuitSuite.AREA_MIN.value


class TestReferenceTable:
    """Lookups against the built-in reference means."""

    def test_should_normalize_by_slowest_mean(self, reference_table):
        """t_norm is the largest mean in the table."""
        assert reference_table.t_norm == pytest.approx(3.373)
        assert reference_table.normalized(1, PURE) == pytest.approx(1.0)

    def test_should_score_literal_orientation(self, reference_table):
        """Literal score at ratio 5 for pure distance is 2.0 / 3.373."""
        assert reference_table.score(5, PURE, "literal") == pytest.approx(0.593, abs=1e-3)

    def test_should_give_fastest_cell_full_score(self, reference_table):
        """In the fast orientation the quickest capture scores 1."""
        assert reference_table.score(5, PURE) == pytest.approx(1.0)
        assert reference_table.score(1, PURE) < reference_table.score(3, PURE)

    def test_should_interpolate_between_knots(self, reference_table):
        """Ratio 2 lies halfway between the ratio-1 and ratio-3 means."""
        assert reference_table.interpolate_mean(2, PURE) == pytest.approx((3.373 + 2.856) / 2)

    def test_should_clamp_outside_knots(self, reference_table):
        """Ratios below the first or above the last knot use the end values."""
        assert reference_table.interpolate_mean(0.5, PURE) == pytest.approx(3.373)
        assert reference_table.interpolate_mean(12, PURE) == pytest.approx(2.0)

    def test_should_reject_unknown_orientation(self, reference_table):
        with pytest.raises(ValueError):
            reference_table.score(1, PURE, "sideways")

    def test_should_reject_unknown_policy(self, reference_table):
        with pytest.raises(KeyError):
            reference_table.interpolate_mean(1, "teleport")

    def test_should_list_both_policies(self, reference_table):
        assert reference_table.policies == sorted(REFERENCE_MEANS)


class TestPersistence:
    """Saving and loading tables."""

    def test_should_reload_saved_table(self, reference_table, tmp_path):
        """A saved table loads back with the same means."""
        path = reference_table.save(tmp_path / "table.json")
        loaded = CaptureTimeTable.load(path)

        assert loaded.t_norm == pytest.approx(reference_table.t_norm)
        assert loaded.interpolate_mean(3, AREA) == pytest.approx(3.276)

    def test_should_raise_for_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            CaptureTimeTable.load(tmp_path / "absent.json")

    def test_should_refuse_to_normalize_empty_table(self):
        """A table without captured runs has no normalizer."""
        with pytest.raises(ValueError):
            CaptureTimeTable().t_norm


class TestBuildCaptureTable:
    def test_should_fill_one_cell_per_ratio_and_policy(self, tmp_path):
        """Every (ratio, policy) pair gets a batch and the file is written."""
        path = tmp_path / "built.json"
        table = build_capture_table(
            [PursuitSuite.PURE_DISTANCE],
            ratios=(1, 2),
            cfg=McConfig(n_runs=2, base_seed=3),
            path=path,
        )

        assert set(table.entries) == {(1, PURE), (2, PURE)}
        assert table.entries[(2, PURE)].n_runs == 2
        assert path.exists()
        assert 0.0 < table.score(1.5, PURE) <= 1.0
