from pathlib import Path
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import pytest

from src.game.agents import EpisodeResult, GameConfig, TrajectoryRow
from src.publisher.svg import (
    render_density_strip,
    render_snapshot,
    snapshot_indices,
    write_density_strip,
    write_snapshots,
)


def two_frame_rows():
    return [
        TrajectoryRow(0.0, 0, "pursuer", 2.0, 5.0, True),
        TrajectoryRow(0.0, 1, "evader", 8.0, 5.0, True),
        TrajectoryRow(0.01, 0, "pursuer", 2.01, 5.0, True),
        TrajectoryRow(0.01, 1, "evader", 8.0, 5.0, False),
    ]


def rollout(steps=3):
    return [
        {'k': k, 'defender': [1.0, 0.0, 0.0, 0.0], 'intruder': [0.0, 0.5, 0.0, 0.0 if k else 0.5]}
        for k in range(steps)
    ]


class TestSnapshots:
    """Game snapshots."""

    def test_should_pick_start_middle_and_end(self):
        assert snapshot_indices(11) == [0, 5, 10]
        assert snapshot_indices(1) == [0, 0, 0]
        assert snapshot_indices(0) == []

    def test_should_draw_cells_for_alive_agents(self):
        """Start frame: domain outline plus one cell per agent."""
        svg = render_snapshot(two_frame_rows(), GameConfig(), frame=0, title="start")

        assert svg.startswith("<svg")
        assert svg.count("<polygon") == 3
        assert svg.count("<circle") == 2
        assert "<title>start</title>" in svg

    def test_should_fade_captured_agents(self):
        """The captured evader has no cell and a faded marker."""
        svg = render_snapshot(two_frame_rows(), GameConfig(), frame=1)

        assert svg.count("<polygon") == 2
        assert 'fill-opacity="0.3"' in svg
        assert svg.count("<polyline") == 2

    def test_should_write_three_files(self, tmp_path):
        result = EpisodeResult(capture_times={1: 0.01}, trajectories=two_frame_rows(),
                               terminated_by="capture")
        paths = write_snapshots(result, GameConfig(), tmp_path)

        assert [p.name for p in paths] == ["snapshot_0.svg", "snapshot_1.svg", "snapshot_2.svg"]
        assert all(p.exists() for p in paths)


class TestDensityStrip:
    """Allocation rollout strips."""

    def test_should_draw_one_panel_per_step(self):
        svg = render_density_strip(rollout(3))

        assert svg.count("<g ") == 3
        assert svg.count('width="30" height="30"') == 12
        assert "k = 2" in svg

    def test_should_mark_occupied_intruder_cells(self):
        """Only cells holding intruder mass get a circle."""
        svg = render_density_strip(rollout(2))
        assert svg.count("<circle") == 3

    def test_should_reject_empty_rollout(self):
        with pytest.raises(ValueError):
            render_density_strip([])

    def test_should_write_file(self, tmp_path):
        path = write_density_strip(rollout(2), tmp_path / "strip" / "density_strip.svg")
        assert path.read_text().startswith("<svg")


class TestTemplatePackaging:
    """Templates travel with the installed package."""

    ROOT = Path(__file__).resolve().parents[3]

    def test_should_declare_every_template_as_package_data(self):
        """Each template matches a package-data glob of a real package."""
        setuptools_table = tomllib.loads((self.ROOT / "pyproject.toml").read_text())['tool']['setuptools']
        package_data = setuptools_table['package-data']
        templates = sorted((self.ROOT / "src" / "templates").glob("*.svg"))

        assert templates
        for template in templates:
            owners = [
                package for package, patterns in package_data.items()
                if (self.ROOT / package.replace(".", "/") / "__init__.py").is_file()
                and any(
                    template.relative_to(self.ROOT / package.replace(".", "/")).match(p)
                    for p in patterns
                )
            ]
            assert owners, f"{template.name} is not shipped"
