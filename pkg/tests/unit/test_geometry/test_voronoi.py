import numpy as np
import pytest

from src.geometry.polygon import (
    CoincidentSitesError,
    DomainError,
    contains,
    point,
    polygon_area,
)
from src.geometry.voronoi import clipped_voronoi, nearest_site, shared_edge


def random_sites(rng, count):
    return rng.uniform(0.5, 9.5, size=(count, 2))


class TestClippedVoronoi:
    """Cell construction."""

    def test_should_split_arena_between_two_sites(self, arena):
        """Two sites mirrored about x = 5 each own half the arena."""
        diagram = clipped_voronoi([(2.5, 5.0), (7.5, 5.0)], arena)

        assert diagram.cell_area(0) == pytest.approx(50.0)
        assert diagram.cell_area(1) == pytest.approx(50.0)
        assert diagram.are_neighbors(0, 1)

    def test_should_give_whole_domain_to_single_site(self, arena):
        """A lone site owns the arena."""
        diagram = clipped_voronoi([(3.0, 4.0)], arena)
        assert diagram.cell_area(0) == pytest.approx(100.0)
        assert diagram.neighbors == [[]]

    def test_should_tile_domain(self, arena, rng):
        """Cell areas sum to the domain area and each site lies in its own cell."""
        for count in (2, 5, 12):
            sites = random_sites(rng, count)
            diagram = clipped_voronoi(sites, arena)

            total = sum(diagram.cell_area(i) for i in range(count))
            assert total == pytest.approx(100.0, rel=1e-6)
            for i in range(count):
                assert contains(diagram.cells[i], sites[i])

    def test_should_have_symmetric_adjacency(self, arena, rng):
        """j neighbors i exactly when i neighbors j."""
        diagram = clipped_voronoi(random_sites(rng, 10), arena)
        for i, row in enumerate(diagram.neighbors):
            for j in row:
                assert i in diagram.neighbors[j]

    def test_should_mirror_cells_under_reflection(self, arena, rng):
        """Reflecting every site about x = 5 reflects every cell and keeps adjacency."""
        for count in (2, 4, 7):
            sites = random_sites(rng, count)
            mirrored = sites * np.array([-1.0, 1.0]) + np.array([10.0, 0.0])

            diagram = clipped_voronoi(sites, arena)
            reflected = clipped_voronoi(mirrored, arena)

            for i in range(count):
                assert reflected.cell_area(i) == pytest.approx(diagram.cell_area(i), rel=1e-9)
                expected = diagram.cells[i].vertices * np.array([-1.0, 1.0]) + np.array([10.0, 0.0])
                assert sorted(map(tuple, np.round(reflected.cells[i].vertices, 9))) == sorted(
                    map(tuple, np.round(expected, 9))
                )
                assert sorted(reflected.neighbors[i]) == sorted(diagram.neighbors[i])

    def test_should_not_link_separated_sites(self, arena):
        """Outer sites of three collinear points share no boundary."""
        diagram = clipped_voronoi([(1, 5), (5, 5), (9, 5)], arena)
        assert not diagram.are_neighbors(0, 2)
        assert shared_edge(diagram, 0, 2) is None

    def test_should_match_brute_force_classification(self, arena, rng):
        """Sampled points falling nearest each site estimate its cell area."""
        samples = rng.uniform(0.0, 10.0, size=(20_000, 2))
        for _ in range(20):
            sites = random_sites(rng, int(rng.integers(2, 9)))
            diagram = clipped_voronoi(sites, arena)

            owner = np.argmin(
                np.linalg.norm(samples[:, None, :] - sites[None, :, :], axis=2), axis=1
            )
            for i in range(len(sites)):
                estimate = 100.0 * np.mean(owner == i)
                assert abs(diagram.cell_area(i) - estimate) <= 2.0

    @pytest.mark.slow
    def test_should_match_brute_force_on_large_sample(self, arena, rng):
        """Large-sample agreement within 1% of the arena."""
        samples = rng.uniform(0.0, 10.0, size=(100_000, 2))
        for _ in range(100):
            sites = random_sites(rng, int(rng.integers(2, 11)))
            diagram = clipped_voronoi(sites, arena)
            owner = np.argmin(
                np.linalg.norm(samples[:, None, :] - sites[None, :, :], axis=2), axis=1
            )
            for i in range(len(sites)):
                assert abs(diagram.cell_area(i) - 100.0 * np.mean(owner == i)) <= 1.0

    def test_should_reject_coincident_sites(self, arena):
        """Duplicate sites cannot be tessellated."""
        with pytest.raises(CoincidentSitesError):
            clipped_voronoi([(1, 1), (1, 1)], arena)

    def test_should_reject_sites_outside_domain(self, arena):
        """Every site must lie in the domain."""
        with pytest.raises(DomainError):
            clipped_voronoi([(1, 1), (11, 1)], arena)

    def test_should_reject_empty_site_list(self, arena):
        """At least one site is required."""
        with pytest.raises(DomainError):
            clipped_voronoi(np.zeros((0, 2)), arena)


class TestSharedEdge:
    """Boundaries between adjacent cells."""

    def test_should_return_bisector_segment(self, arena):
        """Sites mirrored about x = 5 share the full vertical line x = 5."""
        diagram = clipped_voronoi([(2.5, 5.0), (7.5, 5.0)], arena)
        edge = shared_edge(diagram, 0, 1)

        assert edge.length == pytest.approx(10.0)
        np.testing.assert_allclose(edge.centroid, [5.0, 5.0])

    def test_should_reverse_orientation_for_swapped_indices(self, arena):
        """shared_edge(j, i) is shared_edge(i, j) reversed."""
        diagram = clipped_voronoi([(2.5, 3.0), (7.5, 6.0)], arena)
        forward = shared_edge(diagram, 0, 1)
        backward = shared_edge(diagram, 1, 0)

        np.testing.assert_array_equal(forward.a, backward.b)
        np.testing.assert_array_equal(forward.b, backward.a)

    def test_should_refuse_same_index(self, arena):
        """A cell has no shared edge with itself."""
        diagram = clipped_voronoi([(2.5, 5.0), (7.5, 5.0)], arena)
        with pytest.raises(ValueError):
            shared_edge(diagram, 1, 1)


class TestNearestSite:
    def test_should_pick_closest_site(self, arena):
        """The query is assigned to the nearer site."""
        diagram = clipped_voronoi([(2.5, 5.0), (7.5, 5.0)], arena)
        assert nearest_site(diagram, point(9, 9)) == 1
        assert nearest_site(diagram, point(0, 0)) == 0

    def test_should_agree_with_cell_membership(self, arena, rng):
        """A point strictly inside cell i is nearest to site i."""
        diagram = clipped_voronoi(random_sites(rng, 6), arena)
        for i, cell in enumerate(diagram.cells):
            assert nearest_site(diagram, cell.vertices.mean(axis=0)) == i
            assert polygon_area(cell) > 0
