import math

import numpy as np
import pytest

import helpers
from leafclust import (
    TWO_PI,
    CcdSequence,
    DistanceKind,
    DistanceMatrix,
    DistanceTag,
    density_from_ccd,
    dist_hellinger_sq,
    dist_l1,
    dist_moment_euclidean,
    dist_sup,
    distance_matrix,
    merge_breakpoints,
    pair_distance,
    rotate_density,
)

UNIFORM = density_from_ccd(CcdSequence("u", np.ones(4)))
TWO_STEP = density_from_ccd(CcdSequence("t", np.array([1.0, 3.0])))
# Unit masses on (0, pi/2] and (pi, 3pi/2]: disjoint supports.
QUAD_A = density_from_ccd(CcdSequence("qa", np.array([1.0, 0.0, 0.0, 0.0])))
QUAD_B = density_from_ccd(CcdSequence("qb", np.array([0.0, 0.0, 1.0, 0.0])))

ALL_KINDS = [
    DistanceKind(DistanceTag.L1),
    DistanceKind(DistanceTag.SUP),
    DistanceKind(DistanceTag.HELLINGER_SQ),
    DistanceKind(DistanceTag.MOMENT_EUCLIDEAN, 5),
]


class TestMergeBreakpoints:
    def test_identical_grids(self):
        breaks, fh, gh = merge_breakpoints(UNIFORM, UNIFORM)
        np.testing.assert_array_equal(breaks, UNIFORM.breakpoints)
        np.testing.assert_array_equal(fh, gh)

    def test_nested_grids(self):
        breaks, fh, gh = merge_breakpoints(TWO_STEP, UNIFORM)
        assert breaks.size - 1 == 4
        np.testing.assert_array_equal(breaks, UNIFORM.breakpoints)

    def test_refinement_reproduces_each_density(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            f = helpers.random_density(rng)
            g = helpers.random_density(rng)
            breaks, fh, gh = merge_breakpoints(f, g)
            assert breaks[0] == 0.0 and breaks[-1] == TWO_PI
            # covers the circle up to one ulp of summation error
            assert abs(float(np.sum(np.diff(breaks))) - TWO_PI) <= np.spacing(TWO_PI)
            lengths = np.diff(breaks)
            assert abs(float(np.sum(fh * lengths)) - 1.0) <= 1e-12
            assert abs(float(np.sum(gh * lengths)) - 1.0) <= 1e-12
            probes = rng.uniform(1e-9, TWO_PI, 100)
            idx = np.searchsorted(breaks, probes, side="left") - 1
            np.testing.assert_array_equal(f.evaluate(probes), fh[idx])
            np.testing.assert_array_equal(g.evaluate(probes), gh[idx])


class TestWorkedValues:
    def test_identical_densities_are_at_zero(self):
        assert dist_l1(UNIFORM, UNIFORM) == 0.0
        assert dist_sup(UNIFORM, UNIFORM) == 0.0
        assert dist_hellinger_sq(UNIFORM, UNIFORM) == 0.0
        assert dist_moment_euclidean(UNIFORM, UNIFORM, 5) == 0.0

    def test_uniform_vs_two_step(self):
        assert dist_l1(UNIFORM, TWO_STEP) == pytest.approx(0.5, abs=1e-12)
        assert dist_sup(UNIFORM, TWO_STEP) == pytest.approx(1 / (4 * math.pi), abs=1e-12)
        expected_h = 2.0 - (1.0 + math.sqrt(3.0)) / math.sqrt(2.0)
        assert dist_hellinger_sq(UNIFORM, TWO_STEP) == pytest.approx(expected_h, abs=1e-12)
        assert dist_moment_euclidean(UNIFORM, TWO_STEP, 1) == pytest.approx(
            1 / math.pi, abs=1e-12)

    def test_disjoint_supports(self):
        assert dist_l1(QUAD_A, QUAD_B) == pytest.approx(2.0, abs=1e-12)
        assert dist_hellinger_sq(QUAD_A, QUAD_B) == pytest.approx(2.0, abs=1e-12)
        assert dist_sup(QUAD_A, QUAD_B) == pytest.approx(2 / math.pi, abs=1e-12)

    def test_moment_distance_from_uniform_is_moment_norm(self):
        rng = np.random.default_rng(11)
        g = helpers.random_density(rng)
        from leafclust import trig_moments
        norm = float(np.linalg.norm(trig_moments(g, 5).as_vector()))
        assert dist_moment_euclidean(UNIFORM, g, 5) == pytest.approx(norm, abs=1e-12)

    def test_moment_distance_rejects_zero_order(self):
        with pytest.raises(ValueError):
            dist_moment_euclidean(UNIFORM, TWO_STEP, 0)


class TestMetricProperties:
    def test_symmetry_is_bitwise(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            f = helpers.random_density(rng)
            g = helpers.random_density(rng)
            assert dist_l1(f, g) == dist_l1(g, f)
            assert dist_sup(f, g) == dist_sup(g, f)
            assert dist_hellinger_sq(f, g) == dist_hellinger_sq(g, f)
            assert dist_moment_euclidean(f, g, 4) == dist_moment_euclidean(g, f, 4)

    def test_bounds(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            f = helpers.random_density(rng)
            g = helpers.random_density(rng)
            assert 0.0 <= dist_l1(f, g) <= 2.0
            assert 0.0 <= dist_hellinger_sq(f, g) <= 2.0
            r = 3
            assert dist_moment_euclidean(f, g, r) <= 2.0 * math.sqrt(2 * r)

    def test_triangle_inequality_l1_sup_moments(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            f, g, h = (helpers.random_density(rng) for _ in range(3))
            for fn in (dist_l1, dist_sup, lambda a, b: dist_moment_euclidean(a, b, 5)):
                assert fn(f, h) <= fn(f, g) + fn(g, h) + 1e-12

    def test_rotation_congruence(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            f = helpers.random_density(rng)
            g = helpers.random_density(rng)
            mu = rng.uniform(0.0, TWO_PI)
            fr, gr = rotate_density(f, mu), rotate_density(g, mu)
            assert dist_l1(fr, gr) == pytest.approx(dist_l1(f, g), abs=1e-12)
            assert dist_sup(fr, gr) == pytest.approx(dist_sup(f, g), abs=1e-12)
            assert dist_hellinger_sq(fr, gr) == pytest.approx(
                dist_hellinger_sq(f, g), abs=1e-12)


class TestGridOracle:
    def test_l1_and_hellinger_match_midpoint_grid(self):
        rng = np.random.default_rng(16)
        for _ in range(4):
            f = helpers.random_density(rng, max_intervals=8, spread=0.15)
            g = helpers.random_density(rng, max_intervals=8, spread=0.15)
            assert dist_l1(f, g) == pytest.approx(helpers.grid_l1(f, g), abs=1e-6)
            assert dist_hellinger_sq(f, g) == pytest.approx(
                helpers.grid_hellinger_sq(f, g), abs=1e-6)

    def test_sup_matches_dense_grid_max(self):
        rng = np.random.default_rng(17)
        for _ in range(4):
            f = helpers.random_density(rng, max_intervals=8, spread=0.15)
            g = helpers.random_density(rng, max_intervals=8, spread=0.15)
            assert dist_sup(f, g) == pytest.approx(helpers.grid_sup(f, g), abs=1e-6)


class TestDistanceMatrix:
    def test_two_identical_densities(self):
        dm = distance_matrix([UNIFORM, UNIFORM], ["a", "b"], ALL_KINDS[0])
        np.testing.assert_array_equal(dm.entries, np.zeros((2, 2)))

    def test_duplicate_density_gives_zero_entry(self):
        dm = distance_matrix([UNIFORM, TWO_STEP, UNIFORM], ["a", "b", "c"],
                             DistanceKind(DistanceTag.L1))
        assert dm.entries[0, 2] == 0.0
        np.testing.assert_array_equal(dm.entries, dm.entries.T)

    @pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.name)
    def test_matches_pairwise_recomputation(self, kind):
        rng = np.random.default_rng(18)
        densities = [helpers.random_density(rng) for _ in range(10)]
        labels = [f"d{i}" for i in range(10)]
        dm = distance_matrix(densities, labels, kind)
        for i in range(10):
            for j in range(i + 1, 10):
                expected = pair_distance(densities[i], densities[j], kind)
                assert abs(dm.entries[i, j] - expected) <= 1e-15

    def test_rejects_duplicate_labels(self):
        with pytest.raises(ValueError, match="duplicate"):
            distance_matrix([UNIFORM, TWO_STEP], ["a", "a"], ALL_KINDS[0])

    def test_rejects_single_density(self):
        with pytest.raises(ValueError):
            distance_matrix([UNIFORM], ["a"], ALL_KINDS[0])

    def test_validator_rejects_asymmetry(self):
        bad = np.array([[0.0, 1.0], [1.0 + 1e-15, 0.0]])
        with pytest.raises(ValueError, match="symmetric"):
            DistanceMatrix(("a", "b"), bad, ALL_KINDS[0])

    def test_validator_rejects_nonzero_diagonal(self):
        bad = np.array([[1e-300, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError, match="diagonal"):
            DistanceMatrix(("a", "b"), bad, ALL_KINDS[0])

    def test_validator_rejects_negative_entries(self):
        bad = np.array([[0.0, -1.0], [-1.0, 0.0]])
        with pytest.raises(ValueError):
            DistanceMatrix(("a", "b"), bad, ALL_KINDS[0])


def test_kind_requires_positive_moment_order():
    with pytest.raises(ValueError):
        DistanceKind(DistanceTag.MOMENT_EUCLIDEAN, 0)
