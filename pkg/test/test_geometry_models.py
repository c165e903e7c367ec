#!/usr/bin/env python3
"""
Tests for the model catalog, sampling and the grid oracle.
"""

import math
import os
import sys
import tempfile
import unittest

import numpy as np

# Add the parent directory to the path to import the package
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dkit.finsler_lab import RandersNorm
from dkit.geometry_models import (CtcCylinder, FlatFinsler, GridOracle, Minkowski, PuncturedMinkowski,
                                  SlitMinkowski, build_model, oracle_convergence, random_timelike_pairs,
                                  sample, sample_from_points, verify_against_grid_oracle)


class TestExactDistances(unittest.TestCase):
    """Closed-form d, I and J of each model."""

    def test_minkowski(self):
        """Proper time of a straight segment; zero off the cone."""
        model = Minkowski()
        self.assertAlmostEqual(float(model.exact_d((0, 0), (2, 1))), math.sqrt(3.0), places=12)
        self.assertEqual(float(model.exact_d((0, 0), (1, 2))), 0.0)
        self.assertTrue(model.exact_J((0, 0), (1, 1)))
        self.assertFalse(model.exact_I((0, 0), (1, 1)))
        with self.assertRaises(ValueError):
            model.exact_d((0, 0), (5, 0))

    def test_cylinder_is_totally_vicious(self):
        """Every distance is infinite, the diagonal included."""
        model = CtcCylinder()
        self.assertTrue(model.exact_d((0, 0), (0, 0)).is_inf)
        self.assertTrue(model.exact_d((1, 0), (-1, 2)).is_inf)
        self.assertFalse(model.diamond_precompact((0, 0), (1, 0)))
        with self.assertRaises(ValueError):
            CtcCylinder(period=-1.0)

    def test_slit_bends_around_the_tip(self):
        """Segments through the slit detour through the origin."""
        model = SlitMinkowski()
        self.assertFalse(bool(model.contains((0.0, -1.0))))
        self.assertTrue(bool(model.contains((0.0, 1.0))))
        self.assertAlmostEqual(float(model.exact_d((-1, -0.5), (1, -0.5))), math.sqrt(3.0), places=12)
        self.assertAlmostEqual(float(model.exact_d((-1, 0.5), (1, 0.5))), 2.0, places=12)
        self.assertEqual(float(model.exact_d((-1, -1.5), (1, -1.5))), 0.0)

    def test_punctured(self):
        """Timelike pairs keep their distance; a null segment through the hole is cut."""
        model = PuncturedMinkowski()
        self.assertAlmostEqual(float(model.exact_d((-1, 0), (1, 0))), 2.0, places=12)
        self.assertFalse(model.exact_J((-1, -1), (1, 1)))
        self.assertTrue(Minkowski().exact_J((-1, -1), (1, 1)))
        self.assertFalse(bool(model.contains((0.0, 0.0))))

    def test_flat_randers(self):
        """d(p, q) = F(q - p) with the drift term."""
        model = FlatFinsler(RandersNorm(0.1))
        self.assertAlmostEqual(float(model.exact_d((0, 0), (1, 0.5))), math.sqrt(0.75) - 0.05, places=12)
        self.assertAlmostEqual(float(model.exact_d((1, 1), (2, 1.5))), math.sqrt(0.75) - 0.05, places=12)


class TestDiamonds(unittest.TestCase):
    """Precompactness of closed diamonds."""

    def test_minkowski(self):
        """Interior diamonds are precompact; those touching the box edge are not."""
        model = Minkowski()
        self.assertTrue(model.diamond_precompact((0, 0), (1, 0)))
        self.assertFalse(model.diamond_precompact((2, 0), (3, 0)))
        with self.assertRaises(ValueError):
            model.diamond_precompact((0, 0), (0, 1))

    def test_slit_and_punctured(self):
        """Diamonds meeting the removed set are not precompact."""
        slit = SlitMinkowski()
        self.assertFalse(slit.diamond_precompact((-1, -0.5), (1, -0.5)))
        self.assertTrue(slit.diamond_precompact((0.5, 0), (1.5, 0)))
        punctured = PuncturedMinkowski()
        self.assertFalse(punctured.diamond_precompact((-1, 0), (1, 0)))
        self.assertTrue(punctured.diamond_precompact((0.5, 0), (1.5, 0)))


class TestBuildModel(unittest.TestCase):

    def test_descriptors(self):
        """Scenario descriptors map onto catalog classes."""
        self.assertIsInstance(build_model({"kind": "slit_minkowski"}), SlitMinkowski)
        punctured = build_model({"kind": "punctured_minkowski", "point": [0.5, 0.0]})
        np.testing.assert_array_equal(punctured.point, [0.5, 0.0])
        finsler = build_model({"kind": "flat_finsler", "norm": {"kind": "randers", "b": 0.2}})
        self.assertEqual(finsler.norm.b, 0.2)
        self.assertEqual(build_model({"kind": "ctc_cylinder", "box": [[0, 2], [-1, 1]]}).period, 2.0)

    def test_rejects_unknown(self):
        with self.assertRaises(ValueError):
            build_model({"kind": "torus"})
        with self.assertRaises(ValueError):
            build_model({})
        with self.assertRaises(ValueError):
            build_model({"kind": "minkowski", "box": [[1, 0], [0, 1]]})


class TestSampling(unittest.TestCase):
    """Grid, poisson and probe sampling."""

    def test_grid_with_probes(self):
        """Each event gets one past and one future probe inside its own cones."""
        space = sample(Minkowski(), 9)
        self.assertEqual(len(space.ground), 9)
        self.assertEqual(space.matrix.n, 27)
        self.assertTrue(space.matrix.has_probes())
        self.assertEqual(space.probe_owner["e000+1"], "e000")
        self.assertAlmostEqual(space.probe_offset, space.spacing / 8.0)
        self.assertGreater(space.matrix.d("e000-1", "e000"), 0.0)
        self.assertGreater(space.matrix.d("e000", "e000+1"), 0.0)

    def test_probe_multiplier(self):
        """Multiplier k adds k probes on each side."""
        space = sample(Minkowski(), 4, probe_multiplier=3)
        self.assertEqual(space.matrix.n, 4 + 4 * 6)

    def test_poisson_is_seeded(self):
        """Equal seeds give equal samples."""
        a = sample(SlitMinkowski(), 30, mode="poisson", seed=4)
        b = sample(SlitMinkowski(), 30, mode="poisson", seed=4)
        np.testing.assert_array_equal(a.matrix.entries, b.matrix.entries)
        self.assertEqual(a.matrix.n, 30)

    def test_invalid_requests(self):
        """Bad sizes, modes and regions are rejected."""
        with self.assertRaises(ValueError):
            sample(Minkowski(), 10, mode="grid")
        with self.assertRaises(ValueError):
            sample(Minkowski(), 9, mode="lattice")
        with self.assertRaises(ValueError):
            sample(Minkowski(), 1)
        with self.assertRaises(ValueError):
            sample(Minkowski(), 9, region=((0, 5), (0, 1)))

    def test_sample_from_points(self):
        """Explicit coordinates keep their labels; exact relations follow the model."""
        space = sample_from_points(Minkowski(), [(0, 0), (1, 0), (2, 0)], labels=["a", "b", "c"])
        np.testing.assert_allclose(space.matrix.entries[0], [0, 1, 2])
        self.assertEqual(sorted(space.exact_I().pairs()), [("a", "b"), ("a", "c"), ("b", "c")])
        self.assertTrue(space.exact_J().is_reflexive())
        with self.assertRaises(ValueError):
            sample_from_points(SlitMinkowski(), [(0, -1)])

    def test_export(self):
        """Coordinates and matrix are written side by side."""
        space = sample(Minkowski(), 4)
        with tempfile.TemporaryDirectory() as tmp:
            coords_path, matrix_path = space.export(tmp)
            with open(coords_path) as f:
                lines = f.read().splitlines()
            self.assertEqual(lines[0], "label,t,x,probe_of")
            self.assertEqual(len(lines), 1 + 4 + 8)
            self.assertTrue(os.path.exists(matrix_path))


class TestGridOracle(unittest.TestCase):
    """Brute-force longest polygons bound d from below."""

    def test_vertical_pair_is_exact(self):
        """A pair on a grid line is reached exactly."""
        oracle = GridOracle(Minkowski(), resolution=32)
        self.assertAlmostEqual(oracle.longest((0.0, 0.0), (1.5, 0.0)), 1.5, places=9)

    def test_off_grid_endpoint(self):
        """An endpoint between grid rows is reached through a closing leg."""
        for resolution in (64, 128, 256):
            value = GridOracle(Minkowski(), resolution).longest((0.0, 0.0), (1.55, 0.0))
            self.assertAlmostEqual(value, 1.55, places=9, msg=f"resolution {resolution}")

    def test_slit_pair_is_bounded(self):
        """Around the slit the oracle stays below d and does not get worse when refined."""
        model = SlitMinkowski()
        p, q = (-1.0, -0.5), (1.0, -0.5)
        coarse = GridOracle(model, 32).longest(p, q)
        fine = GridOracle(model, 64).longest(p, q)
        self.assertLessEqual(fine, math.sqrt(3.0) + 1e-9)
        self.assertGreaterEqual(fine, coarse - 1e-12)

    def test_lower_bound_and_refinement(self):
        """The oracle never exceeds d and refines monotonically."""
        pairs = random_timelike_pairs(3, seed=1)
        result = oracle_convergence(Minkowski(), pairs, resolutions=(16, 32))
        self.assertTrue(result["lower_bound_ok"])
        self.assertLessEqual(result["mean_relative_gap"][1], result["mean_relative_gap"][0] + 1e-12)

    def test_non_causal_pair(self):
        """Spacelike pairs have oracle value zero."""
        self.assertEqual(GridOracle(Minkowski(), 16).longest((0.0, 0.0), (0.5, 1.5)), 0.0)

    def test_endpoint_validation(self):
        """Strict mode raises outside the domain; lenient mode returns zero."""
        with self.assertRaises(ValueError):
            GridOracle(SlitMinkowski(), 16).longest((0.0, -1.0), (1.0, -1.0))
        self.assertEqual(GridOracle(SlitMinkowski(), 16, strict_mode=False).longest((0.0, -1.0), (1.0, -1.0)), 0.0)
        with self.assertRaises(ValueError):
            GridOracle(Minkowski(), 1)

    def test_against_sample_pairs(self):
        """Labelled sample pairs carry their labels into the report."""
        model = Minkowski()
        space = sample(model, 9, mode="grid")
        report = verify_against_grid_oracle(model, space, 16, max_pairs=4)
        self.assertEqual(len(report.rows), 4)
        self.assertTrue(report.lower_bound_ok)
        self.assertTrue(all(isinstance(row["p"], str) for row in report.rows))


if __name__ == '__main__':
    unittest.main(verbosity=2)
