#!/usr/bin/env python3
"""
Tests for finite topologies and semicontinuity probes.
"""

import math
import os
import sys
import unittest

import numpy as np

# Add the parent directory to the path to import the package
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dkit.causality_checks import load_fixture
from dkit.finsler_lab import RandersNorm
from dkit.geometry_models import FlatFinsler, Minkowski, SlitMinkowski, sample
from dkit.topology_lab import (MAX_OPENS, FiniteTopology, alexandrov_topology, consistency_verdict, finer_than,
                               initial_topology, is_hausdorff, reflectivity_continuity_consistency,
                               semicontinuity_probe)


def _opens(T):
    return [sorted(s) for s in T.opens()]


class TestFiniteTopology(unittest.TestCase):
    """Opens, minimal neighbourhoods and comparison."""

    def test_discrete_and_indiscrete(self):
        """The two extreme topologies on three points."""
        ground = ("x", "y", "z")
        self.assertEqual(len(FiniteTopology.discrete(ground).opens()), 8)
        self.assertEqual(_opens(FiniteTopology.indiscrete(ground)), [[], ["x", "y", "z"]])
        self.assertTrue(FiniteTopology.indiscrete(ground).is_indiscrete())

    def test_from_sets_generates_lattice(self):
        """Intersections and unions of the subbasis are added."""
        T = FiniteTopology.from_sets(("x", "y", "z"), [{"x", "y"}, {"y", "z"}])
        self.assertEqual(_opens(T), [[], ["y"], ["x", "y"], ["y", "z"], ["x", "y", "z"]])
        self.assertTrue(T.is_lattice())
        self.assertTrue(T.is_open({"y"}))
        self.assertFalse(T.is_open({"x"}))
        self.assertEqual(T.neighbourhood("x"), frozenset({"x", "y"}))

    def test_generated_from_opens_is_the_same(self):
        """Regenerating from the opens changes nothing."""
        T = FiniteTopology.from_sets(("x", "y", "z"), [{"x"}, {"x", "z"}])
        np.testing.assert_array_equal(T.generated().minimal_neighbourhoods(), T.minimal_neighbourhoods())

    def test_finer_than(self):
        """Discrete is finer than everything; comparison needs a shared ground."""
        ground = ("x", "y", "z")
        T = FiniteTopology.from_sets(ground, [{"x", "y"}])
        self.assertTrue(finer_than(FiniteTopology.discrete(ground), T))
        self.assertFalse(finer_than(T, FiniteTopology.discrete(ground)))
        self.assertTrue(finer_than(T, FiniteTopology.indiscrete(ground)))
        with self.assertRaises(ValueError):
            finer_than(T, FiniteTopology.discrete(("x", "y")))

    def test_materialization_caps(self):
        """Large grounds and large families refuse to enumerate."""
        with self.assertRaises(ValueError):
            FiniteTopology.discrete([f"p{i}" for i in range(61)]).opens()
        big = FiniteTopology.discrete([f"p{i}" for i in range(17)])
        self.assertGreater(2 ** 17, MAX_OPENS)
        with self.assertRaises(ValueError):
            big.opens()
        report = big.to_dict()
        self.assertIsNone(report["opens"])
        self.assertIn("note", report)
        self.assertTrue(is_hausdorff(big)[0])


class TestAlexandrov(unittest.TestCase):
    """Topology generated by chronological diamonds."""

    def test_f1(self):
        """F1: only {a, b} and the whole ground are nontrivial opens."""
        T = alexandrov_topology(load_fixture("f1"))
        self.assertEqual(_opens(T), [[], ["a", "b"], ["a", "b", "c", "e"]])
        self.assertEqual(is_hausdorff(T), (False, ("a", "b")))

    def test_chain3(self):
        """The three-chain: {b} is the only proper nonempty open."""
        T = alexandrov_topology(load_fixture("chain3"))
        self.assertEqual(_opens(T), [[], ["b"], ["a", "b", "c"]])
        self.assertEqual(is_hausdorff(T), (False, ("a", "c")))

    def test_subbasis_reproduces_minimal_neighbourhoods(self):
        """The diamond subbasis generates the same topology."""
        T = alexandrov_topology(load_fixture("f1"))
        rebuilt = FiniteTopology(T.ground, subbasis=T.subbasis)
        np.testing.assert_array_equal(rebuilt.minimal_neighbourhoods(), T.minimal_neighbourhoods())

    def test_minkowski_with_probes_is_discrete(self):
        """Probe diamonds isolate every grid event."""
        space = sample(Minkowski(), 9, mode="grid_with_probes")
        T = alexandrov_topology(space.matrix)
        self.assertEqual(T.ground, space.ground)
        self.assertTrue(T.is_discrete())
        self.assertEqual(is_hausdorff(T), (True, None))


class TestInitialTopology(unittest.TestCase):
    """Coarsest topology making every d_p and d^p continuous."""

    def test_chain3_is_discrete(self):
        """d_a takes three distinct values on the chain."""
        T = initial_topology(load_fixture("chain3"))
        self.assertTrue(T.is_discrete())
        self.assertTrue(finer_than(T, alexandrov_topology(load_fixture("chain3"))))
        self.assertFalse(finer_than(alexandrov_topology(load_fixture("chain3")), T))

    def test_twins_are_glued(self):
        """Points with equal rows and columns share a neighbourhood."""
        T = initial_topology(load_fixture("twins"))
        self.assertEqual(T.neighbourhood("a"), frozenset({"a", "b"}))
        self.assertEqual(is_hausdorff(T), (False, ("a", "b")))

    def test_subbasis_reproduces_minimal_neighbourhoods(self):
        """Threshold preimages generate the same topology."""
        T = initial_topology(load_fixture("future_nonreflecting"))
        rebuilt = FiniteTopology(T.ground, subbasis=T.subbasis)
        np.testing.assert_array_equal(rebuilt.minimal_neighbourhoods(), T.minimal_neighbourhoods())


class TestSemicontinuityProbe(unittest.TestCase):
    """Limits of d along sequences converging to a target."""

    def test_minkowski_is_continuous(self):
        """Both directions pass at a timelike target."""
        model = Minkowski()
        for direction in ("lower", "upper"):
            report = semicontinuity_probe(model, (0.0, 0.0), (1.0, 0.5), direction)
            self.assertTrue(report.passed)
            self.assertAlmostEqual(report.functions["future"]["target_value"], math.sqrt(0.75), places=12)
            self.assertLess(report.functions["future"]["gap"], 1e-3)

    def test_randers_jump_at_left_null_ray(self):
        """Approaching the left null ray from inside the cone, d tends to b t while d = 0 on the ray."""
        model = FlatFinsler(RandersNorm(0.2))
        upper = semicontinuity_probe(model, (0.0, 0.0), (1.0, -1.0), "upper", approach=(0.0, 1.0))
        self.assertFalse(upper.passed)
        self.assertAlmostEqual(upper.functions["future"]["limit"], 0.2, places=3)
        self.assertTrue(upper.functions["past"]["passed"])
        lower = semicontinuity_probe(model, (0.0, 0.0), (1.0, -1.0), "lower", approach=(0.0, 1.0))
        self.assertTrue(lower.passed)

    def test_table_tracks_tail_extremes(self):
        """The table has one row per radius with running tail bounds."""
        report = semicontinuity_probe(Minkowski(), (0.0, 0.0), (1.0, 0.0), "upper", approach=(1.0, 0.0))
        rows = report.table()
        self.assertEqual(len(rows), 12)
        self.assertLessEqual(rows[0]["future_liminf"], rows[0]["future_limsup"])
        self.assertEqual(rows[-1]["future_liminf"], rows[-1]["future_value"])

    def test_rejects_bad_input(self):
        """Unknown directions and targets off the domain raise."""
        with self.assertRaises(ValueError):
            semicontinuity_probe(Minkowski(), (0.0, 0.0), (1.0, 0.0), "sideways")
        with self.assertRaises(ValueError):
            semicontinuity_probe(SlitMinkowski(), (-1.0, 0.0), (0.0, -1.0), "upper")


class TestConsistency(unittest.TestCase):
    """Reflectivity against probe outcomes."""

    def test_verdict_table(self):
        """Passing probes with failing reflectivity, or failing reflectivity without an upper failure, is inconsistent."""
        self.assertEqual(consistency_verdict(True, True, False), "CONSISTENT")
        self.assertEqual(consistency_verdict(True, False, False), "INCONSISTENT")
        self.assertEqual(consistency_verdict(False, False, True), "CONSISTENT")
        self.assertEqual(consistency_verdict(False, False, False), "INCONSISTENT")
        self.assertEqual(consistency_verdict(False, True, True), "CONSISTENT")

    def test_minkowski_sample(self):
        """A grid in Minkowski space is reflective and every probe passes."""
        model = Minkowski()
        space = sample(model, 9, mode="grid_with_probes")
        result = reflectivity_continuity_consistency(model, space)
        self.assertTrue(result.d_reflectivity)
        self.assertTrue(result.probes_all_pass)
        self.assertEqual(result.verdict, "CONSISTENT")
        self.assertTrue(result.consistent)
        self.assertGreater(result.probes_run, 0)
        self.assertEqual(len(result.to_dict()["implications"]), 4)


if __name__ == '__main__':
    unittest.main(verbosity=2)
