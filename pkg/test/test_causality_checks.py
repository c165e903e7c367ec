#!/usr/bin/env python3
"""
Tests for the distinction and reflectivity predicates.
"""

import os
import sys
import unittest

import numpy as np

# Add the parent directory to the path to import the package
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dkit.causality_checks import (FIXTURES, causality_report, distinction_report, eq1_relations,
                                   inclusion_equivalence_check, load_fixture, reflectivity_failures,
                                   reflectivity_report, relation_D)
from dkit.distance_core import DistanceMatrix, Relation
from dkit.geometry_models import Minkowski, sample


class TestDistinction(unittest.TestCase):
    """Future, past and weak d-distinction on the shipped fixtures."""

    def test_f1_is_not_future_distinguishing(self):
        """a and b share their future distance function."""
        report = distinction_report(load_fixture("f1"))
        self.assertFalse(report.passed("future_d_distinction"))
        self.assertEqual(report["future_d_distinction"].witness, ("a", "b"))
        self.assertTrue(report.passed("past_d_distinction"))
        self.assertTrue(report.passed("weak_d_distinction"))
        self.assertTrue(report.passed("future_or_past_d_distinction"))
        self.assertFalse(report.passed("d_distinction"))

    def test_chain_distinguishes(self):
        """All five predicates hold on a chain."""
        report = distinction_report(load_fixture("chain3"))
        self.assertTrue(report.all_passed)

    def test_twins_fail_weak_distinction(self):
        """Equal rows and equal columns break even weak distinction."""
        report = distinction_report(load_fixture("twins"))
        self.assertFalse(report.passed("weak_d_distinction"))
        self.assertEqual(report["weak_d_distinction"].witness, ("a", "b"))

    def test_n_poset_fails_both_one_sided_versions(self):
        """Future fails on (c, d), past on (a, b), weak still holds."""
        report = distinction_report(load_fixture("n_poset"))
        self.assertEqual(report["future_d_distinction"].witness, ("c", "d"))
        self.assertEqual(report["past_d_distinction"].witness, ("a", "b"))
        self.assertFalse(report.passed("future_or_past_d_distinction"))
        self.assertTrue(report.passed("weak_d_distinction"))

    def test_tolerance_merges_close_rows(self):
        """Rows differing below the tolerance count as equal."""
        D = DistanceMatrix(("p", "q", "r"), np.array([[0, 0, 1.0], [0, 0, 1.0 + 1e-12], [0, 0, 0]]))
        self.assertFalse(distinction_report(D).passed("future_d_distinction"))
        self.assertTrue(distinction_report(D.with_tol(1e-15)).passed("future_d_distinction"))


class TestReflectivity(unittest.TestCase):
    """One-sided and strong reflectivity with witnesses."""

    def test_f1_is_past_nonreflective(self):
        """d_a = d_b while d^b exceeds d^a at e."""
        report = reflectivity_report(load_fixture("f1"))
        self.assertTrue(report.passed("future_d_reflectivity"))
        self.assertFalse(report.passed("past_d_reflectivity"))
        self.assertEqual(report["past_d_reflectivity"].witness, ("b", "a"))
        self.assertEqual(report["past_d_reflectivity"].third, "e")
        self.assertEqual(report["past_d_reflectivity"].failures, 1)
        self.assertFalse(report.passed("d_reflectivity"))
        self.assertFalse(report.passed("strong_past_reflectivity"))
        self.assertTrue(report.passed("strong_future_reflectivity"))
        self.assertFalse(report.passed("causal_continuity"))

    def test_future_nonreflecting_fixture(self):
        """d^p = d^q but d_q exceeds d_p at r."""
        report = reflectivity_report(load_fixture("future_nonreflecting"))
        self.assertFalse(report.passed("future_d_reflectivity"))
        self.assertEqual(report["future_d_reflectivity"].witness, ("p", "q"))
        self.assertEqual(report["future_d_reflectivity"].third, "r")
        self.assertTrue(report.passed("past_d_reflectivity"))

    def test_reflectivity_failures_lists_thirds(self):
        """The failure list matches the report witness."""
        D = load_fixture("f1")
        self.assertEqual(reflectivity_failures(D, "past"), [("b", "a", "e")])
        self.assertEqual(reflectivity_failures(D, "future"), [])
        with self.assertRaises(ValueError):
            reflectivity_failures(D, "sideways")

    def test_chain_is_causally_continuous(self):
        """The three-chain passes every predicate."""
        report = causality_report(load_fixture("chain3"))
        self.assertTrue(report.all_passed)
        self.assertEqual(report.i_source, "chronology")

    def test_ground_truth_relation_must_cover_labels(self):
        """A ground-truth I over other labels is rejected."""
        D = load_fixture("chain3")
        with self.assertRaises(ValueError):
            reflectivity_report(D, Relation(("a", "b"), np.zeros((2, 2), dtype=bool)))

    def test_ground_truth_relation_is_used(self):
        """Strong reflectivity follows the supplied relation."""
        D = load_fixture("chain3")
        I = Relation(D.labels, D.entries > 0)
        report = reflectivity_report(D, I)
        self.assertEqual(report.i_source, "ground_truth")
        self.assertTrue(report.passed("strong_past_reflectivity"))


class TestLattice(unittest.TestCase):
    """Implications between predicates hold on every report."""

    def test_fixtures_respect_the_lattice(self):
        """No fixture breaks the implication lattice."""
        for name in FIXTURES:
            with self.subTest(fixture=name):
                self.assertEqual(causality_report(load_fixture(name)).lattice_violations(), [])

    def test_random_longest_path_matrices(self):
        """Longest-path matrices of random DAGs respect the lattice."""
        rng = np.random.default_rng(7)
        for trial in range(200):
            n = int(rng.integers(2, 9))
            weights = np.triu(rng.integers(0, 3, size=(n, n)).astype(float), k=1)
            weights[weights > 0] = rng.uniform(0.5, 2.0, size=int((weights > 0).sum()))
            entries = weights.copy()
            for k in range(n):
                for i in range(k):
                    for j in range(k + 1, n):
                        if entries[i, k] > 0 and entries[k, j] > 0:
                            entries[i, j] = max(entries[i, j], entries[i, k] + entries[k, j])
            D = DistanceMatrix(tuple(f"v{i}" for i in range(n)), entries)
            self.assertEqual(causality_report(D).lattice_violations(), [], msg=f"trial {trial}")


class TestReconstructedRelations(unittest.TestCase):
    """Relation D and the two one-sided reconstructions."""

    def test_relation_D_on_f1(self):
        """(a, b) is in D but (b, a) is not."""
        rel = relation_D(load_fixture("f1"))
        self.assertIn(("a", "b"), rel)
        self.assertNotIn(("b", "a"), rel)
        self.assertIn(("e", "c"), rel)
        self.assertTrue(rel.is_reflexive())

    def test_eq1_disagree_on_f1(self):
        """The one-sided relations differ at (b, a)."""
        result = eq1_relations(load_fixture("f1"))
        self.assertFalse(result.equal)
        self.assertEqual(result.witness, ("b", "a"))

    def test_eq1_agree_on_chain(self):
        """A chain reconstructs the same order from both sides."""
        result = eq1_relations(load_fixture("chain3"))
        self.assertTrue(result.equal)
        self.assertIsNone(result.to_dict()["witness"])


class TestInclusionEquivalence(unittest.TestCase):
    """Row comparisons against sampled chronological futures."""

    def test_exact_direction_holds_on_minkowski_grid(self):
        """d_q <= d_p implies the sampled inclusion."""
        space = sample(Minkowski(), 16, mode="grid")
        report = inclusion_equivalence_check(space)
        self.assertTrue(report.consistent)
        self.assertEqual(report.checks[0]["failures"], 0)
        self.assertFalse(report.checks[1]["exact"])


class TestFixtures(unittest.TestCase):

    def test_unknown_fixture(self):
        with self.assertRaises(ValueError):
            load_fixture("nope")


if __name__ == '__main__':
    unittest.main(verbosity=2)
