#!/usr/bin/env python3
"""
Tests for distance matrices, relations and the reverse triangle check.
"""

import math
import os
import sys
import tempfile
import unittest

import numpy as np

# Add the parent directory to the path to import the package
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dkit.distance_core import (DistanceMatrix, ExtReal, Relation, check_reverse_triangle, chronology,
                                diamond, diamond_masks, parse_ext)
from dkit.causality_checks import load_fixture


class TestExtReal(unittest.TestCase):
    """Extended reals in [0, inf]."""

    def test_saturating_addition(self):
        """inf absorbs every finite value."""
        self.assertTrue((ExtReal(math.inf) + 3.0).is_inf)
        self.assertTrue((2.0 + ExtReal(math.inf)).is_inf)
        self.assertEqual(float(ExtReal(1.5) + ExtReal(2.0)), 3.5)

    def test_comparisons_with_infinity(self):
        """inf equals inf and exceeds every finite value."""
        self.assertTrue(ExtReal(math.inf) == ExtReal(math.inf))
        self.assertTrue(ExtReal(5.0) < ExtReal(math.inf))
        self.assertTrue(ExtReal(math.inf) >= 1e300)

    def test_tolerance(self):
        """Values within tol compare equal."""
        self.assertTrue(ExtReal(1.0) == ExtReal(1.0 + 1e-12))
        self.assertFalse(ExtReal(1.0) == ExtReal(1.0 + 1e-6))

    def test_rejects_negative_and_nan(self):
        """Distances are never negative or NaN."""
        with self.assertRaises(ValueError):
            ExtReal(-1.0)
        with self.assertRaises(ValueError):
            ExtReal(float("nan"))

    def test_parse(self):
        """CSV cells accept decimals and inf."""
        self.assertTrue(math.isinf(parse_ext(" inf ")))
        self.assertEqual(parse_ext("2.5"), 2.5)
        with self.assertRaises(ValueError):
            parse_ext("abc")
        with self.assertRaises(ValueError):
            parse_ext("-0.5")


class TestDistanceMatrix(unittest.TestCase):
    """Construction, access and CSV input/output."""

    def setUp(self):
        """Set up the three-chain fixture."""
        self.chain = load_fixture("chain3")

    def test_validation(self):
        """Shape, NaN, negative entries and duplicate labels are rejected."""
        with self.assertRaises(ValueError):
            DistanceMatrix(("a", "b"), np.zeros((3, 3)))
        with self.assertRaises(ValueError):
            DistanceMatrix(("a", "b"), np.array([[0, np.nan], [0, 0]]))
        with self.assertRaises(ValueError):
            DistanceMatrix(("a", "b"), np.array([[0, -1.0], [0, 0]]))
        with self.assertRaises(ValueError):
            DistanceMatrix(("a", "a"), np.zeros((2, 2)))
        with self.assertRaises(ValueError):
            DistanceMatrix(("a", "b"), np.zeros((2, 2)), ground=("c",))

    def test_entries_are_read_only(self):
        """The stored array cannot be modified in place."""
        with self.assertRaises(ValueError):
            self.chain.entries[0, 1] = 5.0

    def test_rows_and_columns(self):
        """d_p is a row, d^p a column."""
        np.testing.assert_array_equal(self.chain.row("a"), [0, 1, 2])
        np.testing.assert_array_equal(self.chain.col("c"), [2, 1, 0])
        self.assertEqual(self.chain.d("a", "c"), 2.0)
        with self.assertRaises(ValueError):
            self.chain.row("z")

    def test_ground_defaults_to_labels(self):
        """Plain matrices quantify over every label."""
        self.assertEqual(self.chain.ground, ("a", "b", "c"))
        self.assertFalse(self.chain.has_probes())
        self.assertTrue(self.chain.with_ground(("a", "c")).has_probes())

    def test_transpose_is_time_dual(self):
        """d*(p, q) = d(q, p)."""
        dual = self.chain.transpose()
        self.assertEqual(dual.d("c", "a"), 2.0)
        self.assertEqual(dual.d("a", "c"), 0.0)

    def test_csv_round_trip_keeps_infinity(self):
        """to_csv then from_csv preserves values, inf included."""
        D = DistanceMatrix(("p", "q"), np.array([[0.0, math.inf], [0.25, 0.0]]))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "m.csv")
            D.to_csv(path)
            with open(path) as f:
                self.assertIn("inf", f.read())
            back = DistanceMatrix.from_csv(path)
        self.assertEqual(back.labels, ("p", "q"))
        np.testing.assert_array_equal(back.entries, D.entries)

    def test_csv_with_row_labels(self):
        """A leading label column is accepted."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "m.csv")
            with open(path, "w") as f:
                f.write("p,q\np,0,1\nq,0,0\n")
            D = DistanceMatrix.from_csv(path)
        self.assertEqual(D.d("p", "q"), 1.0)

    def test_csv_not_square(self):
        """Missing rows are reported."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "m.csv")
            with open(path, "w") as f:
                f.write("p,q\n0,1\n")
            with self.assertRaises(ValueError):
                DistanceMatrix.from_csv(path)


class TestRelationsAndDiamonds(unittest.TestCase):
    """Chronology, diamonds and relation algebra."""

    def setUp(self):
        """Set up fixtures."""
        self.chain = load_fixture("chain3")
        self.f1 = load_fixture("f1")

    def test_chronology(self):
        """I = {d > 0}."""
        I = chronology(self.chain)
        self.assertEqual(sorted(I.pairs()), [("a", "b"), ("a", "c"), ("b", "c")])
        self.assertTrue(I.is_transitive())
        self.assertTrue(I.is_antisymmetric())
        self.assertFalse(I.is_reflexive())

    def test_diamond(self):
        """I(a, c) = {b} in the three-chain."""
        self.assertEqual(diamond(self.chain, "a", "c"), frozenset({"b"}))
        self.assertEqual(diamond(self.chain, "a", "b"), frozenset())
        masks = diamond_masks(self.f1)
        e, c = self.f1.position("e"), self.f1.position("c")
        self.assertEqual({self.f1.labels[k] for k in np.nonzero(masks[e, c])[0]}, {"a", "b"})

    def test_relation_algebra(self):
        """Intersection, union, difference and subset on a common label list."""
        labels = ("a", "b")
        r = Relation(labels, np.array([[True, True], [False, True]]))
        s = Relation(labels, np.eye(2, dtype=bool))
        self.assertTrue(s.issubset(r))
        self.assertEqual(r & s, s)
        self.assertEqual(r | s, r)
        self.assertEqual(r.difference(s).pairs(), [("a", "b")])
        self.assertIn(("a", "b"), r)
        self.assertEqual(r.edges(), [("a", "b")])
        with self.assertRaises(ValueError):
            r & Relation(("x", "y"), np.eye(2, dtype=bool))

    def test_transitive_violation_witness(self):
        """A missing composite pair is reported with its middle point."""
        r = Relation(("a", "b", "c"), np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=bool))
        self.assertEqual(r.transitive_violations(), [("a", "b", "c")])

    def test_restrict(self):
        """Restriction keeps the induced sub-relation."""
        I = chronology(self.chain).restrict(("a", "c"))
        self.assertEqual(I.pairs(), [("a", "c")])
        with self.assertRaises(ValueError):
            chronology(self.chain).restrict(("a", "z"))


class TestReverseTriangle(unittest.TestCase):
    """Reverse triangle inequality over chronological triples."""

    def test_chain_passes_with_equality(self):
        """Longest chains realize equality."""
        report = check_reverse_triangle(load_fixture("chain3"))
        self.assertTrue(report.passed)
        self.assertEqual(report.checked_triples, 1)

    def test_violation_is_reported(self):
        """d(a, c) < d(a, b) + d(b, c) is caught with its triple."""
        D = DistanceMatrix(("a", "b", "c"), np.array([[0, 1, 1.5], [0, 0, 1], [0, 0, 0]]))
        report = check_reverse_triangle(D)
        self.assertFalse(report.passed)
        self.assertEqual(report.violations, [("a", "b", "c")])

    def test_infinite_entries(self):
        """inf through a middle point needs inf directly."""
        ok = DistanceMatrix(("a", "b", "c"), np.array([[0, math.inf, math.inf], [0, 0, 1], [0, 0, 0]]))
        self.assertTrue(check_reverse_triangle(ok).passed)
        bad = DistanceMatrix(("a", "b", "c"), np.array([[0, math.inf, 3.0], [0, 0, 1], [0, 0, 0]]))
        self.assertFalse(check_reverse_triangle(bad).passed)

    def test_spacelike_triples_are_skipped(self):
        """Only chronological triples are checked."""
        D = DistanceMatrix(("a", "b", "c"), np.array([[0, 0, 1.0], [0, 0, 5.0], [0, 0, 0]]))
        report = check_reverse_triangle(D)
        self.assertTrue(report.passed)
        self.assertEqual(report.checked_triples, 0)


if __name__ == '__main__':
    unittest.main(verbosity=2)
