#!/usr/bin/env python3
"""
Acceptance tests: the shipped scenario pack and a randomized sweep of the
implication lattice.
"""

import glob
import io
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stdout

import numpy as np

# Add the parent directory to the path to import the package
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dkit.causal_sets import UNIT_DIAMOND, chain_distance_matrix, sprinkle
from dkit.causality_checks import causality_report, eq1_relations, relation_D
from dkit.cli import EXIT_OK, EXIT_PARSE, main
from dkit.distance_core import DistanceMatrix, check_reverse_triangle, chronology
from dkit.geometry_models import Minkowski
from dkit.ghyp_gate import lms_axiom_check
from dkit.topology_lab import finer_than, initial_topology

SCENARIOS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "scenarios")
EXPECTED_CODES = {"bad": EXIT_PARSE}


class TestScenarioPack(unittest.TestCase):
    """Every scenario matches its declared expectations."""

    def test_all_scenarios(self):
        """Each scenario exits 0 except the deliberately malformed one."""
        paths = sorted(glob.glob(os.path.join(SCENARIOS, "*.json")))
        self.assertGreaterEqual(len(paths), 10)
        with tempfile.TemporaryDirectory() as tmp:
            for path in paths:
                name = os.path.splitext(os.path.basename(path))[0]
                with self.subTest(scenario=name):
                    log = io.StringIO()
                    with redirect_stdout(log):
                        code = main(["run", path, "--out", os.path.join(tmp, name)])
                    self.assertEqual(code, EXPECTED_CODES.get(name, EXIT_OK), msg=log.getvalue())


class TestLatticeSweep(unittest.TestCase):
    """Predicate implications on random matrices satisfying the reverse triangle inequality."""

    def _random_matrix(self, rng):
        n = int(rng.integers(1, 13))
        weights = np.triu(rng.integers(0, 3, size=(n, n)).astype(float), k=1)
        weights[weights > 0] = rng.uniform(0.5, 2.0, size=int((weights > 0).sum()))
        entries = weights.copy()
        for k in range(n):
            for i in range(k):
                for j in range(k + 1, n):
                    if entries[i, k] > 0 and entries[k, j] > 0:
                        entries[i, j] = max(entries[i, j], entries[i, k] + entries[k, j])
        perm = rng.permutation(n)
        return DistanceMatrix(tuple(f"v{i}" for i in range(n)), entries[np.ix_(perm, perm)])

    def test_random_matrices(self):
        """1000 longest-path matrices with up to 12 points."""
        rng = np.random.default_rng(2024)
        for trial in range(1000):
            D = self._random_matrix(rng)
            self.assertTrue(check_reverse_triangle(D).passed, msg=f"trial {trial}")
            report = causality_report(D)
            self.assertEqual(report.lattice_violations(), [], msg=f"trial {trial}")
            rel = relation_D(D)
            self.assertTrue(chronology(D).issubset(rel), msg=f"trial {trial}")
            self.assertTrue(rel.is_reflexive())
            self.assertTrue(rel.is_transitive(), msg=f"trial {trial}")
            if report.results["d_reflectivity"].passed:
                self.assertTrue(eq1_relations(D).equal, msg=f"trial {trial}")
            distinguishing = report.results["weak_d_distinction"].passed
            self.assertEqual(rel.is_antisymmetric(), distinguishing, msg=f"trial {trial}")

    def test_topology_ignores_monotone_rescaling(self):
        """x -> x / (1 + x) keeps every level set of d_p and d^p, hence the initial topology."""
        rng = np.random.default_rng(7)
        for trial in range(200):
            D = self._random_matrix(rng)
            before = initial_topology(D)
            after = initial_topology(D.map_values(lambda x: x / (1.0 + x)))
            self.assertTrue(finer_than(before, after) and finer_than(after, before), msg=f"trial {trial}")
            np.testing.assert_array_equal(before.minimal_neighbourhoods(), after.minimal_neighbourhoods())


class TestSprinkledCausalSets(unittest.TestCase):
    """Longest-chain matrices of sprinkled diamonds are Lorentzian metric spaces."""

    def test_twenty_seeds(self):
        """Reverse triangle and the axiom check modulo boundary and twins, N <= 300."""
        for seed in range(20):
            with self.subTest(seed=seed):
                cs = sprinkle(Minkowski(), UNIT_DIAMOND, 400.0, seed=seed)
                self.assertLessEqual(cs.n, 300)
                D = chain_distance_matrix(cs)
                self.assertTrue(check_reverse_triangle(D).passed)
                report = lms_axiom_check(D, collapse_twins=True)
                self.assertTrue(report.passed_modulo_boundary, msg=report.to_dict())
                self.assertEqual(report.finiteness.status, "pass")


def run_all_tests():
    """Run all acceptance tests."""
    test_suite = unittest.TestSuite()

    test_classes = [
        TestScenarioPack,
        TestLatticeSweep,
        TestSprinkledCausalSets,
    ]

    for test_class in test_classes:
        tests = unittest.TestLoader().loadTestsFromTestCase(test_class)
        test_suite.addTests(tests)

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(test_suite)

    return result.wasSuccessful()


if __name__ == '__main__':
    success = run_all_tests()
    sys.exit(0 if success else 1)
