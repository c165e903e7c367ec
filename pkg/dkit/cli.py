#!/usr/bin/env python3
"""
Command Line Interface for dkit

Runs scenario files through the check suites and writes deterministic
JSON (or CSV) verdicts, one file per suite plus a summary.

Usage:
    dkit run scenario.json [--out DIR] [--seed N] [--format json|csv] [--verbose]
    dkit matrix matrix.csv --suite distinction,reflectivity [--out DIR] [--format json|csv]

Exit codes:
    0  every suite matched its expectation
    1  expectation mismatch or interrupted run
    2  scenario parse error or unreadable input matrix
    3  suite crash (completed outputs are kept)
    4  output directory not writable
"""

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__, helpers
from .causal_sets import chain_distance_matrix, chain_scaling_probe, sprinkle
from .causality_checks import (causality_report, eq1_relations, inclusion_equivalence_check,
                               load_fixture, reflectivity_report, distinction_report)
from .distance_core import TOL_D, DistanceMatrix
from .finsler_lab import (FlatDistanceField, NormPair, build_norm, build_spray, busemann_mayer_first,
                          busemann_mayer_second, exp_inverse, exp_map, exp_zero_section_probe,
                          isometry_check, quadraticity_test, self_convergence)
from .geometry_models import (build_model, oracle_convergence, oracle_pairs, random_timelike_pairs,
                              sample, sample_from_points)
from .ghyp_gate import diamond_gate, lms_axiom_check, probe_density_sweep, thm_main_gate
from .topology_lab import (PROBE_TOL, alexandrov_topology, finer_than, initial_topology, is_hausdorff,
                           reflectivity_continuity_consistency)

SUITE_ORDER = ("axioms", "distinction", "reflectivity", "topology", "gate", "busemann", "isometry", "oracle")
MODEL_ONLY_SUITES = {"isometry", "oracle"}
SOURCE_TYPES = ("model", "matrix", "causal_set", "none")
ISOMETRY_MAPS = ("boost", "scale", "permutation")
EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_CRASH, EXIT_UNWRITABLE = 0, 1, 2, 3, 4


class ScenarioError(ValueError):
    """Raised when a scenario file cannot be parsed or validated."""


@dataclass
class Scenario:
    name: str
    path: str
    source: Dict
    suites: List[str]
    seed: Optional[int] = None
    tolerances: Dict = field(default_factory=dict)
    options: Dict = field(default_factory=dict)
    expect: Dict = field(default_factory=dict)

    @property
    def tol_d(self) -> float:
        return float(self.tolerances.get("tol_d", TOL_D))

    @property
    def probe_tol(self) -> float:
        return float(self.tolerances.get("probe_tol", PROBE_TOL))

    def expectation(self, suite: str) -> Dict:
        return self.expect.get(suite, {"passed": True})


def _is_stochastic(source: Dict) -> bool:
    if source.get("type") == "causal_set":
        return True
    return source.get("type") == "model" and source.get("sampling", {}).get("mode") == "poisson"


def parse_scenario(data: Dict, path: str = "<memory>", seed_override: Optional[int] = None,
                   env_seed: Optional[str] = None, default_expect: bool = True) -> Scenario:
    """
    Validate a scenario dictionary.

    Raises:
        ScenarioError: For unknown suites or source types, missing fields or a missing seed
    """
    if not isinstance(data, dict):
        raise ScenarioError("Scenario must be a JSON object")
    source = data.get("source")
    if not isinstance(source, dict) or source.get("type") not in SOURCE_TYPES:
        raise ScenarioError(f"Scenario source must be an object with type in {SOURCE_TYPES}")
    suites = data.get("suites")
    if not isinstance(suites, list) or not suites:
        raise ScenarioError("Scenario must list at least one suite")
    unknown = [s for s in suites if s not in SUITE_ORDER]
    if unknown:
        raise ScenarioError(f"Unknown suite(s): {', '.join(map(str, unknown))}")
    kind = source["type"]
    if kind != "model":
        bad = sorted(MODEL_ONLY_SUITES & set(suites))
        if bad:
            raise ScenarioError(f"Suite(s) {', '.join(bad)} need a model source")
    if kind == "none" and set(suites) - {"busemann"}:
        raise ScenarioError("Only the busemann suite runs without a source")
    if kind == "matrix" and not ("path" in source or "fixture" in source):
        raise ScenarioError("Matrix source needs a 'path' or a 'fixture'")
    if kind in ("model", "causal_set") and "model" not in source:
        raise ScenarioError(f"{kind} source needs a 'model' descriptor")

    seed = seed_override if seed_override is not None else data.get("seed")
    if seed is None and env_seed not in (None, ""):
        try:
            seed = int(env_seed)
        except ValueError:
            raise ScenarioError(f"DKIT_SEED is not an integer: {env_seed!r}")
    if seed is None and _is_stochastic(source):
        raise ScenarioError("Stochastic sources need a seed (scenario 'seed', --seed or DKIT_SEED)")

    expect = data.get("expect", {})
    if not isinstance(expect, dict):
        raise ScenarioError("'expect' must be an object keyed by suite")
    if not default_expect:
        expect = {suite: expect.get(suite, {}) for suite in suites}
    return Scenario(
        name=str(data.get("name", os.path.splitext(os.path.basename(path))[0])),
        path=path,
        source=source,
        suites=[s for s in SUITE_ORDER if s in suites],
        seed=None if seed is None else int(seed),
        tolerances=data.get("tolerances", {}),
        options=data.get("options", {}),
        expect=expect,
    )


def load_scenario(path: str, seed_override: Optional[int] = None) -> Scenario:
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"Cannot read scenario {path}: {exc}")
    return parse_scenario(data, path, seed_override, os.environ.get("DKIT_SEED"))


def _lookup(result: Dict, dotted: str) -> Tuple[bool, Any]:
    node: Any = result
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return False, None
        node = node[part]
    return True, node


def match_expectation(result: Dict, expected: Dict) -> List[str]:
    """Names of expected keys whose (normalized) values differ from the result."""
    mismatches = []
    normalized = helpers.normalize(result)
    for key, value in sorted(expected.items()):
        found, actual = _lookup(normalized, key)
        if not found or actual != helpers.normalize(value):
            mismatches.append(key)
    return mismatches


@dataclass
class Source:
    matrix: Optional[DistanceMatrix] = None
    sample: Optional[object] = None
    model: Optional[object] = None
    causal_set: Optional[object] = None


class ScenarioRunner:
    """Builds the scenario source and runs its suites in order."""

    def __init__(self, scenario: Scenario, out_dir: str, fmt: str = "json",
                 strict_mode: bool = True, verbose: bool = False):
        self.scenario = scenario
        self.out_dir = out_dir
        self.fmt = fmt
        self.strict_mode = strict_mode
        self.verbose = verbose
        self.source: Optional[Source] = None
        self.suites: Dict[str, Callable[[], Dict]] = {
            "axioms": self.run_axioms,
            "distinction": self.run_distinction,
            "reflectivity": self.run_reflectivity,
            "topology": self.run_topology,
            "gate": self.run_gate,
            "busemann": self.run_busemann,
            "isometry": self.run_isometry,
            "oracle": self.run_oracle,
        }

    def _log(self, message: str):
        """Log debug information if verbose mode is enabled."""
        if self.verbose:
            print(f"[DKIT] {message}")

    def _validate_input(self, condition: bool, message: str, default: Any = None) -> Any:
        if not condition:
            if self.strict_mode:
                raise ValueError(message)
            self._log(f"Warning: {message}")
            return default
        return True

    def _options(self, suite: str) -> Dict:
        return self.scenario.options.get(suite, {})

    @property
    def seed(self) -> int:
        return self.scenario.seed if self.scenario.seed is not None else 0

    # Source

    def build_source(self) -> Source:
        desc = self.scenario.source
        kind = desc["type"]
        tol = self.scenario.tol_d
        if kind == "none":
            return Source()
        if kind == "matrix":
            if "fixture" in desc:
                return Source(matrix=load_fixture(desc["fixture"]).with_tol(tol))
            path = desc["path"]
            if not os.path.isabs(path):
                path = os.path.join(os.path.dirname(os.path.abspath(self.scenario.path)), path)
            try:
                return Source(matrix=DistanceMatrix.from_csv(path, tol))
            except OSError as exc:
                raise ScenarioError(f"Cannot read matrix {path}: {exc.strerror or exc}")
        model = build_model(desc["model"])
        if kind == "causal_set":
            cs = sprinkle(model, desc.get("region", {"kind": "diamond", "bottom": [0, 0], "top": [1, 0]}),
                          float(desc.get("density", 200.0)), self.seed, tol)
            self._log(f"Sprinkled {cs.n} elements with {len(cs.links)} links")
            return Source(matrix=chain_distance_matrix(cs, tol), model=model, causal_set=cs)
        sampling = desc.get("sampling", {})
        space = sample(model, int(sampling.get("n", 100)), sampling.get("mode", "grid_with_probes"),
                       seed=self.seed, region=sampling.get("region"),
                       probe_multiplier=int(sampling.get("probe_multiplier", 1)), tol=tol)
        self._log(f"Sampled {len(space.events)} events and {len(space.probes)} probes from {model!r}")
        return Source(matrix=space.matrix, sample=space, model=model)

    # Suites

    def run_axioms(self) -> Dict:
        cs = self.source.causal_set
        report = lms_axiom_check(self.source.matrix, collapse_twins=cs is not None).to_dict()
        if cs is not None:
            report["causal_set"] = {"size": cs.n, "links": len(cs.links), "seed": cs.seed}
            scaling = self._options("axioms").get("scaling")
            if scaling:
                probe = chain_scaling_probe(scaling["densities"], int(scaling.get("trials", 20)),
                                            int(scaling.get("seed", self.seed)))
                report["scaling"] = probe.to_dict()
        return report

    def run_distinction(self) -> Dict:
        return distinction_report(self.source.matrix).to_dict()

    def run_reflectivity(self) -> Dict:
        D = self.source.matrix
        report = reflectivity_report(D)
        out = report.to_dict()
        full = causality_report(D)
        out["lattice_violations"] = full.lattice_violations()
        out["eq1"] = eq1_relations(D).to_dict()
        if self.source.sample is not None:
            out["inclusion_equivalence"] = inclusion_equivalence_check(self.source.sample).to_dict()
        return out

    def run_topology(self) -> Dict:
        D = self.source.matrix
        alex = alexandrov_topology(D)
        initial = initial_topology(D)
        hausdorff, witness = is_hausdorff(alex)
        out = {
            "alexandrov_in_initial": finer_than(initial, alex),
            "alexandrov_hausdorff": hausdorff,
            "hausdorff_witness": list(witness) if witness else None,
            "alexandrov_discrete": alex.is_discrete(),
            "initial_discrete": initial.is_discrete(),
            "ground_size": len(D.ground),
        }
        if len(D.ground) <= alex.cap:
            out["alexandrov"] = alex.to_dict()
        passed = out["alexandrov_in_initial"]
        if self.source.sample is not None and self._options("topology").get("probes", True):
            consistency = reflectivity_continuity_consistency(
                self.source.model, self.source.sample, probe_tol=self.scenario.probe_tol, verbose=self.verbose)
            out["consistency"] = consistency.to_dict()
            passed = passed and consistency.consistent
        out["passed"] = passed
        return out

    def run_gate(self) -> Dict:
        target = self.source.sample if self.source.sample is not None else self.source.matrix
        main = thm_main_gate(target, probe_tol=self.scenario.probe_tol, verbose=self.verbose)
        dgate = diamond_gate(target)
        out = {
            "verdict": main.verdict,
            "reason": main.reason,
            "label": main.label,
            "main": main.to_dict(),
            "diamond": dgate.to_dict(),
            "passed": main.verdict == "CONSISTENT_WITH_GH",
        }
        sweep = self._options("gate").get("probe_sweep")
        if sweep and self.source.sample is not None:
            sampling = self.scenario.source.get("sampling", {})
            out["probe_sweep"] = probe_density_sweep(self.source.model, int(sampling.get("n", 100)),
                                                     sweep.get("multipliers", (1, 2, 4)), self.seed,
                                                     region=sampling.get("region"))
        return out

    def run_busemann(self) -> Dict:
        opts = self._options("busemann")
        norm = build_norm(opts.get("norm", {"kind": "randers", "b": 0.1}))
        dfield = FlatDistanceField(norm)
        p = np.asarray(opts.get("p", (0.0, 0.0)), dtype=float)
        v = np.asarray(opts.get("v", (1.0, 0.2)), dtype=float)
        a = np.asarray(opts.get("a", (0.3, -0.4)), dtype=float)
        tol = float(opts.get("tol", 1e-3))
        oracle = float(norm.evaluate(v))
        first = busemann_mayer_first(dfield, p, v, a)
        first.oracle = oracle
        second = busemann_mayer_second(dfield, p, v, a)
        second.oracle = oracle ** 2
        straight = busemann_mayer_first(dfield, p, v)
        out = {
            "norm": norm.descriptor(),
            "first": first.to_dict(),
            "second": second.to_dict(),
            "curvature_independence": abs(first.estimate - straight.estimate),
            "rows": first.rows(),
        }
        passed = (first.error <= tol and abs(second.estimate - first.estimate ** 2) <= tol
                  and out["curvature_independence"] <= tol)
        bs = opts.get("quadraticity_b")
        if bs:
            deficits = [quadraticity_test(build_norm({"kind": "randers", "b": b})).deficit for b in bs]
            out["quadraticity"] = {
                "b": list(bs),
                "deficits": deficits,
                "increasing": all(y > x for x, y in zip(deficits, deficits[1:])),
            }
            passed = passed and out["quadraticity"]["increasing"]
        spray_opts = opts.get("spray")
        if spray_opts:
            out["spray"] = self._spray_probes(spray_opts)
            passed = passed and out["spray"]["passed"]
        out["passed"] = passed
        return out

    def _spray_probes(self, opts: Dict) -> Dict:
        spray = build_spray(opts.get("spray", {"kind": "projective", "eps": 0.01}))
        p = np.asarray(opts.get("p", (0.0, 0.0)), dtype=float)
        v = np.asarray(opts.get("v", (1.0, 0.3)), dtype=float)
        q = exp_map(spray, p, v)
        back = exp_inverse(spray, p, q)
        radii = opts.get("radii", (0.1, 0.05, 0.025))
        jac = [exp_zero_section_probe(spray, p, r).to_dict() for r in radii]
        deviations = [j["max_deviation"] for j in jac]
        at_zero = max(j["deviation_at_zero"] for j in jac)
        conv = self_convergence(spray, p, np.asarray(opts.get("convergence_v", (4.0, 1.0)), dtype=float))
        out = {
            "round_trip_error": float(np.max(np.abs(back - v))),
            "jacobian": jac,
            "deviation_at_zero": at_zero,
            "deviation_decreasing": all(y < x for x, y in zip(deviations, deviations[1:])),
            "convergence": conv.to_dict(),
        }
        out["passed"] = (out["round_trip_error"] <= float(opts.get("round_trip_tol", 1e-8))
                         and at_zero < float(opts.get("zero_tol", 1e-6))
                         and out["deviation_decreasing"] and conv.order >= 3.5)
        return out

    def run_isometry(self) -> Dict:
        opts = self._options("isometry")
        model = self.source.model
        kind = opts.get("map", "boost")
        if not self._validate_input(kind in ISOMETRY_MAPS, f"Unknown isometry map kind: {kind!r}", False):
            kind = "boost"
        count = int(opts.get("n", 16))
        space = sample(model, count, "grid", region=opts.get("region", ((-1.0, 1.0), (-1.0, 1.0))))
        labels = list(space.ground)
        coords = space.coords_of(labels)
        if kind == "permutation":
            rng = np.random.default_rng(int(opts.get("seed", self.seed)))
            perm = rng.permutation(len(labels))
            if np.all(perm == np.arange(len(labels))):
                perm = np.roll(perm, 1)
            f = {labels[i]: labels[perm[i]] for i in range(len(labels))}
            report = isometry_check(f, space.matrix, space.matrix)
        else:
            if kind == "boost":
                w = float(opts.get("rapidity", 0.3))
                A = np.array([[np.cosh(w), np.sinh(w)], [np.sinh(w), np.cosh(w)]])
            else:
                A = float(opts.get("factor", 2.0)) * np.eye(2)
            image_labels = [f"f({label})" for label in labels]
            image = sample_from_points(model, coords @ A.T, image_labels, tol=self.scenario.tol_d)
            dfield = FlatDistanceField(model.norm)
            pair = NormPair(dfield, dfield, A, n_dirs=int(opts.get("n_dirs", 8)), seed=self.seed)
            report = isometry_check(dict(zip(labels, image_labels)), space.matrix, image.matrix, pair)
        out = report.to_dict()
        out["map"] = kind
        return out

    def run_oracle(self) -> Dict:
        opts = self._options("oracle")
        resolutions = tuple(opts.get("resolutions", (64, 128)))
        if opts.get("pairs", "random") == "sample" and self.source.sample is not None:
            labelled = oracle_pairs(self.source.sample, int(opts.get("count", 20)), self.seed)
            pairs = [(self.source.sample.event(p).coords, self.source.sample.event(q).coords) for p, q in labelled]
        else:
            pairs = random_timelike_pairs(int(opts.get("count", 20)), self.seed)
        sweep = oracle_convergence(self.source.model, pairs, resolutions, verbose=self.verbose)
        max_ratio = float(opts.get("max_ratio", 0.6))
        sweep["passed"] = sweep["lower_bound_ok"] and all(r <= max_ratio for r in sweep["ratios"])
        return sweep

    # Output

    def _write_suite(self, suite: str, result: Dict):
        if self.fmt == "csv":
            path = os.path.join(self.out_dir, f"{suite}.csv")
            if suite == "busemann":
                helpers.write_csv_report(result["rows"], path, ("t", "estimate", "oracle", "error"))
            else:
                helpers.write_csv_report(helpers.flatten_report(helpers.normalize(result)), path, ("key", "value"))
        else:
            helpers.write_json_report(result, os.path.join(self.out_dir, f"{suite}.json"))

    def run(self) -> int:
        try:
            os.makedirs(self.out_dir, exist_ok=True)
        except OSError as exc:
            print(f"Error: cannot create output directory '{self.out_dir}': {exc}")
            return EXIT_UNWRITABLE
        if not os.access(self.out_dir, os.W_OK):
            print(f"Error: output directory '{self.out_dir}' is not writable")
            return EXIT_UNWRITABLE

        summary = {
            "version": __version__,
            "scenario": self.scenario.name,
            "scenario_hash": helpers.scenario_hash(self.scenario.path) if os.path.exists(self.scenario.path) else None,
            "seed": self.scenario.seed,
            "format": self.fmt,
            "suites": {},
        }
        crashed = False
        try:
            try:
                self.source = self.build_source()
            except ScenarioError as exc:
                print(f"Error: {exc}")
                return EXIT_PARSE
            except ValueError as exc:
                return self._finish_source_error(summary, exc)
            for suite in self.scenario.suites:
                print(f"Running suite '{suite}'...")
                start = time.time()
                try:
                    result = self.suites[suite]()
                except Exception as exc:
                    crashed = True
                    summary["suites"][suite] = {"status": "crashed", "error": f"{type(exc).__name__}: {exc}",
                                                "matched": False}
                    print(f"Suite '{suite}' crashed: {exc}")
                    continue
                self._write_suite(suite, result)
                expected = self.scenario.expectation(suite)
                mismatches = match_expectation(result, expected)
                summary["suites"][suite] = {
                    "status": "passed" if result.get("passed") else "failed",
                    "expected": expected,
                    "mismatches": mismatches,
                    "matched": not mismatches,
                }
                self._log(f"Suite '{suite}' finished in {time.time() - start:.2f} seconds")
            summary["all_matched"] = all(s["matched"] for s in summary["suites"].values())
            helpers.write_json_report(summary, os.path.join(self.out_dir, "summary.json"))
            helpers.create_run_report(self.scenario.path, summary, os.path.join(self.out_dir, "report.txt"))
        except OSError as exc:
            print(f"Error: cannot write reports to '{self.out_dir}': {exc}")
            return EXIT_UNWRITABLE

        if crashed:
            return EXIT_CRASH
        return EXIT_OK if summary["all_matched"] else EXIT_MISMATCH

    def _finish_source_error(self, summary: Dict, exc: Exception) -> int:
        """A scenario may declare the construction error it expects under ``expect.source.error``."""
        expected = self.scenario.expect.get("source", {}).get("error")
        matched = expected is not None and expected in str(exc)
        summary["source_error"] = str(exc)
        summary["suites"] = {"source": {"status": "error", "expected": {"error": expected}, "matched": matched}}
        summary["all_matched"] = matched
        helpers.write_json_report(summary, os.path.join(self.out_dir, "summary.json"))
        print(f"Source construction failed: {exc}")
        return EXIT_OK if matched else EXIT_CRASH


def run_scenario(path: str, out_dir: Optional[str] = None, seed: Optional[int] = None,
                 fmt: str = "json", verbose: bool = False) -> int:
    """Parse and run one scenario; returns the process exit code."""
    try:
        scenario = load_scenario(path, seed)
    except ScenarioError as exc:
        print(f"Error: {exc}")
        return EXIT_PARSE
    out_dir = out_dir or os.path.join("dkit_out", scenario.name)
    print(f"Running scenario '{scenario.name}' ({len(scenario.suites)} suites)...")
    start = time.time()
    code = ScenarioRunner(scenario, out_dir, fmt, verbose=verbose).run()
    print(f"Scenario finished in {time.time() - start:.2f} seconds with exit code {code}")
    return code


def run_matrix(path: str, suites: List[str], out_dir: Optional[str] = None, fmt: str = "json",
               tol: float = TOL_D, verbose: bool = False) -> int:
    """Run matrix-level suites on a CSV file without expectations."""
    data = {
        "name": os.path.splitext(os.path.basename(path))[0],
        "source": {"type": "matrix", "path": os.path.abspath(path)},
        "suites": suites,
        "tolerances": {"tol_d": tol},
    }
    try:
        scenario = parse_scenario(data, path, default_expect=False)
    except ScenarioError as exc:
        print(f"Error: {exc}")
        return EXIT_PARSE
    out_dir = out_dir or os.path.join("dkit_out", scenario.name)
    return ScenarioRunner(scenario, out_dir, fmt, verbose=verbose).run()


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI."""
    parser = argparse.ArgumentParser(
        prog="dkit",
        description="dkit - causality checks on Lorentzian distance functions",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  dkit run scenarios/minkowski_gh.json --out out/minkowski
  dkit run scenarios/slit.json --seed 3 --format csv
  dkit matrix dkit/fixtures/f1.csv --suite distinction,reflectivity
        """
    )
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    run_parser = subparsers.add_parser('run', help='Run a scenario file')
    run_parser.add_argument('scenario', help='Scenario JSON file')
    run_parser.add_argument('--out', help='Output directory (default: dkit_out/<name>)')
    run_parser.add_argument('--seed', type=int, help='Seed overriding the scenario and DKIT_SEED')
    run_parser.add_argument('--format', choices=['json', 'csv'], default='json', help='Report format')
    run_parser.add_argument('--verbose', action='store_true', help='Log engine progress')

    matrix_parser = subparsers.add_parser('matrix', help='Check a distance matrix CSV')
    matrix_parser.add_argument('matrix', help='Matrix CSV (header row of labels)')
    matrix_parser.add_argument('--suite', default='distinction,reflectivity',
                               help='Comma-separated suites (default: distinction,reflectivity)')
    matrix_parser.add_argument('--out', help='Output directory (default: dkit_out/<name>)')
    matrix_parser.add_argument('--format', choices=['json', 'csv'], default='json', help='Report format')
    matrix_parser.add_argument('--tol', type=float, default=TOL_D, help=f'Comparison tolerance (default: {TOL_D})')
    matrix_parser.add_argument('--verbose', action='store_true', help='Log engine progress')

    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_PARSE

    try:
        if args.command == 'run':
            return run_scenario(args.scenario, args.out, args.seed, args.format, args.verbose)
        suites = [s.strip() for s in args.suite.split(',') if s.strip()]
        return run_matrix(args.matrix, suites, args.out, args.format, args.tol, args.verbose)
    except KeyboardInterrupt:
        print("\nInterrupted.")
        return EXIT_MISMATCH


if __name__ == '__main__':
    sys.exit(main())
