"""
Causality predicates read off a distance matrix.

Rows d_p = d(p, .) and columns d^p = d(., p) are compared entrywise under
the matrix tolerance. Predicates quantify over the matrix ground; rows
and columns range over every label, so probe points act as test points.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .distance_core import DistanceMatrix, Relation, ext_eq, ext_gt, ext_le

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")

DISTINCTION_FIELDS = (
    "future_d_distinction",
    "past_d_distinction",
    "d_distinction",
    "weak_d_distinction",
    "future_or_past_d_distinction",
)
REFLECTIVITY_FIELDS = (
    "future_d_reflectivity",
    "past_d_reflectivity",
    "d_reflectivity",
    "strong_future_reflectivity",
    "strong_past_reflectivity",
    "causal_continuity",
)


@dataclass
class PredicateResult:
    passed: bool
    witness: Optional[Tuple[str, str]] = None
    third: Optional[str] = None
    failures: int = 0
    note: Optional[str] = None

    def to_dict(self) -> Dict:
        out = {"passed": self.passed, "failures": self.failures}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        if self.third is not None:
            out["third"] = self.third
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class CausalityReport:
    results: Dict[str, PredicateResult] = field(default_factory=dict)
    tol: float = 0.0
    i_source: Optional[str] = None

    def __getitem__(self, name: str) -> PredicateResult:
        return self.results[name]

    def passed(self, name: str) -> bool:
        return self.results[name].passed

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def merged(self, other: "CausalityReport") -> "CausalityReport":
        results = dict(self.results)
        results.update(other.results)
        return CausalityReport(results, self.tol, other.i_source or self.i_source)

    def lattice_violations(self) -> List[str]:
        """Implications every report must satisfy, re-checked on its own verdicts."""
        r = {name: res.passed for name, res in self.results.items()}
        rules = [
            ("d_distinction", "future_or_past_d_distinction"),
            ("future_or_past_d_distinction", "weak_d_distinction"),
            ("strong_future_reflectivity", "future_d_reflectivity"),
            ("strong_past_reflectivity", "past_d_reflectivity"),
        ]
        broken = [f"{a} => {b}" for a, b in rules if a in r and b in r and r[a] and not r[b]]
        if {"d_reflectivity", "future_d_reflectivity", "past_d_reflectivity"} <= r.keys():
            if r["d_reflectivity"] != (r["future_d_reflectivity"] and r["past_d_reflectivity"]):
                broken.append("d_reflectivity <=> future and past")
        if {"causal_continuity", "weak_d_distinction", "d_reflectivity"} <= r.keys():
            if r["causal_continuity"] != (r["weak_d_distinction"] and r["d_reflectivity"]):
                broken.append("causal_continuity <=> weak and d_reflectivity")
        return broken

    def to_dict(self) -> Dict:
        out = {name: res.to_dict() for name, res in sorted(self.results.items())}
        out["tol_d"] = self.tol
        if self.i_source:
            out["i_source"] = self.i_source
        out["passed"] = self.all_passed
        return out


def _le_matrix(A: np.ndarray, tol: float) -> np.ndarray:
    """out[i, j] = A_i <= A_j entrywise."""
    out = np.empty((A.shape[0], A.shape[0]), dtype=bool)
    for i in range(A.shape[0]):
        out[i] = ext_le(A[i][None, :], A, tol).all(axis=1)
    return out


def _eq_matrix(A: np.ndarray, tol: float) -> np.ndarray:
    le = _le_matrix(A, tol)
    return le & le.T


def _first_pair(mask: np.ndarray, off_diagonal: bool = True) -> Optional[Tuple[int, int]]:
    m = mask.copy()
    if off_diagonal:
        np.fill_diagonal(m, False)
    hits = np.argwhere(m)
    if hits.size == 0:
        return None
    return int(hits[0][0]), int(hits[0][1])


def _count(mask: np.ndarray, off_diagonal: bool = True) -> int:
    m = mask.copy()
    if off_diagonal:
        np.fill_diagonal(m, False)
    return int(m.sum())


def _ground_functions(D: DistanceMatrix) -> Tuple[np.ndarray, np.ndarray]:
    return D.ground_rows(), D.ground_cols()


def distinction_report(D: DistanceMatrix) -> CausalityReport:
    """Future, past, weak, combined and either-way d-distinction over the ground."""
    rows, cols = _ground_functions(D)
    g = D.ground
    eq_rows = _eq_matrix(rows, D.tol)
    eq_cols = _eq_matrix(cols, D.tol)
    upper = np.triu(np.ones_like(eq_rows), k=1)

    def result(mask: np.ndarray) -> PredicateResult:
        pair = _first_pair(mask & upper)
        if pair is None:
            return PredicateResult(True)
        return PredicateResult(False, (g[pair[0]], g[pair[1]]), failures=_count(mask & upper))

    future = result(eq_rows)
    past = result(eq_cols)
    weak = result(eq_rows & eq_cols)
    either = PredicateResult(future.passed or past.passed)
    if not either.passed:
        either.witness = future.witness
        either.note = f"past witness {past.witness[0]},{past.witness[1]}"
    both = PredicateResult(future.passed and past.passed)
    if not both.passed:
        both.witness = future.witness if not future.passed else past.witness
    return CausalityReport({
        "future_d_distinction": future,
        "past_d_distinction": past,
        "d_distinction": both,
        "weak_d_distinction": weak,
        "future_or_past_d_distinction": either,
    }, D.tol)


def _ground_truth_masks(D: DistanceMatrix, ground_truth_I: Optional[Relation]) -> Tuple[np.ndarray, str]:
    """Chronology over all labels, taken from the matrix or from a ground-truth relation."""
    if ground_truth_I is None:
        return D.entries > D.tol, "chronology"
    if set(ground_truth_I.labels) != set(D.labels):
        raise ValueError("Ground-truth I must be defined on every label of the matrix")
    return ground_truth_I.restrict(D.labels).mask, "ground_truth"


def reflectivity_report(D: DistanceMatrix, ground_truth_I: Optional[Relation] = None) -> CausalityReport:
    """
    Future/past d-reflectivity, their strong variants and causal continuity.

    Future: d^p <= d^q implies d_q <= d_p. Past: d_q <= d_p implies
    d^p <= d^q. Strong past: I+(p) contains I+(q) implies d^p <= d^q.
    Strong future: I-(p) inside I-(q) implies d_q <= d_p.
    """
    rows, cols = _ground_functions(D)
    g = D.ground
    gi = D.ground_index
    le_rows = _le_matrix(rows, D.tol)
    le_cols = _le_matrix(cols, D.tol)
    chron, source = _ground_truth_masks(D, ground_truth_I)
    future_sets = chron[gi]
    past_sets = chron[:, gi].T

    def third_index(a: np.ndarray, b: np.ndarray) -> str:
        return D.labels[int(np.argmax(ext_gt(a, b, D.tol)))]

    def result(fail: np.ndarray, third_of) -> PredicateResult:
        pair = _first_pair(fail, off_diagonal=False)
        if pair is None:
            return PredicateResult(True)
        p, q = pair
        return PredicateResult(False, (g[p], g[q]), third_of(p, q), _count(fail, off_diagonal=False))

    fut_fail = le_cols & ~le_rows.T
    past_fail = le_rows.T & ~le_cols
    future = result(fut_fail, lambda p, q: third_index(rows[q], rows[p]))
    past = result(past_fail, lambda p, q: third_index(cols[p], cols[q]))

    # inclusions over every label
    sup_future = ~np.any(future_sets[None, :, :] & ~future_sets[:, None, :], axis=2)
    sub_past = ~np.any(past_sets[:, None, :] & ~past_sets[None, :, :], axis=2)
    strong_past = result(sup_future & ~le_cols, lambda p, q: third_index(cols[p], cols[q]))
    strong_future = result(sub_past & ~le_rows.T, lambda p, q: third_index(rows[q], rows[p]))

    both = PredicateResult(future.passed and past.passed)
    if not both.passed:
        src = future if not future.passed else past
        both.witness, both.third, both.failures = src.witness, src.third, future.failures + past.failures

    weak = distinction_report(D)["weak_d_distinction"]
    continuity = PredicateResult(weak.passed and both.passed)
    if not continuity.passed:
        src = weak if not weak.passed else both
        continuity.witness, continuity.third = src.witness, src.third

    return CausalityReport({
        "future_d_reflectivity": future,
        "past_d_reflectivity": past,
        "d_reflectivity": both,
        "strong_future_reflectivity": strong_future,
        "strong_past_reflectivity": strong_past,
        "weak_d_distinction": weak,
        "causal_continuity": continuity,
    }, D.tol, source)


def causality_report(D: DistanceMatrix, ground_truth_I: Optional[Relation] = None) -> CausalityReport:
    return distinction_report(D).merged(reflectivity_report(D, ground_truth_I))


def reflectivity_failures(D: DistanceMatrix, kind: str = "future", limit: int = 50) -> List[Tuple[str, str, str]]:
    """Failing pairs (p, q) in index order, each with its discriminating third point."""
    if kind not in ("future", "past"):
        raise ValueError(f"kind must be 'future' or 'past', got {kind!r}")
    rows, cols = _ground_functions(D)
    le_rows = _le_matrix(rows, D.tol)
    le_cols = _le_matrix(cols, D.tol)
    fail = (le_cols & ~le_rows.T) if kind == "future" else (le_rows.T & ~le_cols)
    found = []
    for p, q in np.argwhere(fail)[:limit]:
        a, b = (rows[q], rows[p]) if kind == "future" else (cols[p], cols[q])
        r = int(np.argmax(ext_gt(a, b, D.tol)))
        found.append((D.ground[p], D.ground[q], D.labels[r]))
    return found


def _one_sided(D: DistanceMatrix) -> Tuple[np.ndarray, np.ndarray]:
    rows, cols = _ground_functions(D)
    r_future = _le_matrix(rows, D.tol).T
    r_past = _le_matrix(cols, D.tol)
    return r_future, r_past


def relation_D(D: DistanceMatrix) -> Relation:
    """{(p, q): d_p >= d_q and d^p <= d^q} over the ground."""
    r_future, r_past = _one_sided(D)
    return Relation(D.ground, r_future & r_past)


@dataclass
class Eq1Result:
    future: Relation
    past: Relation
    equal: bool
    witness: Optional[Tuple[str, str]] = None

    def to_dict(self) -> Dict:
        return {
            "equal": self.equal,
            "witness": list(self.witness) if self.witness else None,
            "future_pairs": len(self.future),
            "past_pairs": len(self.past),
        }


def eq1_relations(D: DistanceMatrix) -> Eq1Result:
    """The two one-sided reconstructions {d_p >= d_q} and {d^p <= d^q}."""
    r_future, r_past = _one_sided(D)
    pair = _first_pair(r_future != r_past, off_diagonal=False)
    witness = None if pair is None else (D.ground[pair[0]], D.ground[pair[1]])
    return Eq1Result(Relation(D.ground, r_future), Relation(D.ground, r_past), pair is None, witness)


@dataclass
class ConsistencyReport:
    """Implication table; each row names its premise, conclusion and failure count."""

    checks: List[Dict] = field(default_factory=list)

    def add(self, premise: str, conclusion: str, failures: int, exact: bool = True,
            witness=None, label: Optional[str] = None, holds: Optional[bool] = None):
        self.checks.append({
            "premise": premise,
            "conclusion": conclusion,
            "exact": exact,
            "failures": failures,
            "holds": failures == 0 if holds is None else holds,
            "witness": list(witness) if witness else None,
            "label": label,
        })

    @property
    def consistent(self) -> bool:
        return all(c["holds"] for c in self.checks if c["exact"])

    def to_dict(self) -> Dict:
        return {"consistent": self.consistent, "checks": self.checks}


def inclusion_equivalence_check(sample_space) -> ConsistencyReport:
    """
    Sampled inclusion I+(q) in I+(p) against the row comparison d_q <= d_p.

    The direction from the d comparison to the inclusion is exact; the
    converse is only a finite-sample surrogate, and its failures are
    labelled as sampling artifacts.
    """
    D = sample_space.matrix
    chron = sample_space.exact_I(D.labels).mask
    gi = D.ground_index
    future_sets = chron[gi]
    # inclusion[p, q]: I+(q) & S inside I+(p) & S
    inclusion = ~np.any(future_sets[None, :, :] & ~future_sets[:, None, :], axis=2)
    rows = D.ground_rows()
    comparison = _le_matrix(rows, D.tol).T

    report = ConsistencyReport()
    exact_fail = comparison & ~inclusion
    surrogate_fail = inclusion & ~comparison
    exact_pair = _first_pair(exact_fail, off_diagonal=False)
    sur_pair = _first_pair(surrogate_fail, off_diagonal=False)
    report.add("d_q <= d_p", "I+(q) inside I+(p)", _count(exact_fail, False),
               witness=None if exact_pair is None else (D.ground[exact_pair[0]], D.ground[exact_pair[1]]))
    report.add("I+(q) inside I+(p)", "d_q <= d_p", _count(surrogate_fail, False), exact=False,
               witness=None if sur_pair is None else (D.ground[sur_pair[0]], D.ground[sur_pair[1]]),
               label="sampling artifact" if sur_pair is not None else None)
    return report


FIXTURES = ("f1", "f1_dual", "chain3", "twins", "n_poset", "future_nonreflecting")


def load_fixture(name: str) -> DistanceMatrix:
    """Load one of the shipped counterexample matrices."""
    if name not in FIXTURES:
        raise ValueError(f"Unknown fixture {name!r} (known: {', '.join(FIXTURES)})")
    return DistanceMatrix.from_csv(os.path.join(FIXTURE_DIR, f"{name}.csv"))
