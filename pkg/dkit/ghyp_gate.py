"""
Global hyperbolicity gates.

Each gate collects conditions (pass, fail with a witness, or not
applicable with a reason) and aggregates them into a three-valued verdict.
A finite sample can refute global hyperbolicity but never prove it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .causality_checks import causality_report, relation_D
from .distance_core import DistanceMatrix, Relation, check_reverse_triangle, chronology_mask, ext_eq
from .geometry_models import sample as draw_sample
from .topology_lab import PROBE_TOL, alexandrov_topology, is_hausdorff, reflectivity_continuity_consistency

CONDITION_ORDER = (
    "finiteness",
    "diamond_precompactness",
    "continuity_surrogate",
    "weak_d_distinction",
    "future_or_past_d_distinction",
    "d_reflectivity",
    "alexandrov_hausdorff",
)

CONSISTENT = "CONSISTENT_WITH_GH"
REFUTED = "REFUTED"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Condition:
    status: str
    witness: Optional[Tuple] = None
    reason: Optional[str] = None
    details: Dict = field(default_factory=dict)

    @classmethod
    def passing(cls, **details) -> "Condition":
        return cls("pass", details=details)

    @classmethod
    def failing(cls, witness, **details) -> "Condition":
        return cls("fail", witness=tuple(witness), details=details)

    @classmethod
    def not_applicable(cls, reason: str) -> "Condition":
        return cls("not_applicable", reason=reason)

    def to_dict(self) -> Dict:
        out = {"status": self.status}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        if self.reason:
            out["reason"] = self.reason
        out.update(self.details)
        return out


@dataclass
class GateVerdict:
    conditions: Dict[str, Condition]
    verdict: str
    reason: Optional[str] = None
    reconstructed_J: Optional[Relation] = None
    extras: Dict = field(default_factory=dict)

    @property
    def refuted_by(self) -> Optional[str]:
        return self.reason if self.verdict == REFUTED else None

    @property
    def label(self) -> str:
        return self.verdict if self.reason is None else f"{self.verdict}({self.reason})"

    def to_dict(self) -> Dict:
        out = {
            "verdict": self.verdict,
            "label": self.label,
            "reason": self.reason,
            "conditions": {name: c.to_dict() for name, c in self.conditions.items()},
        }
        if self.reconstructed_J is not None:
            out["reconstructed_J"] = [list(e) for e in self.reconstructed_J.edges()]
        out.update(self.extras)
        return out


def aggregate(conditions: Dict[str, Condition], inconclusive_reason: Optional[str] = None) -> Tuple[str, Optional[str]]:
    """
    First failing condition in CONDITION_ORDER refutes; otherwise any
    not-applicable condition (or an explicit reason) leaves the verdict open.
    """
    for name in CONDITION_ORDER:
        c = conditions.get(name)
        if c is not None and c.status == "fail":
            return REFUTED, name
    if inconclusive_reason:
        return INCONCLUSIVE, inconclusive_reason
    for name in CONDITION_ORDER:
        c = conditions.get(name)
        if c is not None and c.status == "not_applicable":
            return INCONCLUSIVE, c.reason
    return CONSISTENT, None


def _split(source) -> Tuple[DistanceMatrix, Optional[object]]:
    if isinstance(source, DistanceMatrix):
        return source, None
    return source.matrix, source


def finiteness_condition(D: DistanceMatrix) -> Condition:
    inf = np.argwhere(np.isinf(D.entries))
    if inf.size:
        i, j = inf[0]
        return Condition.failing((D.labels[i], D.labels[j]), infinite_entries=int(len(inf)))
    return Condition.passing()


def precompactness_condition(sample) -> Condition:
    """Ask the model oracle about every sampled chronological diamond of the ground."""
    model = sample.model
    coords = sample.coords_of(sample.ground)
    chron = sample.exact_I(sample.ground).mask
    checked, failed, witness = 0, 0, None
    for i, j in np.argwhere(chron):
        checked += 1
        if not model.diamond_precompact(coords[i], coords[j]):
            failed += 1
            if witness is None:
                witness = (sample.ground[i], sample.ground[j])
    if checked == 0:
        return Condition.not_applicable("no chronological pairs in the sample")
    if failed:
        return Condition.failing(witness, checked_diamonds=checked, failed_diamonds=failed)
    return Condition.passing(checked_diamonds=checked)


def hausdorff_condition(D: DistanceMatrix) -> Condition:
    ok, witness = is_hausdorff(alexandrov_topology(D))
    note = "finite space: Hausdorff iff every minimal neighbourhood is a singleton"
    if ok:
        return Condition.passing(note=note)
    return Condition.failing(witness, note=note)


def _predicate_condition(report, name: str) -> Condition:
    res = report[name]
    if res.passed:
        return Condition.passing()
    details = {"failures": res.failures}
    if res.third is not None:
        details["third"] = res.third
    return Condition.failing(res.witness, **details)


def excess_against_exact_J(sample, reconstructed: Relation) -> Dict:
    exact = sample.exact_J(reconstructed.labels)
    excess = reconstructed.difference(exact)
    missing = exact.difference(reconstructed)
    return {
        "excess_pairs": len(excess),
        "excess_fraction": len(excess) / max(1, len(reconstructed)),
        "missing_pairs": len(missing),
        "exact_J_pairs": len(exact),
    }


def thm_main_gate(source: Union[DistanceMatrix, object], probe_tol: float = PROBE_TOL,
                  verbose: bool = False) -> GateVerdict:
    """
    Finiteness, continuity with precompact diamonds, and future-or-past
    d-distinction, followed by the reconstruction of J from d.

    Args:
        source: SampleSpace (model-backed) or DistanceMatrix (matrix-only)
        probe_tol: Gap tolerance of the semicontinuity probes
        verbose: Log probe failures

    Returns:
        GateVerdict with the reconstructed relation and, for samples, its
        excess and missing pairs against the model's exact J
    """
    D, sample = _split(source)
    report = causality_report(D)
    conditions: Dict[str, Condition] = {"finiteness": finiteness_condition(D)}
    extras: Dict = {}
    probes = None
    if sample is None:
        conditions["diamond_precompactness"] = Condition.not_applicable(
            "matrix-only input: every subset of a finite space is compact")
        conditions["continuity_surrogate"] = Condition.not_applicable(
            "matrix-only input: no model to probe")
    else:
        conditions["diamond_precompactness"] = precompactness_condition(sample)
        probes = reflectivity_continuity_consistency(sample.model, sample, probe_tol=probe_tol, verbose=verbose)
        if probes.probes_all_pass:
            conditions["continuity_surrogate"] = Condition.passing(probes_run=probes.probes_run)
        else:
            first = probes.failing_probes[0]
            conditions["continuity_surrogate"] = Condition.failing(
                (list(first.probe.p_ref), list(first.probe.target)), probes_run=probes.probes_run,
                upper_failures=probes.upper_failures, lower_failures=probes.lower_failures,
                direction=first.direction)
        extras["probe_consistency"] = probes.to_dict()
    conditions["weak_d_distinction"] = _predicate_condition(report, "weak_d_distinction")
    conditions["future_or_past_d_distinction"] = _predicate_condition(report, "future_or_past_d_distinction")
    conditions["d_reflectivity"] = _predicate_condition(report, "d_reflectivity")
    if sample is not None and D.has_probes():
        conditions["alexandrov_hausdorff"] = hausdorff_condition(D)
    else:
        conditions["alexandrov_hausdorff"] = Condition.not_applicable(
            "no probe points: diamonds cannot isolate extremal points")

    reconstructed = relation_D(D)
    if sample is not None:
        extras.update(excess_against_exact_J(sample, reconstructed))
        premise = report.passed("weak_d_distinction") and probes.probes_all_pass
        extras["causal_continuity_crosscheck"] = {
            "premise": "weak d-distinction and probe continuity",
            "conclusion": "causal_continuity",
            "premise_holds": premise,
            "conclusion_holds": report.passed("causal_continuity"),
            "holds": (not premise) or report.passed("causal_continuity"),
        }
    verdict, reason = aggregate(conditions)
    return GateVerdict(conditions, verdict, reason, reconstructed, extras)


def diamond_gate(source: Union[DistanceMatrix, object]) -> GateVerdict:
    """Alexandrov topology Hausdorff and every sampled chronological diamond precompact."""
    D, sample = _split(source)
    conditions = {"alexandrov_hausdorff": hausdorff_condition(D)}
    if sample is None:
        conditions["diamond_precompactness"] = Condition.not_applicable("no precompactness oracle")
        return GateVerdict(conditions, INCONCLUSIVE, "no precompactness oracle", relation_D(D))
    conditions["diamond_precompactness"] = precompactness_condition(sample)
    verdict, reason = aggregate(conditions)
    return GateVerdict(conditions, verdict, reason, relation_D(D))


def probe_density_sweep(model, n: int = 100, multipliers: Sequence[int] = (1, 2, 4), seed: int = 0,
                        region=None) -> Dict:
    """Excess and missing pairs of the reconstructed J as probe density grows, over one fixed region."""
    rows = []
    for m in multipliers:
        space = draw_sample(model, n, "grid_with_probes", seed=seed, region=region, probe_multiplier=m)
        stats = excess_against_exact_J(space, relation_D(space.matrix))
        stats["probe_multiplier"] = m
        rows.append(stats)
    fractions = [r["excess_fraction"] for r in rows]
    return {
        "rows": rows,
        "non_increasing": all(b <= a for a, b in zip(fractions, fractions[1:])),
        "missing_pairs": sum(r["missing_pairs"] for r in rows),
    }


@dataclass
class AxiomReport:
    finiteness: Condition
    reverse_triangle: Dict
    weak_d_distinction: Condition
    boundary_points: List[str]
    interior_weak_d_distinction: Condition
    d_reflective: Condition
    twin_classes: List[List[str]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed_modulo_boundary(self) -> bool:
        return (self.finiteness.status == "pass" and self.reverse_triangle["passed"]
                and self.interior_weak_d_distinction.status == "pass")

    @property
    def passed(self) -> bool:
        return (self.finiteness.status == "pass" and self.reverse_triangle["passed"]
                and self.weak_d_distinction.status == "pass" and not self.boundary_points)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "passed_modulo_boundary": self.passed_modulo_boundary,
            "finiteness": self.finiteness.to_dict(),
            "reverse_triangle": self.reverse_triangle,
            "weak_d_distinction": self.weak_d_distinction.to_dict(),
            "interior_weak_d_distinction": self.interior_weak_d_distinction.to_dict(),
            "boundary_points": self.boundary_points,
            "d_reflective": self.d_reflective.to_dict(),
            "twin_classes": self.twin_classes,
            "notes": self.notes,
        }


def boundary_points(D: DistanceMatrix) -> List[str]:
    """Ground points with no sampled chronological past or no sampled chronological future."""
    chron = chronology_mask(D)
    gi = D.ground_index
    has_past = chron[:, gi].any(axis=0)
    has_future = chron[gi, :].any(axis=1)
    return [D.ground[k] for k in np.nonzero(~(has_past & has_future))[0]]


def twin_classes(D: DistanceMatrix, labels: Optional[Sequence[str]] = None) -> List[List[str]]:
    """Classes of two or more points with equal rows and equal columns, in label order."""
    labels = list(D.ground if labels is None else labels)
    idx = [D.position(label) for label in labels]
    profile = np.concatenate([D.entries[idx, :], D.entries[:, idx].T], axis=1)
    assigned = np.zeros(len(idx), dtype=bool)
    classes = []
    for k in range(len(idx)):
        if assigned[k]:
            continue
        same = ext_eq(profile, profile[k][None, :], D.tol).all(axis=1) & ~assigned
        assigned |= same
        if same.sum() > 1:
            classes.append([labels[j] for j in np.nonzero(same)[0]])
    return classes


def lms_axiom_check(D: DistanceMatrix, collapse_twins: bool = False) -> AxiomReport:
    """
    Axioms of a Lorentzian metric space read off a finite matrix, plus the d-reflective strengthening.

    With ``collapse_twins`` each class of interior twins (equal rows and
    columns) counts once in the interior distinction check. Sprinkled
    causal sets need this: two elements with the same past and future are
    indistinguishable below the sprinkling scale.
    """
    report = causality_report(D)
    boundary = boundary_points(D)
    interior = [label for label in D.ground if label not in set(boundary)]
    twins = twin_classes(D, interior)
    if collapse_twins:
        dropped = {label for cls in twins for label in cls[1:]}
        interior = [label for label in interior if label not in dropped]
    if len(interior) >= 2:
        inner = _predicate_condition(causality_report(D.with_ground(interior)), "weak_d_distinction")
    else:
        inner = Condition.passing(note="fewer than two interior points")
    return AxiomReport(
        finiteness=finiteness_condition(D),
        reverse_triangle=check_reverse_triangle(D, max_reported=20).to_dict(),
        weak_d_distinction=_predicate_condition(report, "weak_d_distinction"),
        boundary_points=boundary,
        interior_weak_d_distinction=inner,
        d_reflective=_predicate_condition(report, "d_reflectivity"),
        twin_classes=twins,
        notes=[
            "finite ground: the discrete topology makes d continuous",
            "finite ground: every diamond is relatively compact",
        ],
    )
