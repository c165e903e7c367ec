"""
Finite topologies on samples and semicontinuity probes on models.

A topology on a finite ground set is determined by its minimal
neighbourhoods U_z, the intersection of all subbasis sets containing z.
The opens are exactly the unions of minimal neighbourhoods, so most
queries never enumerate the opens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .distance_core import DistanceMatrix, chronology_mask
from .causality_checks import ConsistencyReport, reflectivity_failures, reflectivity_report

GROUND_CAP = 60
MAX_OPENS = 1 << 16
PROBE_TOL = 1e-3
DEFAULT_RADII = tuple(2.0 ** -k for k in range(1, 13))
AXIS_DIRECTIONS = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))
COMPASS_DIRECTIONS = AXIS_DIRECTIONS + tuple(
    (a / math.sqrt(2.0), b / math.sqrt(2.0)) for a in (1.0, -1.0) for b in (1.0, -1.0))


def _minimal_from_subbasis(subbasis: np.ndarray) -> np.ndarray:
    """U[z, w]: w lies in every subbasis set containing z."""
    S = subbasis.astype(np.float64)
    missing = S.T @ (1.0 - S)
    return missing == 0


class FiniteTopology:
    """
    Topology on a finite ground set.

    Built from a subbasis (boolean matrix, one row per set), or from
    precomputed minimal neighbourhoods plus a factory that rebuilds the
    subbasis on demand.
    """

    def __init__(self, ground: Sequence[str], subbasis: Optional[np.ndarray] = None,
                 minimal: Optional[np.ndarray] = None,
                 subbasis_factory: Optional[Callable[[], np.ndarray]] = None,
                 name: str = "", cap: int = GROUND_CAP):
        self.ground = tuple(ground)
        self.name = name
        self.cap = cap
        g = len(self.ground)
        self._subbasis = None
        if subbasis is not None:
            sub = np.asarray(subbasis, dtype=bool).reshape(-1, g)
            sub = sub[sub.any(axis=1)]
            self._subbasis = np.unique(sub, axis=0) if len(sub) else sub
        self._factory = subbasis_factory
        if minimal is None:
            if self._subbasis is None:
                raise ValueError("FiniteTopology needs a subbasis or minimal neighbourhoods")
            minimal = _minimal_from_subbasis(self._subbasis)
        self._minimal = np.asarray(minimal, dtype=bool)
        if self._minimal.shape != (g, g):
            raise ValueError("Minimal neighbourhood matrix does not match the ground")
        self._opens = None

    @classmethod
    def from_sets(cls, ground: Sequence[str], sets, name: str = "") -> "FiniteTopology":
        ground = tuple(ground)
        idx = {label: i for i, label in enumerate(ground)}
        rows = np.zeros((len(sets), len(ground)), dtype=bool)
        for k, s in enumerate(sets):
            for label in s:
                rows[k, idx[label]] = True
        return cls(ground, subbasis=rows, name=name)

    @classmethod
    def discrete(cls, ground: Sequence[str]) -> "FiniteTopology":
        return cls(ground, subbasis=np.eye(len(ground), dtype=bool), name="discrete")

    @classmethod
    def indiscrete(cls, ground: Sequence[str]) -> "FiniteTopology":
        return cls(ground, subbasis=np.zeros((0, len(ground)), dtype=bool), name="indiscrete")

    @property
    def subbasis(self) -> np.ndarray:
        if self._subbasis is None:
            sub = self._factory() if self._factory is not None else self._minimal
            sub = sub[sub.any(axis=1)]
            self._subbasis = np.unique(sub, axis=0) if len(sub) else sub
        return self._subbasis

    def minimal_neighbourhoods(self) -> np.ndarray:
        return self._minimal.copy()

    def neighbourhood(self, label: str) -> FrozenSet[str]:
        z = self.ground.index(label)
        return frozenset(self.ground[w] for w in np.nonzero(self._minimal[z])[0])

    def is_open(self, labels) -> bool:
        """O is open iff it contains the minimal neighbourhood of each of its points."""
        member = np.isin(np.array(self.ground), list(labels))
        return not bool(np.any(self._minimal[member] & ~member[None, :]))

    def is_discrete(self) -> bool:
        return bool(np.array_equal(self._minimal, np.eye(len(self.ground), dtype=bool)))

    def is_indiscrete(self) -> bool:
        return bool(self._minimal.all())

    def opens(self) -> List[FrozenSet[str]]:
        """
        Every open set, as unions of minimal neighbourhoods.

        Raises:
            ValueError: If the ground exceeds the cap or the family outgrows MAX_OPENS
        """
        if self._opens is not None:
            return self._opens
        g = len(self.ground)
        if g > self.cap:
            raise ValueError(f"Ground of {g} points exceeds the materialization cap of {self.cap}")
        weights = [1 << k for k in range(g)]
        masks = {sum(w for w, bit in zip(weights, row) if bit) for row in self._minimal}
        family = {0}
        for m in sorted(masks):
            family |= {f | m for f in family}
            if len(family) > MAX_OPENS:
                raise ValueError(f"More than {MAX_OPENS} opens; use subbasis-level queries")
        self._opens = sorted(
            (frozenset(self.ground[k] for k in range(g) if f >> k & 1) for f in family),
            key=lambda s: (len(s), sorted(s)))
        return self._opens

    def is_lattice(self) -> bool:
        """Opens closed under pairwise union and intersection, with empty set and ground."""
        family = set(self.opens())
        if frozenset() not in family or frozenset(self.ground) not in family:
            return False
        return all(a | b in family and a & b in family for a in family for b in family)

    def generated(self) -> "FiniteTopology":
        """Topology generated by this one's opens."""
        return FiniteTopology.from_sets(self.ground, self.opens(), name=self.name)

    def to_dict(self) -> Dict:
        out = {"name": self.name, "ground": list(self.ground), "discrete": self.is_discrete()}
        try:
            out["opens"] = [sorted(s) for s in self.opens()]
        except ValueError as exc:
            out["opens"] = None
            out["note"] = str(exc)
        return out


def _check_same_ground(T1: FiniteTopology, T2: FiniteTopology):
    if T1.ground != T2.ground:
        raise ValueError("Topologies are defined on different ground sets")


def finer_than(T1: FiniteTopology, T2: FiniteTopology) -> bool:
    """True iff every T2-open is T1-open."""
    _check_same_ground(T1, T2)
    return not bool(np.any(T1._minimal & ~T2._minimal))


def is_hausdorff(T: FiniteTopology) -> Tuple[bool, Optional[Tuple[str, str]]]:
    """
    Hausdorff check. On a finite space this holds iff every minimal
    neighbourhood is a singleton, i.e. iff T is discrete.

    The witness prefers a pair no open set tells apart, then any pair
    whose minimal neighbourhoods overlap.
    """
    U = T._minimal
    if T.is_discrete():
        return True, None
    mutual = U & U.T
    np.fill_diagonal(mutual, False)
    hits = np.argwhere(np.triu(mutual))
    if hits.size == 0:
        overlap = (U.astype(np.int64) @ U.T.astype(np.int64)) > 0
        np.fill_diagonal(overlap, False)
        hits = np.argwhere(np.triu(overlap))
    z, w = hits[0]
    return False, (T.ground[z], T.ground[w])


def alexandrov_topology(D: DistanceMatrix) -> FiniteTopology:
    """
    Topology on the ground generated by all nonempty chronological diamonds
    I(p, q), with corners p, q ranging over every label.
    """
    chron = chronology_mask(D)
    gi = D.ground_index
    future = chron[:, gi]    # future[a, w]: a << w
    past = chron[gi, :].T    # past[b, w]: w << b
    # w outside U_z iff some a << z misses w, or some b >> z misses w
    miss_future = future.T.astype(np.float64) @ (~future).astype(np.float64)
    miss_past = past.T.astype(np.float64) @ (~past).astype(np.float64)
    has_past = future.any(axis=0)
    has_future = past.any(axis=0)
    inside = has_past & has_future
    minimal = np.where(inside[:, None], (miss_future == 0) & (miss_past == 0), True)

    def subbasis() -> np.ndarray:
        rows = []
        for a in range(D.n):
            masks = future[a][None, :] & past
            masks = masks[masks.any(axis=1)]
            if len(masks):
                rows.append(np.unique(masks, axis=0))
        return np.concatenate(rows) if rows else np.zeros((0, len(gi)), dtype=bool)

    return FiniteTopology(D.ground, minimal=minimal, subbasis_factory=subbasis, name="alexandrov")


def _cluster_ids(values: np.ndarray, tol: float) -> Tuple[np.ndarray, List[float]]:
    """
    Group attained values: a new cluster starts when a value exceeds the
    cluster start by more than tol, or crosses tol itself. Returns cluster
    ids and the midpoint thresholds between consecutive clusters.
    """
    order = np.argsort(values, kind="stable")
    ids = np.empty(len(values), dtype=int)
    thresholds: List[float] = []
    cluster, start, prev = 0, None, None
    for k in order:
        v = values[k]
        if start is not None:
            new = (math.isinf(v) and not math.isinf(start)) or (
                not math.isinf(v) and (v - start > tol or (prev <= tol < v)))
            if new:
                thresholds.append(prev + 1.0 if math.isinf(v) else 0.5 * (prev + v))
                cluster += 1
                start = v
        else:
            start = v
        ids[k] = cluster
        prev = v
    return ids, thresholds


def initial_topology(D: DistanceMatrix) -> FiniteTopology:
    """
    Coarsest topology on the ground making every d_p and d^p continuous,
    subbasis: preimages of (a, inf] and [0, a) at midpoint thresholds a.
    """
    gi = D.ground_index
    functions = np.vstack([D.entries[:, gi], D.entries.T[:, gi]])
    signatures = np.empty_like(functions, dtype=int)
    cuts: List[List[float]] = []
    for k, f in enumerate(functions):
        signatures[k], thresholds = _cluster_ids(f, D.tol)
        cuts.append(thresholds)
    minimal = np.all(signatures[:, :, None] == signatures[:, None, :], axis=0)

    def subbasis() -> np.ndarray:
        rows = []
        for f, thresholds in zip(functions, cuts):
            for a in thresholds:
                rows.append(f > a)
                rows.append(f < a)
        return np.array(rows, dtype=bool) if rows else np.zeros((0, len(gi)), dtype=bool)

    return FiniteTopology(D.ground, minimal=minimal, subbasis_factory=subbasis, name="initial")


# Semicontinuity probes

def _aitken(values: Sequence[float]) -> float:
    """Aitken delta-squared estimate of the limit from the last three values."""
    x0, x1, x2 = values[-3:]
    if any(math.isinf(v) for v in (x0, x1, x2)):
        return math.inf
    denom = x2 - 2.0 * x1 + x0
    if abs(denom) <= 1e-15 * max(1.0, abs(x2)):
        return x2
    estimate = x2 - (x2 - x1) ** 2 / denom
    return estimate if math.isfinite(estimate) else x2


def _gap(limit: float, target: float, direction: str) -> float:
    high, low = (limit, target) if direction == "upper" else (target, limit)
    if math.isinf(low):
        return 0.0
    if math.isinf(high):
        return math.inf
    return high - low


@dataclass
class SequenceProbe:
    p_ref: Tuple[float, float]
    target: Tuple[float, float]
    approach: Tuple[float, float]
    radii: List[float]
    points: List[Tuple[float, float]]
    future_values: List[float]
    past_values: List[float]
    target_future: float
    target_past: float

    def __post_init__(self):
        tgt = np.asarray(self.target)
        for r, x in zip(self.radii, self.points):
            if np.linalg.norm(np.asarray(x) - tgt) > r * (1 + 1e-12):
                raise ValueError("Probe sequence does not converge within the radii schedule")


@dataclass
class ProbeReport:
    direction: str
    probe: SequenceProbe
    functions: Dict[str, Dict] = field(default_factory=dict)
    tol: float = PROBE_TOL

    @property
    def passed(self) -> bool:
        return all(f["passed"] for f in self.functions.values())

    @property
    def gap(self) -> float:
        return max((f["gap"] for f in self.functions.values()), default=0.0)

    def table(self) -> List[Dict]:
        """Rows (k, radius, value, running tail inf/sup) for both functions."""
        rows = []
        fv, pv = self.probe.future_values, self.probe.past_values
        for k, (r, a, b) in enumerate(zip(self.probe.radii, fv, pv)):
            rows.append({
                "k": k,
                "radius": r,
                "future_value": a,
                "past_value": b,
                "future_liminf": min(fv[k:]),
                "future_limsup": max(fv[k:]),
                "past_liminf": min(pv[k:]),
                "past_limsup": max(pv[k:]),
            })
        return rows

    def to_dict(self) -> Dict:
        return {
            "direction": self.direction,
            "passed": self.passed,
            "p_ref": list(self.probe.p_ref),
            "target": list(self.probe.target),
            "approach": list(self.probe.approach),
            "functions": self.functions,
            "tol": self.tol,
        }


class SemicontinuityProber:
    """Evaluates d(p_ref, .) and d(., p_ref) along straight sequences converging to a target."""

    def __init__(self, model, radii: Sequence[float] = DEFAULT_RADII,
                 probe_tol: float = PROBE_TOL, verbose: bool = False):
        self.model = model
        self.radii = tuple(radii)
        self.probe_tol = probe_tol
        self.verbose = verbose

    def _log(self, message: str):
        """Log debug information if verbose mode is enabled."""
        if self.verbose:
            print(f"[DKIT] {message}")

    def sequence(self, p_ref, target, approach) -> SequenceProbe:
        p_ref, target = np.asarray(p_ref, dtype=float), np.asarray(target, dtype=float)
        u = np.asarray(approach, dtype=float)
        u = u / np.linalg.norm(u)
        if not (bool(self.model.contains(p_ref)) and bool(self.model.contains(target))):
            raise ValueError("Probe reference and target must lie in the model domain")
        radii = np.array(self.radii)
        points = target + radii[:, None] * u
        keep = self.model.contains(points)
        if keep.sum() < 3:
            raise ValueError(f"Probe sequence towards {target.tolist()} leaves the domain")
        radii, points = radii[keep], points[keep]
        return SequenceProbe(
            p_ref=tuple(p_ref.tolist()), target=tuple(target.tolist()), approach=tuple(u.tolist()),
            radii=radii.tolist(), points=[tuple(x) for x in points.tolist()],
            future_values=self.model.distances(p_ref, points).tolist(),
            past_values=self.model.distances(points, p_ref).tolist(),
            target_future=float(self.model.distances(p_ref, target)),
            target_past=float(self.model.distances(target, p_ref)),
        )

    def probe(self, p_ref, target, direction: str = "upper", approach=(0.0, 1.0)) -> ProbeReport:
        if direction not in ("lower", "upper"):
            raise ValueError(f"direction must be 'lower' or 'upper', got {direction!r}")
        seq = self.sequence(p_ref, target, approach)
        report = ProbeReport(direction=direction, probe=seq, tol=self.probe_tol)
        for name, values, at_target in (("future", seq.future_values, seq.target_future),
                                        ("past", seq.past_values, seq.target_past)):
            limit = _aitken(values)
            gap = _gap(limit, at_target, direction)
            report.functions[name] = {
                "limit": limit,
                "target_value": at_target,
                "gap": gap,
                "passed": not gap > self.probe_tol,
            }
        if not report.passed:
            self._log(f"{direction} semicontinuity fails at {seq.target} from {seq.p_ref}, gap {report.gap:.6g}")
        return report


def semicontinuity_probe(model, p_ref, target, direction: str = "upper", schedule: Optional[Sequence[float]] = None,
                         approach=(0.0, 1.0), probe_tol: float = PROBE_TOL) -> ProbeReport:
    """
    Probe lower or upper semicontinuity of d(p_ref, .) and d(., p_ref) at target.

    Args:
        model: Model with a vectorized ``distances`` method
        p_ref: Reference point
        target: Limit point
        direction: 'lower' or 'upper'
        schedule: Radii of the sequence points, default 2^-k for k = 1..12
        approach: Direction along which the sequence approaches the target
        probe_tol: Largest tolerated gap between the limit and the target value

    Returns:
        ProbeReport with the estimated limit and gap of each function
    """
    prober = SemicontinuityProber(model, schedule or DEFAULT_RADII, probe_tol)
    return prober.probe(p_ref, target, direction, approach)


def consistency_verdict(probes_all_pass: bool, reflectivity_passes: bool, upper_probe_failed: bool) -> str:
    """CONSISTENT unless passing probes meet failing reflectivity, or reflectivity fails with no upper failure."""
    if probes_all_pass and not reflectivity_passes:
        return "INCONSISTENT"
    if not reflectivity_passes and not upper_probe_failed:
        return "INCONSISTENT"
    return "CONSISTENT"


@dataclass
class ContinuityConsistency:
    table: ConsistencyReport
    probes_run: int = 0
    upper_failures: int = 0
    lower_failures: int = 0
    failing_probes: List[ProbeReport] = field(default_factory=list)
    d_reflectivity: bool = True

    @property
    def probes_all_pass(self) -> bool:
        return self.upper_failures == 0 and self.lower_failures == 0

    @property
    def verdict(self) -> str:
        return consistency_verdict(self.probes_all_pass, self.d_reflectivity, self.upper_failures > 0)

    @property
    def consistent(self) -> bool:
        return self.verdict == "CONSISTENT" and self.table.consistent

    def to_dict(self) -> Dict:
        return {
            "verdict": self.verdict,
            "consistent": self.consistent,
            "probes_run": self.probes_run,
            "upper_failures": self.upper_failures,
            "any_upper_failure": self.upper_failures > 0,
            "lower_failures": self.lower_failures,
            "probes_all_pass": self.probes_all_pass,
            "d_reflectivity": self.d_reflectivity,
            "failing_probes": [p.to_dict() for p in self.failing_probes[:5]],
            "implications": self.table.to_dict()["checks"],
        }


def _spread(labels: Sequence[str], count: int) -> List[str]:
    if len(labels) <= count:
        return list(labels)
    picks = np.unique(np.linspace(0, len(labels) - 1, count).round().astype(int))
    return [labels[k] for k in picks]


def reflectivity_continuity_consistency(model, sample_space, n_targets: int = 6, max_witnesses: int = 50,
                                        probe_tol: float = PROBE_TOL, verbose: bool = False) -> ContinuityConsistency:
    """
    Cross-check d-reflectivity of the sample against semicontinuity probes on the model.

    Baseline probes run on a spread of ground events along the coordinate
    axes. Each reflectivity failure (p, q; r) adds upper probes of d^r at p
    (future) or d_r at q (past) from every compass direction.
    """
    D = sample_space.matrix
    prober = SemicontinuityProber(model, probe_tol=probe_tol, verbose=verbose)
    reflect = reflectivity_report(D)
    result = ContinuityConsistency(table=ConsistencyReport(), d_reflectivity=reflect.passed("d_reflectivity"))

    def run(p_label: str, t_label: str, direction: str, approach) -> Optional[ProbeReport]:
        try:
            rep = prober.probe(sample_space.event(p_label).coords, sample_space.event(t_label).coords,
                               direction, approach)
        except ValueError:
            return None
        result.probes_run += 1
        if not rep.passed:
            if direction == "upper":
                result.upper_failures += 1
            else:
                result.lower_failures += 1
            result.failing_probes.append(rep)
        return rep

    targets = _spread(D.ground, n_targets)
    refs = _spread(D.ground[::-1], n_targets)
    for t_label in targets:
        for p_label in refs:
            for u in AXIS_DIRECTIONS:
                for direction in ("lower", "upper"):
                    run(p_label, t_label, direction, u)

    targeted: Dict[str, bool] = {}
    for kind in ("future", "past"):
        hit = False
        for p, q, r in reflectivity_failures(D, kind, max_witnesses):
            target = p if kind == "future" else q
            for u in COMPASS_DIRECTIONS:
                rep = run(r, target, "upper", u)
                if rep is None:
                    continue
                fn = rep.functions["past" if kind == "future" else "future"]
                hit = hit or not fn["passed"]
            if hit:
                break
        targeted[kind] = hit

    table = result.table
    table.add("all semicontinuity probes pass", "d_reflectivity",
              int(result.probes_all_pass and not result.d_reflectivity))
    table.add("d_reflectivity fails", "some upper probe fails",
              int(not result.d_reflectivity and result.upper_failures == 0))
    table.add("d^r upper semicontinuous where it vanishes", "future d-reflectivity",
              int(not reflect.passed("future_d_reflectivity") and not targeted["future"]),
              witness=reflect["future_d_reflectivity"].witness)
    table.add("d_r upper semicontinuous where it vanishes", "past d-reflectivity",
              int(not reflect.passed("past_d_reflectivity") and not targeted["past"]),
              witness=reflect["past_d_reflectivity"].witness)
    return result
