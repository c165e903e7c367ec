"""
Catalog of 2D model spacetimes with exact distance oracles.

Coordinates are (t, x). Every model lives in a closed coordinate box and
supplies exact d, I, J and a diamond precompactness test. Distances are
vectorized: ``_d_array(P, Q)`` broadcasts over leading axes of point
arrays shaped (..., 2).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .distance_core import DistanceMatrix, ExtReal, Relation, TOL_D
from .finsler_lab import NULL_EPS, FinslerNorm, MinkowskiNorm, RandersNorm, build_norm

Box = Tuple[Tuple[float, float], Tuple[float, float]]

DEFAULT_BOX: Box = ((-3.0, 3.0), (-3.0, 3.0))
SAMPLING_MODES = ("poisson", "grid", "grid_with_probes")


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError(f"Points must have 2 coordinates (t, x), got shape {arr.shape}")
    return arr


def _normalize_box(box) -> Box:
    (t0, t1), (x0, x1) = box
    if not (t0 < t1 and x0 < x1):
        raise ValueError(f"Degenerate coordinate box: {box}")
    return (float(t0), float(t1)), (float(x0), float(x1))


class SpacetimeModel:
    """
    Base model: a flat cone structure on a coordinate box.

    Subclasses change the removed set, the straight-segment obstruction
    rule and, for the slit, the distance formula itself.
    """

    kind = "abstract"

    def __init__(self, box: Box = DEFAULT_BOX, norm: Optional[FinslerNorm] = None):
        self.box = _normalize_box(box)
        self.norm = norm if norm is not None else MinkowskiNorm()

    def descriptor(self) -> Dict:
        return {"kind": self.kind, "box": [list(self.box[0]), list(self.box[1])]}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(box={self.box})"

    # Domain

    def in_box(self, points) -> np.ndarray:
        P = _as_points(points)
        (t0, t1), (x0, x1) = self.box
        return (P[..., 0] >= t0) & (P[..., 0] <= t1) & (P[..., 1] >= x0) & (P[..., 1] <= x1)

    def removed(self, points) -> np.ndarray:
        return np.zeros(_as_points(points).shape[:-1], dtype=bool)

    def contains(self, points) -> np.ndarray:
        return self.in_box(points) & ~self.removed(points)

    def _require_domain(self, *points):
        for point in points:
            if not bool(self.contains(point)):
                raise ValueError(f"Point {tuple(np.asarray(point, dtype=float))} is outside the {self.kind} domain")

    # Local cone data

    def causal_vectors(self, V) -> np.ndarray:
        return self.norm.cone_closure(V)

    def local_norm(self, V) -> np.ndarray:
        return self.norm.evaluate(V)

    def segment_blocked(self, P, Q) -> np.ndarray:
        """True where the straight segment P->Q meets the removed set."""
        P, Q = np.broadcast_arrays(_as_points(P), _as_points(Q))
        return np.zeros(P.shape[:-1], dtype=bool)

    # Exact oracles

    def _d_array(self, P, Q) -> np.ndarray:
        P, Q = _as_points(P), _as_points(Q)
        V = Q - P
        return np.where(self.segment_blocked(P, Q), 0.0, self.local_norm(V))

    def _j_array(self, P, Q) -> np.ndarray:
        P, Q = _as_points(P), _as_points(Q)
        return self.causal_vectors(Q - P) & ~self.segment_blocked(P, Q)

    def distances(self, P, Q) -> np.ndarray:
        """Vectorized exact d over broadcast point arrays."""
        return self._d_array(P, Q)

    def exact_d(self, p, q) -> ExtReal:
        self._require_domain(p, q)
        return ExtReal(float(self._d_array(p, q)))

    def exact_I(self, p, q) -> bool:
        return self.exact_d(p, q).value > 0

    def exact_J(self, p, q) -> bool:
        self._require_domain(p, q)
        return bool(self._j_array(p, q))

    def distance_matrix(self, points) -> np.ndarray:
        P = _as_points(points)
        return self._d_array(P[:, None, :], P[None, :, :])

    def j_matrix(self, points) -> np.ndarray:
        P = _as_points(points)
        return self._j_array(P[:, None, :], P[None, :, :])

    # Diamonds

    def diamond_vertices(self, p, q) -> np.ndarray:
        """Corners of the closed coordinate diamond J+(p) & J-(q): p, left, q, right."""
        p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
        left, right = self.norm.boundary_rays()
        corners = [p]
        for a, b in ((left, right), (right, left)):
            # p + s*a = q - u*b
            coef = np.column_stack([a, b])
            s, _ = np.linalg.solve(coef, q - p)
            corners.append(p + s * a)
        return np.array([corners[0], corners[1], q, corners[2]])

    def _diamond_hits_removed(self, vertices: np.ndarray) -> bool:
        return False

    def diamond_precompact(self, p, q) -> bool:
        """Closed coordinate diamond strictly inside the box and off the removed set."""
        if not self.exact_I(p, q):
            raise ValueError(f"diamond_precompact needs p << q, got p={tuple(p)} q={tuple(q)}")
        vertices = self.diamond_vertices(p, q)
        (t0, t1), (x0, x1) = self.box
        inside = (np.all(vertices[:, 0] > t0) and np.all(vertices[:, 0] < t1)
                  and np.all(vertices[:, 1] > x0) and np.all(vertices[:, 1] < x1))
        return bool(inside) and not self._diamond_hits_removed(vertices)


class Minkowski(SpacetimeModel):
    kind = "minkowski"


class FlatFinsler(SpacetimeModel):
    """Translation-invariant Lorentz-Finsler model: d(p, q) = F(q - p)."""

    kind = "flat_finsler"

    def __init__(self, norm: Optional[FinslerNorm] = None, box: Box = DEFAULT_BOX):
        super().__init__(box, norm if norm is not None else RandersNorm(0.0))

    def descriptor(self) -> Dict:
        desc = super().descriptor()
        desc["norm"] = self.norm.descriptor()
        return desc


class CtcCylinder(SpacetimeModel):
    """
    Time-periodic cylinder: the t-range of the box is one period, so closed
    timelike loops make every distance infinite, the diagonal included.
    """

    kind = "ctc_cylinder"

    def __init__(self, period: Optional[float] = None, box: Box = DEFAULT_BOX):
        super().__init__(box)
        width = self.box[0][1] - self.box[0][0]
        self.period = float(period) if period is not None else width
        if self.period <= 0:
            raise ValueError(f"Cylinder period must be positive, got {period}")

    def descriptor(self) -> Dict:
        desc = super().descriptor()
        desc["period"] = self.period
        return desc

    def _d_array(self, P, Q) -> np.ndarray:
        P, Q = np.broadcast_arrays(_as_points(P), _as_points(Q))
        return np.full(P.shape[:-1], np.inf)

    def _j_array(self, P, Q) -> np.ndarray:
        P, Q = np.broadcast_arrays(_as_points(P), _as_points(Q))
        return np.ones(P.shape[:-1], dtype=bool)

    def diamond_precompact(self, p, q) -> bool:
        if not self.exact_I(p, q):
            raise ValueError("diamond_precompact needs p << q")
        # every diamond is the whole cylinder
        return False


class SlitMinkowski(SpacetimeModel):
    """Minkowski with the closed half-line {t = 0, x <= 0} removed."""

    kind = "slit_minkowski"

    def removed(self, points) -> np.ndarray:
        P = _as_points(points)
        return (np.abs(P[..., 0]) <= NULL_EPS) & (P[..., 1] <= NULL_EPS)

    def segment_blocked(self, P, Q) -> np.ndarray:
        P, Q = np.broadcast_arrays(_as_points(P), _as_points(Q))
        dt = Q[..., 0] - P[..., 0]
        crosses = (P[..., 0] < 0) & (Q[..., 0] > 0)
        safe_dt = np.where(crosses, dt, 1.0)
        x_cross = P[..., 1] - P[..., 0] * (Q[..., 1] - P[..., 1]) / safe_dt
        return crosses & (x_cross <= NULL_EPS)

    def _tip_route(self, P, Q):
        """Length and admissibility of the route bent around the tip (0, 0)."""
        room = np.minimum(P[..., 1] - P[..., 0], Q[..., 1] + Q[..., 0])
        legs = self.causal_vectors(-P) & self.causal_vectors(Q)
        ok = (room > NULL_EPS) & legs
        return ok, self.local_norm(-P) + self.local_norm(Q)

    def _d_array(self, P, Q) -> np.ndarray:
        P, Q = np.broadcast_arrays(_as_points(P), _as_points(Q))
        blocked = self.segment_blocked(P, Q)
        straight = self.local_norm(Q - P)
        ok, bent = self._tip_route(P, Q)
        return np.where(~blocked, straight, np.where(ok, bent, 0.0))

    def _j_array(self, P, Q) -> np.ndarray:
        P, Q = np.broadcast_arrays(_as_points(P), _as_points(Q))
        blocked = self.segment_blocked(P, Q)
        ok, _ = self._tip_route(P, Q)
        return self.causal_vectors(Q - P) & (~blocked | ok)

    def _diamond_hits_removed(self, vertices: np.ndarray) -> bool:
        p, left, q, right = vertices
        if not (p[0] <= 0 <= q[0]):
            return False
        # left edge of the section at t = 0
        x_left = max(p[1] + p[0], q[1] - q[0])
        return x_left <= NULL_EPS


class PuncturedMinkowski(SpacetimeModel):
    """Minkowski with one point removed (default: the origin)."""

    kind = "punctured_minkowski"

    def __init__(self, point: Sequence[float] = (0.0, 0.0), box: Box = DEFAULT_BOX):
        super().__init__(box)
        self.point = np.asarray(point, dtype=float)

    def descriptor(self) -> Dict:
        desc = super().descriptor()
        desc["point"] = self.point.tolist()
        return desc

    def removed(self, points) -> np.ndarray:
        P = _as_points(points)
        return np.linalg.norm(P - self.point, axis=-1) <= NULL_EPS

    def segment_blocked(self, P, Q) -> np.ndarray:
        P, Q = np.broadcast_arrays(_as_points(P), _as_points(Q))
        A = P - self.point
        V = Q - P
        cross = A[..., 0] * V[..., 1] - A[..., 1] * V[..., 0]
        length = np.linalg.norm(V, axis=-1)
        collinear = np.abs(cross) <= NULL_EPS * np.maximum(length, 1.0)
        safe = np.where(length > 0, length ** 2, 1.0)
        s = -(A * V).sum(axis=-1) / safe
        return collinear & (length > 0) & (s >= 0) & (s <= 1)

    def _d_array(self, P, Q) -> np.ndarray:
        P, Q = np.broadcast_arrays(_as_points(P), _as_points(Q))
        # timelike segments through the hole can be bent around it
        return self.local_norm(Q - P)

    def _j_array(self, P, Q) -> np.ndarray:
        P, Q = np.broadcast_arrays(_as_points(P), _as_points(Q))
        V = Q - P
        timelike = self.local_norm(V) > 0
        return self.causal_vectors(V) & (~self.segment_blocked(P, Q) | timelike)

    def _diamond_hits_removed(self, vertices: np.ndarray) -> bool:
        p, _, q, _ = vertices
        return bool(self.causal_vectors(self.point - p)) and bool(self.causal_vectors(q - self.point))


MODEL_KINDS = {
    "minkowski": Minkowski,
    "ctc_cylinder": CtcCylinder,
    "slit_minkowski": SlitMinkowski,
    "punctured_minkowski": PuncturedMinkowski,
    "flat_finsler": FlatFinsler,
}


def build_model(descriptor: Dict) -> SpacetimeModel:
    """Build a model from a scenario descriptor such as {"kind": "slit_minkowski", "box": [[-2, 2], [-2, 2]]}."""
    if "kind" not in descriptor:
        raise ValueError("Model descriptor needs a 'kind'")
    kind = descriptor["kind"]
    if kind not in MODEL_KINDS:
        raise ValueError(f"Unknown model kind: {kind!r} (known: {', '.join(sorted(MODEL_KINDS))})")
    box = descriptor.get("box", DEFAULT_BOX)
    if kind == "ctc_cylinder":
        return CtcCylinder(period=descriptor.get("period"), box=box)
    if kind == "punctured_minkowski":
        return PuncturedMinkowski(point=descriptor.get("point", (0.0, 0.0)), box=box)
    if kind == "flat_finsler":
        return FlatFinsler(norm=build_norm(descriptor.get("norm", {"kind": "randers", "b": 0.0})), box=box)
    return MODEL_KINDS[kind](box=box)


@dataclass(frozen=True)
class Event:
    label: str
    coords: Tuple[float, float]

    @property
    def t(self) -> float:
        return self.coords[0]

    @property
    def x(self) -> float:
        return self.coords[1]


@dataclass
class SampleSpace:
    """A finite sample of a model: events, their probes and the matrix over both."""

    model: SpacetimeModel
    events: Tuple[Event, ...]
    matrix: DistanceMatrix
    probes: Tuple[Event, ...] = ()
    probe_owner: Dict[str, str] = field(default_factory=dict)
    spacing: Optional[float] = None
    probe_offset: Optional[float] = None

    @property
    def all_events(self) -> Tuple[Event, ...]:
        return self.events + self.probes

    @property
    def ground(self) -> Tuple[str, ...]:
        return tuple(e.label for e in self.events)

    def coords_of(self, labels: Optional[Sequence[str]] = None) -> np.ndarray:
        lookup = {e.label: e.coords for e in self.all_events}
        labels = self.matrix.labels if labels is None else labels
        return np.array([lookup[label] for label in labels], dtype=float)

    def event(self, label: str) -> Event:
        for e in self.all_events:
            if e.label == label:
                return e
        raise ValueError(f"Unknown event label: {label!r}")

    def exact_J(self, labels: Optional[Sequence[str]] = None) -> Relation:
        labels = tuple(self.ground if labels is None else labels)
        return Relation(labels, self.model.j_matrix(self.coords_of(labels)))

    def exact_I(self, labels: Optional[Sequence[str]] = None) -> Relation:
        labels = tuple(self.ground if labels is None else labels)
        return Relation(labels, self.model.distance_matrix(self.coords_of(labels)) > 0)

    def export(self, out_dir: str, stem: str = "sample") -> Tuple[str, str]:
        """Write coordinates CSV and matrix CSV; returns both paths."""
        os.makedirs(out_dir, exist_ok=True)
        coords_path = os.path.join(out_dir, f"{stem}_coords.csv")
        matrix_path = os.path.join(out_dir, f"{stem}_matrix.csv")
        with open(coords_path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["label", "t", "x", "probe_of"])
            for e in self.all_events:
                writer.writerow([e.label, repr(e.t), repr(e.x), self.probe_owner.get(e.label, "")])
        self.matrix.to_csv(matrix_path)
        return coords_path, matrix_path


def default_region(model: SpacetimeModel) -> Box:
    """The model box shrunk by a factor 3 about its centre."""
    (t0, t1), (x0, x1) = model.box
    tc, xc = (t0 + t1) / 2, (x0 + x1) / 2
    ht, hx = (t1 - t0) / 6, (x1 - x0) / 6
    return (tc - ht, tc + ht), (xc - hx, xc + hx)


def _event_labels(count: int) -> List[str]:
    width = max(3, len(str(max(count - 1, 0))))
    return [f"e{i:0{width}d}" for i in range(count)]


def sample_from_points(model: SpacetimeModel, points, labels: Optional[Sequence[str]] = None,
                       tol: float = TOL_D) -> SampleSpace:
    """Sample space over explicit coordinates, no probes."""
    P = _as_points(points).reshape(-1, 2)
    if not bool(np.all(model.contains(P))):
        raise ValueError("Some points lie outside the model domain")
    labels = list(labels) if labels is not None else _event_labels(len(P))
    if len(labels) != len(P):
        raise ValueError(f"{len(labels)} labels for {len(P)} points")
    events = tuple(Event(label, (float(t), float(x))) for label, (t, x) in zip(labels, P))
    matrix = DistanceMatrix(tuple(labels), model.distance_matrix(P), tol)
    return SampleSpace(model=model, events=events, matrix=matrix)


def _grid_points(region: Box, n: int) -> Tuple[np.ndarray, float]:
    m = math.isqrt(n)
    if m * m != n or m < 2:
        raise ValueError(f"Grid sampling needs a perfect square n >= 4, got {n}")
    (t0, t1), (x0, x1) = region
    ts = np.linspace(t0, t1, m)
    xs = np.linspace(x0, x1, m)
    spacing = min(ts[1] - ts[0], xs[1] - xs[0])
    tt, xx = np.meshgrid(ts, xs, indexing="ij")
    return np.column_stack([tt.ravel(), xx.ravel()]), spacing


def _poisson_points(model: SpacetimeModel, region: Box, n: int,
                    rng: np.random.Generator, max_rounds: int = 1000) -> np.ndarray:
    (t0, t1), (x0, x1) = region
    accepted: List[np.ndarray] = []
    count = 0
    for _ in range(max_rounds):
        batch = np.column_stack([rng.uniform(t0, t1, n), rng.uniform(x0, x1, n)])
        batch = batch[model.contains(batch)]
        accepted.append(batch)
        count += len(batch)
        if count >= n:
            return np.concatenate(accepted)[:n]
    raise ValueError(f"Could not draw {n} points inside the domain of {model.kind}")


def sample(model: SpacetimeModel, n: int, mode: str = "grid_with_probes", seed: int = 0,
           region: Optional[Box] = None, probe_multiplier: int = 1, tol: float = TOL_D) -> SampleSpace:
    """
    Draw a finite sample of the model.

    Args:
        model: Catalog model
        n: Number of events (a perfect square for grid modes)
        mode: 'poisson', 'grid' or 'grid_with_probes'
        seed: Seed for the poisson mode
        region: Coordinate box to sample in, defaults to the central third of the model box
        probe_multiplier: Number of past and future probes per event
        tol: Comparison tolerance stored on the matrix

    Returns:
        SampleSpace whose matrix ground is the event labels

    Raises:
        ValueError: For n < 2, unknown modes, or a domain too small for probes
    """
    if n < 2:
        raise ValueError(f"Sample needs n >= 2, got {n}")
    if mode not in SAMPLING_MODES:
        raise ValueError(f"Unknown sampling mode: {mode!r}")
    region = _normalize_box(region) if region is not None else default_region(model)
    if not bool(np.all(model.in_box(np.array([[region[0][0], region[1][0]], [region[0][1], region[1][1]]])))):
        raise ValueError(f"Sampling region {region} leaves the model box {model.box}")

    spacing = None
    if mode == "poisson":
        points = _poisson_points(model, region, n, np.random.default_rng(seed))
    else:
        points, spacing = _grid_points(region, n)
        points = points[model.contains(points)]

    labels = _event_labels(len(points))
    events = tuple(Event(label, (float(t), float(x))) for label, (t, x) in zip(labels, points))
    if mode != "grid_with_probes":
        matrix = DistanceMatrix(tuple(labels), model.distance_matrix(points), tol)
        return SampleSpace(model=model, events=events, matrix=matrix, spacing=spacing)

    if probe_multiplier < 1:
        raise ValueError(f"probe_multiplier must be >= 1, got {probe_multiplier}")
    delta = spacing / 8.0
    probes: List[Event] = []
    owner: Dict[str, str] = {}
    for e in events:
        base = np.array(e.coords)
        for j in range(1, probe_multiplier + 1):
            offset = np.array([delta * j / probe_multiplier, 0.0])
            past, future = base - offset, base + offset
            if not (bool(model.contains(past)) and bool(model.contains(future))
                    and model.exact_I(past, base) and model.exact_I(base, future)):
                raise ValueError(f"Domain too small for probes around {e.label} at {e.coords}")
            for sign, point in (("-", past), ("+", future)):
                probe = Event(f"{e.label}{sign}{j}", (float(point[0]), float(point[1])))
                probes.append(probe)
                owner[probe.label] = e.label

    all_points = np.array([ev.coords for ev in events + tuple(probes)], dtype=float)
    all_labels = tuple(labels) + tuple(p.label for p in probes)
    matrix = DistanceMatrix(all_labels, model.distance_matrix(all_points), tol, tuple(labels))
    return SampleSpace(model=model, events=events, matrix=matrix, probes=tuple(probes),
                       probe_owner=owner, spacing=spacing, probe_offset=delta)


@dataclass
class OracleReport:
    resolution: int
    rows: List[Dict] = field(default_factory=list)
    tol: float = TOL_D

    @property
    def max_gap(self) -> float:
        return max((r["gap"] for r in self.rows), default=0.0)

    @property
    def min_gap(self) -> float:
        return min((r["gap"] for r in self.rows), default=0.0)

    @property
    def mean_relative_gap(self) -> float:
        rel = [r["relative_gap"] for r in self.rows if r["exact"] > 0 and math.isfinite(r["exact"])]
        return float(np.mean(rel)) if rel else 0.0

    @property
    def lower_bound_ok(self) -> bool:
        return self.min_gap >= -self.tol

    def to_dict(self) -> Dict:
        return {
            "resolution": self.resolution,
            "pairs": self.rows,
            "max_gap": self.max_gap,
            "min_gap": self.min_gap,
            "mean_relative_gap": self.mean_relative_gap,
            "lower_bound_ok": self.lower_bound_ok,
        }


class GridOracle:
    """
    Brute-force longest causal polygon between two points.

    The grid is anchored at the source p with step h = box width / resolution
    and limited to the coordinate diamond of (p, q). Edges join every
    causal pair of nodes whose straight segment avoids the removed set;
    the DP runs over rows of constant t. The result is the best path
    ending at a node that sees q inside its causal past cone.
    """

    def __init__(self, model: SpacetimeModel, resolution: int = 64,
                 strict_mode: bool = True, verbose: bool = False):
        self.model = model
        self.resolution = int(resolution)
        self.strict_mode = strict_mode
        self.verbose = verbose
        if self.resolution < 2:
            raise ValueError(f"Oracle resolution must be >= 2, got {resolution}")
        self.h = (model.box[0][1] - model.box[0][0]) / self.resolution

    def _log(self, message: str):
        """Log debug information if verbose mode is enabled."""
        if self.verbose:
            print(f"[DKIT] {message}")

    def _validate_input(self, p: np.ndarray, q: np.ndarray) -> bool:
        if bool(self.model.contains(p)) and bool(self.model.contains(q)):
            return True
        message = f"Oracle endpoints outside the domain: {p.tolist()} -> {q.tolist()}"
        if self.strict_mode:
            raise ValueError(message)
        self._log(f"Warning: {message}, returning 0")
        return False

    def _nodes(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        h = self.h
        rows = int(math.floor((q[0] - p[0]) / h + 1e-9))
        span = int(math.ceil((q[0] - p[0]) / h)) + 1
        i, j = np.meshgrid(np.arange(0, rows + 1), np.arange(-span, span + 1), indexing="ij")
        nodes = p + h * np.column_stack([i.ravel(), j.ravel()]).astype(float)
        keep = (self.model.causal_vectors(nodes - p) & self.model.causal_vectors(q - nodes)
                & self.model.contains(nodes))
        nodes = nodes[keep]
        order = np.lexsort((nodes[:, 1], nodes[:, 0]))
        return nodes[order]

    def longest(self, p, q) -> float:
        p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
        if not self._validate_input(p, q):
            return 0.0
        if not bool(self.model.causal_vectors(q - p)):
            return 0.0
        nodes = self._nodes(p, q)
        if len(nodes) == 0:
            return 0.0
        best = np.full(len(nodes), -np.inf)
        src = np.nonzero(np.all(np.isclose(nodes, p, atol=1e-12), axis=1))[0]
        if src.size == 0:
            return 0.0
        best[src[0]] = 0.0
        levels = np.round((nodes[:, 0] - p[0]) / self.h).astype(int)
        for level in np.unique(levels):
            if level == 0:
                continue
            here = np.nonzero(levels == level)[0]
            before = np.nonzero((levels < level) & np.isfinite(best))[0]
            if before.size == 0:
                continue
            U, V = nodes[before][:, None, :], nodes[here][None, :, :]
            allowed = self.model.causal_vectors(V - U) & ~self.model.segment_blocked(U, V)
            weights = np.where(allowed, best[before][:, None] + self.model.local_norm(V - U), -np.inf)
            best[here] = np.maximum(best[here], weights.max(axis=0))
        sinks = (np.isfinite(best) & self.model.causal_vectors(q - nodes)
                 & ~self.model.segment_blocked(nodes, np.broadcast_to(q, nodes.shape)))
        if sinks.any():
            # closing leg from any reached node to q, which need not lie on the grid
            value = float(np.max(best[sinks] + self.model.local_norm(q - nodes[sinks])))
        else:
            value = 0.0
        self._log(f"Oracle {p.tolist()} -> {q.tolist()}: {len(nodes)} nodes, value {value:.6f}")
        return value

    def run(self, pairs: Sequence[Tuple[Sequence[float], Sequence[float]]],
            labels: Optional[Sequence[Tuple[str, str]]] = None) -> OracleReport:
        report = OracleReport(resolution=self.resolution)
        for k, (p, q) in enumerate(pairs):
            exact = self.model._d_array(np.asarray(p, float), np.asarray(q, float)).item()
            oracle = self.longest(p, q)
            gap = exact - oracle if math.isfinite(exact) else math.inf
            row = {
                "p": labels[k][0] if labels else list(map(float, p)),
                "q": labels[k][1] if labels else list(map(float, q)),
                "exact": exact,
                "oracle": oracle,
                "gap": gap,
                "relative_gap": gap / exact if exact > 0 and math.isfinite(exact) else 0.0,
            }
            report.rows.append(row)
        return report


def oracle_pairs(sample_space: SampleSpace, max_pairs: int = 20, seed: int = 0) -> List[Tuple[str, str]]:
    """Up to max_pairs chronological ground pairs, drawn with a seeded generator."""
    D = sample_space.matrix
    gi = D.ground_index
    sub = D.entries[np.ix_(gi, gi)]
    rows, cols = np.nonzero((sub > D.tol) & np.isfinite(sub))
    if rows.size == 0:
        return []
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(rows.size, size=min(max_pairs, rows.size), replace=False))
    return [(D.ground[rows[k]], D.ground[cols[k]]) for k in chosen]


def verify_against_grid_oracle(model: SpacetimeModel, sample_space: SampleSpace, resolution: int,
                               pairs: Optional[Sequence[Tuple[str, str]]] = None, max_pairs: int = 20,
                               seed: int = 0, verbose: bool = False) -> OracleReport:
    """Compare exact_d with the grid oracle on labelled sample pairs."""
    labelled = list(pairs) if pairs is not None else oracle_pairs(sample_space, max_pairs, seed)
    coords = [(sample_space.event(p).coords, sample_space.event(q).coords) for p, q in labelled]
    oracle = GridOracle(model, resolution, verbose=verbose)
    return oracle.run(coords, labels=labelled)


def oracle_convergence(model: SpacetimeModel, pairs: Sequence[Tuple[Sequence[float], Sequence[float]]],
                       resolutions: Sequence[int] = (64, 128), verbose: bool = False) -> Dict:
    """Run the oracle at several resolutions and report the gap ratios."""
    reports = [GridOracle(model, r, verbose=verbose).run(pairs) for r in resolutions]
    means = [rep.mean_relative_gap for rep in reports]
    ratios = [means[k + 1] / means[k] if means[k] > 0 else 0.0 for k in range(len(means) - 1)]
    return {
        "resolutions": list(resolutions),
        "mean_relative_gap": means,
        "ratios": ratios,
        "lower_bound_ok": all(rep.lower_bound_ok for rep in reports),
        "reports": [rep.to_dict() for rep in reports],
    }


def random_timelike_pairs(count: int, seed: int = 0) -> List[Tuple[Tuple[float, float], Tuple[float, float]]]:
    """Timelike pairs inside the default box with proper time of order one."""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        p = (rng.uniform(-2.5, -0.5), rng.uniform(-1.0, 1.0))
        dt = rng.uniform(1.5, 3.0)
        dx = rng.uniform(-0.6, 0.6) * dt
        pairs.append((p, (p[0] + dt, p[1] + dx)))
    return pairs
