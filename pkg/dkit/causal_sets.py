"""
Causal sets: Poisson sprinklings into catalog models, their order and
links, and the longest-chain distance.

Chain length counts edges, so d(p, p) = 0 and chains realize the reverse
triangle inequality with equality.
"""

from __future__ import annotations

import bisect
import csv
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .distance_core import DistanceMatrix, Relation, TOL_D
from .helpers import export_edge_list

UNIT_DIAMOND = {"kind": "diamond", "bottom": (0.0, 0.0), "top": (1.0, 0.0)}
SCALING_MIN_N = 2000
SCALING_RATIO_RANGE = (1.5, 2.2)


@dataclass(frozen=True)
class Region:
    """Coordinate box, or causal diamond sampled uniformly in null coordinates u = t - x, v = t + x."""

    kind: str
    bounds: Tuple[Tuple[float, float], Tuple[float, float]]

    @classmethod
    def parse(cls, desc) -> "Region":
        if isinstance(desc, Region):
            return desc
        if isinstance(desc, dict):
            kind = desc.get("kind", "box")
            if kind == "diamond":
                (tb, xb), (tt, xt) = desc["bottom"], desc["top"]
                u0, v0, u1, v1 = tb - xb, tb + xb, tt - xt, tt + xt
                if not (u1 > u0 and v1 > v0):
                    raise ValueError(f"Diamond top {desc['top']} is not in the chronological future of its bottom")
                return cls("diamond", ((u0, u1), (v0, v1)))
            if kind == "box":
                return cls("box", (tuple(desc["t"]), tuple(desc["x"])))
            raise ValueError(f"Unknown region kind: {kind!r}")
        (t0, t1), (x0, x1) = desc
        return cls("box", ((float(t0), float(t1)), (float(x0), float(x1))))

    @property
    def area(self) -> float:
        (a0, a1), (b0, b1) = self.bounds
        scale = 0.5 if self.kind == "diamond" else 1.0
        return scale * (a1 - a0) * (b1 - b0)

    def draw_native(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Uniform points in the region's own coordinates: (u, v) for diamonds, (t, x) for boxes."""
        (a0, a1), (b0, b1) = self.bounds
        return np.column_stack([rng.uniform(a0, a1, count), rng.uniform(b0, b1, count)])

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        a, b = self.draw_native(rng, count).T
        if self.kind == "diamond":
            return np.column_stack([(a + b) / 2.0, (b - a) / 2.0])
        return np.column_stack([a, b])


@dataclass
class CausalSet:
    labels: Tuple[str, ...]
    coords: np.ndarray = field(repr=False)
    order: Relation = field(repr=False)
    links: Relation = field(repr=False)
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_empty(self) -> bool:
        return self.n == 0

    @classmethod
    def from_order(cls, labels: Sequence[str], mask: np.ndarray, coords: Optional[np.ndarray] = None,
                   seed: Optional[int] = None) -> "CausalSet":
        """
        Validate a strict order and derive its links.

        Raises:
            ValueError: If the relation is reflexive somewhere, cyclic or not transitive
        """
        labels = tuple(labels)
        mask = np.asarray(mask, dtype=bool)
        if mask.diagonal().any():
            raise ValueError("order not irreflexive")
        graph = _order_graph(labels, mask)
        if not nx.is_directed_acyclic_graph(graph):
            raise ValueError("order not acyclic")
        if len(labels):
            M = mask.astype(np.float64)
            if np.any(((M @ M) > 0) & ~mask):
                raise ValueError("order not transitive")
        links = _links(labels, mask, graph)
        coords = np.zeros((len(labels), 2)) if coords is None else np.asarray(coords, dtype=float)
        return cls(labels, coords, Relation(labels, mask), links, seed)

    @classmethod
    def from_pairs(cls, labels: Sequence[str], pairs: Sequence[Tuple[str, str]]) -> "CausalSet":
        """Order generated (transitively closed) by the given pairs."""
        labels = tuple(labels)
        graph = nx.DiGraph()
        graph.add_nodes_from(labels)
        graph.add_edges_from(pairs)
        if not nx.is_directed_acyclic_graph(graph):
            raise ValueError("order not acyclic")
        closure = nx.transitive_closure_dag(graph)
        idx = {label: i for i, label in enumerate(labels)}
        mask = np.zeros((len(labels), len(labels)), dtype=bool)
        for u, v in closure.edges():
            mask[idx[u], idx[v]] = True
        return cls.from_order(labels, mask)

    def export(self, out_dir: str, stem: str = "causal_set") -> Tuple[str, str]:
        """Write the link edge list (``u v`` per line) and a coordinates CSV."""
        os.makedirs(out_dir, exist_ok=True)
        links_path = os.path.join(out_dir, f"{stem}_links.txt")
        coords_path = os.path.join(out_dir, f"{stem}_coords.csv")
        export_edge_list(self.links.edges(), links_path)
        with open(coords_path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["label", "t", "x"])
            for label, (t, x) in zip(self.labels, self.coords):
                writer.writerow([label, repr(float(t)), repr(float(x))])
        return links_path, coords_path


def _order_graph(labels: Tuple[str, ...], mask: np.ndarray) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(labels)
    graph.add_edges_from((labels[i], labels[j]) for i, j in np.argwhere(mask))
    return graph


def _links(labels: Tuple[str, ...], mask: np.ndarray, graph: nx.DiGraph) -> Relation:
    """Covering pairs from the chain DP, checked against networkx's transitive reduction."""
    lengths = _longest_chains(labels, mask, graph)
    covering = lengths == 1
    reduced = nx.transitive_reduction(graph)
    idx = {label: i for i, label in enumerate(labels)}
    check = np.zeros_like(covering)
    for u, v in reduced.edges():
        check[idx[u], idx[v]] = True
    if not np.array_equal(check, covering):
        raise RuntimeError("Chain links disagree with the transitive reduction")
    return Relation(labels, covering)


def _longest_chains(labels: Tuple[str, ...], mask: np.ndarray, graph: nx.DiGraph) -> np.ndarray:
    """L[p, q]: edge count of the longest chain from p to q, 0 when q is not above p."""
    n = len(labels)
    idx = {label: i for i, label in enumerate(labels)}
    L = np.zeros((n, n))
    reach = mask | np.eye(n, dtype=bool)
    for label in nx.topological_sort(graph):
        q = idx[label]
        preds = np.nonzero(mask[:, q])[0]
        if len(preds) == 0:
            continue
        candidates = np.where(reach[:, preds], L[:, preds] + 1.0, 0.0)
        L[:, q] = candidates.max(axis=1)
    return L


def sprinkle(model, region, density: float, seed: int, tol: float = TOL_D) -> CausalSet:
    """
    Poisson sprinkling into a region of a model.

    Args:
        model: Catalog model supplying ``contains`` and ``j_matrix``
        region: Region, box ((t0, t1), (x0, x1)) or region dict
        density: Expected points per unit coordinate area
        seed: Seed of the point process

    Returns:
        CausalSet ordered by the model's exact J (diagonal removed); empty when no point is drawn

    Raises:
        ValueError: For non-positive density or a cyclic induced order
    """
    if not density > 0:
        raise ValueError(f"density must be positive, got {density}")
    region = Region.parse(region)
    rng = np.random.default_rng(seed)
    count = int(rng.poisson(density * region.area))
    points = region.draw(rng, count)
    points = points[model.contains(points)] if count else points.reshape(0, 2)
    width = max(3, len(str(max(len(points) - 1, 0))))
    labels = tuple(f"c{i:0{width}d}" for i in range(len(points)))
    if not labels:
        return CausalSet((), np.zeros((0, 2)), Relation((), np.zeros((0, 0), dtype=bool)),
                         Relation((), np.zeros((0, 0), dtype=bool)), seed)
    mask = np.array(model.j_matrix(points), dtype=bool)
    np.fill_diagonal(mask, False)
    return CausalSet.from_order(labels, mask, points, seed)


def chain_distance_matrix(cs: CausalSet, tol: float = TOL_D) -> DistanceMatrix:
    """Longest-chain distance: d(p, q) = edges of the longest chain from p to q."""
    graph = _order_graph(cs.labels, cs.order.mask)
    return DistanceMatrix(cs.labels, _longest_chains(cs.labels, cs.order.mask, graph), tol)


def longest_chain_in_diamond(points_uv: np.ndarray) -> int:
    """
    Edge count of the longest chain between the corners of a diamond
    through points given in null coordinates (patience sorting).
    """
    if len(points_uv) == 0:
        return 1
    order = np.argsort(points_uv[:, 0], kind="stable")
    tails: List[float] = []
    for v in points_uv[order, 1]:
        k = bisect.bisect_left(tails, v)
        if k == len(tails):
            tails.append(v)
        else:
            tails[k] = v
    return len(tails) + 1


@dataclass
class ScalingReport:
    densities: List[float]
    trials: int
    rows: List[Dict] = field(default_factory=list)

    @property
    def medians_increasing(self) -> bool:
        medians = [r["median_length"] for r in self.rows if not r["insufficient"]]
        return all(b > a for a, b in zip(medians, medians[1:]))

    @property
    def ratio_ok(self) -> bool:
        lo, hi = SCALING_RATIO_RANGE
        return all(lo <= r["ratio"] <= hi for r in self.rows
                   if not r["insufficient"] and r["median_n"] >= SCALING_MIN_N)

    @property
    def passed(self) -> bool:
        return self.medians_increasing and self.ratio_ok

    def to_dict(self) -> Dict:
        return {
            "densities": self.densities,
            "trials": self.trials,
            "rows": self.rows,
            "medians_increasing": self.medians_increasing,
            "ratio_ok": self.ratio_ok,
            "passed": self.passed,
        }


def chain_scaling_probe(densities: Sequence[float], trials: int = 20, seed: int = 0) -> ScalingReport:
    """
    Median longest-chain length between the corners of the unit Minkowski
    diamond, per sprinkling density.

    Raises:
        ValueError: If densities are not strictly increasing or trials < 1
    """
    densities = [float(d) for d in densities]
    if any(b <= a for a, b in zip(densities, densities[1:])):
        raise ValueError(f"Densities must be strictly increasing: {densities}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    region = Region.parse(UNIT_DIAMOND)
    rng = np.random.default_rng(seed)
    report = ScalingReport(densities, trials)
    for density in densities:
        sizes, lengths = [], []
        for _ in range(trials):
            count = int(rng.poisson(density * region.area))
            uv = region.draw_native(rng, count)
            sizes.append(count)
            lengths.append(longest_chain_in_diamond(uv))
        median_n = float(np.median(sizes))
        row = {
            "density": density,
            "median_n": median_n,
            "median_length": float(np.median(lengths)),
            "insufficient": median_n <= 1,
        }
        if row["insufficient"]:
            row["ratio"] = None
            row["note"] = "insufficient sample"
        else:
            row["ratio"] = float(np.median([l / math.sqrt(n) for l, n in zip(lengths, sizes) if n > 0]))
        report.rows.append(row)
    return report
