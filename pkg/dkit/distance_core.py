"""
Distance matrices over a finite sample of events.

A distance matrix stores d(p, q) for every ordered pair of labels, with
values in [0, +inf]. +inf is kept as the IEEE infinity inside float64
arrays and is never produced by arithmetic: every comparison is written
as ``a <= b + tol`` so no infinity is ever subtracted from another.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

TOL_D = 1e-9


def ext_le(a, b, tol: float = TOL_D):
    """Entrywise a <= b under the absolute tolerance, inf-safe."""
    return np.asarray(a, dtype=float) <= np.asarray(b, dtype=float) + tol


def ext_eq(a, b, tol: float = TOL_D):
    """Entrywise equality: a <= b and b <= a under the tolerance."""
    return ext_le(a, b, tol) & ext_le(b, a, tol)


def ext_gt(a, b, tol: float = TOL_D):
    return np.asarray(a, dtype=float) > np.asarray(b, dtype=float) + tol


def parse_ext(cell: str) -> float:
    """Parse a CSV cell: a decimal or the literal ``inf``."""
    text = cell.strip().lower()
    if text in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"Invalid distance cell: {cell!r}")
    if math.isnan(value) or value < 0:
        raise ValueError(f"Distance must be a nonnegative number or inf, got {cell!r}")
    return value


def format_ext(value: float) -> str:
    return "inf" if math.isinf(value) else repr(float(value))


@dataclass(frozen=True)
class ExtReal:
    """A value in [0, +inf] with saturating addition."""

    value: float
    tol: float = TOL_D

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 0:
            raise ValueError(f"ExtReal must be >= 0 or inf, got {self.value}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, text: str) -> "ExtReal":
        return cls(parse_ext(text))

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.value)

    def __add__(self, other) -> "ExtReal":
        other_value = other.value if isinstance(other, ExtReal) else float(other)
        if self.is_inf or math.isinf(other_value):
            return ExtReal(math.inf, self.tol)
        return ExtReal(self.value + other_value, self.tol)

    __radd__ = __add__

    def _other(self, other) -> float:
        return other.value if isinstance(other, ExtReal) else float(other)

    def __le__(self, other) -> bool:
        return bool(ext_le(self.value, self._other(other), self.tol))

    def __ge__(self, other) -> bool:
        return bool(ext_le(self._other(other), self.value, self.tol))

    def __lt__(self, other) -> bool:
        return not self.__ge__(other)

    def __gt__(self, other) -> bool:
        return not self.__le__(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (ExtReal, int, float)):
            return NotImplemented
        return self.__le__(other) and self.__ge__(other)

    def __hash__(self):
        return hash(self.value)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return format_ext(self.value)


@dataclass(frozen=True)
class Relation:
    """Boolean relation over an ordered label list."""

    labels: Tuple[str, ...]
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != (len(labels), len(labels)):
            raise ValueError(f"Relation mask shape {mask.shape} does not match {len(labels)} labels")
        mask.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "mask", mask)

    @property
    def index(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def __contains__(self, pair) -> bool:
        p, q = pair
        idx = self.index
        return bool(self.mask[idx[p], idx[q]])

    def __len__(self) -> int:
        return int(self.mask.sum())

    def pairs(self) -> List[Tuple[str, str]]:
        rows, cols = np.nonzero(self.mask)
        return [(self.labels[i], self.labels[j]) for i, j in zip(rows, cols)]

    def edges(self, include_diagonal: bool = False) -> List[Tuple[str, str]]:
        return [(p, q) for p, q in self.pairs() if include_diagonal or p != q]

    def _check_same(self, other: "Relation"):
        if self.labels != other.labels:
            raise ValueError("Relations are defined over different label lists")

    def __and__(self, other: "Relation") -> "Relation":
        self._check_same(other)
        return Relation(self.labels, self.mask & other.mask)

    def __or__(self, other: "Relation") -> "Relation":
        self._check_same(other)
        return Relation(self.labels, self.mask | other.mask)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self.labels == other.labels and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self):
        return hash((self.labels, self.mask.tobytes()))

    def issubset(self, other: "Relation") -> bool:
        self._check_same(other)
        return not bool(np.any(self.mask & ~other.mask))

    def difference(self, other: "Relation") -> "Relation":
        self._check_same(other)
        return Relation(self.labels, self.mask & ~other.mask)

    def restrict(self, labels: Sequence[str]) -> "Relation":
        idx = self.index
        try:
            sel = [idx[label] for label in labels]
        except KeyError as exc:
            raise ValueError(f"Unknown label {exc.args[0]!r}")
        return Relation(tuple(labels), self.mask[np.ix_(sel, sel)])

    def is_reflexive(self) -> bool:
        return bool(np.all(np.diag(self.mask)))

    def transitive_violations(self, limit: int = 10) -> List[Tuple[str, str, str]]:
        """Triples (p, q, r) with pRq, qRr but not pRr."""
        m = self.mask.astype(np.int64)
        composed = (m @ m) > 0
        bad = composed & ~self.mask
        found = []
        for i, k in zip(*np.nonzero(bad)):
            j = int(np.nonzero(self.mask[i] & self.mask[:, k])[0][0])
            found.append((self.labels[i], self.labels[j], self.labels[k]))
            if len(found) >= limit:
                break
        return found

    def is_transitive(self) -> bool:
        return not self.transitive_violations(limit=1)

    def is_antisymmetric(self) -> bool:
        off = self.mask & self.mask.T
        np.fill_diagonal(off, False)
        return not bool(off.any())


@dataclass(frozen=True)
class DistanceMatrix:
    """
    d restricted to a finite sample.

    ``entries[i, j]`` is d(labels[i], labels[j]). ``ground`` names the
    labels predicates quantify over; the remaining labels only serve as
    test points.
    """

    labels: Tuple[str, ...]
    entries: np.ndarray = field(repr=False)
    tol: float = TOL_D
    ground: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError("Duplicate labels in distance matrix")
        entries = np.array(self.entries, dtype=float)
        n = len(labels)
        if entries.shape != (n, n):
            raise ValueError(f"Distance matrix must be {n}x{n}, got shape {entries.shape}")
        if np.isnan(entries).any():
            raise ValueError("Distance matrix contains NaN")
        if (entries < 0).any():
            raise ValueError("Distance matrix contains negative entries")
        entries.setflags(write=False)
        ground = labels if self.ground is None else tuple(self.ground)
        missing = set(ground) - set(labels)
        if missing:
            raise ValueError(f"Ground labels not in matrix: {sorted(missing)}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "ground", ground)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def index(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    @property
    def ground_index(self) -> np.ndarray:
        idx = self.index
        return np.array([idx[label] for label in self.ground], dtype=int)

    def position(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise ValueError(f"Unknown label: {label!r}")

    def d(self, p: str, q: str) -> ExtReal:
        return ExtReal(self.entries[self.position(p), self.position(q)], self.tol)

    def row(self, p: str) -> np.ndarray:
        """d_p = d(p, .)"""
        return self.entries[self.position(p)]

    def col(self, p: str) -> np.ndarray:
        """d^p = d(., p)"""
        return self.entries[:, self.position(p)]

    def ground_rows(self) -> np.ndarray:
        return self.entries[self.ground_index]

    def ground_cols(self) -> np.ndarray:
        return self.entries[:, self.ground_index].T

    def with_ground(self, ground: Optional[Iterable[str]]) -> "DistanceMatrix":
        return DistanceMatrix(self.labels, self.entries, self.tol,
                              None if ground is None else tuple(ground))

    def with_tol(self, tol: float) -> "DistanceMatrix":
        return DistanceMatrix(self.labels, self.entries, tol, self.ground)

    def has_probes(self) -> bool:
        return len(self.ground) != self.n

    def transpose(self) -> "DistanceMatrix":
        """Time dual: d*(p, q) = d(q, p)."""
        return DistanceMatrix(self.labels, self.entries.T, self.tol, self.ground)

    def map_values(self, fn) -> "DistanceMatrix":
        """Apply fn to finite entries, keeping inf."""
        mapped = np.where(np.isinf(self.entries), np.inf,
                          fn(np.where(np.isinf(self.entries), 0.0, self.entries)))
        return DistanceMatrix(self.labels, mapped, self.tol, self.ground)

    @classmethod
    def from_dict(cls, labels: Sequence[str], values: Dict[Tuple[str, str], float],
                  tol: float = TOL_D) -> "DistanceMatrix":
        """Build from sparse {(p, q): d} entries, zero elsewhere."""
        idx = {label: i for i, label in enumerate(labels)}
        entries = np.zeros((len(labels), len(labels)))
        for (p, q), value in values.items():
            entries[idx[p], idx[q]] = value
        return cls(tuple(labels), entries, tol)

    @classmethod
    def from_csv(cls, path: str, tol: float = TOL_D) -> "DistanceMatrix":
        with open(path, newline="") as f:
            rows = [row for row in csv.reader(f) if row]
        if not rows:
            raise ValueError(f"Empty matrix file: {path}")
        labels = [cell.strip() for cell in rows[0]]
        body = rows[1:]
        if len(body) != len(labels):
            raise ValueError(f"Matrix in {path} is not square: {len(labels)} labels, {len(body)} rows")
        entries = []
        for i, row in enumerate(body):
            if len(row) == len(labels) + 1 and row[0].strip() == labels[i]:
                row = row[1:]
            if len(row) != len(labels):
                raise ValueError(f"Row {i} of {path} has {len(row)} cells, expected {len(labels)}")
            entries.append([parse_ext(cell) for cell in row])
        return cls(tuple(labels), np.array(entries, dtype=float), tol)

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(self.labels)
            for row in self.entries:
                writer.writerow([format_ext(v) for v in row])


@dataclass
class ViolationReport:
    """Reverse-triangle violations; empty means pass."""

    violations: List[Tuple[str, str, str]] = field(default_factory=list)
    checked_triples: int = 0
    tol: float = TOL_D

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "checked_triples": self.checked_triples,
            "violation_count": len(self.violations),
            "violations": [list(v) for v in self.violations[:20]],
            "tol_d": self.tol,
        }


def chronology_mask(D: DistanceMatrix) -> np.ndarray:
    return D.entries > D.tol


def chronology(D: DistanceMatrix) -> Relation:
    """I = {(p, q): d(p, q) > tol}, inf included."""
    return Relation(D.labels, chronology_mask(D))


def diamond(D: DistanceMatrix, p: str, q: str) -> FrozenSet[str]:
    """Chronological diamond I(p, q) = I^+(p) & I^-(q) within the sample."""
    i, j = D.position(p), D.position(q)
    inside = (D.entries[i] > D.tol) & (D.entries[:, j] > D.tol)
    return frozenset(D.labels[k] for k in np.nonzero(inside)[0])


def diamond_masks(D: DistanceMatrix) -> np.ndarray:
    """All diamonds at once: out[i, j, k] is True iff k lies in I(i, j)."""
    chron = chronology_mask(D)
    return chron[:, None, :] & chron.T[None, :, :]


def check_reverse_triangle(D: DistanceMatrix, max_reported: Optional[int] = None) -> ViolationReport:
    """
    Scan all triples p << q << r and report d(p, r) + tol < d(p, q) + d(q, r).

    One middle point at a time, vectorized over (p, r).
    """
    e = D.entries
    chron = chronology_mask(D)
    report = ViolationReport(tol=D.tol)
    for j in range(D.n):
        before = np.nonzero(chron[:, j])[0]
        after = np.nonzero(chron[j])[0]
        if before.size == 0 or after.size == 0:
            continue
        report.checked_triples += before.size * after.size
        via = e[before, j][:, None] + e[j, after][None, :]
        direct = e[np.ix_(before, after)]
        bad = ~(via <= direct + D.tol)
        for a, b in zip(*np.nonzero(bad)):
            report.violations.append((D.labels[before[a]], D.labels[j], D.labels[after[b]]))
            if max_reported is not None and len(report.violations) >= max_reported:
                return report
    report.violations.sort(key=lambda t: tuple(D.position(x) for x in (t[0], t[1], t[2])))
    return report
