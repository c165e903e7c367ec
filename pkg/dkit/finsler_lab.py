"""
Finsler norms, geodesic sprays and recovery of F from d.

Norms are translation invariant, so the distance of a flat model is
d(p, q) = F(q - p) and every limit formula below has a closed-form oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .distance_core import TOL_D, DistanceMatrix, chronology
from .causality_checks import relation_D
from .topology_lab import alexandrov_topology

NULL_EPS = 1e-12
FD_STEP = 1e-5
SCHEDULE_T0 = 0.1
SCHEDULE_LEVELS = 11
MAX_RANDERS_DRIFT = 0.3


def default_schedule(t0: float = SCHEDULE_T0, levels: int = SCHEDULE_LEVELS) -> np.ndarray:
    """t_k = t0 * 2^-k, k = 0..levels-1."""
    return t0 * 0.5 ** np.arange(levels)


def richardson_limit(step_ratio: float, values: Sequence[float]) -> float:
    """Limit of a sequence sampled at steps shrinking by step_ratio, assuming integer power error terms."""
    n_steps = len(values)
    if n_steps == 1:
        return float(values[0])
    last_level = list(values)
    this_level: List[float] = []
    for m in range(1, n_steps):
        mult = step_ratio ** m
        factor = 1.0 / (mult - 1.0)
        this_level = [factor * (mult * last_level[i + 1] - last_level[i]) for i in range(n_steps - m)]
        last_level = this_level
    return float(this_level[0])


def _observed_order(values: Sequence[float], step_ratio: float = 2.0, floor: float = 1e-14) -> Optional[float]:
    """Two-difference order estimate from the first three values; None when already exact."""
    if len(values) < 3:
        return None
    d1 = abs(values[0] - values[1])
    d2 = abs(values[1] - values[2])
    if d1 <= floor or d2 <= floor:
        return None
    return math.log(d1 / d2, step_ratio)


# Norms

class FinslerNorm:
    """Direction-dependent length F on a cone, extended by zero outside it."""

    name = "abstract"

    def raw(self, Y) -> np.ndarray:
        raise NotImplementedError

    def cone_test(self, Y) -> np.ndarray:
        raise NotImplementedError

    def cone_closure(self, Y) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        return np.where(self.cone_test(Y), self.raw(Y), 0.0)

    def lagrangian(self, Y) -> np.ndarray:
        """L = -F^2 / 2"""
        return -0.5 * self.evaluate(Y) ** 2

    def boundary_rays(self) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError(f"{self.name} norm has no causal cone")

    def descriptor(self) -> Dict:
        return {"kind": self.name}

    def homogeneity_defect(self, rays: np.ndarray, scales: Sequence[float] = (0.5, 2.0, 7.0)) -> float:
        """max |F(s y) - s F(y)| over the given rays and scales."""
        F = self.evaluate(rays)
        return max(float(np.max(np.abs(self.evaluate(s * rays) - s * F))) for s in scales)


class RandersNorm(FinslerNorm):
    """F(y) = sqrt(y_t^2 - y_x^2) - b y_x on the cone {y_t > |y_x|, F > 0}."""

    name = "randers"

    def __init__(self, b: float = 0.0):
        if abs(b) > MAX_RANDERS_DRIFT:
            raise ValueError(f"Randers drift |b| must be <= {MAX_RANDERS_DRIFT}, got {b}")
        self.b = float(b)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(b={self.b})"

    def descriptor(self) -> Dict:
        return {"kind": self.name, "b": self.b}

    def raw(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        t, x = Y[..., 0], Y[..., 1]
        return np.sqrt(np.maximum(t * t - x * x, 0.0)) - self.b * x

    def cone_test(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        t, x = Y[..., 0], Y[..., 1]
        return (t - np.abs(x) > NULL_EPS) & (self.raw(Y) > NULL_EPS)

    def cone_closure(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        t, x = Y[..., 0], Y[..., 1]
        return (t >= -NULL_EPS) & (t - np.abs(x) >= -NULL_EPS) & (self.raw(Y) >= -NULL_EPS)

    def boundary_rays(self) -> Tuple[np.ndarray, np.ndarray]:
        tilt = 1.0 / math.sqrt(1.0 + self.b ** 2)
        if self.b >= 0:
            return np.array([1.0, -1.0]), np.array([1.0, tilt])
        return np.array([1.0, -tilt]), np.array([1.0, 1.0])


class MinkowskiNorm(RandersNorm):
    name = "minkowski"

    def __init__(self):
        super().__init__(0.0)

    def descriptor(self) -> Dict:
        return {"kind": self.name}


class EuclideanRandersNorm(FinslerNorm):
    """Positive-signature Randers norm F(y) = |y| + beta y_x, |beta| < 1."""

    name = "euclidean_randers"

    def __init__(self, beta: float = 0.0):
        if not abs(beta) < 1.0:
            raise ValueError(f"Euclidean Randers drift must satisfy |beta| < 1, got {beta}")
        self.beta = float(beta)

    def descriptor(self) -> Dict:
        return {"kind": self.name, "beta": self.beta}

    def raw(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        return np.linalg.norm(Y, axis=-1) + self.beta * Y[..., 1]

    def cone_test(self, Y) -> np.ndarray:
        return np.linalg.norm(np.asarray(Y, dtype=float), axis=-1) > NULL_EPS

    def cone_closure(self, Y) -> np.ndarray:
        return np.ones(np.asarray(Y).shape[:-1], dtype=bool)


def build_norm(descriptor: Dict) -> FinslerNorm:
    kind = descriptor.get("kind", "randers")
    if kind == "minkowski":
        return MinkowskiNorm()
    if kind == "randers":
        return RandersNorm(float(descriptor.get("b", 0.0)))
    if kind == "euclidean_randers":
        return EuclideanRandersNorm(float(descriptor.get("beta", 0.0)))
    raise ValueError(f"Unknown norm kind: {kind!r}")


class FlatDistanceField:
    """d(p, q) = F(q - p) over the whole plane."""

    def __init__(self, norm: FinslerNorm):
        self.norm = norm

    def contains(self, points) -> np.ndarray:
        return np.ones(np.asarray(points).shape[:-1], dtype=bool)

    def distances(self, P, Q) -> np.ndarray:
        return self.norm.evaluate(np.asarray(Q, dtype=float) - np.asarray(P, dtype=float))


def _distance_from(dfield, p: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate d(p, .) on points, checking the domain when the field has one."""
    if hasattr(dfield, "contains") and not bool(np.all(dfield.contains(points))):
        raise ValueError("Test curve leaves the domain of the distance field")
    if hasattr(dfield, "distances"):
        return np.asarray(dfield.distances(p, points), dtype=float)
    return np.array([float(dfield(p, x)) for x in points])


# Sprays

class Spray:
    """Spray coefficients G(x, y), positive homogeneous of degree 2 in y."""

    name = "abstract"

    def coefficients(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def descriptor(self) -> Dict:
        return {"kind": self.name}

    def homogeneity_defect(self, x: np.ndarray, y: np.ndarray, s: float = 1.7) -> float:
        return float(np.max(np.abs(self.coefficients(x, s * y) - s * s * self.coefficients(x, y))))


class FlatSpray(Spray):
    name = "flat"

    def coefficients(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.zeros_like(y)

    def exact_flow(self, p, v, t: float) -> np.ndarray:
        return np.asarray(p, dtype=float) + t * np.asarray(v, dtype=float)


class ProjectiveSpray(Spray):
    """
    G = eps * y_t * y, a quadratic perturbation of the flat spray.

    Geodesics are reparametrized straight lines:
    x(t) = p + v log(1 + 2 eps v_t t) / (2 eps v_t).
    """

    name = "projective"

    def __init__(self, eps: float = 0.01):
        self.eps = float(eps)

    def descriptor(self) -> Dict:
        return {"kind": self.name, "eps": self.eps}

    def coefficients(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.eps * y[..., :1] * y

    def exact_flow(self, p, v, t: float) -> np.ndarray:
        p, v = np.asarray(p, dtype=float), np.asarray(v, dtype=float)
        k = 2.0 * self.eps * v[0]
        if abs(k * t) < 1e-15:
            return p + t * v
        if 1.0 + k * t <= 0:
            raise FloatingPointError("Projective geodesic blows up before the requested time")
        return p + v * math.log1p(k * t) / k


def build_spray(descriptor: Dict) -> Spray:
    kind = descriptor.get("kind", "flat")
    if kind == "flat":
        return FlatSpray()
    if kind == "projective":
        return ProjectiveSpray(float(descriptor.get("eps", 0.01)))
    raise ValueError(f"Unknown spray kind: {kind!r}")


@dataclass(frozen=True)
class GeodesicState:
    x: np.ndarray
    y: np.ndarray
    t: float


def spray_flow(spray: Spray, p, v, t_end: float = 1.0, steps: int = 64) -> GeodesicState:
    """
    Integrate x' = y, y' = -2 G(x, y) with fixed-step RK4.

    Raises:
        ValueError: If steps < 16
        FloatingPointError: If the state becomes non-finite
    """
    if steps < 16:
        raise ValueError(f"spray_flow needs at least 16 steps, got {steps}")
    x = np.asarray(p, dtype=float).copy()
    y = np.asarray(v, dtype=float).copy()
    h = t_end / steps

    def rhs(xs, ys):
        return ys, -2.0 * spray.coefficients(xs, ys)

    for _ in range(steps):
        k1x, k1y = rhs(x, y)
        k2x, k2y = rhs(x + 0.5 * h * k1x, y + 0.5 * h * k1y)
        k3x, k3y = rhs(x + 0.5 * h * k2x, y + 0.5 * h * k2y)
        k4x, k4y = rhs(x + h * k3x, y + h * k3y)
        x = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise FloatingPointError("Spray integration produced a non-finite state")
    return GeodesicState(x=x, y=y, t=float(t_end))


def exp_map(spray: Spray, p, v, steps: int = 64) -> np.ndarray:
    return spray_flow(spray, p, v, 1.0, steps).x


def exp_inverse(spray: Spray, p, q, steps: int = 64, tol: float = 1e-13) -> np.ndarray:
    """Initial velocity v with exp_p(v) = q, by shooting."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    result = optimize.root(lambda v: exp_map(spray, p, v, steps) - q, q - p, method="hybr", tol=tol)
    if not result.success:
        raise ValueError(f"Shooting from {p.tolist()} to {q.tolist()} did not converge: {result.message}")
    return result.x


@dataclass
class ConvergenceReport:
    steps: List[int]
    errors: List[float]
    orders: List[float]

    @property
    def order(self) -> float:
        return min(self.orders) if self.orders else float("nan")

    def to_dict(self) -> Dict:
        return {"steps": self.steps, "errors": self.errors, "orders": self.orders, "order": self.order}


def self_convergence(spray: Spray, p, v, steps: Sequence[int] = (16, 32),
                     reference_steps: int = 4096, t_end: float = 1.0) -> ConvergenceReport:
    """Endpoint error against a fine reference run, with observed orders between consecutive step counts."""
    reference = spray_flow(spray, p, v, t_end, reference_steps).x
    errors = [float(np.linalg.norm(spray_flow(spray, p, v, t_end, n).x - reference)) for n in steps]
    orders = [math.log2(errors[k] / errors[k + 1]) for k in range(len(errors) - 1)
              if errors[k + 1] > 0 and errors[k] > 0]
    return ConvergenceReport(list(steps), errors, orders)


def _jacobian(fn: Callable[[np.ndarray], np.ndarray], v: np.ndarray, fd_step: float) -> np.ndarray:
    h = fd_step * max(1.0, float(np.linalg.norm(v)))
    cols = []
    for k in range(len(v)):
        e = np.zeros_like(v)
        e[k] = h
        cols.append((fn(v + e) - fn(v - e)) / (2.0 * h))
    return np.column_stack(cols)


@dataclass
class JacobianReport:
    radius: float
    deviation_at_zero: float
    max_deviation: float
    lipschitz: float
    n_points: int

    def to_dict(self) -> Dict:
        return {
            "radius": self.radius,
            "deviation_at_zero": self.deviation_at_zero,
            "max_deviation": self.max_deviation,
            "lipschitz": self.lipschitz,
            "n_points": self.n_points,
        }


def exp_zero_section_probe(spray: Spray, p, radius: float, n_dirs: int = 8,
                           steps: int = 64, fd_step: float = FD_STEP) -> JacobianReport:
    """
    Finite-difference Jacobians of v -> exp_p(v) on spheres of radius r, r/2, r/4.

    Reports the deviation from the identity at v = 0, the largest deviation
    over the probe points and the largest Jacobian difference quotient.
    """
    p = np.asarray(p, dtype=float)
    fn = lambda v: exp_map(spray, p, v, steps)
    angles = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    points = [np.zeros(2)] + [radius * s * d for s in (1.0, 0.5, 0.25) for d in dirs]
    jacobians = [_jacobian(fn, v, fd_step) for v in points]
    identity = np.eye(2)
    deviations = [float(np.max(np.abs(J - identity))) for J in jacobians]
    lipschitz = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            gap = float(np.linalg.norm(points[i] - points[j]))
            lipschitz = max(lipschitz, float(np.max(np.abs(jacobians[i] - jacobians[j]))) / gap)
    return JacobianReport(radius=float(radius), deviation_at_zero=deviations[0],
                          max_deviation=max(deviations[1:]), lipschitz=lipschitz, n_points=len(points))


# Recovery of F from d

@dataclass
class FEstimate:
    estimate: float
    schedule: List[float]
    raw_values: List[float]
    order: Optional[float]
    oracle: Optional[float] = None

    @property
    def error(self) -> Optional[float]:
        return None if self.oracle is None else abs(self.estimate - self.oracle)

    def rows(self) -> List[Dict]:
        """Table (t, raw, estimate, oracle, error), one row per schedule point."""
        return [{
            "t": t,
            "raw": raw,
            "estimate": self.estimate,
            "oracle": self.oracle,
            "error": None if self.oracle is None else abs(raw - self.oracle),
        } for t, raw in zip(self.schedule, self.raw_values)]

    def to_dict(self) -> Dict:
        return {"estimate": self.estimate, "order": self.order, "oracle": self.oracle,
                "error": self.error, "rows": self.rows()}


F2Estimate = FEstimate


def _curve(p: np.ndarray, v: np.ndarray, a: np.ndarray, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)[..., None]
    return p + t * v + t * t * a


def busemann_mayer_first(dfield, p, v, a=(0.0, 0.0), t_schedule: Optional[Sequence[float]] = None) -> FEstimate:
    """
    F(p, v) as the limit of d(p, gamma(t)) / t along gamma(t) = p + t v + t^2 a.

    Raises:
        ValueError: If v = 0 or the curve leaves the domain
    """
    p, v, a = (np.asarray(z, dtype=float) for z in (p, v, a))
    if not np.any(v):
        raise ValueError("busemann_mayer_first needs a nonzero direction v")
    schedule = np.asarray(t_schedule if t_schedule is not None else default_schedule(), dtype=float)
    values = _distance_from(dfield, p, _curve(p, v, a, schedule)) / schedule
    return FEstimate(
        estimate=richardson_limit(2.0, values.tolist()),
        schedule=schedule.tolist(),
        raw_values=values.tolist(),
        order=_observed_order(values.tolist()),
    )


def busemann_mayer_second(dfield, p, v, a=(0.0, 0.0), t_schedule: Optional[Sequence[float]] = None,
                          fd_step: float = FD_STEP) -> F2Estimate:
    """
    F^2(p, v) as (1/2) lim (1/t) d/dt d_p^2(gamma(t)), with central differences for d/dt.

    Raises:
        ValueError: If v is not strictly inside the future cone, where d_p^2 is smooth
    """
    p, v, a = (np.asarray(z, dtype=float) for z in (p, v, a))
    schedule = np.asarray(t_schedule if t_schedule is not None else default_schedule(), dtype=float)
    eta = fd_step * schedule
    plus = _distance_from(dfield, p, _curve(p, v, a, schedule + eta))
    minus = _distance_from(dfield, p, _curve(p, v, a, schedule - eta))
    if not (np.all(plus > 0) and np.all(minus > 0) and np.all(np.isfinite(plus)) and np.all(np.isfinite(minus))):
        raise ValueError("busemann_mayer_second requires v strictly inside the future cone, "
                         "the region where d_p^2 is smooth")
    derivative = (plus ** 2 - minus ** 2) / (2.0 * eta)
    values = 0.5 * derivative / schedule
    return F2Estimate(
        estimate=richardson_limit(2.0, values.tolist()),
        schedule=schedule.tolist(),
        raw_values=values.tolist(),
        order=_observed_order(values.tolist()),
    )


@dataclass
class QuadraticityReport:
    directions: List[List[float]]
    values: List[float]
    coefficients: List[float]
    deficit: float

    def to_dict(self) -> Dict:
        return {"directions": self.directions, "values": self.values,
                "coefficients": self.coefficients, "deficit": self.deficit}


def _cone_directions(norm: FinslerNorm, n_dirs: int) -> np.ndarray:
    if isinstance(norm, EuclideanRandersNorm):
        angles = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
        return np.column_stack([np.cos(angles), np.sin(angles)])
    slopes = np.linspace(-0.6, 0.6, n_dirs)
    return np.column_stack([np.ones(n_dirs), slopes])


def quadraticity_test(norm: FinslerNorm, p=(0.0, 0.0), n_dirs: int = 8) -> QuadraticityReport:
    """
    Recover F^2 on n_dirs cone directions and fit a quadratic form.

    The deficit is the relative least-squares residual; it vanishes exactly
    when F^2 is a quadratic form.
    """
    if n_dirs < 6:
        raise ValueError(f"quadraticity_test needs at least 6 directions, got {n_dirs}")
    field = FlatDistanceField(norm)
    dirs = _cone_directions(norm, n_dirs)
    values = np.array([busemann_mayer_second(field, p, v).estimate for v in dirs])
    design = np.column_stack([dirs[:, 0] ** 2, 2.0 * dirs[:, 0] * dirs[:, 1], dirs[:, 1] ** 2])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    deficit = float(np.linalg.norm(design @ coef - values) / np.linalg.norm(values))
    return QuadraticityReport(dirs.tolist(), values.tolist(), coef.tolist(), deficit)


# Distance-preserving maps

@dataclass
class NormPair:
    """Flat distance fields on both sides of a linear map x -> A x."""

    source: object
    image: object
    linear_map: np.ndarray
    base_point: Tuple[float, float] = (0.0, 0.0)
    n_dirs: int = 8
    seed: int = 0


@dataclass
class IsometryReport:
    stage1: Dict = field(default_factory=dict)
    stage2: Dict = field(default_factory=dict)
    stage3: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        stages = [self.stage1, self.stage2, self.stage3]
        return all(s.get("passed", True) for s in stages if s.get("status") != "skipped")

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "stage1": self.stage1, "stage2": self.stage2, "stage3": self.stage3}


def _pull_back(f: Mapping[str, str], D: DistanceMatrix, D_image: DistanceMatrix) -> DistanceMatrix:
    if set(f) != set(D.labels):
        raise ValueError("Map must be defined on every label of the source matrix")
    targets = [f[label] for label in D.labels]
    if len(set(targets)) != len(targets) or set(targets) != set(D_image.labels):
        raise ValueError("Map is not a bijection onto the image labels")
    idx = D_image.index
    perm = np.array([idx[t] for t in targets])
    return DistanceMatrix(D.labels, D_image.entries[np.ix_(perm, perm)], D.tol, D.ground)


def isometry_check(f: Mapping[str, str], D: DistanceMatrix, D_image: DistanceMatrix,
                   norm_pair: Optional[NormPair] = None, tol: float = TOL_D,
                   norm_tol: float = 1e-6) -> IsometryReport:
    """
    Three-stage check that f is distance preserving and hence an isometry.

    Stage 1 compares distances, stage 2 pushes I, the reconstructed causal
    relation and the Alexandrov topology through f, stage 3 compares the
    recovered norms F and F' on random cone directions for linear maps.
    """
    pulled = _pull_back(f, D, D_image)
    report = IsometryReport()

    e, e2 = D.entries, pulled.entries
    both_inf = np.isinf(e) & np.isinf(e2)
    with np.errstate(invalid="ignore"):
        deviation = np.where(both_inf, 0.0, np.abs(e2 - e))
    deviation = np.where(np.isnan(deviation), np.inf, deviation)
    k = int(np.argmax(deviation))
    i, j = divmod(k, D.n)
    max_dev = float(deviation[i, j])
    ratio = float(e2[i, j] / e[i, j]) if e[i, j] > 0 and math.isfinite(e[i, j]) else None
    report.stage1 = {
        "passed": max_dev <= tol,
        "max_deviation": max_dev,
        "witness": [D.labels[i], D.labels[j]] if max_dev > tol else None,
        "ratio": ratio if max_dev > tol else None,
    }

    if not report.stage1["passed"]:
        report.stage2 = {"status": "skipped", "reason": "map is not distance preserving"}
        report.stage3 = {"status": "skipped", "reason": "map is not distance preserving"}
        return report

    chron_ok = chronology(D) == chronology(pulled)
    rel_ok = relation_D(D) == relation_D(pulled)
    topo_ok = bool(np.array_equal(alexandrov_topology(D).minimal_neighbourhoods(),
                                  alexandrov_topology(pulled).minimal_neighbourhoods()))
    report.stage2 = {
        "passed": chron_ok and rel_ok and topo_ok,
        "chronology": chron_ok,
        "relation_D": rel_ok,
        "alexandrov_topology": topo_ok,
    }

    if norm_pair is None:
        report.stage3 = {"status": "skipped", "reason": "no linear map supplied"}
        return report
    A = np.asarray(norm_pair.linear_map, dtype=float)
    base = np.asarray(norm_pair.base_point, dtype=float)
    rng = np.random.default_rng(norm_pair.seed)
    dirs = np.column_stack([np.ones(norm_pair.n_dirs), rng.uniform(-0.6, 0.6, norm_pair.n_dirs)])
    worst, witness = 0.0, None
    for v in dirs:
        F = busemann_mayer_first(norm_pair.source, base, v).estimate
        F_image = busemann_mayer_first(norm_pair.image, A @ base, A @ v).estimate
        if abs(F - F_image) > worst:
            worst, witness = abs(F - F_image), v.tolist()
    report.stage3 = {
        "passed": worst <= norm_tol,
        "max_norm_deviation": worst,
        "witness_direction": witness if worst > norm_tol else None,
        "n_dirs": norm_pair.n_dirs,
    }
    return report
