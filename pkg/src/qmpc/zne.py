"""Digital zero-noise extrapolation: random gate folding plus fits to zero noise."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .circuit import Circuit, CircuitError, inverse_gate
from .device import DeviceModel
from .pipeline import execute
from .simulator import NoiseSpec, exact_distribution, expectation

DEFAULT_SCALE_FACTORS = (1.0, 1.5, 2.0, 2.5)
METHODS = ("linear", "polynomial", "richardson")


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def fold_random(circ: Circuit, factor: float, seed=None) -> Circuit:
    """Lengthen ``circ`` to about ``factor`` times its gate count by folding G -> G G^dag G.

    Each fold adds two gates.  Every gate is folded ``k // n`` times and a
    random subset of ``k % n`` gates once more, where ``k`` folds reach the
    target count; ``factor=3`` therefore folds every gate exactly once.
    """
    if factor < 1:
        raise ValueError(f"scale factor must be >= 1, got {factor}")
    foldable = [i for i, g in enumerate(circ.gates) if g.is_unitary]
    n = len(foldable)
    if n == 0:
        raise CircuitError(f"{circ.name} has no foldable gates")
    target = _round_half_up(factor * n)
    folds = max(0, math.ceil((target - n) / 2))
    if folds == 0:
        return circ
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    times = dict.fromkeys(foldable, folds // n)
    for i in rng.choice(foldable, size=folds % n, replace=False):
        times[int(i)] += 1
    gates = []
    for i, g in enumerate(circ.gates):
        gates.append(g)
        if g.is_unitary:
            inv = inverse_gate(g)
            for _ in range(times[i]):
                gates += [inv, g]
    return circ.with_gates(gates, circ.measured_qubits)


@dataclass
class FoldPlan:
    scale_factors: tuple[float, ...]
    seed: int | None
    circuits: list[Circuit]


def fold_plan(circ: Circuit, scale_factors=DEFAULT_SCALE_FACTORS, seed=None) -> FoldPlan:
    factors = tuple(float(f) for f in scale_factors)
    ss = np.random.SeedSequence(seed)
    folded = [fold_random(circ, f, np.random.default_rng(child))
              for f, child in zip(factors, ss.spawn(len(factors)))]
    folded = [c.with_gates(c.gates, c.measured_qubits, name=f"{circ.name}@{f:g}")
              for c, f in zip(folded, factors)]
    return FoldPlan(factors, seed, folded)


def _check_points(points) -> tuple[np.ndarray, np.ndarray]:
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ValueError("extrapolation needs at least two points")
    xs = np.array([p[0] for p in pts])
    if len(set(xs.tolist())) != len(xs):
        raise ValueError("scale factors must be distinct")
    return xs, np.array([p[1] for p in pts])


def _lagrange_at(xs: np.ndarray, ys: np.ndarray, x0: float) -> float:
    total = 0.0
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        w = 1.0
        for j, xj in enumerate(xs):
            if j != i:
                w *= (x0 - xj) / (xi - xj)
        total += w * yi
    return float(total)


def _lstsq_coef(xs: np.ndarray, ys: np.ndarray, order: int) -> np.ndarray:
    # ascending powers
    vander = np.vander(xs, order + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(vander, ys, rcond=None)
    return coef


def extrapolate(points, method: str = "richardson", order: int = 2) -> float:
    """Zero-noise value from ``(scale factor, expectation)`` pairs."""
    xs, ys = _check_points(points)
    if method == "linear":
        return float(_lstsq_coef(xs, ys, 1)[0])
    if method == "polynomial":
        if not 1 <= order < len(xs):
            raise ValueError(f"polynomial order {order} needs more than {order} points")
        return float(_lstsq_coef(xs, ys, order)[0])
    if method == "richardson":
        return _lagrange_at(xs, ys, 0.0)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


@dataclass
class ExtrapolationResult:
    method: str
    points: list[tuple[float, float]]
    zero_noise_value: float


class GateFolder(TransformerMixin, BaseEstimator):
    """Turn one circuit (or a list) into its folded family, one circuit per scale factor."""

    def __init__(self, scale_factors=DEFAULT_SCALE_FACTORS, random_state=None):
        self.scale_factors = scale_factors
        self.random_state = random_state

    def fit(self, X=None, y=None):
        factors = [float(f) for f in self.scale_factors]
        if not factors or min(factors) < 1:
            raise ValueError("scale factors must be >= 1")
        self.scale_factors_ = tuple(factors)
        return self

    def transform(self, X):
        check_is_fitted(self, "scale_factors_")
        if isinstance(X, Circuit):
            return fold_plan(X, self.scale_factors_, self.random_state).circuits
        return [fold_plan(c, self.scale_factors_, self.random_state).circuits for c in X]


class ZeroNoiseExtrapolator(BaseEstimator):
    """Fit expectation values against noise scale and read off the zero-noise limit.

    Parameters
    ----------
    method : {"linear", "polynomial", "richardson"}, default="richardson"
    order : int, default=2
        Degree for ``method="polynomial"``.
    """

    def __init__(self, method="richardson", order=2):
        self.method = method
        self.order = order

    def fit(self, X, y):
        xs, ys = _check_points(zip(np.ravel(X), np.ravel(y)))
        self.zero_noise_value_ = extrapolate(zip(xs, ys), self.method, self.order)
        if self.method == "richardson":
            self.coef_ = _lstsq_coef(xs, ys, len(xs) - 1)
        else:
            self.coef_ = _lstsq_coef(xs, ys, 1 if self.method == "linear" else self.order)
        self.coef_[0] = self.zero_noise_value_
        self.n_points_ = len(xs)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return np.polynomial.polynomial.polyval(np.asarray(X, dtype=float), self.coef_)


def zne_run(circ: Circuit, observable: str | None, d: DeviceModel, noise: NoiseSpec,
            scale_factors=DEFAULT_SCALE_FACTORS, mode: str = "parallel", sigma: float = 4.0,
            threshold=None, ideal: float | None = None, seed: int | None = 0,
            order: int = 2) -> dict:
    """Fold, execute and extrapolate one circuit; returns a JSON-ready report.

    ``observable`` defaults to the parity of all measured bits.  When ``ideal``
    is ``"exact"`` it is computed from the noiseless distribution.
    """
    if observable is None:
        observable = "Z" * len(circ.measured_qubits)
    plan = fold_plan(circ, scale_factors, seed)
    result = execute(plan.circuits, d, noise, sigma, threshold, mode)
    values = [expectation(dist, observable) for dist in result.distributions]
    points = list(zip(plan.scale_factors, values))
    poly_order = min(order, len(points) - 1)
    report = {
        "circuit": circ.name,
        "observable": observable,
        "mode": mode,
        "scale_factors": list(plan.scale_factors),
        "points": [[f, v] for f, v in points],
        "gate_counts": [len(c.unitary_gates) for c in plan.circuits],
        "unmitigated": values[plan.scale_factors.index(1.0)] if 1.0 in plan.scale_factors else values[0],
        "linear": extrapolate(points, "linear"),
        "polynomial": extrapolate(points, "polynomial", poly_order),
        "richardson": extrapolate(points, "richardson"),
        "batches": len(result.plan.batches),
        "throughput": result.plan.mean_throughput,
    }
    if ideal == "exact":
        ideal = expectation(exact_distribution(circ), observable)
    if ideal is not None:
        errors = {k: abs(report[k] - ideal) for k in ("unmitigated",) + METHODS}
        best = min(METHODS, key=lambda k: (errors[k], k))
        report.update(ideal=ideal, abs_errors=errors, best=best, best_value=report[best])
    return report
