"""Argument checks shared by the estimators and the functional API."""
from __future__ import annotations

import math
from numbers import Integral, Real

from .circuit import Circuit


def check_sigma(sigma, name="sigma") -> float:
    if not isinstance(sigma, Real) or isinstance(sigma, bool) or not math.isfinite(sigma):
        raise ValueError(f"{name} must be a finite real number, got {sigma!r}")
    if sigma < 1:
        raise ValueError(f"{name} must be >= 1, got {sigma}")
    return float(sigma)


def check_threshold(threshold) -> float:
    """``None`` (or the string ``"none"``) means no fidelity constraint."""
    if threshold is None or (isinstance(threshold, str) and threshold.lower() in ("none", "inf")):
        return math.inf
    threshold = float(threshold)
    if not threshold >= 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    return threshold


def check_count(value, name, minimum=1) -> int:
    if not isinstance(value, Integral) or isinstance(value, bool) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_circuits(circuits) -> list[Circuit]:
    if isinstance(circuits, Circuit):
        circuits = [circuits]
    circuits = list(circuits)
    if not circuits:
        raise ValueError("at least one circuit is required")
    for c in circuits:
        if not isinstance(c, Circuit):
            raise TypeError(f"expected Circuit, got {type(c).__name__}")
    return circuits
