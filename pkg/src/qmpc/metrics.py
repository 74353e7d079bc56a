"""Output-fidelity metrics: success probability and base-2 divergences."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping

from .simulator import Distribution

_NORM_TOL = 1e-9


def _probs(dist) -> dict[str, float]:
    if isinstance(dist, Distribution):
        return dist.probabilities()
    probs = {k: float(v) for k, v in dict(dist).items()}
    if any(v < 0 for v in probs.values()):
        raise ValueError("negative probability")
    total = sum(probs.values())
    if abs(total - 1.0) > _NORM_TOL:
        raise ValueError(f"distribution is not normalized (sums to {total})")
    return probs


def pst(dist, expected: str) -> float:
    """Fraction of shots (or probability mass) on ``expected``."""
    probs = _probs(dist)
    width = len(next(iter(probs))) if probs else len(expected)
    if len(expected) != width:
        raise ValueError(f"expected bitstring has {len(expected)} bits, results have {width}")
    return probs.get(expected, 0.0)


def kl(p, q) -> float:
    """Kullback-Leibler divergence in bits; ``inf`` when q misses support of p."""
    p, q = _probs(p), _probs(q)
    total = 0.0
    for x, px in p.items():
        if px == 0:
            continue
        qx = q.get(x, 0.0)
        if qx == 0:
            return math.inf
        total += px * (math.log2(px) - math.log2(qx))
    return max(total, 0.0)


def jsd(p, q) -> float:
    """Jensen-Shannon divergence in bits (always in [0, 1])."""
    p, q = _probs(p), _probs(q)
    m = {x: 0.5 * (p.get(x, 0.0) + q.get(x, 0.0)) for x in set(p) | set(q)}
    value = 0.5 * kl(p, m) + 0.5 * kl(q, m)
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class MetricReport:
    circuit: str
    metric: str
    value: float
    reference: str


def reports_to_csv(rows: list[MetricReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["circuit", "metric", "value", "reference"])
    for r in rows:
        writer.writerow([r.circuit, r.metric, repr(float(r.value)), r.reference])
    return buf.getvalue()


def score(dist: Distribution, ideal: Mapping[str, float], name: str = "") -> MetricReport:
    """PST against the single ideal outcome when there is one, else JSD to the ideal."""
    top = max(ideal, key=ideal.get)
    if ideal[top] >= 1 - 1e-9:
        return MetricReport(name or dist.circuit, "pst", pst(dist, top), top)
    return MetricReport(name or dist.circuit, "jsd", jsd(dist, ideal), "ideal")
