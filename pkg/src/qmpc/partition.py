"""Crosstalk-aware partition selection and fidelity-threshold batching."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from statistics import fmean

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_circuits, check_sigma, check_threshold
from .circuit import Circuit, gate_counts
from .device import DeviceModel, Edge, hardware_throughput, one_hop_pairs

EPS = 1e-12


class InfeasibleError(ValueError):
    """No placement (or route) exists for a circuit on the requested qubits."""


@dataclass(frozen=True)
class PartitionCandidate:
    qubits: frozenset[int]
    internal_edges: tuple[Edge, ...]
    crosstalk_edges: frozenset[Edge] = frozenset()

    @classmethod
    def from_qubits(cls, qubits, d: DeviceModel) -> PartitionCandidate:
        qs = frozenset(qubits)
        edges = tuple(e for e in d.edge_keys if e[0] in qs and e[1] in qs)
        return cls(qs, edges)

    @property
    def sorted_qubits(self) -> tuple[int, ...]:
        return tuple(sorted(self.qubits))


@dataclass(frozen=True)
class Allocation:
    circuit_name: str
    partition: PartitionCandidate
    efs: float
    circuit_index: int = 0
    efs_independent: float | None = None

    def to_dict(self) -> dict:
        out = {"circuit": self.circuit_name, "index": self.circuit_index,
               "qubits": list(self.partition.sorted_qubits), "efs": self.efs,
               "crosstalk_edges": [list(e) for e in sorted(self.partition.crosstalk_edges)]}
        if self.efs_independent is not None:
            out["efs_independent"] = self.efs_independent
        return out


@dataclass
class BatchPlan:
    batches: list[list[Allocation]]
    sigma: float
    threshold: float
    num_device_qubits: int
    device_name: str = ""
    metadata: dict = field(default_factory=dict)

    def throughput(self, batch: int) -> float:
        used = sum(len(a.partition.qubits) for a in self.batches[batch])
        return hardware_throughput(used, self.num_device_qubits)

    @property
    def mean_throughput(self) -> float:
        return fmean(self.throughput(i) for i in range(len(self.batches)))

    @property
    def allocations(self) -> list[Allocation]:
        return [a for batch in self.batches for a in batch]

    def to_dict(self) -> dict:
        return {
            "device": self.device_name,
            "sigma": self.sigma,
            "threshold": None if math.isinf(self.threshold) else self.threshold,
            "batches": [[a.to_dict() for a in batch] for batch in self.batches],
            "throughput": [self.throughput(i) for i in range(len(self.batches))],
        }


def candidates(d: DeviceModel, allocated=frozenset(), size: int = 1) -> list[PartitionCandidate]:
    """Connected qubit sets of ``size`` grown greedily from every free seed qubit.

    A set grows by the free neighbour with the lowest mean error on its edges
    into the set plus its readout error (ties go to the lower id).  Identical
    sets are kept once, in seed order.
    """
    allocated = frozenset(allocated)
    free = [q for q in range(d.num_qubits) if q not in allocated]
    if size < 1 or size > len(free):
        raise InfeasibleError(f"cannot place {size} qubit(s) on {len(free)} free qubit(s)")
    out, seen = [], set()
    for seed in free:
        part = {seed}
        while len(part) < size:
            best = None
            frontier = sorted({n for q in part for n in d.neighbors(q)} - part - allocated)
            for q in frontier:
                score = fmean(d.e2q(q, p) for p in d.neighbors(q) if p in part) + d.readout(q)
                if best is None or score < best[0]:
                    best = (score, q)
            if best is None:
                break
            part.add(best[1])
        key = frozenset(part)
        if len(part) == size and key not in seen:
            seen.add(key)
            out.append(PartitionCandidate.from_qubits(key, d))
    if not out:
        raise InfeasibleError(f"no connected region of {size} free qubits")
    return out


def _edges_within(qubits, d: DeviceModel) -> list[Edge]:
    return [e for e in d.edge_keys if e[0] in qubits and e[1] in qubits]


def crosstalk_edges(c: PartitionCandidate, allocated, d: DeviceModel,
                    allocated_edges=None) -> frozenset[Edge]:
    """Internal edges of ``c`` that form a one-hop pair with an allocated edge.

    ``allocated_edges`` defaults to every device edge inside ``allocated``;
    the batcher passes the union of the allocated partitions' own edges.
    """
    if allocated_edges is None:
        allocated_edges = _edges_within(frozenset(allocated), d)
    busy = list(allocated_edges)
    if not busy:
        return frozenset()
    pairs = d.one_hop_set
    return frozenset(e for e in c.internal_edges if any((e, f) in pairs for f in busy))


def efs(c: PartitionCandidate, circ: Circuit, d: DeviceModel, sigma: float = 4.0) -> float:
    """Estimated fidelity score of running ``circ`` on ``c`` (lower is better)."""
    sigma = check_sigma(sigma)
    if len(c.qubits) < circ.num_qubits:
        raise ValueError(f"partition of {len(c.qubits)} qubits is too small for {circ.name}")
    n1, n2 = gate_counts(circ)
    if c.internal_edges:
        avg2 = fmean(d.e2q(*e) * (sigma if e in c.crosstalk_edges else 1.0)
                     for e in c.internal_edges)
    elif n2:
        raise ValueError("partition has no internal edge for two-qubit gates")
    else:
        avg2 = 0.0
    avg1 = fmean(d.e1q(q) for q in c.qubits)
    return avg2 * n2 + avg1 * n1 + sum(d.readout(q) for q in c.qubits)


def select_partition(circ: Circuit, d: DeviceModel, allocated=frozenset(), sigma: float = 4.0,
                     allocated_edges=None, circuit_index: int = 0) -> Allocation:
    """Lowest-EFS candidate; ties go to the lexicographically smallest qubit set."""
    allocated = frozenset(allocated)
    if allocated_edges is None:
        allocated_edges = _edges_within(allocated, d)
    best = None
    for cand in candidates(d, allocated, circ.num_qubits):
        cand = replace(cand, crosstalk_edges=crosstalk_edges(cand, allocated, d, allocated_edges))
        key = (efs(cand, circ, d, sigma), cand.sorted_qubits)
        if best is None or key < best[0]:
            best = (key, cand)
    return Allocation(circ.name, best[1], best[0][0], circuit_index)


def _order(circuits: list[Circuit]) -> list[int]:
    return sorted(range(len(circuits)),
                  key=lambda i: (-circuits[i].num_qubits,
                                 -circuits[i].count_ops()["cx"], circuits[i].name, i))


def allocate_batch(circuits, d: DeviceModel, sigma: float = 4.0, threshold=None) -> BatchPlan:
    """Place circuits batch by batch, deferring any whose relative EFS loss exceeds ``threshold``.

    ``threshold=None`` places as many circuits per batch as fit.
    """
    circuits = check_circuits(circuits)
    sigma = check_sigma(sigma)
    limit = check_threshold(threshold)
    for c in circuits:
        if c.num_qubits > d.num_qubits:
            raise InfeasibleError(f"{c.name} needs {c.num_qubits} qubits, device has {d.num_qubits}")

    independent = {}
    pending = _order(circuits)
    batches: list[list[Allocation]] = []
    while pending:
        batch, deferred = [], []
        allocated: set[int] = set()
        busy: set[Edge] = set()
        for i in pending:
            circ = circuits[i]
            if i not in independent:
                independent[i] = select_partition(circ, d, (), sigma).efs
            ind = independent[i]
            try:
                alloc = select_partition(circ, d, allocated, sigma, busy, circuit_index=i)
            except InfeasibleError:
                deferred.append(i)
                continue
            loss = (alloc.efs - ind) / max(ind, EPS)
            if batch and loss > limit:
                deferred.append(i)
                continue
            batch.append(replace(alloc, efs_independent=ind))
            allocated |= alloc.partition.qubits
            busy.update(alloc.partition.internal_edges)
        batches.append(batch)
        pending = deferred
    return BatchPlan(batches, sigma, limit, d.num_qubits, d.name)


class QuCPAllocator(BaseEstimator):
    """Estimator front end for :func:`allocate_batch`.

    ``fit`` takes the device; ``predict`` maps a list of circuits to a
    :class:`BatchPlan`.

    Parameters
    ----------
    sigma : float, default=4.0
        Multiplier on the CNOT error of partition edges at one-hop distance
        from already allocated edges.
    threshold : float or None, default=None
        Largest tolerated relative EFS loss of parallel over independent
        placement; ``None`` disables the constraint.
    """

    def __init__(self, sigma=4.0, threshold=None):
        self.sigma = sigma
        self.threshold = threshold

    def fit(self, device: DeviceModel, y=None):
        check_sigma(self.sigma)
        check_threshold(self.threshold)
        if not isinstance(device, DeviceModel):
            raise TypeError(f"expected DeviceModel, got {type(device).__name__}")
        self.device_ = device
        self.one_hop_pairs_ = one_hop_pairs(device)
        self.n_qubits_ = device.num_qubits
        return self

    def predict(self, circuits) -> BatchPlan:
        check_is_fitted(self, "device_")
        return allocate_batch(circuits, self.device_, self.sigma, self.threshold)

    def fit_predict(self, device, circuits) -> BatchPlan:
        return self.fit(device).predict(circuits)
