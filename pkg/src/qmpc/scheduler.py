"""ALAP scheduling of routed circuits and merging of a batch into one job."""
from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import Circuit, Gate
from .device import DeviceModel, Edge, edge_key
from .mapper import decompose_swaps
from .partition import Allocation


@dataclass
class Schedule:
    """Unit-duration time slices; barriers are fences and occupy no slice."""

    slices: list[list[Gate]]

    @property
    def depth(self) -> int:
        return len(self.slices)

    def gates(self):
        for t, gates in enumerate(self.slices):
            for g in gates:
                yield t, g


def alap_schedule(circ: Circuit) -> Schedule:
    """Place every gate in the latest slice its successors allow.

    Works backwards from the end: measurements share the final slice, no
    other gate may enter that slice, and a barrier forces everything before
    it (on its qubits) ahead of everything after it.  SWAPs are lowered to
    three CNOTs first.
    """
    circ = decompose_swaps(circ)
    has_measure = any(g.name == "measure" for g in circ.gates)
    floor = 1 if has_measure else 0
    frontier: dict[int, int] = {}
    placed: list[tuple[int, Gate]] = []
    for g in reversed(circ.gates):
        if g.name == "measure":
            placed.append((0, g))
            frontier[g.qubits[0]] = max(frontier.get(g.qubits[0], floor), 1)
        elif g.name == "barrier":
            level = max(frontier.get(q, floor) for q in g.qubits)
            for q in g.qubits:
                frontier[q] = level
        else:
            level = max(frontier.get(q, floor) for q in g.qubits)
            placed.append((level, g))
            for q in g.qubits:
                frontier[q] = level + 1
    depth = 1 + max((lvl for lvl, _ in placed), default=-1)
    slices: list[list[Gate]] = [[] for _ in range(depth)]
    for lvl, g in reversed(placed):
        slices[depth - 1 - lvl].append(g)
    return Schedule(slices)


@dataclass
class JobMember:
    allocation: Allocation
    circuit: Circuit
    schedule: Schedule
    offset: int

    def timeline(self):
        """``(global slice, gate)`` in execution order."""
        for t, g in self.schedule.gates():
            yield t + self.offset, g


@dataclass
class CompositeJob:
    members: list[JobMember]
    device: DeviceModel
    crosstalk_events: list[tuple[int, Edge, Edge]] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return max((m.offset + m.schedule.depth for m in self.members), default=0)

    @property
    def qubits(self) -> frozenset[int]:
        return frozenset().union(*(m.allocation.partition.qubits for m in self.members))

    def slices(self) -> list[list[tuple[int, Gate]]]:
        """Merged slices holding ``(member index, gate)``."""
        out: list[list[tuple[int, Gate]]] = [[] for _ in range(self.depth)]
        for i, m in enumerate(self.members):
            for t, g in m.timeline():
                out[t].append((i, g))
        return out

    def crosstalk_set(self) -> frozenset[tuple[int, Edge]]:
        """``(slice, edge)`` of every cx involved in a crosstalk event."""
        return frozenset((t, e) for t, e1, e2 in self.crosstalk_events for e in (e1, e2))

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "members": [
                {"circuit": m.circuit.name, "index": m.allocation.circuit_index,
                 "qubits": list(m.allocation.partition.sorted_qubits),
                 "offset": m.offset, "depth": m.schedule.depth}
                for m in self.members
            ],
            "slices": [
                [{"member": i, "gate": g.name, "qubits": list(g.qubits), "params": list(g.params)}
                 for i, g in s]
                for s in self.slices()
            ],
            "crosstalk_events": [[t, list(e1), list(e2)] for t, e1, e2 in self.crosstalk_events],
        }


def merge(batch, d: DeviceModel) -> CompositeJob:
    """End-align the ALAP schedules of a batch and record co-scheduled one-hop CNOTs.

    ``batch`` is a sequence of ``(Allocation, physical Circuit)``.
    """
    seen: set[int] = set()
    scheduled = []
    for alloc, circ in batch:
        if seen & alloc.partition.qubits:
            raise ValueError("allocations in a batch overlap")
        seen |= alloc.partition.qubits
        stray = {q for g in circ.gates for q in g.qubits} - alloc.partition.qubits
        if stray:
            raise ValueError(f"{circ.name} touches qubits {sorted(stray)} outside its partition")
        scheduled.append((alloc, circ, alap_schedule(circ)))
    depth = max((s.depth for _, _, s in scheduled), default=0)
    members = [JobMember(a, c, s, depth - s.depth) for a, c, s in scheduled]

    events = []
    per_slice: list[list[tuple[int, Edge]]] = [[] for _ in range(depth)]
    for i, m in enumerate(members):
        for t, g in m.timeline():
            if g.name == "cx":
                per_slice[t].append((i, edge_key(*g.qubits)))
    pairs = d.one_hop_set
    for t, cxs in enumerate(per_slice):
        for j, (mi, e1) in enumerate(cxs):
            for mk, e2 in cxs[j + 1:]:
                if mi != mk and (e1, e2) in pairs:
                    events.append((t, min(e1, e2), max(e1, e2)))
    return CompositeJob(members, d, sorted(events))


def composite_depth(job: CompositeJob) -> int:
    return job.depth
