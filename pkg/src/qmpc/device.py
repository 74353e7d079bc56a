"""Device topology, calibration record and crosstalk-pair bookkeeping."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import networkx as nx

Edge = tuple[int, int]

BUILTIN_DEVICES = ("melbourne-15", "toronto-27", "manhattan-65")


class DeviceError(ValueError):
    pass


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def _check_prob(value, what):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise DeviceError(f"{what} must be a number, got {value!r}")
    if not 0.0 <= value <= 1.0:
        raise DeviceError(f"{what} = {value} is outside [0, 1]")
    return float(value)


@dataclass(frozen=True)
class QubitCal:
    id: int
    e1q: float
    readout: float


@dataclass(frozen=True)
class EdgeCal:
    a: int
    b: int
    e2q: float

    @property
    def key(self) -> Edge:
        return edge_key(self.a, self.b)


@dataclass(frozen=True)
class DeviceModel:
    name: str
    qubits: tuple[QubitCal, ...]
    edges: tuple[EdgeCal, ...]

    def __post_init__(self):
        qubits = tuple(sorted(self.qubits, key=lambda q: q.id))
        edges = tuple(sorted(self.edges, key=lambda e: e.key))
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "edges", edges)
        if not qubits:
            raise DeviceError("device has no qubits")
        if [q.id for q in qubits] != list(range(len(qubits))):
            raise DeviceError("qubit ids must be exactly 0..n-1")
        for q in qubits:
            _check_prob(q.e1q, f"e1q of qubit {q.id}")
            _check_prob(q.readout, f"readout of qubit {q.id}")
        seen = set()
        for e in edges:
            if e.a == e.b:
                raise DeviceError(f"self-loop on qubit {e.a}")
            if not (0 <= e.a < len(qubits) and 0 <= e.b < len(qubits)):
                raise DeviceError(f"edge ({e.a}, {e.b}) references an unknown qubit")
            if e.key in seen:
                raise DeviceError(f"duplicate edge {e.key}")
            seen.add(e.key)
            _check_prob(e.e2q, f"e2q of edge {e.key}")
        if not nx.is_connected(self.coupling):
            raise DeviceError(f"coupling graph of {self.name!r} is disconnected")

    @cached_property
    def coupling(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.qubits)))
        for e in self.edges:
            graph.add_edge(*e.key, e2q=e.e2q)
        return graph

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    @cached_property
    def edge_keys(self) -> tuple[Edge, ...]:
        return tuple(e.key for e in self.edges)

    @cached_property
    def _e2q(self) -> dict[Edge, float]:
        return {e.key: e.e2q for e in self.edges}

    def e2q(self, a: int, b: int) -> float:
        return self._e2q[edge_key(a, b)]

    def e1q(self, q: int) -> float:
        return self.qubits[q].e1q

    def readout(self, q: int) -> float:
        return self.qubits[q].readout

    def has_edge(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self._e2q

    def neighbors(self, q: int) -> list[int]:
        return sorted(self.coupling.neighbors(q))

    @cached_property
    def distances(self) -> dict[int, dict[int, int]]:
        return dict(nx.all_pairs_shortest_path_length(self.coupling))

    def edge_distance(self, e1: Edge, e2: Edge) -> int:
        """Minimum graph distance between an endpoint of ``e1`` and one of ``e2``."""
        d = self.distances
        return min(d[a][b] for a in e1 for b in e2)

    @cached_property
    def _one_hop(self) -> tuple[tuple[Edge, Edge], ...]:
        out = []
        for e1, e2 in itertools.combinations(self.edge_keys, 2):
            if set(e1).isdisjoint(e2) and self.edge_distance(e1, e2) == 1:
                out.append((e1, e2))
        return tuple(out)

    @cached_property
    def one_hop_set(self) -> frozenset[tuple[Edge, Edge]]:
        """Both orientations of every one-hop pair, for membership tests."""
        return frozenset(self._one_hop) | frozenset((b, a) for a, b in self._one_hop)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "qubits": [{"id": q.id, "e1q": q.e1q, "readout": q.readout} for q in self.qubits],
            "edges": [{"a": e.a, "b": e.b, "e2q": e.e2q} for e in self.edges],
        }


def device_from_dict(data: dict) -> DeviceModel:
    try:
        qubits = tuple(QubitCal(int(q["id"]), q["e1q"], q["readout"]) for q in data["qubits"])
        edges = tuple(EdgeCal(int(e["a"]), int(e["b"]), e["e2q"]) for e in data["edges"])
        name = str(data["name"])
    except (KeyError, TypeError) as exc:
        raise DeviceError(f"device JSON does not match the schema: {exc}") from exc
    ids = [q.id for q in qubits]
    if len(set(ids)) != len(ids):
        raise DeviceError("duplicate qubit id")
    return DeviceModel(name, qubits, edges)


def load_device(path) -> DeviceModel:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DeviceError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise DeviceError("device JSON must be an object")
    return device_from_dict(data)


def builtin_topology(name: str) -> DeviceModel:
    if name not in BUILTIN_DEVICES:
        raise DeviceError(f"unknown device {name!r}; choose from {', '.join(BUILTIN_DEVICES)}")
    ref = resources.files("qmpc.data").joinpath("devices", f"{name}.json")
    with resources.as_file(ref) as path:
        return load_device(path)


def get_device(spec: str) -> DeviceModel:
    """Builtin name or path to a device JSON file."""
    if spec in BUILTIN_DEVICES:
        return builtin_topology(spec)
    if Path(spec).suffix == ".json" or Path(spec).exists():
        return load_device(spec)
    return builtin_topology(spec)


def one_hop_pairs(d: DeviceModel) -> list[tuple[Edge, Edge]]:
    """Vertex-disjoint coupling edges whose closest endpoints are adjacent.

    Output is canonical: each edge is ``(low, high)``, each pair is ordered,
    and the list is sorted.
    """
    return list(d._one_hop)


def hardware_throughput(used: int, total: int) -> float:
    if total <= 0:
        raise ValueError("total qubit count must be positive")
    if not 0 <= used <= total:
        raise ValueError(f"used={used} must lie in [0, {total}]")
    return used / total


class SRBCost(NamedTuple):
    pairs: int
    groups: int
    jobs: int


def srb_jobs(groups: int, seeds: int) -> int:
    # two individual RB runs plus one simultaneous run per group and seed
    return 3 * groups * seeds


def srb_groups(d: DeviceModel) -> list[list[tuple[Edge, Edge]]]:
    """Greedy largest-first colouring of the one-hop pair conflict graph."""
    pairs = one_hop_pairs(d)
    conflict = nx.Graph()
    conflict.add_nodes_from(range(len(pairs)))
    for i, j in itertools.combinations(range(len(pairs)), 2):
        if any(d.edge_distance(x, y) <= 1 for x in pairs[i] for y in pairs[j]):
            conflict.add_edge(i, j)
    colours = nx.greedy_color(conflict, strategy="largest_first")
    groups: dict[int, list] = {}
    for i in sorted(colours):
        groups.setdefault(colours[i], []).append(pairs[i])
    return [groups[c] for c in sorted(groups)]


def srb_cost_estimate(d: DeviceModel, seeds: int) -> SRBCost:
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    groups = len(srb_groups(d))
    return SRBCost(len(one_hop_pairs(d)), groups, srb_jobs(groups, seeds))
