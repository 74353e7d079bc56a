"""Circuit intermediate representation shared by every compilation stage.

Bit and qubit ordering convention used throughout the package: character
``k`` of a bitstring is classical bit ``k``, and ``measured_qubits[k]`` is the
qubit that was measured into it.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import networkx as nx

ONE_QUBIT_GATES = frozenset(
    {"id", "x", "y", "z", "h", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "u3"}
)
TWO_QUBIT_GATES = frozenset({"cx", "swap"})
DIRECTIVES = frozenset({"measure", "barrier"})
SUPPORTED_GATES = ONE_QUBIT_GATES | TWO_QUBIT_GATES | DIRECTIVES

N_PARAMS = {"rx": 1, "ry": 1, "rz": 1, "u3": 3}

SELF_INVERSE = frozenset({"id", "x", "y", "z", "h", "cx", "swap"})
_ADJOINT_NAME = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}


class CircuitError(ValueError):
    """Raised when a gate or circuit violates a structural invariant."""


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.name not in SUPPORTED_GATES:
            raise CircuitError(f"unsupported gate {self.name!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self.name} {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.name} {self.qubits}")
        if self.name in TWO_QUBIT_GATES:
            expected = 2
        elif self.name == "barrier":
            expected = None
        else:
            expected = 1
        if expected is not None and len(self.qubits) != expected:
            raise CircuitError(f"{self.name} acts on {expected} qubit(s), got {self.qubits}")
        if self.name == "barrier" and not self.qubits:
            raise CircuitError("barrier needs at least one qubit")
        if len(self.params) != N_PARAMS.get(self.name, 0):
            raise CircuitError(
                f"{self.name} takes {N_PARAMS.get(self.name, 0)} parameter(s), got {len(self.params)}"
            )

    @property
    def is_unitary(self) -> bool:
        return self.name not in DIRECTIVES

    @property
    def is_two_qubit(self) -> bool:
        return self.name in TWO_QUBIT_GATES

    def remapped(self, mapping) -> Gate:
        """Same gate acting on ``mapping[q]`` for every qubit ``q``."""
        return Gate(self.name, tuple(mapping[q] for q in self.qubits), self.params)


@dataclass(frozen=True)
class Circuit:
    name: str
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    measured_qubits: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        if self.num_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        for g in gates:
            if any(q >= self.num_qubits for q in g.qubits):
                raise CircuitError(
                    f"{g.name} on {g.qubits} is out of range for {self.num_qubits} qubits"
                )
        measures = [g.qubits[0] for g in gates if g.name == "measure"]
        if len(set(measures)) != len(measures):
            raise CircuitError("a qubit is measured more than once")
        if self.measured_qubits is None:
            object.__setattr__(self, "measured_qubits", tuple(measures))
        else:
            mq = tuple(int(q) for q in self.measured_qubits)
            object.__setattr__(self, "measured_qubits", mq)
            if sorted(mq) != sorted(measures):
                raise CircuitError("measured_qubits disagrees with the measure gates")
        done: set[int] = set()
        for g in gates:
            if g.name == "measure":
                done.add(g.qubits[0])
            elif g.name != "barrier" and done.intersection(g.qubits):
                raise CircuitError(f"{g.name} on {g.qubits} follows a measurement")

    def __len__(self):
        return len(self.gates)

    @property
    def unitary_gates(self) -> list[Gate]:
        return [g for g in self.gates if g.is_unitary]

    def without_measurements(self) -> Circuit:
        return Circuit(self.name, self.num_qubits,
                       [g for g in self.gates if g.name != "measure"], ())

    def with_gates(self, gates, measured_qubits=None, name=None) -> Circuit:
        """Copy with a replacement gate list (measure gates included in ``gates``)."""
        return Circuit(name or self.name, self.num_qubits, tuple(gates), measured_qubits)

    def count_ops(self) -> Counter:
        return Counter(g.name for g in self.gates)


def gate_counts(circ: Circuit) -> tuple[int, int]:
    """Return ``(n_1q, n_2q)``; measurements and barriers are not counted."""
    n1 = sum(1 for g in circ.gates if g.name in ONE_QUBIT_GATES)
    n2 = sum(1 for g in circ.gates if g.name in TWO_QUBIT_GATES)
    return n1, n2


def inverse_gate(g: Gate) -> Gate:
    if not g.is_unitary:
        raise CircuitError(f"{g.name} has no inverse")
    if g.name in SELF_INVERSE:
        return g
    if g.name in _ADJOINT_NAME:
        return Gate(_ADJOINT_NAME[g.name], g.qubits)
    if g.name in ("rx", "ry", "rz"):
        return Gate(g.name, g.qubits, (-g.params[0],))
    theta, phi, lam = g.params
    return Gate("u3", g.qubits, (-theta, -lam, -phi))


def interaction_graph(circ: Circuit) -> nx.Graph:
    """Weighted graph over logical qubits; edge weight counts the cx between a pair."""
    graph = nx.Graph()
    graph.add_nodes_from(range(circ.num_qubits))
    for g in circ.gates:
        if g.name != "cx":
            continue
        a, b = sorted(g.qubits)
        if graph.has_edge(a, b):
            graph[a][b]["weight"] += 1
        else:
            graph.add_edge(a, b, weight=1)
    return graph


def active_qubits(circ: Circuit) -> list[int]:
    """Sorted qubits touched by any gate, measurement or barrier."""
    return sorted({q for g in circ.gates for q in g.qubits})
