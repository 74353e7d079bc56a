"""Noise-aware initial layout and SWAP routing confined to one partition."""
from __future__ import annotations

import heapq
import itertools
from statistics import fmean
from typing import NamedTuple

from .circuit import Circuit, Gate, interaction_graph
from .device import DeviceModel
from .partition import Allocation, InfeasibleError, PartitionCandidate

Layout = dict[int, int]

EXHAUSTIVE_WIDTH = 6


class CompiledProgram(NamedTuple):
    circuit: Circuit
    layout: Layout
    final_layout: Layout


def _logical_ranking(circ: Circuit) -> list[int]:
    graph = interaction_graph(circ)
    return sorted(range(circ.num_qubits),
                  key=lambda q: (-graph.degree(q), -graph.degree(q, weight="weight"), q))


def _physical_ranking(part: PartitionCandidate, d: DeviceModel) -> list[int]:
    def key(q):
        inner = [p for p in d.neighbors(q) if p in part.qubits]
        mean_e2q = fmean(d.e2q(q, p) for p in inner) if inner else float("inf")
        return (-len(inner), mean_e2q, q)

    return sorted(part.qubits, key=key)


def _check_partition(circ: Circuit, part: PartitionCandidate):
    if len(part.qubits) < circ.num_qubits:
        raise InfeasibleError(
            f"partition of {len(part.qubits)} qubits is too small for {circ.name} ({circ.num_qubits})")


def _routing_cost(routed: Circuit, d: DeviceModel) -> tuple[int, float]:
    swaps = sum(1 for g in routed.gates if g.name == "swap")
    error = sum(d.e2q(*g.qubits) * (3 if g.name == "swap" else 1)
                for g in routed.gates if g.is_two_qubit)
    return swaps, error


def initial_layout(circ: Circuit, part: PartitionCandidate, d: DeviceModel) -> Layout:
    """Degree-matched layout; small circuits also search the remaining assignments.

    The busiest logical qubit always lands on the best-connected partition
    qubit.  Up to ``EXHAUSTIVE_WIDTH`` qubits, every placement of the others is
    routed and the one with the fewest SWAPs (then lowest summed CNOT error)
    wins.
    """
    _check_partition(circ, part)
    logical = _logical_ranking(circ)
    physical = _physical_ranking(part, d)
    greedy = dict(zip(logical, physical))
    if circ.num_qubits > EXHAUSTIVE_WIDTH or circ.num_qubits == 1:
        return greedy
    anchor_l, anchor_p = logical[0], physical[0]
    rest = [p for p in physical if p != anchor_p]
    best = None
    for perm in itertools.permutations(rest, circ.num_qubits - 1):
        layout = {anchor_l: anchor_p, **dict(zip(logical[1:], perm))}
        try:
            routed, _ = route(circ, layout, part, d)
        except InfeasibleError:
            continue
        key = _routing_cost(routed, d) + (tuple(layout[q] for q in range(circ.num_qubits)),)
        if best is None or key < best[0]:
            best = (key, layout)
    return best[1] if best else greedy


def _cheapest_path(src: int, dst: int, part: PartitionCandidate, d: DeviceModel) -> list[int]:
    """Dijkstra over the partition with hop cost 3 x CNOT error; ties by lower ids."""
    heap = [(0.0, (src,))]
    done = set()
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node == dst:
            return list(path)
        if node in done:
            continue
        done.add(node)
        for nxt in d.neighbors(node):
            if nxt in part.qubits and nxt not in done:
                heapq.heappush(heap, (cost + 3 * d.e2q(node, nxt), path + (nxt,)))
    raise InfeasibleError(f"qubits {src} and {dst} are not connected inside the partition")


def route(circ: Circuit, layout: Layout, part: PartitionCandidate, d: DeviceModel
          ) -> tuple[Circuit, Layout]:
    """Rewrite ``circ`` onto physical qubits, inserting SWAPs inside ``part``.

    A two-qubit gate on non-adjacent qubits moves its first operand along the
    cheapest path until it neighbours the second.  Measurements are emitted
    last, on the final positions of their logical qubits.  Returns the
    physical circuit (over all device qubits) and the final logical to
    physical layout.
    """
    _check_partition(circ, part)
    if sorted(layout) != list(range(circ.num_qubits)):
        raise ValueError("layout must cover every logical qubit")
    if len(set(layout.values())) != len(layout) or not set(layout.values()) <= part.qubits:
        raise ValueError("layout must be injective into the partition")
    l2p = dict(layout)
    p2l = {p: l for l, p in l2p.items()}
    out: list[Gate] = []
    for g in circ.gates:
        if g.name == "measure":
            continue
        if g.is_two_qubit:
            a, b = (l2p[q] for q in g.qubits)
            if not d.has_edge(a, b):
                path = _cheapest_path(a, b, part, d)
                for x, y in zip(path[:-2], path[1:-1]):
                    out.append(Gate("swap", (x, y)))
                    lx, ly = p2l.get(x), p2l.get(y)
                    p2l.pop(x, None)
                    p2l.pop(y, None)
                    if lx is not None:
                        l2p[lx] = y
                        p2l[y] = lx
                    if ly is not None:
                        l2p[ly] = x
                        p2l[x] = ly
        out.append(g.remapped(l2p))
    measured = tuple(l2p[q] for q in circ.measured_qubits)
    out.extend(Gate("measure", (p,)) for p in measured)
    return Circuit(circ.name, d.num_qubits, tuple(out), measured), l2p


def compile_program(circ: Circuit, alloc: Allocation, d: DeviceModel) -> CompiledProgram:
    layout = initial_layout(circ, alloc.partition, d)
    routed, final = route(circ, layout, alloc.partition, d)
    return CompiledProgram(routed, layout, final)


def decompose_swaps(circ: Circuit) -> Circuit:
    gates = []
    for g in circ.gates:
        if g.name == "swap":
            a, b = g.qubits
            gates += [Gate("cx", (a, b)), Gate("cx", (b, a)), Gate("cx", (a, b))]
        else:
            gates.append(g)
    return circ.with_gates(gates, circ.measured_qubits)


def layout_header(program: CompiledProgram) -> list[str]:
    """Comment lines recording the layouts, for :func:`qmpc.qasm.emit_qasm`."""
    fmt = lambda lay: " ".join(f"{l}->{p}" for l, p in sorted(lay.items()))  # noqa: E731
    return [f"layout: {fmt(program.layout)}", f"final_layout: {fmt(program.final_layout)}"]
