import itertools

import pytest

from oracles import assert_routing_equivalent
from qmpc.circuit import Circuit, Gate
from qmpc.device import DeviceModel, EdgeCal, QubitCal
from qmpc.mapper import compile_program, decompose_swaps, initial_layout, layout_header, route
from qmpc.partition import InfeasibleError, PartitionCandidate, select_partition
from qmpc.qasm import BENCHMARKS, emit_qasm, load_benchmark, parse_qasm
from qmpc.simulator import exact_distribution, simulate_ideal, tv_distance


def make_device(n, edges, e2q=0.01):
    return DeviceModel("t", tuple(QubitCal(i, 1e-3, 2e-2) for i in range(n)),
                       tuple(EdgeCal(a, b, e2q) for a, b in edges))


LINE3 = make_device(3, [(0, 1), (1, 2)])
LINE4 = make_device(4, [(0, 1), (1, 2), (2, 3)])
TRIANGLE = make_device(3, [(0, 1), (1, 2), (0, 2)])
STAR = make_device(5, [(0, 1), (0, 2), (0, 3), (0, 4)])


def whole(d):
    return PartitionCandidate.from_qubits(range(d.num_qubits), d)


def test_conformant_circuit_unchanged():
    circ = Circuit("c", 3, [Gate("h", (0,)), Gate("cx", (0, 1)), Gate("cx", (1, 2))])
    routed, final = route(circ, {0: 0, 1: 1, 2: 2}, whole(LINE3), LINE3)
    assert [g for g in routed.gates] == list(circ.gates)
    assert final == {0: 0, 1: 1, 2: 2}


def test_line_needs_one_swap():
    circ = Circuit("c", 3, [Gate("cx", (0, 2))])
    routed, final = route(circ, {0: 0, 1: 1, 2: 2}, whole(LINE3), LINE3)
    assert routed.count_ops()["swap"] == 1 and routed.count_ops()["cx"] == 1
    assert decompose_swaps(routed).count_ops()["cx"] == 4
    assert final[0] == 1 and final[1] == 0


def test_route_confined_to_partition():
    part = PartitionCandidate.from_qubits({0, 1, 2}, LINE4)
    circ = Circuit("c", 3, [Gate("cx", (0, 2)), Gate("measure", (2,))])
    routed, _ = route(circ, {0: 0, 1: 1, 2: 2}, part, LINE4)
    assert {q for g in routed.gates for q in g.qubits} <= part.qubits


def test_route_disconnected_partition():
    part = PartitionCandidate.from_qubits({0, 2}, LINE3)
    with pytest.raises(InfeasibleError):
        route(Circuit("c", 2, [Gate("cx", (0, 1))]), {0: 0, 1: 2}, part, LINE3)


def test_route_bad_layout():
    with pytest.raises(ValueError):
        route(Circuit("c", 2, []), {0: 0, 1: 0}, whole(LINE3), LINE3)
    with pytest.raises(InfeasibleError):
        initial_layout(Circuit("c", 4, []), whole(LINE3), LINE3)


def test_two_qubit_bijection():
    d = make_device(2, [(0, 1)])
    circ = Circuit("c", 2, [Gate("cx", (1, 0))])
    assert sorted(initial_layout(circ, whole(d), d).values()) == [0, 1]


def test_star_hub_to_hub():
    circ = Circuit("c", 4, [Gate("cx", (2, q)) for q in (0, 1, 3)])
    part = PartitionCandidate.from_qubits({0, 1, 2, 3}, STAR)
    assert initial_layout(circ, part, STAR)[2] == 0


def test_triangle_never_swaps():
    circ = load_benchmark("fredkin")
    prog = compile_program(circ, select_partition(circ, TRIANGLE), TRIANGLE)
    assert prog.circuit.count_ops()["swap"] == 0


def test_single_qubit_never_swaps(toronto):
    circ = Circuit("c", 1, [Gate("h", (0,)), Gate("measure", (0,))])
    prog = compile_program(circ, select_partition(circ, toronto), toronto)
    assert "swap" not in prog.circuit.count_ops()


def test_adder_layout_minimal_on_line():
    circ = load_benchmark("adder")
    part = whole(LINE4)
    chosen = initial_layout(circ, part, LINE4)
    swaps = lambda lay: route(circ, lay, part, LINE4)[0].count_ops()["swap"]  # noqa: E731
    every = [dict(enumerate(p)) for p in itertools.permutations(range(4))]
    assert swaps(chosen) == min(swaps(lay) for lay in every)


@pytest.mark.parametrize("name", BENCHMARKS)
def test_benchmark_routing_semantics(toronto, name):
    circ = load_benchmark(name)
    alloc = select_partition(circ, toronto)
    prog = compile_program(circ, alloc, toronto)
    for g in prog.circuit.gates:
        assert set(g.qubits) <= alloc.partition.qubits
        if g.is_two_qubit:
            assert toronto.has_edge(*g.qubits)
    assert_routing_equivalent(circ, prog, alloc.partition)


@pytest.mark.parametrize("name", BENCHMARKS)
def test_benchmark_routing_distribution(manhattan, name):
    circ = load_benchmark(name)
    prog = compile_program(circ, select_partition(circ, manhattan), manhattan)
    sampled = simulate_ideal(prog.circuit, 8192, seed=7).probabilities()
    assert tv_distance(sampled, exact_distribution(circ)) < 0.02


def test_layout_header_round_trip(toronto):
    circ = load_benchmark("bell")
    prog = compile_program(circ, select_partition(circ, toronto), toronto)
    text = emit_qasm(prog.circuit, layout_header(prog))
    assert "// layout:" in text and "// final_layout:" in text
    assert parse_qasm(text).gates == prog.circuit.gates
