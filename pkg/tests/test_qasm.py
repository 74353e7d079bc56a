import math

import pytest
from hypothesis import given, settings

from qmpc.circuit import gate_counts
from qmpc.qasm import BENCHMARKS, QasmError, emit_qasm, load_benchmark, parse_qasm
from strategies import circuits

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_header_only():
    c = parse_qasm(HEADER + "qreg q[3];\n")
    assert c.num_qubits == 3 and c.gates == ()


def test_simple_program():
    c = parse_qasm(HEADER + "qreg q[2];\nh q[0];\ncx q[0],q[1];\n")
    assert len(c.gates) == 2
    assert gate_counts(c) == (1, 1)


def test_angle_expressions():
    c = parse_qasm(HEADER + "qreg q[1];\nrz(-pi/4) q[0];\nu3(pi, 2*pi/3, 0.5) q[0];\n")
    assert c.gates[0].params == (-math.pi / 4,)
    assert c.gates[1].params == pytest.approx((math.pi, 2 * math.pi / 3, 0.5))


def test_measure_orders_by_classical_bit():
    c = parse_qasm(HEADER + "qreg q[3];\ncreg c[3];\nmeasure q[2] -> c[0];\nmeasure q[0] -> c[1];\n")
    assert c.measured_qubits == (2, 0)


def test_register_broadcast():
    c = parse_qasm(HEADER + "qreg q[3];\ncreg c[3];\nh q;\nmeasure q -> c;\n")
    assert [g.qubits for g in c.gates if g.name == "h"] == [(0,), (1,), (2,)]
    assert c.measured_qubits == (0, 1, 2)


def test_barrier_preserved():
    c = parse_qasm(HEADER + "qreg q[2];\nh q[0];\nbarrier q[0],q[1];\nx q[1];\n")
    assert [g.name for g in c.gates] == ["h", "barrier", "x"]


@pytest.mark.parametrize("body,fragment", [
    ("qreg q[2];\nccx q[0],q[1],q[0];\n", "unsupported"),
    ("qreg q[2];\nqreg r[2];\n", "redeclaration"),
    ("qreg q[2];\nh q[2];\n", "out of range"),
    ("qreg q[2];\nh q[0]\n", ""),
    ("qreg q[2];\nreset q[0];\n", "unsupported"),
])
def test_errors(body, fragment):
    with pytest.raises(QasmError) as info:
        parse_qasm(HEADER + body)
    assert fragment in str(info.value)
    assert info.value.line >= 1 and info.value.col >= 1


def test_error_position():
    with pytest.raises(QasmError) as info:
        parse_qasm(HEADER + "qreg q[2];\nh q[0];\n  foo q[1];\n")
    assert info.value.line == 5 and info.value.col == 3


def test_emit_empty():
    text = emit_qasm(parse_qasm(HEADER + "qreg q[1];"))
    assert "qreg q[1];" in text and "creg" not in text
    assert parse_qasm(text).gates == ()


def test_emit_precision():
    c = parse_qasm(HEADER + "qreg q[1];\nrz(0.123456789012345) q[0];\n")
    assert "0.123456789012345" in emit_qasm(c)


@pytest.mark.parametrize("name", BENCHMARKS)
def test_benchmark_round_trip(name):
    c = load_benchmark(name)
    again = parse_qasm(emit_qasm(c), name)
    assert again.gates == c.gates and again.measured_qubits == c.measured_qubits


def test_comment_header_round_trip():
    c = load_benchmark("adder")
    text = emit_qasm(c, ["layout: 0->3"])
    assert text.count("// layout: 0->3") == 1
    assert parse_qasm(text).gates == c.gates


@settings(max_examples=80, deadline=None)
@given(circuits())
def test_round_trip_property(c):
    again = parse_qasm(emit_qasm(c), c.name)
    assert again.num_qubits == c.num_qubits
    assert again.gates == c.gates
    assert again.measured_qubits == c.measured_qubits
