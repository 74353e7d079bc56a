"""Hypothesis strategies for random circuits."""
import math

from hypothesis import strategies as st

from qmpc.circuit import Circuit, Gate

ONE_Q = ["id", "x", "y", "z", "h", "s", "sdg", "t", "tdg"]
ROT = ["rx", "ry", "rz"]
angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False, allow_infinity=False)


@st.composite
def gates(draw, n):
    kind = draw(st.sampled_from(["fixed", "rot", "u3", "cx", "swap"] if n > 1 else ["fixed", "rot", "u3"]))
    if kind == "fixed":
        return Gate(draw(st.sampled_from(ONE_Q)), (draw(st.integers(0, n - 1)),))
    if kind == "rot":
        return Gate(draw(st.sampled_from(ROT)), (draw(st.integers(0, n - 1)),), (draw(angles),))
    if kind == "u3":
        return Gate("u3", (draw(st.integers(0, n - 1)),), tuple(draw(angles) for _ in range(3)))
    a, b = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    return Gate(kind, (a, b))


@st.composite
def circuits(draw, min_qubits=1, max_qubits=4, max_gates=20, measure=True):
    n = draw(st.integers(min_qubits, max_qubits))
    body = draw(st.lists(gates(n), max_size=max_gates))
    measured = ()
    if measure:
        measured = tuple(draw(st.permutations(range(n))))[: draw(st.integers(1, n))]
    ops = list(body) + [Gate("measure", (q,)) for q in measured]
    return Circuit("rand", n, ops, measured)
