"""OpenQASM 2.0 subset reader and writer.

Supported: one ``qreg``, any number of ``creg`` (flattened in declaration
order), the gate vocabulary of :mod:`qmpc.circuit`, ``measure`` and
``barrier``.  No ``gate`` definitions, no ``if``.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from pathlib import Path

from .circuit import N_PARAMS, SUPPORTED_GATES, Circuit, CircuitError, Gate


class QasmError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(message + where)


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
          "ln": math.log, "sqrt": math.sqrt}


def _eval_angle(expr: str) -> float:
    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1):
            return _FUNCS[node.func.id](walk(node.args[0]))
        raise ValueError(f"unsupported expression {expr!r}")

    return walk(ast.parse(expr.replace("^", "**"), mode="eval"))


_STATEMENT = re.compile(r"[^;]*;", re.S)
_ARG = re.compile(r"^([A-Za-z_]\w*)(?:\[(\d+)\])?$")
_CALL = re.compile(r"^([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*(.*)$", re.S)


def _strip_comments(text: str) -> str:
    # Keep offsets stable so reported columns match the source.
    return re.sub(r"//[^\n]*", lambda m: " " * len(m.group(0)), text)


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def parse_qasm(text: str, name: str = "circuit") -> Circuit:
    src = _strip_comments(text)
    qreg: tuple[str, int] | None = None
    cregs: dict[str, tuple[int, int]] = {}
    n_clbits = 0
    gates: list[Gate] = []
    clbit_of: dict[int, int] = {}

    pos = 0
    for m in _STATEMENT.finditer(src):
        stmt = m.group(0)
        lead = len(stmt) - len(stmt.lstrip())
        start = m.start() + lead
        body = stmt.strip()[:-1].strip()
        pos = m.end()
        line, col = _position(src, start)

        def fail(msg):
            raise QasmError(msg, line, col)

        if not body:
            continue
        if body.startswith("OPENQASM"):
            if body.split()[1:] != ["2.0"]:
                fail(f"unsupported version in {body!r}")
            continue
        if body.startswith("include"):
            continue
        if body.startswith(("qreg", "creg")):
            decl = re.fullmatch(r"(qreg|creg)\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]", body)
            if not decl:
                fail(f"malformed register declaration {body!r}")
            kind, reg, size = decl.group(1), decl.group(2), int(decl.group(3))
            if kind == "qreg":
                if qreg is not None:
                    fail(f"register redeclaration: only one qreg allowed, found {reg!r}")
                if reg in cregs:
                    fail(f"register redeclaration {reg!r}")
                qreg = (reg, size)
            else:
                if reg in cregs or (qreg and qreg[0] == reg):
                    fail(f"register redeclaration {reg!r}")
                cregs[reg] = (n_clbits, size)
                n_clbits += size
            continue
        if body.startswith(("gate ", "opaque ", "if", "reset")):
            fail(f"unsupported statement {body.split()[0]!r}")

        call = _CALL.match(body)
        if not call:
            fail(f"cannot parse statement {body!r}")
        gname, params_src, args_src = call.groups()
        if qreg is None:
            fail("gate applied before qreg declaration")

        def qubit_args(arg_text):
            out = []
            for raw in [a.strip() for a in arg_text.split(",")]:
                am = _ARG.match(raw)
                if not am or am.group(1) != qreg[0]:
                    fail(f"unknown quantum argument {raw!r}")
                if am.group(2) is None:
                    out.append(list(range(qreg[1])))
                else:
                    idx = int(am.group(2))
                    if idx >= qreg[1]:
                        fail(f"qubit index {idx} out of range for {qreg[0]}[{qreg[1]}]")
                    out.append([idx])
            return out

        if gname == "measure":
            parts = args_src.split("->")
            if len(parts) != 2:
                fail("measure needs 'q -> c'")
            (qs,) = qubit_args(parts[0])
            target = _ARG.match(parts[1].strip())
            if not target or target.group(1) not in cregs:
                fail(f"unknown classical argument {parts[1].strip()!r}")
            offset, size = cregs[target.group(1)]
            if target.group(2) is None:
                cs = [offset + i for i in range(size)]
            else:
                if int(target.group(2)) >= size:
                    fail(f"classical index {target.group(2)} out of range")
                cs = [offset + int(target.group(2))]
            if len(cs) != len(qs):
                fail("measure register sizes differ")
            for q, c in zip(qs, cs):
                if c in clbit_of.values():
                    fail(f"classical bit {c} written twice")
                clbit_of[q] = c
                gates.append(_make("measure", (q,), (), fail))
            continue

        if gname not in SUPPORTED_GATES:
            fail(f"unsupported gate {gname!r}")
        params: tuple[float, ...] = ()
        if params_src is not None:
            try:
                params = tuple(_eval_angle(p.strip()) for p in params_src.split(","))
            except (ValueError, SyntaxError, ZeroDivisionError):
                fail(f"bad parameter list {params_src!r}")
        if len(params) != N_PARAMS.get(gname, 0):
            fail(f"{gname} expects {N_PARAMS.get(gname, 0)} parameter(s)")
        args = qubit_args(args_src)
        if gname == "barrier":
            qs = sorted({q for a in args for q in a})
            gates.append(_make("barrier", tuple(qs), (), fail))
            continue
        width = max(len(a) for a in args)
        if any(len(a) not in (1, width) for a in args):
            fail("register arguments of different sizes")
        for i in range(width):
            qs = tuple(a[i] if len(a) > 1 else a[0] for a in args)
            gates.append(_make(gname, qs, params, fail))

    tail = src[pos:].strip()
    if tail:
        line, col = _position(src, src.index(tail, pos))
        raise QasmError("statement missing ';'", line, col)
    if qreg is None:
        raise QasmError("no qreg declared")
    measured = tuple(q for q, _ in sorted(clbit_of.items(), key=lambda kv: kv[1]))
    try:
        return Circuit(name, qreg[1], tuple(gates), measured)
    except CircuitError as exc:
        raise QasmError(str(exc)) from exc


def _make(name, qubits, params, fail):
    try:
        return Gate(name, qubits, params)
    except CircuitError as exc:
        fail(str(exc))


def _fmt(x: float) -> str:
    return format(x, ".17g")


def emit_qasm(c: Circuit, comments: list[str] | tuple[str, ...] = ()) -> str:
    lines = [f"// {text}" for text in comments]
    lines += ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    if c.measured_qubits:
        lines.append(f"creg c[{len(c.measured_qubits)}];")
    clbit = {q: i for i, q in enumerate(c.measured_qubits)}
    for g in c.gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        if g.name == "measure":
            lines.append(f"measure {args} -> c[{clbit[g.qubits[0]]}];")
        elif g.params:
            lines.append(f"{g.name}({','.join(_fmt(p) for p in g.params)}) {args};")
        else:
            lines.append(f"{g.name} {args};")
    return "\n".join(lines) + "\n"


def load_qasm(path) -> Circuit:
    path = Path(path)
    return parse_qasm(path.read_text(encoding="utf-8"), name=path.stem)


BENCHMARKS = ("adder", "linearsolver", "4mod5-v1_22", "fredkin", "qec_en", "alu-v0_27", "bell", "variation")


def load_benchmark(name: str) -> Circuit:
    """Bundled benchmark circuit by name."""
    from importlib import resources

    if name not in BENCHMARKS:
        raise KeyError(f"unknown benchmark {name!r}; choose from {', '.join(BENCHMARKS)}")
    text = resources.files("qmpc.data").joinpath("benchmarks", f"{name}.qasm").read_text("utf-8")
    return parse_qasm(text, name=name)
