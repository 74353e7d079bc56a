"""VQE measurement pipeline: Pauli grouping, RyRz ansatz and energy sweeps.

Pauli strings index qubits left to right: character ``k`` acts on qubit ``k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from importlib import resources

import numpy as np

from .circuit import Circuit, Gate
from .device import DeviceModel
from .pipeline import execute
from .simulator import NoiseSpec, expectation, simulate_ideal

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0 + 0j, -1.0]),
}
MAX_EXACT_WIDTH = 12


@dataclass(frozen=True)
class PauliTerm:
    pauli: str
    coeff: float

    def __post_init__(self):
        object.__setattr__(self, "pauli", self.pauli.upper())
        if not self.pauli or set(self.pauli) - set("IXYZ"):
            raise ValueError(f"invalid Pauli string {self.pauli!r}")
        if not math.isfinite(self.coeff):
            raise ValueError(f"coefficient of {self.pauli} is not finite")

    @property
    def is_identity(self) -> bool:
        return set(self.pauli) == {"I"}


@dataclass(frozen=True)
class PauliHamiltonian:
    n: int
    terms: tuple[PauliTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.n < 1:
            raise ValueError("Hamiltonian needs at least one qubit")
        strings = [t.pauli for t in self.terms]
        if any(len(s) != self.n for s in strings):
            raise ValueError(f"every Pauli string must have length {self.n}")
        if len(set(strings)) != len(strings):
            raise ValueError("duplicate Pauli strings; sum their coefficients first")

    @classmethod
    def from_terms(cls, pairs) -> PauliHamiltonian:
        """Build from ``(pauli, coeff)`` pairs, summing repeated strings."""
        acc: dict[str, float] = {}
        for pauli, coeff in pairs:
            acc[pauli.upper()] = acc.get(pauli.upper(), 0.0) + float(coeff)
        if not acc:
            raise ValueError("empty Hamiltonian")
        n = len(next(iter(acc)))
        return cls(n, tuple(PauliTerm(p, c) for p, c in acc.items()))

    def to_matrix(self) -> np.ndarray:
        if self.n > MAX_EXACT_WIDTH:
            raise ValueError(f"dense matrix limited to {MAX_EXACT_WIDTH} qubits")
        dim = 2 ** self.n
        mat = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            mat += t.coeff * reduce(np.kron, (_PAULI[c] for c in t.pauli))
        return mat


def parse_hamiltonian(text: str) -> PauliHamiltonian:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<pauli> <coefficient>'")
        try:
            pairs.append((parts[0], float(parts[1])))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad coefficient {parts[1]!r}") from exc
    return PauliHamiltonian.from_terms(pairs)


def load_hamiltonian(path) -> PauliHamiltonian:
    with open(path, encoding="utf-8") as fh:
        return parse_hamiltonian(fh.read())


def h2_hamiltonian() -> PauliHamiltonian:
    """Bundled two-qubit H2 Hamiltonian (terms II, IZ, ZI, ZZ, XX)."""
    return parse_hamiltonian(
        resources.files("qmpc.data").joinpath("hamiltonians", "h2.txt").read_text("utf-8"))


def qubit_wise_commute(a: str, b: str) -> bool:
    return all(x == y or x == "I" or y == "I" for x, y in zip(a, b))


def qwc_group(h: PauliHamiltonian) -> list[list[PauliTerm]]:
    """First-fit grouping of terms into qubit-wise commuting sets, in input order."""
    groups: list[list[PauliTerm]] = []
    for term in h.terms:
        for g in groups:
            if all(qubit_wise_commute(term.pauli, other.pauli) for other in g):
                g.append(term)
                break
        else:
            groups.append([term])
    return groups


def group_basis(group) -> str:
    """Joint measurement letter per qubit (``I`` where no term acts)."""
    strings = [t.pauli if isinstance(t, PauliTerm) else t for t in group]
    basis = []
    for k in range(len(strings[0])):
        letters = {s[k] for s in strings} - {"I"}
        if len(letters) > 1:
            raise ValueError(f"group is not qubit-wise commuting at qubit {k}")
        basis.append(letters.pop() if letters else "I")
    return "".join(basis)


def measurement_circuit(group, ansatz: Circuit) -> Circuit | None:
    """Ansatz followed by basis rotations and measurement of the group's qubits.

    Returns ``None`` for an identity-only group, which needs no circuit.
    """
    basis = group_basis(group)
    measured = [k for k, c in enumerate(basis) if c != "I"]
    if not measured:
        return None
    gates = list(ansatz.unitary_gates)
    for k in measured:
        if basis[k] == "X":
            gates.append(Gate("h", (k,)))
        elif basis[k] == "Y":
            gates += [Gate("sdg", (k,)), Gate("h", (k,))]
    gates += [Gate("measure", (k,)) for k in measured]
    return Circuit(f"{ansatz.name}[{basis}]", ansatz.num_qubits, gates, tuple(measured))


@dataclass(frozen=True)
class AnsatzSpec:
    """RyRz layers with CNOT entanglers; ``binding`` is ``"shared"`` or ``"full"``."""

    n: int
    reps: int = 2
    entangler: tuple[tuple[int, int], ...] | None = None
    binding: str = "shared"

    def __post_init__(self):
        if self.n < 1 or self.reps < 1:
            raise ValueError("ansatz needs n >= 1 and reps >= 1")
        if self.entangler is None:
            object.__setattr__(self, "entangler", tuple((i, i + 1) for i in range(self.n - 1)))
        for a, b in self.entangler:
            if a == b or not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"invalid entangler pair ({a}, {b})")
        if self.binding not in ("shared", "full"):
            raise ValueError("binding must be 'shared' or 'full'")

    @property
    def num_parameters(self) -> int:
        return 2 * self.n * (self.reps + 1)


def build_ansatz(spec: AnsatzSpec, theta) -> Circuit:
    """``reps`` rounds of (Ry, Rz on every qubit, then the entanglers) and a closing Ry Rz layer."""
    if spec.binding == "shared":
        values = [float(theta)] * spec.num_parameters
    else:
        values = [float(v) for v in np.ravel(theta)]
        if len(values) != spec.num_parameters:
            raise ValueError(f"expected {spec.num_parameters} parameters, got {len(values)}")
    it = iter(values)
    gates = []

    def rotations():
        for q in range(spec.n):
            gates.append(Gate("ry", (q,), (next(it),)))
            gates.append(Gate("rz", (q,), (next(it),)))

    for _ in range(spec.reps):
        rotations()
        gates += [Gate("cx", pair) for pair in spec.entangler]
    rotations()
    return Circuit("ansatz", spec.n, gates, ())


def exact_ground_energy(h: PauliHamiltonian) -> float:
    return float(np.linalg.eigvalsh(h.to_matrix())[0])


def group_energy(group, dist) -> float:
    """Sum of coeff x expectation for one group measured in ``dist``."""
    basis = group_basis(group)
    measured = [k for k, c in enumerate(basis) if c != "I"]
    total = 0.0
    for t in group:
        if t.is_identity:
            total += t.coeff
            continue
        pattern = "".join("Z" if t.pauli[k] != "I" else "I" for k in measured)
        total += t.coeff * expectation(dist, pattern)
    return total


@dataclass
class SweepResult:
    thetas: list[float]
    energies: list[float]
    n_circuits: int
    groups: list[list[str]]
    throughput: float | None = None
    batches: int | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def min_energy(self) -> float:
        return min(self.energies)

    @property
    def argmin_theta(self) -> float:
        return self.thetas[int(np.argmin(self.energies))]

    def to_dict(self) -> dict:
        return {"thetas": self.thetas, "energies": self.energies,
                "min_energy": self.min_energy, "argmin_theta": self.argmin_theta,
                "n_circuits": self.n_circuits, "groups": self.groups,
                "throughput": self.throughput, "batches": self.batches, **self.metadata}


def energy_sweep(h: PauliHamiltonian, spec: AnsatzSpec, theta_values, mode: str = "parallel",
                 d: DeviceModel | None = None, noise: NoiseSpec | None = None,
                 sigma: float = 4.0, threshold=None, shots: int = 8192, seed: int = 0
                 ) -> SweepResult:
    """Energy at each shared parameter value.

    With ``noise=None`` the measurement circuits are sampled noiselessly
    (``shots``, ``seed``); otherwise all ``theta x group`` circuits go through
    partitioning, mapping and the noisy simulator, batched together in
    ``"parallel"`` mode or one at a time in ``"serial"`` mode.
    """
    if spec.n != h.n:
        raise ValueError("ansatz and Hamiltonian widths differ")
    thetas = [float(t) for t in theta_values]
    groups = qwc_group(h)
    jobs = []  # (theta index, group index, circuit)
    for i, theta in enumerate(thetas):
        ansatz = build_ansatz(spec, theta)
        for j, g in enumerate(groups):
            mc = measurement_circuit(g, ansatz)
            if mc is not None:
                jobs.append((i, j, mc.with_gates(mc.gates, mc.measured_qubits,
                                                  name=f"theta{i}_g{j}")))
    circuits = [c for _, _, c in jobs]
    throughput = batches = None
    if noise is None:
        dists = [simulate_ideal(c, shots, seed, stream=(0, k)) for k, c in enumerate(circuits)]
    else:
        if d is None:
            raise ValueError("a device is required for noisy execution")
        result = execute(circuits, d, noise, sigma, threshold, mode)
        dists = result.distributions
        throughput, batches = result.throughput, len(result.plan.batches)
    energies = [0.0] * len(thetas)
    for j, g in enumerate(groups):
        if all(t.is_identity for t in g):
            for i in range(len(thetas)):
                energies[i] += sum(t.coeff for t in g)
    for (i, j, _), dist in zip(jobs, dists):
        energies[i] += group_energy(groups[j], dist)
    return SweepResult(thetas, energies, len(circuits),
                       [[t.pauli for t in g] for g in groups], throughput, batches,
                       {"mode": mode if noise is not None else "noiseless"})
