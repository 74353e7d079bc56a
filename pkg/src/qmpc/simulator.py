"""Statevector sampling with stochastic Pauli noise, readout flips and crosstalk.

Qubit ``k`` of a compacted register is tensor axis ``k`` (most significant in
the flattened amplitude index), matching ``np.kron(P0, P1, ...)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .circuit import Circuit, Gate, active_qubits

MAX_WIDTH = 24
# complex amplitudes held at once across a chunk of trajectories
_CHUNK_ELEMENTS = 1 << 21

_SQ2 = 1 / np.sqrt(2)
_FIXED = {
    "id": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * np.pi / 4)]),
}
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
PAULIS = (_FIXED["id"], _FIXED["x"], _FIXED["y"], _FIXED["z"])


class SimulationError(ValueError):
    pass


def gate_matrix(g: Gate) -> np.ndarray:
    """Unitary of ``g``; two-qubit matrices index the first listed qubit as the high bit."""
    if g.name in _FIXED:
        return _FIXED[g.name]
    if g.name == "cx":
        return CX
    if g.name == "swap":
        return SWAP
    if g.name in ("rx", "ry", "rz"):
        half = g.params[0] / 2
        c, s = np.cos(half), np.sin(half)
        if g.name == "rx":
            return np.array([[c, -1j * s], [-1j * s, c]])
        if g.name == "ry":
            return np.array([[c, -s], [s, c]], dtype=complex)
        return np.diag([np.exp(-1j * half), np.exp(1j * half)])
    if g.name == "u3":
        theta, phi, lam = g.params
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return np.array([
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ])
    raise SimulationError(f"{g.name} is not a unitary gate")


@dataclass
class Distribution:
    """Shot counts keyed by bitstring; character ``k`` is classical bit ``k``."""

    counts: dict[str, int]
    shots: int
    circuit: str = ""
    seed: int | None = None
    metadata: dict = field(default_factory=dict)

    def probabilities(self) -> dict[str, float]:
        return {b: c / self.shots for b, c in sorted(self.counts.items())}

    def to_dict(self) -> dict:
        return {"circuit": self.circuit, "counts": dict(sorted(self.counts.items())),
                "shots": self.shots, "seed": self.seed}


def _apply(state: np.ndarray, mat: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Apply ``mat`` to tensor ``axes`` of a batched state (batch is axis 0)."""
    k = len(axes)
    moved = np.moveaxis(state, axes, range(state.ndim - k, state.ndim))
    shape = moved.shape
    flat = moved.reshape(-1, 2 ** k) @ mat.T
    return np.moveaxis(flat.reshape(shape), range(state.ndim - k, state.ndim), axes)


def _compact(circ: Circuit) -> tuple[list[Gate], list[int], int]:
    qubits = active_qubits(circ) or [0]
    if len(qubits) > MAX_WIDTH:
        raise SimulationError(f"{circ.name}: width {len(qubits)} exceeds the {MAX_WIDTH}-qubit cap")
    index = {q: i for i, q in enumerate(qubits)}
    gates = [g.remapped(index) for g in circ.gates if g.is_unitary]
    measured = [index[q] for q in circ.measured_qubits]
    return gates, measured, len(qubits)


def statevector(circ: Circuit) -> np.ndarray:
    """Final state over ``circ.num_qubits`` qubits (measurements ignored)."""
    n = circ.num_qubits
    if n > MAX_WIDTH:
        raise SimulationError(f"width {n} exceeds the {MAX_WIDTH}-qubit cap")
    state = np.zeros((1,) + (2,) * n, dtype=complex)
    state[(0,) * (n + 1)] = 1.0
    for g in circ.gates:
        if g.is_unitary:
            state = _apply(state, gate_matrix(g), tuple(q + 1 for q in g.qubits))
    return state.reshape(-1)


def exact_distribution(circ: Circuit) -> dict[str, float]:
    """Analytic outcome probabilities over the measured bits (zero entries dropped)."""
    gates, measured, n = _compact(circ)
    state = statevector(Circuit(circ.name, n, gates, ()))
    probs = (np.abs(state) ** 2).reshape((2,) * n)
    keep = tuple(i for i in range(n) if i not in measured)
    marg = probs.sum(axis=keep) if keep else probs
    # marginal axes are in ascending compact index; reorder to clbit order
    order = sorted(measured)
    marg = np.transpose(marg, [order.index(m) for m in measured]) if measured else marg
    out = {}
    for idx, p in np.ndenumerate(np.asarray(marg)):
        if p > 1e-15:
            out["".join(str(b) for b in idx)] = float(p)
    return out


def _stream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for ``(seed, job, member)``; chunking never changes draws."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *map(int, path)]))


def _to_counts(outcomes: np.ndarray, width: int) -> dict[str, int]:
    values, freq = np.unique(outcomes, return_counts=True)
    return {format(int(v), f"0{width}b") if width else "": int(c) for v, c in zip(values, freq)}


def _sample_bits(probs: np.ndarray, u: np.ndarray, measured: list[int], n: int) -> np.ndarray:
    """Inverse-CDF sampling of full basis states, reduced to measured-bit integers."""
    cdf = np.cumsum(probs, axis=-1)
    cdf /= cdf[..., -1:]
    if cdf.ndim == 1:
        idx = np.searchsorted(cdf, u, side="right")
    else:
        idx = (cdf <= u[:, None]).sum(axis=1)
    idx = np.minimum(idx, 2 ** n - 1)
    bits = np.zeros(len(u), dtype=np.int64)
    for m in measured:
        bits = (bits << 1) | ((idx >> (n - 1 - m)) & 1)
    return bits


def simulate_ideal(circ: Circuit, shots: int, seed: int, stream: tuple[int, int] = (0, 0)
                   ) -> Distribution:
    """Exact statevector sampling; uses the same draws as member 0 of a noiseless job."""
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    gates, measured, n = _compact(circ)
    rng = _stream(seed, *stream)
    u = rng.random(shots)
    state = statevector(Circuit(circ.name, n, gates, ()))
    bits = _sample_bits(np.abs(state) ** 2, u, measured, n)
    return Distribution(_to_counts(bits, len(measured)), shots, circ.name, seed)


def run_trajectories(
    gates: list[Gate],
    error_probs: list[float],
    measured: list[int],
    readout: list[float],
    n: int,
    shots: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample ``shots`` noisy trajectories over an ``n``-qubit compact register.

    After gate ``i``, with probability ``error_probs[i]`` a uniformly random
    non-identity Pauli acts on that gate's qubits.  All random numbers are
    drawn up front for the full shot count, so results do not depend on how
    shots are chunked.
    """
    u_meas = rng.random(shots)
    u_read = rng.random((shots, len(measured)))
    u_err = rng.random((len(gates), shots))
    which = np.stack([rng.integers(1, 4 ** len(g.qubits), shots) for g in gates]) if gates \
        else np.zeros((0, shots), dtype=np.int64)

    chunk = max(1, _CHUNK_ELEMENTS >> n)
    out = np.empty(shots, dtype=np.int64)
    for lo in range(0, shots, chunk):
        hi = min(shots, lo + chunk)
        state = np.zeros((hi - lo,) + (2,) * n, dtype=complex)
        state[(slice(None),) + (0,) * n] = 1.0
        for i, g in enumerate(gates):
            axes = tuple(q + 1 for q in g.qubits)
            state = _apply(state, gate_matrix(g), axes)
            if error_probs[i] <= 0:
                continue
            hit = np.nonzero(u_err[i, lo:hi] < error_probs[i])[0]
            if hit.size == 0:
                continue
            labels = which[i, lo + hit]
            for label in np.unique(labels):
                rows = hit[labels == label]
                sub = state[rows]
                for k, ax in enumerate(axes):
                    p = (int(label) >> (2 * (len(axes) - 1 - k))) & 3
                    if p:
                        sub = _apply(sub, PAULIS[p], (ax,))
                state[rows] = sub
        probs = (np.abs(state) ** 2).reshape(hi - lo, -1)
        out[lo:hi] = _sample_bits(probs, u_meas[lo:hi], measured, n)
    width = len(measured)
    for k, r in enumerate(readout):
        flips = (u_read[:, k] < r).astype(np.int64)
        out ^= flips << (width - 1 - k)
    return out


@dataclass(frozen=True)
class NoiseSpec:
    """Noise parameters layered on top of a device's calibration.

    ``kappa`` multiplies the error of every cx that takes part in a crosstalk
    event.  ``scale`` multiplies all gate errors and ``readout_scale`` all
    readout errors (both 1 for the calibrated model, 0 for a noiseless run).
    """

    kappa: float = 4.0
    shots: int = 8192
    seed: int = 0
    scale: float = 1.0
    readout_scale: float = 1.0

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.scale < 0 or self.readout_scale < 0:
            raise ValueError("noise scales must be non-negative")


def _clamp(p: float, what: str) -> float:
    if p > 1.0:
        warnings.warn(f"{what}: error probability {p:.3g} clamped to 1", RuntimeWarning, stacklevel=3)
        return 1.0
    return p


def simulate_noisy(job, spec: NoiseSpec, job_index: int = 0) -> list[Distribution]:
    """Sample every member circuit of a merged job under ``spec``.

    Members are independent: crosstalk only rescales cx error rates where the
    job records a crosstalk event, so each member is simulated on its own
    register with its own random stream ``(seed, job_index, member index)``.
    """
    device = job.device
    hot = job.crosstalk_set()
    results = []
    for m, member in enumerate(job.members):
        qubits = active_qubits(member.circuit) or [member.circuit.measured_qubits[0]]
        if len(qubits) > MAX_WIDTH:
            raise SimulationError(f"{member.circuit.name}: width {len(qubits)} exceeds the cap")
        index = {q: i for i, q in enumerate(qubits)}
        gates, probs = [], []
        for slice_index, g in member.timeline():
            if g.name == "measure":
                continue
            if g.name == "cx":
                if not device.has_edge(*g.qubits):
                    raise SimulationError(f"{member.circuit.name}: cx on uncoupled qubits {g.qubits}")
                p = device.e2q(*g.qubits) * spec.scale
                if (slice_index, tuple(sorted(g.qubits))) in hot:
                    p *= spec.kappa
            else:
                p = device.e1q(g.qubits[0]) * spec.scale
            gates.append(g.remapped(index))
            probs.append(_clamp(p, member.circuit.name))
        measured = [index[q] for q in member.circuit.measured_qubits]
        readout = [_clamp(device.readout(q) * spec.readout_scale, member.circuit.name)
                   for q in member.circuit.measured_qubits]
        bits = run_trajectories(gates, probs, measured, readout, len(qubits), spec.shots,
                                _stream(spec.seed, job_index, m))
        results.append(Distribution(_to_counts(bits, len(measured)), spec.shots,
                                    member.circuit.name, spec.seed))
    return results


def expectation(dist, observable: str, qubits=None) -> float:
    """Parity expectation of a diagonal Pauli observable over measured bits.

    ``observable`` holds one letter per bit (``I`` ignored; any other letter
    counts toward the parity since basis rotations are already in the
    circuit).  With ``qubits`` given, letter ``k`` applies to bit ``qubits[k]``.
    """
    probs = dist.probabilities() if isinstance(dist, Distribution) else dict(dist)
    if not probs:
        raise ValueError("empty distribution")
    width = len(next(iter(probs)))
    positions = list(range(len(observable))) if qubits is None else list(qubits)
    if len(positions) != len(observable):
        raise ValueError("observable and qubit subset differ in length")
    bad = set(observable.upper()) - set("IXYZ")
    if bad:
        raise ValueError(f"invalid Pauli letters {sorted(bad)}")
    if any(p >= width or p < 0 for p in positions) or (qubits is None and len(observable) != width):
        raise ValueError("observable acts outside the measured bits")
    support = [p for p, letter in zip(positions, observable.upper()) if letter != "I"]
    total = 0.0
    for bits, p in probs.items():
        parity = sum(bits[k] == "1" for k in support) & 1
        total += -p if parity else p
    return total


def tv_distance(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
