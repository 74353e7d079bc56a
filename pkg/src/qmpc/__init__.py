"""Crosstalk-aware multi-programming of small circuits on a modeled NISQ device."""
from .circuit import Circuit, CircuitError, Gate, gate_counts, inverse_gate
from .device import (DeviceError, DeviceModel, get_device, hardware_throughput, load_device,
                     one_hop_pairs, srb_cost_estimate, srb_jobs)
from .mapper import compile_program, initial_layout, route
from .metrics import jsd, kl, pst, score
from .partition import (Allocation, BatchPlan, InfeasibleError, PartitionCandidate,
                        QuCPAllocator, allocate_batch, candidates, efs, select_partition)
from .pipeline import execute, plan_circuits
from .qasm import BENCHMARKS, QasmError, emit_qasm, load_benchmark, load_qasm, parse_qasm
from .scheduler import CompositeJob, alap_schedule, merge
from .simulator import Distribution, NoiseSpec, exact_distribution, simulate_ideal, simulate_noisy
from .vqe import AnsatzSpec, PauliHamiltonian, build_ansatz, energy_sweep, qwc_group
from .zne import GateFolder, ZeroNoiseExtrapolator, extrapolate, fold_random, zne_run

__version__ = "0.1.0"

__all__ = [
    "Allocation", "AnsatzSpec", "BENCHMARKS", "BatchPlan", "Circuit", "CircuitError",
    "CompositeJob", "DeviceError", "DeviceModel", "Distribution", "Gate", "GateFolder",
    "InfeasibleError", "NoiseSpec", "PartitionCandidate", "PauliHamiltonian", "QasmError",
    "QuCPAllocator", "ZeroNoiseExtrapolator", "alap_schedule", "allocate_batch",
    "build_ansatz", "candidates", "compile_program", "efs", "emit_qasm", "energy_sweep",
    "exact_distribution", "execute", "extrapolate", "fold_random", "gate_counts",
    "get_device", "hardware_throughput", "initial_layout", "inverse_gate", "jsd", "kl",
    "load_benchmark", "load_device", "load_qasm", "merge", "one_hop_pairs", "parse_qasm",
    "plan_circuits", "pst", "qwc_group", "route", "score", "select_partition",
    "simulate_ideal", "simulate_noisy", "srb_cost_estimate", "srb_jobs", "zne_run",
]
