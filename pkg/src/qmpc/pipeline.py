"""Partition, map, merge and simulate a set of circuits end to end."""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit
from .device import DeviceModel
from .mapper import CompiledProgram, compile_program
from .partition import BatchPlan, allocate_batch, select_partition
from .scheduler import CompositeJob, merge
from .simulator import Distribution, NoiseSpec, simulate_noisy

MODES = ("parallel", "serial")


@dataclass
class ExecutionResult:
    plan: BatchPlan
    jobs: list[CompositeJob]
    programs: list[CompiledProgram]
    distributions: list[Distribution]

    @property
    def throughput(self) -> float:
        return self.plan.mean_throughput


def plan_circuits(circuits: list[Circuit], d: DeviceModel, sigma=4.0, threshold=None,
                  mode: str = "parallel") -> BatchPlan:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "parallel":
        return allocate_batch(circuits, d, sigma, threshold)
    batches = [[select_partition(c, d, (), sigma, circuit_index=i)] for i, c in enumerate(circuits)]
    return BatchPlan(batches, float(sigma), 0.0, d.num_qubits, d.name, {"mode": "serial"})


def compile_plan(circuits: list[Circuit], plan: BatchPlan, d: DeviceModel
                 ) -> tuple[list[CompositeJob], list[CompiledProgram]]:
    """Map every allocation and merge each batch; programs come back in input order."""
    programs: dict[int, CompiledProgram] = {}
    jobs = []
    for batch in plan.batches:
        members = []
        for alloc in batch:
            prog = compile_program(circuits[alloc.circuit_index], alloc, d)
            programs[alloc.circuit_index] = prog
            members.append((alloc, prog.circuit))
        jobs.append(merge(members, d))
    return jobs, [programs[i] for i in range(len(circuits))]


def execute(circuits, d: DeviceModel, noise: NoiseSpec, sigma=4.0, threshold=None,
            mode: str = "parallel") -> ExecutionResult:
    circuits = list(circuits)
    plan = plan_circuits(circuits, d, sigma, threshold, mode)
    jobs, programs = compile_plan(circuits, plan, d)
    dists: dict[int, Distribution] = {}
    for b, job in enumerate(jobs):
        for member, dist in zip(job.members, simulate_noisy(job, noise, job_index=b)):
            dists[member.allocation.circuit_index] = dist
    return ExecutionResult(plan, jobs, programs, [dists[i] for i in range(len(circuits))])
