import pytest
from hypothesis import given, settings

from oracles import brute_one_hop, check_alap
from qmpc.circuit import Circuit, Gate
from qmpc.mapper import compile_program
from qmpc.partition import allocate_batch
from qmpc.pipeline import compile_plan
from qmpc.qasm import BENCHMARKS, load_benchmark
from qmpc.scheduler import alap_schedule, composite_depth, merge
from strategies import circuits


@pytest.mark.parametrize("name", BENCHMARKS)
def test_benchmarks_alap(name):
    check_alap(load_benchmark(name))


@pytest.mark.parametrize("name", BENCHMARKS)
def test_routed_benchmarks_alap(toronto, name):
    circ = load_benchmark(name)
    plan = allocate_batch([circ], toronto)
    check_alap(compile_program(circ, plan.allocations[0], toronto).circuit)


@settings(max_examples=150, deadline=None)
@given(circuits(max_qubits=5, max_gates=25))
def test_alap_property(circ):
    check_alap(circ)


def test_barrier_fences():
    circ = Circuit("c", 2, [Gate("h", (0,)), Gate("barrier", (0, 1)), Gate("x", (1,)), Gate("x", (1,))])
    sched = check_alap(circ)
    assert sched.depth == 3
    assert sched.slices[0] == [Gate("h", (0,))]


def test_idle_qubit_starts_late():
    circ = Circuit("c", 2, [Gate("x", (0,)), Gate("x", (0,)), Gate("x", (0,)), Gate("h", (1,)),
                            Gate("measure", (0,)), Gate("measure", (1,))])
    sched = check_alap(circ)
    assert Gate("h", (1,)) in sched.slices[2]
    assert sched.depth == 4


def test_swap_lowered():
    sched = alap_schedule(Circuit("c", 2, [Gate("swap", (0, 1))]))
    assert [g for s in sched.slices for g in s] == [Gate("cx", (0, 1)), Gate("cx", (1, 0)),
                                                    Gate("cx", (0, 1))]


def merged_job(d, names):
    circs = [load_benchmark(n) for n in names]
    plan = allocate_batch(circs, d, sigma=1.0)
    jobs, programs = compile_plan(circs, plan, d)
    batch = [(a, programs[a.circuit_index].circuit) for a in plan.batches[0]]
    job = merge(batch, d)
    assert job.crosstalk_events == jobs[0].crosstalk_events
    return job


@pytest.mark.parametrize("names", [("adder", "adder", "adder"), ("alu-v0_27", "fredkin", "bell"),
                                   ("linearsolver", "linearsolver", "fredkin")])
def test_merge_end_aligned_and_events(toronto, names):
    job = merged_job(toronto, names)
    assert composite_depth(job) == max(m.schedule.depth for m in job.members)
    for m in job.members:
        assert m.offset + m.schedule.depth == job.depth
    pairs = brute_one_hop(toronto)
    expected = set()
    for t, cell in enumerate(job.slices()):
        cxs = [(i, tuple(sorted(g.qubits))) for i, g in cell if g.name == "cx"]
        for i, e in cxs:
            for k, f in cxs:
                if i < k and frozenset((e, f)) in pairs:
                    expected.add((t, min(e, f), max(e, f)))
    assert set(job.crosstalk_events) == expected
    assert job.crosstalk_events == sorted(job.crosstalk_events)


def test_adder_triple_sigma1_has_crosstalk(toronto):
    assert merged_job(toronto, ("adder",) * 3).crosstalk_events


def test_merge_rejects_overlap(toronto):
    circ = load_benchmark("adder")
    plan = allocate_batch([circ], toronto)
    alloc = plan.allocations[0]
    prog = compile_program(circ, alloc, toronto).circuit
    with pytest.raises(ValueError):
        merge([(alloc, prog), (alloc, prog)], toronto)


def test_job_dict(toronto):
    data = merged_job(toronto, ("adder", "fredkin")).to_dict()
    assert len(data["members"]) == 2 and len(data["slices"]) == data["depth"]
