"""``qmpc`` command line: partition, simulate, bench, zne, vqe, srb-cost.

Exit codes: 0 success, 1 I/O or configuration error, 2 infeasible compilation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import CircuitError
from .device import DeviceError, get_device, srb_cost_estimate
from .metrics import pst, reports_to_csv, score
from .partition import InfeasibleError
from .pipeline import execute, plan_circuits
from .qasm import BENCHMARKS, QasmError, load_benchmark, load_qasm
from .simulator import NoiseSpec, exact_distribution
from .vqe import AnsatzSpec, energy_sweep, exact_ground_energy, h2_hamiltonian, load_hamiltonian
from .zne import DEFAULT_SCALE_FACTORS, zne_run

log = logging.getLogger("qmpc")

DEFAULTS = {
    "device": "toronto-27",
    "circuits": None,
    "sigma": 4.0,
    "threshold": None,
    "kappa": 4.0,
    "shots": 8192,
    "seed": 0,
    "out": "qmpc-out",
}


class ConfigError(ValueError):
    pass


def _load_circuit(ref: str):
    if ref in BENCHMARKS:
        return load_benchmark(ref)
    path = Path(ref)
    if not path.exists():
        raise ConfigError(f"no such circuit file or benchmark: {ref!r}")
    return load_qasm(path)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _thresholds(text: str) -> list[float | None]:
    out = []
    for tok in text.replace(",", " ").split():
        out.append(None if tok.lower() in ("none", "inf") else float(tok))
    return out


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _config(args) -> dict:
    """Merge defaults, the optional JSON config file and explicit flags (flags win)."""
    merged = dict(DEFAULTS)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if isinstance(merged["threshold"], str):
        merged["threshold"] = _thresholds(merged["threshold"])[0]
    if merged["sigma"] < 1 or merged["kappa"] < 1 or merged["shots"] < 1:
        raise ConfigError("sigma and kappa must be >= 1 and shots >= 1")
    merged["out"] = Path(merged["out"])
    return merged


def _noise(cfg) -> NoiseSpec:
    return NoiseSpec(kappa=cfg["kappa"], shots=cfg["shots"], seed=cfg["seed"])


def _circuits(cfg, default=None):
    refs = cfg["circuits"] or default
    if not refs:
        raise ConfigError("no circuits given (use --circuits)")
    return [_load_circuit(r) for r in refs]


def cmd_partition(cfg) -> dict:
    device = get_device(cfg["device"])
    circuits = _circuits(cfg)
    plan = plan_circuits(circuits, device, cfg["sigma"], cfg["threshold"])
    report = plan.to_dict()
    _write(cfg["out"], "plan.json", _dump(report))
    for i, batch in enumerate(plan.batches):
        names = ", ".join(f"{a.circuit_name}->{list(a.partition.sorted_qubits)}" for a in batch)
        print(f"batch {i}: throughput {plan.throughput(i):.3f}  {names}")
    return report


def cmd_simulate(cfg) -> dict:
    device = get_device(cfg["device"])
    circuits = _circuits(cfg)
    result = execute(circuits, device, _noise(cfg), cfg["sigma"], cfg["threshold"])
    rows = [score(dist, exact_distribution(c), c.name)
            for c, dist in zip(circuits, result.distributions)]
    counts = [d.to_dict() for d in result.distributions]
    _write(cfg["out"], "plan.json", _dump(result.plan.to_dict()))
    _write(cfg["out"], "counts.json", _dump(counts))
    _write(cfg["out"], "jobs.json", _dump([j.to_dict() for j in result.jobs]))
    _write(cfg["out"], "metrics.csv", reports_to_csv(rows))
    for r in rows:
        print(f"{r.circuit}: {r.metric} = {r.value:.4f}")
    return {"counts": counts, "metrics": [r.__dict__ for r in rows]}


def cmd_bench(cfg, thresholds, copies) -> list[dict]:
    device = get_device(cfg["device"])
    circ = _circuits(cfg, ["4mod5-v1_22"])[0]
    ideal = exact_distribution(circ)
    expected = max(ideal, key=ideal.get)
    if ideal[expected] < 1 - 1e-9:
        raise ConfigError(f"{circ.name} has no single correct output; bench reports PST")
    rows = []
    for threshold in thresholds:
        for k in copies:
            result = execute([circ] * k, device, _noise(cfg), cfg["sigma"], threshold)
            values = [pst(d, expected) for d in result.distributions]
            rows.append({
                "threshold": "none" if threshold is None else repr(float(threshold)),
                "copies": k,
                "batches": len(result.plan.batches),
                "max_parallel": max(len(b) for b in result.plan.batches),
                "avg_pst": repr(float(np.mean(values))),
                "throughput": repr(result.plan.mean_throughput),
            })
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _write(cfg["out"], "bench.csv", buf.getvalue())
    print(buf.getvalue(), end="")
    return rows


def cmd_zne(cfg, factors, mode, observable=None) -> dict:
    device = get_device(cfg["device"])
    circuits = _circuits(cfg)
    reports = [zne_run(c, observable, device, _noise(cfg), factors, mode, cfg["sigma"],
                       cfg["threshold"], ideal="exact", seed=cfg["seed"]) for c in circuits]
    out = {"mode": mode, "scale_factors": list(factors), "reports": reports,
           "mean_abs_error_unmitigated": float(np.mean([r["abs_errors"]["unmitigated"] for r in reports])),
           "mean_abs_error_best": float(np.mean([r["abs_errors"][r["best"]] for r in reports]))}
    _write(cfg["out"], "zne.json", _dump(out))
    for r in reports:
        print(f"{r['circuit']}: ideal {r['ideal']:+.4f} unmitigated {r['unmitigated']:+.4f} "
              f"best {r['best']} {r['best_value']:+.4f} (batches {r['batches']})")
    return out


def cmd_vqe(cfg, hamiltonian, thetas, mode, reps=2, noiseless=False) -> dict:
    h = load_hamiltonian(hamiltonian) if hamiltonian else h2_hamiltonian()
    spec = AnsatzSpec(h.n, reps)
    device = None if noiseless else get_device(cfg["device"])
    sweep = energy_sweep(h, spec, thetas, mode, device, None if noiseless else _noise(cfg),
                         cfg["sigma"], cfg["threshold"], cfg["shots"], cfg["seed"])
    exact = exact_ground_energy(h)
    out = sweep.to_dict()
    out.update(exact_ground_energy=exact,
               delta_theory_percent=abs((sweep.min_energy - exact) / exact) * 100 if exact else None)
    _write(cfg["out"], "vqe.json", _dump(out))
    print(f"{sweep.n_circuits} measurement circuits, min energy {sweep.min_energy:.6f}, "
          f"exact {exact:.6f}")
    return out


def cmd_srb_cost(cfg, seeds) -> dict:
    device = get_device(cfg["device"])
    cost = srb_cost_estimate(device, seeds)
    out = {"device": device.name, "qubits": device.num_qubits, "seeds": seeds, **cost._asdict()}
    _write(cfg["out"], "srb_cost.json", _dump(out))
    print(f"{device.name}: {cost.pairs} one-hop pairs, {cost.groups} groups, {cost.jobs} jobs")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default option values")
    common.add_argument("--device", help="builtin device name or device JSON path")
    common.add_argument("--circuits", nargs="+", help="QASM files or bundled benchmark names")
    common.add_argument("--sigma", type=float, help="crosstalk parameter (default 4)")
    common.add_argument("--threshold", help="fidelity threshold, or 'none' (default none)")
    common.add_argument("--kappa", type=float, help="simulated crosstalk error factor (default 4)")
    common.add_argument("--shots", type=int, help="shots per circuit (default 8192)")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--out", help="output directory (default qmpc-out)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qmpc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("partition", parents=[common], help="write a batch plan")
    sub.add_parser("simulate", parents=[common], help="compile, simulate and score")
    bench = sub.add_parser("bench", parents=[common], help="throughput vs fidelity sweep")
    bench.add_argument("--thresholds", default="0,0.05,0.1,0.2,0.5,none")
    bench.add_argument("--copies", default="1,2,3,4,5,6")
    zne = sub.add_parser("zne", parents=[common], help="zero-noise extrapolation")
    zne.add_argument("--factors", default=",".join(f"{f:g}" for f in DEFAULT_SCALE_FACTORS))
    zne.add_argument("--mode", choices=("parallel", "serial"), default="parallel")
    zne.add_argument("--observable", help="Pauli letters per measured bit (default all Z)")
    vqe = sub.add_parser("vqe", parents=[common], help="VQE energy sweep")
    vqe.add_argument("--hamiltonian", help="Hamiltonian file (default bundled H2)")
    vqe.add_argument("--thetas", help="comma separated parameter values")
    vqe.add_argument("--n-thetas", type=int, default=8, help="evenly spaced values in [-pi, pi)")
    vqe.add_argument("--reps", type=int, default=2)
    vqe.add_argument("--mode", choices=("parallel", "serial"), default="parallel")
    vqe.add_argument("--noiseless", action="store_true")
    srb = sub.add_parser("srb-cost", parents=[common], help="SRB job-count estimate")
    srb.add_argument("--seeds", type=int, default=5)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        if args.command == "partition":
            cmd_partition(cfg)
        elif args.command == "simulate":
            cmd_simulate(cfg)
        elif args.command == "bench":
            if cfg["device"] == DEFAULTS["device"] and not args.device and not args.config:
                cfg["device"] = "manhattan-65"
            cmd_bench(cfg, _thresholds(args.thresholds), [int(x) for x in _floats(args.copies)])
        elif args.command == "zne":
            if not args.device and not args.config:
                cfg["device"] = "manhattan-65"
            cmd_zne(cfg, _floats(args.factors), args.mode, args.observable)
        elif args.command == "vqe":
            if not args.device and not args.config:
                cfg["device"] = "manhattan-65"
            thetas = (_floats(args.thetas) if args.thetas else
                      list(np.linspace(-math.pi, math.pi, args.n_thetas, endpoint=False)))
            cmd_vqe(cfg, args.hamiltonian, thetas, args.mode, args.reps, args.noiseless)
        elif args.command == "srb-cost":
            cmd_srb_cost(cfg, args.seeds)
    except InfeasibleError as exc:
        print(f"qmpc: infeasible: {exc}", file=sys.stderr)
        return 2
    except (OSError, ConfigError, DeviceError, QasmError, CircuitError, KeyError, ValueError) as exc:
        print(f"qmpc: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
