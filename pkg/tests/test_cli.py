import csv
import json
import subprocess
import sys

import pytest

from qmpc.cli import main
from qmpc.qasm import emit_qasm, load_benchmark


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_partition(tmp_path):
    assert run(tmp_path, "partition", "--circuits", "adder", "fredkin", "alu-v0_27") == 0
    plan = json.loads((tmp_path / "plan.json").read_text())
    assert 1 <= len(plan["batches"]) <= 3
    assert all({"circuit", "qubits", "efs"} <= set(a) for b in plan["batches"] for a in b)


def test_partition_threshold_zero(tmp_path):
    assert run(tmp_path, "partition", "--circuits", "adder", "fredkin", "alu-v0_27",
               "--threshold", "0") == 0
    plan = json.loads((tmp_path / "plan.json").read_text())
    assert [len(b) for b in plan["batches"]] == [1, 1, 1]


def test_exit_codes(tmp_path, capsys):
    assert run(tmp_path, "partition", "--device", "nope", "--circuits", "adder") == 1
    assert run(tmp_path, "partition", "--circuits", str(tmp_path / "missing.qasm")) == 1
    bad = tmp_path / "bad.qasm"
    bad.write_text('OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n')
    assert run(tmp_path, "partition", "--circuits", str(bad)) == 1
    wide = tmp_path / "wide.qasm"
    wide.write_text(emit_qasm(load_benchmark("adder")).replace("qreg q[4]", "qreg q[16]"))
    assert run(tmp_path, "partition", "--device", "melbourne-15", "--circuits", str(wide)) == 2
    assert run(tmp_path, "partition", "--circuits", "adder", "--sigma", "0.5") == 1
    assert "error" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"device": "melbourne-15", "circuits": ["adder"], "sigma": 2}))
    assert main(["partition", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    plan = json.loads((tmp_path / "plan.json").read_text())
    assert plan["device"] == "melbourne-15" and plan["sigma"] == 2
    assert main(["partition", "--config", str(cfg), "--sigma", "8", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "plan.json").read_text())["sigma"] == 8
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert main(["partition", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_simulate_metric_columns(tmp_path):
    assert run(tmp_path, "simulate", "--circuits", "adder", "bell", "--shots", "1024") == 0
    rows = list(csv.DictReader((tmp_path / "metrics.csv").open()))
    assert [(r["circuit"], r["metric"]) for r in rows] == [("adder", "pst"), ("bell", "jsd")]
    counts = json.loads((tmp_path / "counts.json").read_text())
    assert sum(counts[0]["counts"].values()) == 1024


def test_bench(tmp_path):
    assert run(tmp_path, "bench", "--copies", "1,6", "--thresholds", "0,none", "--shots", "512") == 0
    rows = list(csv.DictReader((tmp_path / "bench.csv").open()))
    by = {(r["threshold"], r["copies"]): r for r in rows}
    assert round(float(by[("none", "1")]["throughput"]), 3) == 0.077
    assert round(float(by[("none", "6")]["throughput"]), 3) == 0.462
    assert float(by[("0.0", "6")]["throughput"]) <= float(by[("none", "6")]["throughput"])


def test_bench_needs_single_outcome(tmp_path):
    assert run(tmp_path, "bench", "--circuits", "bell", "--copies", "1") == 1


def test_srb_cost(tmp_path):
    assert run(tmp_path, "srb-cost", "--device", "toronto-27", "--seeds", "5") == 0
    data = json.loads((tmp_path / "srb_cost.json").read_text())
    assert data["jobs"] == 3 * data["groups"] * 5 and data["pairs"] == 40


def test_zne_parallel_batch(tmp_path):
    assert run(tmp_path, "zne", "--circuits", "fredkin", "--shots", "1024") == 0
    report = json.loads((tmp_path / "zne.json").read_text())["reports"][0]
    assert len(report["points"]) == 4 and report["batches"] == 1


def test_vqe_counts(tmp_path):
    assert run(tmp_path, "vqe", "--n-thetas", "8", "--noiseless", "--shots", "512") == 0
    data = json.loads((tmp_path / "vqe.json").read_text())
    assert data["n_circuits"] == 16 and len(data["energies"]) == 8


def test_vqe_theta_list(tmp_path):
    assert run(tmp_path, "vqe", "--thetas", "0.1,0.2", "--shots", "256") == 0
    assert json.loads((tmp_path / "vqe.json").read_text())["n_circuits"] == 4


def test_console_script(tmp_path):
    out = subprocess.run([sys.executable, "-m", "qmpc.cli", "srb-cost", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "one-hop pairs" in out.stdout


@pytest.mark.parametrize("args", [
    ["partition", "--circuits", "adder", "fredkin"],
    ["simulate", "--circuits", "adder", "bell", "--shots", "512"],
    ["bench", "--copies", "1,2", "--thresholds", "0,none", "--shots", "256"],
    ["zne", "--circuits", "fredkin", "--shots", "256"],
    ["vqe", "--n-thetas", "4", "--shots", "256"],
    ["srb-cost"],
])
def test_byte_identical_reruns(tmp_path, args):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files and files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()
