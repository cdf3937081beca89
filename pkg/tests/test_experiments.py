import csv
import json

import numpy as np
import pytest

from iterdft import experiments as ex
from iterdft.engine import EngineConfig, run
from iterdft.signals import SpikeModel, gaussian_vector, spike_plus_noise
from iterdft.sparsify import SparsifierSpec


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_single_point_convergence():
    table = ex.convergence_vs_n([50], replicates=1, base_seed=3)
    (row,) = table.rows
    assert row["converged"] is True
    assert 2 <= row["iterations"] <= 50
    assert row["error"] == ""


def test_single_point_convergence_p():
    table = ex.convergence_vs_p([0.3], n=100, replicates=1, base_seed=3)
    (row,) = table.rows
    assert row["converged"] and row["p"] == 0.3 and row["n"] == 100


def test_row_reproducible_from_seed():
    table = ex.convergence_vs_n([64, 128], replicates=3, base_seed=11)
    row = table.rows[4]
    assert row["seed"] == ex.derive_seed(11, ex.Study.CONVERGENCE_VS_N.key, row["point"], row["replicate"])
    spec = SparsifierSpec.proportion(0.5)
    res = run(gaussian_vector(row["n"], 1.0, row["seed"]), EngineConfig(spec, spec))
    assert res.iterations_completed == row["iterations"]

    mtable = ex.mse_vs_cycles([6], replicates=2, base_seed=5)
    mrow = mtable.rows[1]
    x, s, _ = spike_plus_noise(SpikeModel(b=6), mrow["seed"])
    res = run(x, ex.MEAN_ENGINE)
    assert np.mean((res.output - s) ** 2) == mrow["mse_converged"]


def test_rows_sorted_and_complete():
    table = ex.convergence_vs_p([0.2, 0.6], n=64, replicates=4)
    keys = [(r["point"], r["replicate"]) for r in table.rows]
    assert keys == sorted(keys) and len(keys) == 8
    assert [s["replicates"] for s in table.summary] == [4, 4]


def test_failure_recorded_in_row():
    # floor(0.5 * 1) = 0 makes the sparsifier degenerate for n = 1
    table = ex.convergence_vs_n([1, 20], replicates=2)
    bad = [r for r in table.rows if r["n"] == 1]
    assert all("DegenerateSpecError" in r["error"] for r in bad)
    assert all(r["error"] == "" for r in table.rows if r["n"] == 20)
    assert table.summary[0]["failures"] == 2


def test_noiseless_ratio_zero():
    table = ex.mse_vs_cycles([4, 8], model=SpikeModel(sigma2=0.0), replicates=3)
    assert all(r["ratio"] == 0.0 for r in table.rows)


def test_iteration_curve_starts_at_one_and_decreases():
    table = ex.mse_vs_iteration(replicates=10, base_seed=2)
    _, curve = table.extra["curve"]
    assert curve[0]["mean_ratio"] == 1.0
    vals = [c["mean_ratio"] for c in curve]
    assert all(b <= a + 1e-6 for a, b in zip(vals, vals[1:]))
    assert all(c["runs"] == 10 for c in curve)


def test_iteration_curve_drop_mode():
    curves = [[1.0, 0.5], [2.0, 1.0, 0.5, 0.2]]
    carry = ex.iteration_curve(curves, carry_forward=True)
    drop = ex.iteration_curve(curves, carry_forward=False)
    assert [c["mean_ratio"] for c in carry] == [1.0, 0.5, 0.375, 0.3]
    assert [c["mean_ratio"] for c in drop] == [1.0, 0.5, 0.25, 0.1]
    assert [c["runs"] for c in drop] == [2, 2, 1, 1]


def test_noise_trend_small():
    table = ex.mse_vs_noise([0.25, 1.0, 2.0], replicates=10, base_seed=4)
    ratios = table.column("mean_ratio")
    assert ratios == sorted(ratios)


def test_write_and_determinism(tmp_path):
    a = ex.mse_vs_iteration(replicates=4, base_seed=9)
    b = ex.mse_vs_iteration(replicates=4, base_seed=9)
    pa = a.write(tmp_path / "a")
    pb = b.write(tmp_path / "b")
    assert [p.name for p in pa] == [
        "mse_vs_iteration_9.csv", "mse_vs_iteration_9_summary.csv",
        "mse_vs_iteration_9_trace.csv", "mse_vs_iteration_9_curve.csv", "mse_vs_iteration_9.svg",
    ]
    for x, y in zip(pa, pb):
        assert x.read_bytes() == y.read_bytes()


def test_serial_equals_parallel(tmp_path):
    serial = ex.convergence_vs_n([40, 80], replicates=6, base_seed=1, workers=1)
    parallel = ex.convergence_vs_n([40, 80], replicates=6, base_seed=1, workers=3)
    for x, y in zip(serial.write(tmp_path / "s"), parallel.write(tmp_path / "p")):
        assert x.read_bytes() == y.read_bytes()


def test_csv_format(tmp_path):
    table = ex.mse_vs_cycles([5], replicates=2, base_seed=3)
    (path, *_) = table.write(tmp_path)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    rows = _read(path)
    assert list(rows[0]) == ex._MSE_COLUMNS
    assert float(rows[0]["mse_converged"]) == table.rows[0]["mse_converged"]
    assert rows[0]["converged"] in ("true", "false")


def test_format_value():
    assert ex.format_value(0.1) == "0.10000000000000001"
    assert ex.format_value(float("inf")) == "inf"
    assert ex.format_value(True) == "true"
    assert ex.format_value(3) == "3"
    assert ex.format_value(None) == ""


def test_env_workers(monkeypatch):
    monkeypatch.setenv("ITERDFT_WORKERS", "2")
    assert ex.default_workers() == 2
    monkeypatch.setenv("ITERDFT_WORKERS", "x")
    with pytest.raises(ex.InvalidArgumentError):
        ex.default_workers()


def test_sweep_spec_validation():
    with pytest.raises(ex.InvalidArgumentError):
        ex.SweepSpec(ex.Study.CONVERGENCE_VS_N, (), 1)
    with pytest.raises(ex.InvalidArgumentError):
        ex.SweepSpec(ex.Study.CONVERGENCE_VS_N, ({"n": 5},), 0)
    with pytest.raises(ex.InvalidArgumentError):
        ex.SweepSpec(ex.Study.MSE_VS_CYCLES, ({"b": 5},), 1)
    with pytest.raises(ex.InvalidArgumentError):
        ex.SweepSpec(ex.Study.VECTOR_DEMO, ({},), 1)


def test_noiseless_vector_demo_exact():
    demo = ex.vector_demo(SpikeModel(sigma2=0.0), seed=1)
    assert demo.result.converged
    np.testing.assert_allclose(demo.result.output, demo.signal, atol=1e-9)
    assert demo.report.mse_converged < 1e-18


def test_vector_demo_bundle(tmp_path):
    demo = ex.vector_demo(SpikeModel(), seed=7)
    paths = demo.write(tmp_path)
    names = sorted(p.name for p in paths)
    assert names == ["vector_demo_7.csv", "vector_demo_7.json", "vector_demo_7.svg"]
    rows = _read(tmp_path / "vector_demo_7.csv")
    assert len(rows) == 128
    assert len(rows[0]) == 4 + demo.result.iterations_completed
    summary = json.loads((tmp_path / "vector_demo_7.json").read_text())
    assert summary["iterations"] == demo.result.iterations_completed
    assert (tmp_path / "vector_demo_7.svg").read_text().startswith("<svg")
    again = ex.vector_demo(SpikeModel(), seed=7).write(tmp_path / "again")
    for x, y in zip(sorted(paths), sorted(again)):
        assert x.read_bytes() == y.read_bytes()


def test_matrix_demo_bundle(tmp_path):
    model = SpikeModel(b=6, lam=4)
    demo = ex.matrix_demo(model, seed=2)
    demo.write(tmp_path)
    mdir = tmp_path / "matrix_demo_2"
    files = sorted(p.name for p in mdir.iterdir())
    assert {"signal.csv", "noise.csv", "input.csv", "h_01.csv"} <= set(files)
    assert len(files) == 3 + demo.result.iterations_completed
    assert np.loadtxt(mdir / "signal.csv", delimiter=",").shape == (24, 24)
    assert (tmp_path / "matrix_demo_2.svg").exists()
