"""1-NN scoring and the repeated benchmark harness."""

import json

import numpy as np
import pytest

from srp.datasets import gen_xor
from srp.evaluate import BenchReport, one_nn_accuracy, run_benchmark
from srp.exceptions import ContractViolation


def test_one_nn_two_clusters():
    rng = np.random.default_rng(0)
    Ztr = np.hstack([rng.normal(0, 0.1, (2, 10)), rng.normal(5, 0.1, (2, 10))])
    ytr = np.r_[np.zeros(10, int), np.ones(10, int)]
    Zte = np.hstack([rng.normal(0, 0.1, (2, 6)), rng.normal(5, 0.1, (2, 6))])
    yte = np.r_[np.zeros(6, int), np.ones(6, int)]
    assert one_nn_accuracy(Ztr, ytr, Zte, yte) == 1.0


def test_one_nn_tie_takes_lowest_index():
    # the test point is equidistant from both training points
    Ztr = np.array([[1.0, -1.0]])
    Zte = np.array([[0.0]])
    assert one_nn_accuracy(Ztr, [7, 9], Zte, [7]) == 1.0
    assert one_nn_accuracy(Ztr, [7, 9], Zte, [9]) == 0.0


def test_one_nn_rotation_and_scale_invariant():
    rng = np.random.default_rng(1)
    Ztr = rng.normal(size=(3, 40))
    ytr = rng.integers(0, 3, 40)
    Zte = rng.normal(size=(3, 15))
    yte = rng.integers(0, 3, 15)
    base = one_nn_accuracy(Ztr, ytr, Zte, yte)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert one_nn_accuracy(Q @ Ztr, ytr, Q @ Zte, yte) == base
    assert one_nn_accuracy(2.5 * Ztr, ytr, 2.5 * Zte, yte) == base


def test_one_nn_promotes_vectors():
    assert one_nn_accuracy([0.0, 1.0], [0, 1], [0.1], [0]) == 1.0


def test_one_nn_validation():
    with pytest.raises(ContractViolation):
        one_nn_accuracy(np.zeros((2, 0)), [], np.zeros((2, 1)), [0])
    with pytest.raises(ContractViolation):
        one_nn_accuracy(np.zeros((2, 3)), [0, 0, 0], np.zeros((3, 1)), [0])
    with pytest.raises(ContractViolation):
        one_nn_accuracy(np.zeros((2, 3)), [0, 0], np.zeros((2, 1)), [0])
    with pytest.raises(ContractViolation):
        one_nn_accuracy(np.zeros((2, 3)), [0, 0, 0], np.zeros((2, 0)), [])


def test_benchmark_row_and_aggregate_shapes():
    rep = run_benchmark(gen_xor(120, seed=7), ["spca", "srp"], [2], 5, 11)
    assert len(rep.rows) == 10
    assert all(not r.skipped for r in rep.rows)
    aggs = {a["method"]: a for a in rep.aggregates()}
    assert set(aggs) == {"spca", "srp"}
    for a in aggs.values():
        assert a["repeats"] == 5
        assert 0.0 <= a["mean_accuracy"] <= 1.0
        assert a["std_accuracy"] >= 0.0
        assert a["mean_fit_ns"] > 0.0


def test_projection_tracks_eigensolve_accuracy():
    rep = run_benchmark(gen_xor(500, seed=7), ["spca", "srp"], [2], 30, 11)
    aggs = {a["method"]: a for a in rep.aggregates()}
    gap = abs(aggs["srp"]["mean_accuracy"] - aggs["spca"]["mean_accuracy"])
    assert gap <= 0.1


def test_ksrp_fits_faster_than_kspca():
    rep = run_benchmark(gen_xor(600, seed=8), ["kspca", "ksrp"], [2], 3, 12,
                        sigma_x=0.5)
    aggs = {a["method"]: a for a in rep.aggregates()}
    assert aggs["ksrp"]["mean_fit_ns"] < aggs["kspca"]["mean_fit_ns"]


def test_benchmark_deterministic():
    ds = gen_xor(100, seed=3)
    a = run_benchmark(ds, ["spca", "ksrp"], [1, 2], 3, 21, sigma_x=0.5)
    b = run_benchmark(ds, ["spca", "ksrp"], [1, 2], 3, 21, sigma_x=0.5)
    assert [r.accuracy for r in a.rows] == [r.accuracy for r in b.rows]
    assert [r.seed for r in a.rows] == [r.seed for r in b.rows]


def test_benchmark_skips_infeasible_k():
    ds = gen_xor(60, noise_dims=0, seed=4)  # d = 2
    rep = run_benchmark(ds, ["spca"], [1, 3], 2, 5)
    skipped = [r for r in rep.rows if r.skipped]
    assert len(skipped) == 2
    assert all(r.k == 3 and "exceeds" in r.note for r in skipped)
    assert all(r.accuracy is None for r in skipped)
    aggs = {(a["method"], a["k"]): a for a in rep.aggregates()}
    assert aggs[("spca", 3)].get("skipped") is True
    assert "mean_accuracy" in aggs[("spca", 1)]


def test_benchmark_records_numerical_failures():
    # a flat kernel fails inside the fit; the harness turns that into a
    # skipped row instead of aborting the sweep
    rep = run_benchmark(gen_xor(60, seed=5), ["kspca"], [2], 2, 6,
                        sigma_x=1e6)
    assert all(r.skipped for r in rep.rows)
    assert all(r.note.startswith("numerical:") for r in rep.rows)


def test_sigma_modes_resolve():
    ds = gen_xor(80, seed=6)
    fixed = run_benchmark(ds, ["kspca"], [2], 1, 7, sigma_x=0.4)
    assert fixed.config["sigma_x_resolved"] == 0.4
    med = run_benchmark(ds, ["kspca"], [2], 1, 7, sigma_x="median")
    assert med.config["sigma_x"] == "median"
    assert med.config["sigma_x_resolved"] is None  # resolved per repeat
    assert not any(r.skipped for r in med.rows)
    cv = run_benchmark(ds, ["kspca"], [2], 1, 7, sigma_x="cv", cv_folds=4)
    assert cv.config["sigma_x_resolved"] > 0.0
    assert not any(r.skipped for r in cv.rows)


def test_parallel_matches_serial_and_flags_timing():
    ds = gen_xor(100, seed=9)
    ser = run_benchmark(ds, ["spca", "srp"], [2], 4, 13)
    par = run_benchmark(ds, ["spca", "srp"], [2], 4, 13, parallel=True)
    key = lambda r: (r.method, r.k, r.repeat)
    assert ({key(r): r.accuracy for r in ser.rows}
            == {key(r): r.accuracy for r in par.rows})
    assert all(not r.contended for r in ser.rows)
    assert all(r.contended for r in par.rows)
    assert par.config["parallel"] is True


def test_csv_text_round_trips():
    ds = gen_xor(60, noise_dims=0, seed=4)
    rep = run_benchmark(ds, ["spca"], [1, 3], 2, 5)
    text = rep.to_csv_text()
    lines = text.strip().split("\n")
    assert lines[0] == ("method,k,repeat,seed,accuracy,fit_ns,kernel_ns,"
                        "solve_ns,transform_ns,skipped,contended,note")
    assert len(lines) == 1 + len(rep.rows)
    cells = lines[1].split(",")
    assert float(cells[4]) == rep.rows[0].accuracy  # repr round-trip
    skipped_line = [l for l in lines[1:] if ",1," in l and "exceeds" in l][0]
    assert skipped_line.split(",")[4] == ""


def test_json_text_parses():
    rep = run_benchmark(gen_xor(60, seed=2), ["srp"], [2], 2, 3)
    doc = json.loads(rep.to_json_text())
    assert doc["config"]["n"] == 60
    assert doc["config"]["d"] == 10
    assert doc["config"]["methods"] == ["srp"]
    assert len(doc["aggregates"]) == 1
    assert doc["aggregates"][0]["repeats"] == 2


def test_benchmark_validation():
    ds = gen_xor(40, seed=0)
    with pytest.raises(ContractViolation):
        run_benchmark(ds, ["nope"], [2], 1, 0)
    with pytest.raises(ContractViolation):
        run_benchmark(ds, ["spca"], [], 1, 0)
    with pytest.raises(ContractViolation):
        run_benchmark(ds, ["spca"], [0], 1, 0)
    with pytest.raises(ContractViolation):
        run_benchmark(ds, ["spca"], [2], 0, 0)
    with pytest.raises(ContractViolation):
        run_benchmark(ds, ["kspca"], [2], 1, 0, sigma_x="bogus")
