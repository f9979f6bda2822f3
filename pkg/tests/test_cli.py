import json

import numpy as np
import pytest

from sdfclass.cli import main
from sdfclass.dataset import load_csv


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_gen_estimate_pipeline(work):
    assert main(["gen", "--kind", "uniform", "--m", "100", "--seed", "7", "--out", "d.csv"]) == 0
    assert main(["estimate", "--data", "d.csv", "--out", "e.csv"]) == 0
    rows = (work / "e.csv").read_text().splitlines()
    assert rows[0] == "x0,x1,label,b,opposite_index"
    assert len(rows) == 101
    for row in rows[1:]:
        f = row.split(",")
        assert np.sign(float(f[3])) == int(f[2])


def test_train_predict_kernel(work, capsys):
    main(["gen", "--kind", "uniform", "--m", "100", "--seed", "7", "--out", "d.csv"])
    assert main(["train", "--model", "kernel", "--data", "d.csv", "--sigma-rule", "mean", "--gamma", "1e-7",
                 "--out", "m.json"]) == 0
    assert json.loads((work / "m.json").read_text())["type"] == "kernel"
    assert main(["predict", "--model", "m.json", "--data", "d.csv", "--out", "p.csv"]) == 0
    pred = np.loadtxt(work / "p.csv", delimiter=",", skiprows=1)
    labels = load_csv("d.csv", "label", "1").labels
    assert np.all(pred[:, 1] == labels)
    assert "accuracy 1.000000" in capsys.readouterr().err


def test_train_linear_normalized(work):
    main(["gen", "--kind", "normal", "--m", "200", "--seed", "1", "--out", "d.csv"])
    assert main(["train", "--model", "linear", "--iterations", "5", "--normalize", "--data", "d.csv",
                 "--out", "m.json"]) == 0
    d = json.loads((work / "m.json").read_text())
    assert d["normalized"] and abs(np.linalg.norm(d["w"]) - 1) < 1e-12 and d["dim"] == 2


def test_predict_dimension_mismatch(work, capsys):
    main(["gen", "--kind", "uniform", "--m", "20", "--seed", "7", "--out", "d.csv"])
    main(["train", "--model", "linear", "--data", "d.csv", "--out", "m.json"])
    main(["gen", "--kind", "planted", "--m", "10", "--n", "3", "--informative", "1", "--seed", "1",
          "--out", "d3.csv"])
    assert main(["predict", "--model", "m.json", "--data", "d3.csv", "--out", "p.csv"]) == 2
    assert "dimension mismatch" in capsys.readouterr().err
    assert not (work / "p.csv").exists()


@pytest.mark.parametrize("argv", [
    ["gen", "--kind", "uniform", "--m", "10", "--out", "x.csv"],                 # missing --seed
    ["train", "--model", "kernel", "--data", "d.csv", "--out", "m.json"],        # no sigma
    ["train", "--model", "kernel", "--data", "d.csv", "--sigma", "-1", "--out", "m.json"],
    ["cv", "--data", "d.csv", "--sigma-grid", "1,2", "--out", "c.csv"],         # missing --seed
    ["bench-linear", "--trials", "2"],
    ["nosuch"],
    ["estimate", "--data", "d.csv", "--stage", "bogus", "--out", "e.csv"],
])
def test_usage_errors(work, capsys, argv):
    assert main(argv) == 1
    assert "usage error" in capsys.readouterr().err
    assert sorted(p.name for p in work.iterdir()) == []


def test_data_error_exit_code(work):
    (work / "bad.csv").write_text("x,label\n1,a\n2,b\n3,c\n")
    assert main(["estimate", "--data", "bad.csv", "--positive-label", "a", "--out", "e.csv"]) == 2
    assert not (work / "e.csv").exists()


def test_cv_and_loocv(work, capsys):
    main(["gen", "--kind", "uniform", "--m", "60", "--seed", "2", "--out", "d.csv"])
    assert main(["cv", "--data", "d.csv", "--sigma-grid", "0.5,1,2", "--gamma-grid", "1e-3,1e-7",
                 "--folds", "4", "--seed", "3", "--out", "cv.csv"]) == 0
    assert len((work / "cv.csv").read_text().splitlines()) == 4
    capsys.readouterr()
    assert main(["loocv", "--data", "d.csv", "--sigma-rule", "mean", "--metric", "correlation-weighted",
                 "--out", "l.json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["accuracy"] == json.loads((work / "l.json").read_text())["accuracy"] > 0.8


def test_config_overlay(work):
    (work / "cfg.json").write_text(json.dumps({"kind": "normal", "m": 30, "seed": 4}))
    assert main(["--config", "cfg.json", "gen", "--out", "a.csv"]) == 0
    assert main(["gen", "--kind", "normal", "--m", "30", "--seed", "4", "--out", "b.csv"]) == 0
    assert (work / "a.csv").read_bytes() == (work / "b.csv").read_bytes()
    # flags win over the file
    assert main(["--config", "cfg.json", "gen", "--seed", "5", "--out", "c.csv"]) == 0
    assert (work / "c.csv").read_bytes() != (work / "a.csv").read_bytes()
    (work / "bad.json").write_text(json.dumps({"kind": "normal", "colour": "red"}))
    assert main(["--config", "bad.json", "gen", "--out", "d.csv"]) == 1


def test_bench_outputs_reproducible(work):
    argv = ["bench-linear", "--kind", "uniform", "--m-values", "10,30", "--trials", "3", "--test-size", "200",
            "--seed", "1", "--out", "r.json", "--figure-csv", "fig.csv"]
    assert main(argv) == 0
    first = [(work / n).read_bytes() for n in ("r.json", "r.csv", "fig.csv")]
    assert main(argv) == 0
    assert first == [(work / n).read_bytes() for n in ("r.json", "r.csv", "fig.csv")]
    reports = json.loads(first[0])
    assert [r["config_echo"]["iterations"] for r in reports] == [0, 0, 5, 5]


def test_bench_checkerboard_cli(work):
    assert main(["bench-checkerboard", "--train-m", "150", "--resolution", "20", "--trials", "2", "--folds", "3",
                 "--seed", "0", "--out", "cb.json"]) == 0
    rep = json.loads((work / "cb.json").read_text())[0]
    assert len(rep["per_trial_accuracy"]) == 2
