import json
import pathlib

import numpy as np
import pytest

from dataview import cli, datasets, hillsynth, netcore, shadow_tree

PIMA_CSV = str(datasets.builtin_path("pima"))


def test_train_target_writes_model(tmp_path, capsys):
    out = tmp_path / "m.model"
    rc = cli.main([
        "train-target", "--data", "zoo", "--epochs", "30",
        "--seed", "1", "--out", str(out),
    ])
    assert rc == 0
    net = netcore.deserialize(out.read_text())
    assert net.layers[0].weights.shape[1] == 16
    assert "train accuracy" in capsys.readouterr().out


def test_synth_hill_round_trip(tmp_path, capsys):
    model = tmp_path / "m.model"
    synth = tmp_path / "s.csv"
    assert cli.main([
        "train-target", "--data", "pima", "--epochs", "60",
        "--seed", "0", "--out", str(model),
    ]) == 0
    assert cli.main([
        "synth", "--model", str(model), "--n-per-class", "30",
        "--domains-from", PIMA_CSV, "--label-column", "Outcome",
        "--seed", "0", "--out", str(synth),
    ]) == 0
    records, labels, confs = hillsynth.load_synth_csv(synth.read_text())
    assert records.shape[1] == 8
    assert len(labels) <= 60 and len(labels) > 0
    assert np.all(confs >= 0.7)


def test_fit_shadow_and_explain(tmp_path, capsys):
    model = tmp_path / "m.model"
    synth = tmp_path / "s.csv"
    shadow_dir = tmp_path / "shadow"
    for cmdline in (
        ["train-target", "--data", "pima", "--epochs", "60", "--seed", "0",
         "--out", str(model)],
        ["synth", "--model", str(model), "--n-per-class", "30",
         "--domains-from", PIMA_CSV, "--label-column", "Outcome",
         "--seed", "0", "--out", str(synth)],
        ["fit-shadow", "--kind", "tree", "--synth", str(synth),
         "--out-dir", str(shadow_dir)],
    ):
        assert cli.main(cmdline) == 0
    tree = shadow_tree.tree_from_json(
        json.loads((shadow_dir / "shadow_tree.json").read_text())
    )
    assert tree.feature_count == 8
    assert (shadow_dir / "rules.txt").read_text().startswith("IF")

    capsys.readouterr()
    assert cli.main(["explain", "--shadow", str(shadow_dir / "shadow_tree.json")]) == 0
    out = capsys.readouterr().out
    assert "THEN class=" in out and "importance" in out

    capsys.readouterr()
    assert cli.main([
        "evaluate", "--model", str(model), "--data", "pima",
        "--shadow", str(shadow_dir / "shadow_tree.json"),
    ]) == 0
    out = capsys.readouterr().out
    assert "fidelity" in out


def test_fit_shadow_fca(tmp_path):
    model = tmp_path / "m.model"
    synth = tmp_path / "s.csv"
    shadow_dir = tmp_path / "fca"
    assert cli.main(["train-target", "--data", "pima", "--epochs", "60",
                     "--seed", "0", "--out", str(model)]) == 0
    assert cli.main(["synth", "--model", str(model), "--n-per-class", "15",
                     "--domains-from", PIMA_CSV, "--label-column", "Outcome",
                     "--seed", "0", "--out", str(synth)]) == 0
    assert cli.main(["fit-shadow", "--kind", "fca", "--synth", str(synth),
                     "--out-dir", str(shadow_dir)]) == 0
    assert (shadow_dir / "context.cxt").read_text().startswith("B")
    assert "->" in (shadow_dir / "implications.txt").read_text()
    imp = (shadow_dir / "fca_importance.csv").read_text()
    assert imp.splitlines()[0] == "feature,class0,class1,avg"


def test_run_from_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "dataset": "pima", "n_per_class": 30, "target_epochs": 50,
        "output_dir": str(tmp_path / "out"),
    }))
    assert cli.main(["run", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "sshadow_fid" in out
    assert (tmp_path / "out" / "manifest.json").exists()


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"dataset": "pima", "synthesis": "nope"}')
    assert cli.main(["run", "--config", str(cfg)]) == 1
    assert "error:" in capsys.readouterr().err


def test_missing_oracle_args(capsys, tmp_path):
    assert cli.main(["synth", "--out", str(tmp_path / "s.csv")]) == 1
    assert "provide --model or --oracle" in capsys.readouterr().err


def test_experiment_command(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "variable": "num_classes", "values": [2, 3],
        "n_per_class": 30, "n_features": 10, "seed": 0,
    }))
    out = tmp_path / "sweep.csv"
    assert cli.main(["experiment", "--spec", str(spec), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "num_classes=2" in printed and "num_classes=3" in printed
    assert out.exists()
