import csv
import subprocess
import sys

import numpy as np
import pytest

from splicestat.cli import main, read_config_file, read_manifest, resolve_config
from splicestat.errors import InvalidInput
from splicestat.features import SCHEMA_VERSION, FeatureVector, write_feature_csv
from splicestat.imageio import write_pgm
from splicestat.synthetic import make_benchmark_dataset


@pytest.fixture(scope="module")
def image_dir(tmp_path_factory):
    """Six small synthetic images (3 authentic, 3 spliced) on disk."""
    root = tmp_path_factory.mktemp("images")
    samples = make_benchmark_dataset(3, 3, size=64, patch=24, seed=5)
    rows = []
    for i, (img, label, category) in enumerate(samples):
        path = root / f"img_{i}.pgm"
        write_pgm(path, img)
        rows.append((str(path), label, category))
    return root, rows


def write_manifest(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "label", "category"])
        writer.writerows(rows)


def synthetic_feature_csv(path, n=30, seed=0):
    """Feature CSV whose label is encoded in feature 0, for fast training."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        label = "spliced" if i % 2 else "authentic"
        sign = 1.0 if i % 2 else -1.0
        values = rng.normal(1.0, 0.1, 40)
        values[0] = sign * (1.0 + rng.random())
        fv = FeatureVector(SCHEMA_VERSION, values)
        rows.append((f"img_{i}.pgm", label, "uncategorized", fv))
    with open(path, "w", newline="") as fh:
        write_feature_csv(fh, rows)


class TestManifest:
    def test_round_trip(self, tmp_path, image_dir):
        _, rows = image_dir
        manifest = tmp_path / "m.csv"
        write_manifest(manifest, rows)
        parsed, errors = read_manifest(manifest)
        assert errors == []
        assert [r.path for r in parsed] == [r[0] for r in rows]

    def test_bad_header(self, tmp_path):
        manifest = tmp_path / "m.csv"
        manifest.write_text("file,tag\nx,y\n")
        with pytest.raises(InvalidInput):
            read_manifest(manifest)

    def test_empty_manifest(self, tmp_path):
        manifest = tmp_path / "m.csv"
        manifest.write_text("path,label,category\n")
        with pytest.raises(InvalidInput):
            read_manifest(manifest)

    def test_malformed_rows_are_collected(self, tmp_path):
        manifest = tmp_path / "m.csv"
        manifest.write_text(
            "path,label,category\n"
            "a.pgm,authentic,uncategorized\n"
            "b.pgm,sliced,uncategorized\n"     # bad label
            "c.pgm,spliced,who-knows\n"        # bad category
            "a.pgm,spliced,uncategorized\n"    # duplicate path
        )
        rows, errors = read_manifest(manifest)
        assert len(rows) == 1
        assert len(errors) == 3


class TestConfig:
    def test_config_file_parsing(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# pipeline\nblock_size = 8\nresize = 64x64\ngamma = auto\nC = 2.5\n"
        )
        values = read_config_file(cfg)
        assert values == {"block_size": 8, "resize": (64, 64), "gamma": None, "C": 2.5}

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("blocksize = 8\n")
        with pytest.raises(InvalidInput):
            read_config_file(cfg)

    def test_cli_flag_beats_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("k = 5\nseed = 3\n")
        args = main.__globals__["build_parser"]().parse_args(
            ["train", "--features", "f.csv", "--out", "m.json",
             "--config", str(cfg), "--k", "7"]
        )
        run = resolve_config(args)
        assert run.k == 7      # flag wins
        assert run.seed == 3   # file beats default


class TestExtract:
    def test_extract_writes_feature_rows(self, tmp_path, image_dir):
        _, rows = image_dir
        manifest = tmp_path / "m.csv"
        write_manifest(manifest, rows)
        out = tmp_path / "features.csv"
        code = main(["extract", "--manifest", str(manifest), "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == f"# schema_version={SCHEMA_VERSION}"
        assert len(lines) == 2 + len(rows)

    def test_missing_file_gives_partial_exit(self, tmp_path, image_dir, caplog):
        _, rows = image_dir
        manifest = tmp_path / "m.csv"
        write_manifest(manifest, rows[:2] + [("missing.pgm", "spliced", "uncategorized")])
        out = tmp_path / "features.csv"
        code = main(["extract", "--manifest", str(manifest), "--out", str(out)])
        assert code == 1
        assert len(out.read_text().splitlines()) == 2 + 2
        assert any("missing.pgm" in message for message in caplog.messages)

    def test_rerun_is_byte_identical(self, tmp_path, image_dir):
        _, rows = image_dir
        manifest = tmp_path / "m.csv"
        write_manifest(manifest, rows)
        out1, out2 = tmp_path / "f1.csv", tmp_path / "f2.csv"
        assert main(["extract", "--manifest", str(manifest), "--out", str(out1)]) == 0
        assert main(["extract", "--manifest", str(manifest), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_empty_manifest_is_usage_error(self, tmp_path):
        manifest = tmp_path / "m.csv"
        manifest.write_text("path,label,category\n")
        out = tmp_path / "f.csv"
        assert main(["extract", "--manifest", str(manifest), "--out", str(out)]) == 2


class TestTrainPredictEvaluate:
    def test_full_cycle(self, tmp_path, image_dir, capsys):
        _, rows = image_dir
        manifest = tmp_path / "m.csv"
        write_manifest(manifest, rows)
        features = tmp_path / "features.csv"
        model = tmp_path / "model.json"
        predictions = tmp_path / "pred.csv"
        report = tmp_path / "report.csv"

        assert main(["extract", "--manifest", str(manifest), "--out", str(features)]) == 0
        assert main([
            "train", "--features", str(features), "--out", str(model),
            "--kernel", "linear", "--C", "10",
        ]) == 0
        summary = capsys.readouterr().out
        assert "support vectors" in summary

        assert main([
            "predict", "--model", str(model), "--manifest", str(manifest),
            "--out", str(predictions),
        ]) == 0
        lines = predictions.read_text().splitlines()
        assert lines[0] == "path,true_label,predicted_label,decision_value,category"
        assert len(lines) == 1 + len(rows)

        assert main([
            "evaluate", "--predictions", str(predictions),
            "--manifest", str(manifest), "--out", str(report),
        ]) == 0
        table = capsys.readouterr().out
        assert "Content Category" in table and "Average" in table and "Total" in table
        assert report.exists()

    def test_single_image_predict(self, tmp_path, image_dir, capsys):
        _, rows = image_dir
        manifest = tmp_path / "m.csv"
        write_manifest(manifest, rows)
        features = tmp_path / "features.csv"
        model = tmp_path / "model.json"
        main(["extract", "--manifest", str(manifest), "--out", str(features)])
        main(["train", "--features", str(features), "--out", str(model),
              "--kernel", "linear"])
        capsys.readouterr()
        code = main(["predict", "--model", str(model), "--image", rows[0][0]])
        assert code == 0
        line = capsys.readouterr().out.strip()
        assert line.startswith(("authentic", "spliced"))
        assert "decision value" in line

    def test_predict_needs_exactly_one_input(self, tmp_path):
        assert main(["predict", "--model", "m.json"]) == 2

    def test_train_single_class_is_usage_error(self, tmp_path):
        features = tmp_path / "features.csv"
        rng = np.random.default_rng(1)
        rows = [
            (f"i{i}.pgm", "authentic", "uncategorized",
             FeatureVector(SCHEMA_VERSION, rng.normal(0, 1, 40)))
            for i in range(6)
        ]
        with open(features, "w", newline="") as fh:
            write_feature_csv(fh, rows)
        assert main(["train", "--features", str(features), "--out",
                     str(tmp_path / "m.json")]) == 2

    def test_train_rejects_wrong_schema(self, tmp_path):
        features = tmp_path / "features.csv"
        features.write_text("# schema_version=0\npath,label,category\n")
        assert main(["train", "--features", str(features), "--out",
                     str(tmp_path / "m.json")]) == 2

    def test_tune_selects_parameters_by_cv(self, tmp_path, caplog):
        caplog.set_level("INFO", logger="splicestat")
        features = tmp_path / "features.csv"
        synthetic_feature_csv(features, n=30, seed=6)
        model = tmp_path / "model.json"
        code = main(["train", "--features", str(features), "--out", str(model),
                     "--kernel", "linear", "--tune", "--k", "3"])
        assert code == 0
        assert model.exists()
        assert any("cv selected" in message for message in caplog.messages)

    def test_numeric_failure_exits_3(self, tmp_path):
        # a constant image has zero DC variance: extraction cannot fit it
        from splicestat.image_pipeline import GrayImage

        flat = tmp_path / "flat.pgm"
        write_pgm(flat, GrayImage(np.full((64, 64), 128.0)))
        model = tmp_path / "model.json"
        features = tmp_path / "features.csv"
        synthetic_feature_csv(features, n=10, seed=7)
        assert main(["train", "--features", str(features), "--out", str(model),
                     "--kernel", "linear"]) == 0
        assert main(["predict", "--model", str(model), "--image", str(flat)]) == 3

    def test_resize_flag_changes_extraction(self, tmp_path, image_dir):
        _, rows = image_dir
        manifest = tmp_path / "m.csv"
        write_manifest(manifest, rows[:2])
        plain, resized = tmp_path / "plain.csv", tmp_path / "resized.csv"
        assert main(["extract", "--manifest", str(manifest), "--out", str(plain)]) == 0
        assert main(["extract", "--manifest", str(manifest), "--out", str(resized),
                     "--resize", "96x96"]) == 0
        assert plain.read_bytes() != resized.read_bytes()

    def test_evaluate_rejects_unjoined_prediction(self, tmp_path, image_dir):
        _, rows = image_dir
        manifest = tmp_path / "m.csv"
        write_manifest(manifest, rows)
        predictions = tmp_path / "pred.csv"
        predictions.write_text(
            "path,true_label,predicted_label,decision_value,category\n"
            "ghost.pgm,spliced,spliced,1.0,uncategorized\n"
        )
        assert main(["evaluate", "--predictions", str(predictions),
                     "--manifest", str(manifest)]) == 2


class TestCv:
    def test_cv_writes_text_and_csv(self, tmp_path, capsys):
        features = tmp_path / "features.csv"
        synthetic_feature_csv(features, n=24, seed=2)
        out = tmp_path / "report"
        code = main(["cv", "--features", str(features), "--k", "3", "--seed", "0"
                     , "--out", str(out)])
        assert code == 0
        text = (tmp_path / "report.txt").read_text()
        assert len(text.splitlines()) == 5  # header + 4 kernel rows
        with open(tmp_path / "report.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 5
        assert rows[0][0] == "kernel"
        printed = capsys.readouterr().out
        assert "kernel" in printed

    def test_cv_deterministic(self, tmp_path):
        features = tmp_path / "features.csv"
        synthetic_feature_csv(features, n=24, seed=3)
        a, b = tmp_path / "ra", tmp_path / "rb"
        assert main(["cv", "--features", str(features), "--k", "3", "--out", str(a)]) == 0
        assert main(["cv", "--features", str(features), "--k", "3", "--out", str(b)]) == 0
        assert (tmp_path / "ra.csv").read_bytes() == (tmp_path / "rb.csv").read_bytes()


def test_console_entry_point_runs():
    result = subprocess.run(
        [sys.executable, "-m", "splicestat.cli", "--help"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "extract" in result.stdout
