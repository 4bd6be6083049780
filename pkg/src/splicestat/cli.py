"""Batch command-line frontend.

    splicestat extract  --manifest m.csv --out features.csv
    splicestat train    --features features.csv --out model.json
    splicestat predict  --model model.json (--manifest m.csv --out pred.csv | --image img.pgm)
    splicestat cv       --features features.csv --out report
    splicestat evaluate --predictions pred.csv --manifest m.csv [--out report.csv]

Datasets are described by a manifest CSV with header ``path,label,category``;
labels are authentic/spliced and categories one of the five content
categories or "uncategorized". Logs go to stderr, data to files/stdout.
Exit codes: 0 ok, 1 partial per-row failure, 2 invalid invocation or
config, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DegenerateDistribution,
    InsufficientData,
    InvalidInput,
    SchemaError,
    SpliceStatError,
)
from .evaluation import (
    CATEGORIES,
    UNCATEGORIZED,
    category_report,
    compare_kernels,
    cross_validate,
)
from .features import (
    SCHEMA_VERSION,
    ExtractionConfig,
    extract_features,
    label_to_sign,
    read_feature_csv,
    sign_to_label,
    write_feature_csv,
)
from .image_pipeline import PreprocessConfig
from .imageio import read_image
from .svm import KernelSpec, load_model, predict, save_model, train_smo

log = logging.getLogger("splicestat")

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

MANIFEST_HEADER = ["path", "label", "category"]
PREDICTIONS_HEADER = ["path", "true_label", "predicted_label", "decision_value", "category"]

_ALLOWED_CATEGORIES = set(CATEGORIES) | {UNCATEGORIZED}


@dataclass(frozen=True)
class ManifestRow:
    path: str
    label: str
    category: str


@dataclass(frozen=True)
class RunConfig:
    """Resolved pipeline knobs; CLI flags beat config-file keys beat defaults."""

    block_size: int = 8
    dwt_levels: int = 3
    resize: tuple[int, int] | None = None
    median_radius: int | None = None
    gaussian_sigma: float | None = None
    kernel: str = "rbf"
    C: float = 1.0
    gamma: float | None = None  # None = auto
    degree: int = 3
    coef0: float = 0.0
    k: int = 10
    seed: int = 0

    def extraction_config(self) -> ExtractionConfig:
        return ExtractionConfig(
            preprocess=PreprocessConfig(
                resize_to=self.resize,
                median_radius=self.median_radius,
                gaussian_sigma=self.gaussian_sigma,
            ),
            block_size=self.block_size,
            dwt_levels=self.dwt_levels,
        )

    def kernel_spec(self) -> KernelSpec:
        kind = self.kernel
        return KernelSpec(
            kind=kind,
            gamma=self.gamma if kind != "linear" else None,
            degree=self.degree if kind == "polynomial" else None,
            coef0=self.coef0 if kind in ("polynomial", "sigmoid") else None,
        )


def _parse_resize(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise InvalidInput(f"resize must look like 512x512, got {text!r}") from None


def _parse_gamma(text: str) -> float | None:
    if text == "auto":
        return None
    try:
        return float(text)
    except ValueError:
        raise InvalidInput(f"gamma must be a number or 'auto', got {text!r}") from None


_CONFIG_PARSERS = {
    "block_size": int,
    "dwt_levels": int,
    "resize": _parse_resize,
    "median_radius": int,
    "gaussian_sigma": float,
    "kernel": str,
    "C": float,
    "gamma": _parse_gamma,
    "degree": int,
    "coef0": float,
    "k": int,
    "seed": int,
}


def read_config_file(path) -> dict:
    """Parse a key=value config file; '#' starts a comment."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInput(f"{path}:{lineno}: expected key = value")
            key, _, value = (part.strip() for part in line.partition("="))
            if key not in _CONFIG_PARSERS:
                raise InvalidInput(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_PARSERS[key](value)
            except ValueError:
                raise InvalidInput(
                    f"{path}:{lineno}: bad value {value!r} for {key}"
                ) from None
    return values


def resolve_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in _CONFIG_PARSERS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if isinstance(values.get("resize"), str):
        values["resize"] = _parse_resize(values["resize"])
    if isinstance(values.get("gamma"), str):
        values["gamma"] = _parse_gamma(values["gamma"])
    return RunConfig(**values)


def read_manifest(path, strict: bool = False):
    """Parse a manifest CSV.

    Returns (rows, errors); each error is "line N: message". With
    strict=True the first malformed row raises InvalidInput instead.
    A manifest without any data line is InvalidInput always.
    """
    rows, errors, seen = [], [], set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise InvalidInput(
                f"manifest header must be {','.join(MANIFEST_HEADER)!r}"
            )
        any_line = False
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            any_line = True
            problem = None
            if len(row) != 3:
                problem = f"expected 3 fields, got {len(row)}"
            else:
                p, label, category = (f.strip() for f in row)
                if label not in ("authentic", "spliced"):
                    problem = f"unknown label {label!r}"
                elif category not in _ALLOWED_CATEGORIES:
                    problem = f"unknown category {category!r}"
                elif p in seen:
                    problem = f"duplicate path {p!r}"
            if problem:
                if strict:
                    raise InvalidInput(f"{path}: line {lineno}: {problem}")
                errors.append(f"line {lineno}: {problem}")
                continue
            seen.add(p)
            rows.append(ManifestRow(path=p, label=label, category=category))
    if not any_line:
        raise InvalidInput(f"manifest {path} has no data rows")
    return rows, errors


def cmd_extract(args) -> int:
    cfg = resolve_config(args)
    extraction = cfg.extraction_config()
    rows, errors = read_manifest(args.manifest)
    for message in errors:
        log.error("manifest %s: %s", args.manifest, message)
    out_rows = []
    failures = len(errors)
    for row in rows:
        try:
            fv = extract_features(read_image(row.path), extraction)
        except (SpliceStatError, OSError) as exc:
            log.error("%s: %s", row.path, exc)
            failures += 1
            continue
        out_rows.append((row.path, row.label, row.category, fv))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        write_feature_csv(fh, out_rows)
    log.info(
        "extracted %d of %d manifest rows -> %s (%d failed)",
        len(out_rows), len(rows) + len(errors), args.out, failures,
    )
    return EXIT_PARTIAL if failures else EXIT_OK


def _load_training_data(features_path):
    with open(features_path, "r", encoding="utf-8", newline="") as fh:
        paths, labels, categories, matrix = read_feature_csv(fh)
    y = np.array([label_to_sign(lb) for lb in labels], dtype=np.float64)
    return paths, y, categories, matrix


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    _, y, _, x = _load_training_data(args.features)
    if len(np.unique(y)) < 2:
        raise InvalidInput("training data must contain both labels")
    c, kernel = cfg.C, cfg.kernel_spec()
    if args.tune:
        result = cross_validate(x, y, cfg.kernel, k=cfg.k, seed=cfg.seed)
        params = result.best_params
        log.info(
            "cv selected %s (mean accuracy %.4f)", params, result.mean_accuracy
        )
        c = params["C"]
        kernel = KernelSpec(
            kind=cfg.kernel,
            gamma=params.get("gamma"),
            degree=params.get("degree"),
            coef0=params.get("coef0"),
        )
    model = train_smo(
        x, y, kernel, C=c, seed=cfg.seed, schema_version=SCHEMA_VERSION
    )
    save_model(model, args.out)
    print(
        f"trained {kernel.kind} SVM on {len(y)} samples: "
        f"{len(model.dual_coefs)} support vectors, C={c}, bias={model.bias:.6g}"
    )
    log.info("model written to %s", args.out)
    return EXIT_OK


def _check_model_schema(model):
    if model.schema_version != SCHEMA_VERSION:
        raise SchemaError(
            f"model schema {model.schema_version!r} does not match "
            f"feature schema {SCHEMA_VERSION!r}"
        )


def cmd_predict(args) -> int:
    cfg = resolve_config(args)
    extraction = cfg.extraction_config()
    model, _ = load_model(args.model)
    _check_model_schema(model)
    if args.image:
        fv = extract_features(read_image(args.image), extraction)
        label, value = predict(model, fv.values)
        print(f"{sign_to_label(label)} (decision value {value!r})")
        return EXIT_OK
    rows, errors = read_manifest(args.manifest)
    for message in errors:
        log.error("manifest %s: %s", args.manifest, message)
    failures = len(errors)
    out_rows = []
    for row in rows:
        try:
            fv = extract_features(read_image(row.path), extraction)
        except (SpliceStatError, OSError) as exc:
            log.error("%s: %s", row.path, exc)
            failures += 1
            continue
        label, value = predict(model, fv.values)
        out_rows.append(
            [row.path, row.label, sign_to_label(label), repr(value), row.category]
        )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREDICTIONS_HEADER)
        writer.writerows(out_rows)
    log.info("wrote %d predictions to %s (%d failed)", len(out_rows), args.out, failures)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_cv(args) -> int:
    cfg = resolve_config(args)
    _, y, _, x = _load_training_data(args.features)
    comparison = compare_kernels(x, y, k=cfg.k, seed=cfg.seed)
    text = comparison.to_text()
    print(text)
    with open(f"{args.out}.txt", "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    with open(f"{args.out}.csv", "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(comparison.to_csv_rows())
    log.info("reports written to %s.txt and %s.csv", args.out, args.out)
    return EXIT_OK


def read_predictions(path):
    """Read a predictions CSV into a list of row dicts."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PREDICTIONS_HEADER:
            raise SchemaError(
                f"predictions header must be {','.join(PREDICTIONS_HEADER)!r}"
            )
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(PREDICTIONS_HEADER):
                raise SchemaError(f"bad predictions row: {row!r}")
            rows.append(dict(zip(PREDICTIONS_HEADER, row)))
    return rows


def cmd_evaluate(args) -> int:
    predictions = read_predictions(args.predictions)
    manifest_rows, _ = read_manifest(args.manifest, strict=True)
    by_path = {row.path: row for row in manifest_rows}
    true_signs, predicted_signs, categories = [], [], []
    for row in predictions:
        entry = by_path.get(row["path"])
        if entry is None:
            raise InvalidInput(
                f"prediction row {row['path']!r} has no manifest entry"
            )
        if entry.label != row["true_label"]:
            raise InvalidInput(
                f"{row['path']!r}: manifest label {entry.label!r} != "
                f"prediction true_label {row['true_label']!r}"
            )
        true_signs.append(label_to_sign(entry.label))
        predicted_signs.append(label_to_sign(row["predicted_label"]))
        categories.append(entry.category)
    if not predictions:
        raise InvalidInput("predictions file has no rows")
    report = category_report(true_signs, predicted_signs, categories)
    print(report.to_text())
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(report.to_csv_rows())
        log.info("report written to %s", args.out)
    return EXIT_OK


def _add_pipeline_flags(p):
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--block-size", dest="block_size", type=int)
    p.add_argument("--dwt-levels", dest="dwt_levels", type=int)
    p.add_argument("--resize", help="target size WxH, e.g. 512x512")
    p.add_argument("--median-radius", dest="median_radius", type=int)
    p.add_argument("--gaussian-sigma", dest="gaussian_sigma", type=float)


def _add_model_flags(p):
    p.add_argument("--kernel", choices=("linear", "polynomial", "rbf", "sigmoid"))
    p.add_argument("--C", dest="C", type=float)
    p.add_argument("--gamma", help="positive number or 'auto'")
    p.add_argument("--degree", type=int)
    p.add_argument("--coef0", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splicestat",
        description="Spliced-image detection from DCT/DWT statistics and an SVM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract feature vectors for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train an SVM from a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tune", action="store_true",
                   help="pick C/gamma/degree/coef0 by cross-validation first")
    p.add_argument("--config", help="key=value config file")
    _add_model_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify a manifest or a single image")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest")
    p.add_argument("--image")
    p.add_argument("--out")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("cv", help="compare the four kernels by cross-validation")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="key=value config file")
    _add_model_flags(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("evaluate", help="per-category report from predictions")
    p.add_argument("--predictions", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    if args.command == "predict" and bool(args.manifest) == bool(args.image):
        log.error("predict needs exactly one of --manifest or --image")
        return EXIT_USAGE
    if args.command == "predict" and args.manifest and not args.out:
        log.error("predict --manifest needs --out for the predictions CSV")
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ConvergenceFailure, DegenerateDistribution) as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except (InvalidInput, SchemaError, InsufficientData) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
