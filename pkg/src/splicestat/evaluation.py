"""Classifier evaluation: metrics, stratified k-fold CV, grid search,
kernel comparison, and the per-category report table.

The positive class throughout is "spliced" (+1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, InvalidInput
from .svm import KernelSpec, predict_batch, train_smo

CATEGORIES = (
    "uniform-texture",
    "uniform-smooth",
    "texture-texture",
    "smooth-smooth",
    "texture-smooth",
)
UNCATEGORIZED = "uncategorized"

CATEGORY_DISPLAY = {
    "uniform-texture": "Uniform Texture",
    "uniform-smooth": "Uniform Smooth",
    "texture-texture": "Texture-to-Texture",
    "smooth-smooth": "Smooth-to-Smooth",
    "texture-smooth": "Texture-to-Smooth",
}

DEFAULT_C_GRID = (0.1, 1.0, 10.0, 100.0)
DEFAULT_GAMMA_GRID = (None, 0.01, 0.1, 1.0)  # None = auto (1 / n_features)
DEFAULT_DEGREE_GRID = (2, 3)
DEFAULT_COEF0_GRID = (0.0, 1.0)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp,
            self.fp + other.fp,
            self.tn + other.tn,
            self.fn + other.fn,
        )


def confusion_counts(true_labels, predicted_labels) -> ConfusionCounts:
    """Tally a confusion matrix from +/-1 label arrays."""
    t = np.asarray(true_labels)
    p = np.asarray(predicted_labels)
    if t.shape != p.shape:
        raise InvalidInput("label arrays disagree in length")
    return ConfusionCounts(
        tp=int(np.sum((t == 1) & (p == 1))),
        fp=int(np.sum((t == -1) & (p == 1))),
        tn=int(np.sum((t == -1) & (p == -1))),
        fn=int(np.sum((t == 1) & (p == -1))),
    )


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    recall: float
    precision: float
    f1: float
    # names of metrics whose denominator was zero (value forced to 0)
    zero_division_flags: tuple[str, ...] = ()


def compute_metrics(c: ConfusionCounts) -> Metrics:
    """Accuracy, recall, precision, and F1 from confusion counts.

    Zero-denominator metrics are reported as 0 and flagged instead of
    producing NaN.
    """
    if c.total == 0:
        raise InvalidInput("no samples to evaluate")
    flags = []
    accuracy = (c.tp + c.tn) / c.total
    recall = precision = f1 = 0.0
    if c.tp + c.fn > 0:
        recall = c.tp / (c.tp + c.fn)
    else:
        flags.append("recall")
    if c.tp + c.fp > 0:
        precision = c.tp / (c.tp + c.fp)
    else:
        flags.append("precision")
    if precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        flags.append("f1")
    return Metrics(accuracy, recall, precision, f1, tuple(flags))


@dataclass(frozen=True)
class FoldPlan:
    """A stratified assignment of samples to folds."""

    k: int
    assignments: np.ndarray
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def make_folds(labels, k: int, seed: int) -> FoldPlan:
    """Stratified fold assignment, deterministic for a given seed.

    Samples are stable-sorted by label, shuffled within each class with
    a seeded generator, and dealt cyclically to folds. Fold sizes differ
    by at most 1 overall and by at most 1 within each class, and the
    assignment depends only on the within-class sample order, not on how
    classes are interleaved in the input.
    """
    y = np.asarray(labels)
    if k < 2:
        raise InvalidInput("k must be >= 2")
    classes, counts = np.unique(y, return_counts=True)
    if counts.min() < k:
        raise InvalidInput(
            f"every class needs >= k={k} members; smallest has {counts.min()}"
        )
    rng = np.random.default_rng(seed)
    assignments = np.empty(len(y), dtype=np.int64)
    position = 0
    for cls in classes:  # np.unique returns sorted classes
        idx = np.flatnonzero(y == cls)  # original order within the class
        idx = idx[rng.permutation(len(idx))]
        for i in idx:
            assignments[i] = position % k
            position += 1
    return FoldPlan(k=k, assignments=assignments, seed=seed)


@dataclass(frozen=True)
class GridPointResult:
    params: dict
    fold_metrics: tuple[Metrics, ...]
    mean_accuracy: float
    std_accuracy: float
    pooled: ConfusionCounts
    error: str | None = None


@dataclass(frozen=True)
class CvResult:
    kernel_kind: str
    best_params: dict
    best: GridPointResult
    grid: tuple[GridPointResult, ...]
    k: int
    seed: int

    @property
    def mean_accuracy(self) -> float:
        return self.best.mean_accuracy

    @property
    def std_accuracy(self) -> float:
        return self.best.std_accuracy


def _grid_points(kernel_kind, c_grid, gamma_grid, degree_grid, coef0_grid):
    gammas = gamma_grid if kernel_kind != "linear" else (None,)
    degrees = degree_grid if kernel_kind == "polynomial" else (None,)
    coef0s = coef0_grid if kernel_kind in ("polynomial", "sigmoid") else (None,)
    for c, g, d, c0 in itertools.product(c_grid, gammas, degrees, coef0s):
        params = {"C": c}
        if kernel_kind != "linear":
            params["gamma"] = g
        if d is not None:
            params["degree"] = d
        if c0 is not None:
            params["coef0"] = c0
        yield params


def _kernel_from_params(kernel_kind: str, params: dict) -> KernelSpec:
    return KernelSpec(
        kind=kernel_kind,
        gamma=params.get("gamma"),
        degree=params.get("degree"),
        coef0=params.get("coef0"),
    )


def cross_validate(
    features,
    labels,
    kernel_kind: str,
    c_grid=DEFAULT_C_GRID,
    gamma_grid=DEFAULT_GAMMA_GRID,
    degree_grid=DEFAULT_DEGREE_GRID,
    coef0_grid=DEFAULT_COEF0_GRID,
    k: int = 10,
    seed: int = 0,
    tol: float = 1e-3,
    max_passes: int = 10_000,
) -> CvResult:
    """Stratified k-fold grid search for one kernel kind.

    Every grid point is trained on k-1 folds and scored on the held-out
    fold; standardization statistics are fitted inside train_smo on each
    training split, so test folds never leak into them. The winner has
    the highest mean fold accuracy; ties go to smaller C, then smaller
    gamma, then smaller degree and coef0. A grid point is disqualified
    if training fails on any fold; its error is recorded.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64).ravel()
    plan = make_folds(y, k, seed)
    results = []
    for params in _grid_points(kernel_kind, c_grid, gamma_grid, degree_grid, coef0_grid):
        kernel = _kernel_from_params(kernel_kind, params)
        fold_metrics = []
        pooled = ConfusionCounts()
        error = None
        for fold in range(k):
            train_idx = plan.train_indices(fold)
            test_idx = plan.test_indices(fold)
            try:
                model = train_smo(
                    x[train_idx], y[train_idx], kernel, C=params["C"],
                    tol=tol, max_passes=max_passes, seed=seed,
                )
            except ConvergenceFailure as exc:
                error = f"fold {fold}: {exc}"
                break
            predicted, _ = predict_batch(model, x[test_idx])
            counts = confusion_counts(y[test_idx], predicted)
            pooled = pooled + counts
            fold_metrics.append(compute_metrics(counts))
        if error is not None:
            results.append(
                GridPointResult(params, (), float("nan"), float("nan"),
                                ConfusionCounts(), error)
            )
            continue
        accs = np.array([m.accuracy for m in fold_metrics])
        results.append(
            GridPointResult(
                params, tuple(fold_metrics),
                float(accs.mean()), float(accs.std()), pooled,
            )
        )
    candidates = [r for r in results if r.error is None]
    if not candidates:
        raise ConvergenceFailure(
            "every grid point failed; first error: " + (results[0].error or "?")
        )
    n_features = x.shape[1]

    def tie_key(r: GridPointResult):
        p = r.params
        gamma = p.get("gamma")
        gamma = 1.0 / n_features if gamma is None else gamma
        return (-r.mean_accuracy, p["C"], gamma, p.get("degree", 0), p.get("coef0", 0.0))

    best = min(candidates, key=tie_key)
    return CvResult(
        kernel_kind=kernel_kind, best_params=best.params, best=best,
        grid=tuple(results), k=k, seed=seed,
    )


@dataclass(frozen=True)
class KernelComparison:
    """Cross-validation results for all four kernels, best first."""

    rows: tuple[CvResult, ...]

    def to_csv_rows(self):
        header = [
            "kernel", "mean_accuracy", "std_accuracy",
            "accuracy", "recall", "precision", "f1", "best_params",
        ]
        out = [header]
        for r in self.rows:
            m = compute_metrics(r.best.pooled)
            out.append([
                r.kernel_kind,
                repr(r.mean_accuracy), repr(r.std_accuracy),
                repr(m.accuracy), repr(m.recall), repr(m.precision), repr(m.f1),
                _format_params(r.best_params),
            ])
        return out

    def to_text(self) -> str:
        lines = [
            f"{'kernel':<12}{'mean_acc':>9}{'std':>8}{'recall':>8}"
            f"{'precision':>11}{'f1':>8}  best params"
        ]
        for r in self.rows:
            m = compute_metrics(r.best.pooled)
            lines.append(
                f"{r.kernel_kind:<12}{r.mean_accuracy:>9.4f}{r.std_accuracy:>8.4f}"
                f"{m.recall:>8.4f}{m.precision:>11.4f}{m.f1:>8.4f}"
                f"  {_format_params(r.best_params)}"
            )
        return "\n".join(lines)


def _format_params(params: dict) -> str:
    parts = []
    for key in ("C", "gamma", "degree", "coef0"):
        if key in params:
            value = params[key]
            parts.append(f"{key}={'auto' if value is None else value}")
    return " ".join(parts)


KERNEL_KINDS_ORDER = ("linear", "polynomial", "rbf", "sigmoid")


def compare_kernels(
    features,
    labels,
    k: int = 10,
    seed: int = 0,
    grids: dict | None = None,
    tol: float = 1e-3,
    max_passes: int = 10_000,
) -> KernelComparison:
    """Run cross_validate for each kernel kind; rank by mean accuracy.

    ``grids`` may override (c_grid, gamma_grid, degree_grid, coef0_grid)
    per kernel kind: {"rbf": {"c_grid": ..., ...}, ...}.
    """
    grids = grids or {}
    rows = []
    for kind in KERNEL_KINDS_ORDER:
        kwargs = grids.get(kind, {})
        rows.append(
            cross_validate(
                features, labels, kind, k=k, seed=seed,
                tol=tol, max_passes=max_passes, **kwargs,
            )
        )
    rows.sort(key=lambda r: -r.mean_accuracy)  # stable: kernel order on ties
    return KernelComparison(rows=tuple(rows))


@dataclass(frozen=True)
class CategoryRow:
    """Metrics of one content category, in percent rounded to 1 decimal."""

    category: str
    n: int
    accuracy: float
    recall: float
    precision: float
    f1: float


@dataclass(frozen=True)
class CategoryReport:
    """Per-category metric table plus Average and Total rows.

    The Average row is the unweighted mean of the (rounded) non-empty
    category rows; the Total row covers every sample, uncategorized ones
    included.
    """

    rows: dict = field(default_factory=dict)  # category -> CategoryRow | None
    average: CategoryRow | None = None
    total: CategoryRow | None = None

    def to_csv_rows(self):
        out = [["category", "n", "accuracy", "recall", "precision", "f1"]]
        for cat in CATEGORIES:
            row = self.rows[cat]
            if row is None:
                out.append([CATEGORY_DISPLAY[cat], "0", "n/a", "n/a", "n/a", "n/a"])
            else:
                out.append(_csv_row(CATEGORY_DISPLAY[cat], row))
        out.append(_csv_row("Average", self.average))
        out.append(_csv_row("Total", self.total))
        return out

    def to_text(self) -> str:
        width = max(len(d) for d in CATEGORY_DISPLAY.values()) + 2
        header = (
            f"{'Content Category':<{width}}{'Accuracy (%)':>14}{'Recall (%)':>12}"
            f"{'Precision (%)':>15}{'F1 Score (%)':>14}"
        )
        lines = [header]
        for cat in CATEGORIES:
            lines.append(_text_row(CATEGORY_DISPLAY[cat], self.rows[cat], width))
        lines.append(_text_row("Average", self.average, width))
        lines.append(_text_row("Total", self.total, width))
        return "\n".join(lines)


def _csv_row(name, row):
    if row is None:
        return [name, "0", "n/a", "n/a", "n/a", "n/a"]
    return [name, str(row.n), f"{row.accuracy:.1f}", f"{row.recall:.1f}",
            f"{row.precision:.1f}", f"{row.f1:.1f}"]


def _text_row(name, row, width):
    if row is None:
        return f"{name:<{width}}{'n/a':>14}{'n/a':>12}{'n/a':>15}{'n/a':>14}"
    return (
        f"{name:<{width}}{row.accuracy:>14.1f}{row.recall:>12.1f}"
        f"{row.precision:>15.1f}{row.f1:>14.1f}"
    )


def _percent_row(category, counts: ConfusionCounts) -> CategoryRow:
    m = compute_metrics(counts)
    return CategoryRow(
        category=category,
        n=counts.total,
        accuracy=round(100.0 * m.accuracy, 1),
        recall=round(100.0 * m.recall, 1),
        precision=round(100.0 * m.precision, 1),
        f1=round(100.0 * m.f1, 1),
    )


def category_report(true_labels, predicted_labels, categories) -> CategoryReport:
    """Build the per-category report from aligned +/-1 labels and categories.

    Every category value must be one of CATEGORIES or "uncategorized";
    uncategorized samples appear only in the Total row. Empty categories
    produce "n/a" rows and are excluded from the Average.
    """
    t = np.asarray(true_labels)
    p = np.asarray(predicted_labels)
    cats = np.asarray(categories)
    if not (t.shape == p.shape == cats.shape):
        raise InvalidInput("labels and categories disagree in length")
    allowed = set(CATEGORIES) | {UNCATEGORIZED}
    unknown = set(cats.tolist()) - allowed
    if unknown:
        raise InvalidInput(f"unknown categories: {sorted(unknown)}")
    rows = {}
    for cat in CATEGORIES:
        mask = cats == cat
        if not mask.any():
            rows[cat] = None
            continue
        rows[cat] = _percent_row(cat, confusion_counts(t[mask], p[mask]))
    present = [r for r in rows.values() if r is not None]
    average = None
    if present:
        average = CategoryRow(
            category="average",
            n=sum(r.n for r in present),
            accuracy=round(float(np.mean([r.accuracy for r in present])), 1),
            recall=round(float(np.mean([r.recall for r in present])), 1),
            precision=round(float(np.mean([r.precision for r in present])), 1),
            f1=round(float(np.mean([r.f1 for r in present])), 1),
        )
    total = _percent_row("total", confusion_counts(t, p))
    return CategoryReport(rows=rows, average=average, total=total)
