"""Fixed-order 40-dimensional feature vector and its CSV interchange format.

Layout (schema version 1):

    [0:2)   DC Gaussian fit            (mu, sigma)
    [2:4)   pooled-AC GGD fit          (alpha, beta)
    [4:22)  per-frequency GGD fits     (alpha, beta) at the 9 lowest
            zigzag AC positions, pooled across blocks
    [22:40) wavelet detail energies    (e1, e2) for levels 1..3 x
            (horizontal, vertical, diagonal)

Any change to this order or meaning requires a new schema version.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceFailure,
    DegenerateDistribution,
    InsufficientData,
    InvalidInput,
    SchemaError,
)
from .image_pipeline import GrayImage, PreprocessConfig, preprocess
from .stat_models import (
    BETA_MAX,
    fit_gaussian,
    fit_ggd,
    subband_energy,
)
from .transforms import ORIENTATIONS, block_dct, dwt_haar

SCHEMA_VERSION = "1"
FEATURE_COUNT = 40
DWT_LEVELS = 3
_MIN_BLOCKS = 32

# Sentinel for a per-frequency fit whose samples are all (numerically) zero.
DEGENERATE_GGD = (1e-6, BETA_MAX)

# Coefficients this small are float cancellation noise (the exact DCT of a
# constant block is zero, its float evaluation is ~1e-14), not texture.
_ZERO_TOL = 1e-8


def zigzag_order(block_size: int) -> list[tuple[int, int]]:
    """JPEG zigzag traversal of a block_size x block_size grid.

    Starts at (0, 0); even anti-diagonals run bottom-left to top-right,
    odd ones top-right to bottom-left.
    """
    order = []
    b = block_size
    for s in range(2 * b - 1):
        rows = range(min(s, b - 1), max(0, s - b + 1) - 1, -1)
        if s % 2 == 1:
            rows = reversed(rows)
        order.extend((r, s - r) for r in rows)
    return order


# The nine lowest-frequency AC positions of the zigzag scan.
ZIGZAG_AC_POSITIONS = tuple(zigzag_order(8)[1:10])


def _dwt_feature_names():
    names = []
    for level in range(1, DWT_LEVELS + 1):
        for orientation in ORIENTATIONS:
            names.append(f"dwt_l{level}_{orientation}_e1")
            names.append(f"dwt_l{level}_{orientation}_e2")
    return names


FEATURE_NAMES = tuple(
    ["dc_mu", "dc_sigma", "ac_alpha", "ac_beta"]
    + [
        f"ac_z{i}_{p}"
        for i in range(1, len(ZIGZAG_AC_POSITIONS) + 1)
        for p in ("alpha", "beta")
    ]
    + _dwt_feature_names()
)
assert len(FEATURE_NAMES) == FEATURE_COUNT


@dataclass(frozen=True)
class FeatureVector:
    """A 40-value feature vector in schema order."""

    schema_version: str
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.shape != (FEATURE_COUNT,):
            raise InvalidInput(f"feature vector must have {FEATURE_COUNT} values")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("feature values must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class ExtractionConfig:
    """Knobs for feature extraction; schema version 1 pins dwt_levels = 3."""

    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    block_size: int = 8
    dwt_levels: int = DWT_LEVELS

    def __post_init__(self):
        if self.block_size < 4:
            raise InvalidInput(
                "block_size must be >= 4 so all 9 zigzag AC positions exist"
            )
        if self.dwt_levels != DWT_LEVELS:
            raise InvalidInput(
                f"schema version {SCHEMA_VERSION} requires dwt_levels = {DWT_LEVELS}"
            )


@dataclass(frozen=True)
class ExtractionDiagnostics:
    """Degeneracies encountered while extracting one image.

    ``degenerate_fits`` lists per-frequency features substituted with the
    sentinel; ``zero_subbands`` lists detail subbands whose coefficients
    are all zero (their energies are legitimately 0).
    """

    degenerate_fits: tuple[str, ...] = ()
    zero_subbands: tuple[str, ...] = ()


def extract_features(img: GrayImage, cfg: ExtractionConfig | None = None) -> FeatureVector:
    fv, _ = extract_features_with_diagnostics(img, cfg)
    return fv


def extract_features_with_diagnostics(img: GrayImage, cfg: ExtractionConfig | None = None):
    """Run the full extraction pipeline on one image.

    preprocess -> block DCT -> Gaussian fit of the DC values, GGD fit of
    the pooled AC values and of each of the 9 leading zigzag AC positions
    -> Haar detail subband energies, assembled in schema order.
    Coefficients below the cancellation-noise threshold are dropped from
    the GGD sample sets before fitting.

    A per-frequency fit left without samples is replaced by the
    DEGENERATE_GGD sentinel and flagged; a fully degenerate image (zero
    DC variance or all-zero AC) raises DegenerateDistribution.
    ConvergenceFailure from any fit is re-raised naming the feature.
    """
    if cfg is None:
        cfg = ExtractionConfig()
    prepared = preprocess(img, cfg.preprocess)
    grid = block_dct(prepared, cfg.block_size)
    if grid.n_blocks < _MIN_BLOCKS:
        raise InsufficientData(
            f"image yields {grid.n_blocks} blocks; need >= {_MIN_BLOCKS}"
        )

    values = np.empty(FEATURE_COUNT)

    dc_fit = fit_gaussian(grid.dc_values())
    values[0], values[1] = dc_fit.mu, dc_fit.sigma

    pooled_samples = _genuine(grid.ac_values())
    if pooled_samples.size < _MIN_BLOCKS:
        raise DegenerateDistribution(
            "feature 'ac' is degenerate: (almost) every AC coefficient is zero"
        )
    values[2], values[3] = _fit_ggd_feature(pooled_samples, "ac")

    values[4:22], degenerate = per_frequency_ggd_features(grid)

    zero_subbands = []
    subbands = dwt_haar(prepared, cfg.dwt_levels)
    for j, sb in enumerate(subbands):
        energy = subband_energy(sb)
        values[22 + 2 * j], values[23 + 2 * j] = energy.e1, energy.e2
        if energy.e2 == 0.0:
            zero_subbands.append(f"dwt_l{sb.level}_{sb.orientation}")

    fv = FeatureVector(schema_version=SCHEMA_VERSION, values=values)
    diag = ExtractionDiagnostics(
        degenerate_fits=degenerate, zero_subbands=tuple(zero_subbands)
    )
    return fv, diag


def _genuine(samples: np.ndarray) -> np.ndarray:
    """Drop coefficients that are float cancellation noise, not texture."""
    return samples[np.abs(samples) > _ZERO_TOL]


def per_frequency_ggd_features(grid):
    """(alpha, beta) pairs for the 9 leading zigzag AC positions.

    A position with fewer than 32 genuinely nonzero coefficients gets
    the DEGENERATE_GGD sentinel instead of a fit. Returns (18 values,
    names of substituted features).
    """
    values = np.empty(2 * len(ZIGZAG_AC_POSITIONS))
    degenerate = []
    for i, (u, v) in enumerate(ZIGZAG_AC_POSITIONS):
        name = f"ac_z{i + 1}"
        samples = _genuine(grid.ac_at(u, v))
        if samples.size < _MIN_BLOCKS:
            values[2 * i], values[2 * i + 1] = DEGENERATE_GGD
            degenerate.append(name)
        else:
            values[2 * i], values[2 * i + 1] = _fit_ggd_feature(samples, name)
    return values, tuple(degenerate)


def _fit_ggd_feature(samples, name):
    try:
        p = fit_ggd(samples)
    except ConvergenceFailure as exc:
        raise ConvergenceFailure(f"GGD fit failed for feature '{name}': {exc}") from exc
    except DegenerateDistribution as exc:
        raise DegenerateDistribution(
            f"feature '{name}' is degenerate (all coefficients zero): {exc}"
        ) from exc
    return p.alpha, p.beta


# --- CSV interchange -------------------------------------------------------
#
# Layout: a '# schema_version=...' metadata line, then the header row
# 'path,label,category,<40 feature names>', then one row per image.

LABELS = ("authentic", "spliced")


def label_to_sign(label: str) -> int:
    """authentic -> -1, spliced -> +1."""
    if label == "authentic":
        return -1
    if label == "spliced":
        return 1
    raise InvalidInput(f"unknown label {label!r}; expected one of {LABELS}")


def sign_to_label(sign: int) -> str:
    return "spliced" if sign > 0 else "authentic"


def write_feature_csv(fh, rows) -> None:
    """Write (path, label, category, FeatureVector) rows to a text file object."""
    fh.write(f"# schema_version={SCHEMA_VERSION}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("path", "label", "category") + FEATURE_NAMES)
    for path, label, category, fv in rows:
        if fv.schema_version != SCHEMA_VERSION:
            raise SchemaError(
                f"feature vector schema {fv.schema_version!r} != {SCHEMA_VERSION!r}"
            )
        writer.writerow([path, label, category] + [repr(float(v)) for v in fv.values])


def read_feature_csv(fh):
    """Parse a feature CSV; returns (paths, labels, categories, matrix).

    Raises SchemaError when the version line or column layout does not
    match this module's schema.
    """
    version_line = fh.readline().strip()
    prefix = "# schema_version="
    if not version_line.startswith(prefix):
        raise SchemaError("feature CSV is missing the schema_version line")
    version = version_line[len(prefix):]
    if version != SCHEMA_VERSION:
        raise SchemaError(
            f"feature CSV schema {version!r} does not match {SCHEMA_VERSION!r}"
        )
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != list(("path", "label", "category") + FEATURE_NAMES):
        raise SchemaError("feature CSV header does not match the schema")
    paths, labels, categories, data = [], [], [], []
    for row in reader:
        if not row:
            continue
        if len(row) != 3 + FEATURE_COUNT:
            raise SchemaError(f"feature row for {row[0]!r} has {len(row)} fields")
        label_to_sign(row[1])  # validate
        paths.append(row[0])
        labels.append(row[1])
        categories.append(row[2])
        data.append([float(v) for v in row[3:]])
    matrix = np.asarray(data, dtype=np.float64).reshape(len(paths), FEATURE_COUNT)
    return paths, labels, categories, matrix
