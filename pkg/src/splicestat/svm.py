"""Binary soft-margin SVM trained with sequential minimal optimization.

The trainer maximizes the usual dual

    W(a) = sum(a) - 1/2 * sum_ij a_i a_j y_i y_j K(x_i, x_j)
    s.t.  0 <= a_i <= C,  sum_i a_i y_i = 0

by Platt-style pairwise updates, alternating full passes with passes
over the non-bound multipliers. The decision function is
f(x) = sum_i dual_coefs[i] * K(sv_i, z) + b with z the standardized
input; support vectors are stored already standardized, so a serialized
model is self-contained.

Training is deterministic for a fixed seed: the seed only chooses the
starting offsets of the second-choice scan loops, and all ties are
broken by lowest index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, InsufficientData, InvalidInput

KERNEL_KINDS = ("linear", "polynomial", "rbf", "sigmoid")

MODEL_FORMAT_VERSION = "1"

_SV_ALPHA_CUTOFF = 1e-9
_STEP_EPS = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """Kernel kind plus exactly the parameters that kind requires.

    gamma = None means "auto": 1 / n_features, resolved when the kernel
    is evaluated.
    """

    kind: str
    gamma: float | None = None
    degree: int | None = None
    coef0: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise InvalidInput(f"unknown kernel kind {self.kind!r}")
        if self.gamma is not None and not self.gamma > 0:
            raise InvalidInput("gamma must be > 0")
        needs_gamma = self.kind in ("polynomial", "rbf", "sigmoid")
        needs_degree = self.kind == "polynomial"
        needs_coef0 = self.kind in ("polynomial", "sigmoid")
        if not needs_gamma and self.gamma is not None:
            raise InvalidInput(f"{self.kind} kernel takes no gamma")
        if needs_degree:
            if self.degree is None or self.degree < 1:
                raise InvalidInput("polynomial kernel needs an integer degree >= 1")
        elif self.degree is not None:
            raise InvalidInput(f"{self.kind} kernel takes no degree")
        if needs_coef0:
            if self.coef0 is None:
                raise InvalidInput(f"{self.kind} kernel needs coef0")
        elif self.coef0 is not None:
            raise InvalidInput(f"{self.kind} kernel takes no coef0")

    def resolved_gamma(self, n_features: int) -> float | None:
        if self.kind == "linear":
            return None
        return self.gamma if self.gamma is not None else 1.0 / n_features


@dataclass(frozen=True)
class Standardizer:
    """Per-dimension (mean, std) learned on training data.

    Columns with std below 1e-12 pass through unscaled (std forced to 1)
    and are flagged in ``constant_columns``.
    """

    means: np.ndarray
    stds: np.ndarray
    constant_columns: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.means.shape[0]:
            raise InvalidInput(
                f"expected {self.means.shape[0]} features, got {x.shape[-1]}"
            )
        return (x - self.means) / self.stds


@dataclass(frozen=True)
class SvmModel:
    kernel: KernelSpec
    support_vectors: np.ndarray  # (m, d), standardized
    dual_coefs: np.ndarray  # alpha_i * y_i per support vector
    bias: float
    C: float
    standardizer: Standardizer
    schema_version: str


def identity_standardizer(n_features: int) -> Standardizer:
    return Standardizer(
        means=np.zeros(n_features),
        stds=np.ones(n_features),
        constant_columns=np.zeros(n_features, dtype=bool),
    )


def standardize_fit(features) -> Standardizer:
    """Column means and divisor-N stds of a feature matrix."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InsufficientData("standardization needs at least 2 rows")
    means = x.mean(axis=0)
    stds = x.std(axis=0)
    constant = stds < 1e-12
    stds = np.where(constant, 1.0, stds)
    return Standardizer(means=means, stds=stds, constant_columns=constant)


def kernel_matrix(kernel: KernelSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """K[i, j] = k(x_i, y_j) for row-vector collections x (n, d), y (m, d)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if x.shape[1] != y.shape[1]:
        raise InvalidInput("vector lengths do not match")
    dots = x @ y.T
    if kernel.kind == "linear":
        return dots
    gamma = kernel.resolved_gamma(x.shape[1])
    if kernel.kind == "polynomial":
        return (gamma * dots + kernel.coef0) ** kernel.degree
    if kernel.kind == "sigmoid":
        return np.tanh(gamma * dots + kernel.coef0)
    sq = (x * x).sum(axis=1)[:, None] + (y * y).sum(axis=1)[None, :] - 2.0 * dots
    return np.exp(-gamma * np.maximum(sq, 0.0))


def kernel_eval(kernel: KernelSpec, x, y) -> float:
    """Kernel value for a single pair of equal-length vectors."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise InvalidInput("vector lengths do not match")
    return float(kernel_matrix(kernel, x[None, :], y[None, :])[0, 0])


class _SmoState:
    """Working state of one SMO run over a fixed kernel matrix."""

    def __init__(self, k, y, c, tol, rng):
        self.k = k
        self.y = y
        self.c = c
        self.tol = tol
        self.rng = rng
        self.n = len(y)
        self.alphas = np.zeros(self.n)
        self.b = 0.0
        self.errors = -y.astype(np.float64)  # f = 0 initially

    def refresh_errors(self):
        self.errors = self.k @ (self.alphas * self.y) + self.b - self.y

    def non_bound_indices(self):
        return np.flatnonzero((self.alphas > 0) & (self.alphas < self.c))

    def kkt_violations(self):
        """Per-sample KKT violation amounts at the current state.

        Multipliers within _SV_ALPHA_CUTOFF of a bound count as being at
        that bound; accumulated float noise routinely leaves them a few
        ulps inside.
        """
        r = self.errors * self.y  # y*f - 1
        below_c = self.alphas < self.c - _SV_ALPHA_CUTOFF
        above_0 = self.alphas > _SV_ALPHA_CUTOFF
        lower = np.where(below_c, np.maximum(-r - self.tol, 0.0), 0.0)
        upper = np.where(above_0, np.maximum(r - self.tol, 0.0), 0.0)
        return np.maximum(lower, upper)

    def has_free_vectors(self) -> bool:
        return bool(
            np.any(
                (self.alphas > _SV_ALPHA_CUTOFF)
                & (self.alphas < self.c - _SV_ALPHA_CUTOFF)
            )
        )

    def refine_all_bound_bias(self):
        """Pin the bias when every multiplier sits at a bound.

        Platt's running update leaves b anywhere in an interval in that
        case; the KKT inequalities b >= delta_i (alpha=0, y=+1 or
        alpha=C, y=-1) and b <= delta_i (the mirror cases) pin it to the
        interval midpoint, with delta_i = y_i - sum_j a_j y_j K_ij.
        """
        delta = self.y - self.k @ (self.alphas * self.y)
        at_zero = self.alphas <= _SV_ALPHA_CUTOFF
        at_c = self.alphas >= self.c - _SV_ALPHA_CUTOFF
        needs_ge = (at_zero & (self.y > 0)) | (at_c & (self.y < 0))
        needs_le = (at_zero & (self.y < 0)) | (at_c & (self.y > 0))
        if needs_ge.any() and needs_le.any():
            self.b = 0.5 * (float(delta[needs_ge].max()) + float(delta[needs_le].min()))
        elif needs_ge.any():
            self.b = float(delta[needs_ge].max())
        elif needs_le.any():
            self.b = float(delta[needs_le].min())

    def _delta_objective(self, i1, i2, d1, d2):
        # change in the dual objective for steps d1, d2 on the pair
        q1 = self.y[i1] * (self.errors[i1] + self.y[i1] - self.b)
        q2 = self.y[i2] * (self.errors[i2] + self.y[i2] - self.b)
        quad = (
            d1 * d1 * self.k[i1, i1]
            + d2 * d2 * self.k[i2, i2]
            + 2.0 * d1 * d2 * self.y[i1] * self.y[i2] * self.k[i1, i2]
        )
        return d1 + d2 - d1 * q1 - d2 * q2 - 0.5 * quad

    def take_step(self, i1, i2) -> bool:
        if i1 == i2:
            return False
        a1o, a2o = self.alphas[i1], self.alphas[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2
        if y1 != y2:
            lo, hi = max(0.0, a2o - a1o), min(self.c, self.c + a2o - a1o)
        else:
            lo, hi = max(0.0, a1o + a2o - self.c), min(self.c, a1o + a2o)
        if lo == hi:
            return False
        k11, k12, k22 = self.k[i1, i1], self.k[i1, i2], self.k[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2 = a2o + y2 * (e1 - e2) / eta
            a2 = min(max(a2, lo), hi)
        else:
            # objective is non-concave along the pair: test both endpoints
            d2_lo, d2_hi = lo - a2o, hi - a2o
            gain_lo = self._delta_objective(i1, i2, -s * d2_lo, d2_lo)
            gain_hi = self._delta_objective(i1, i2, -s * d2_hi, d2_hi)
            if gain_lo > gain_hi + 1e-12 and gain_lo > 0:
                a2 = lo
            elif gain_hi > gain_lo + 1e-12 and gain_hi > 0:
                a2 = hi
            else:
                return False
        if abs(a2 - a2o) < _STEP_EPS * (a2 + a2o + _STEP_EPS):
            return False
        a1 = a1o + s * (a2o - a2)
        d1, d2 = a1 - a1o, a2 - a2o
        b1 = self.b - e1 - y1 * d1 * k11 - y2 * d2 * k12
        b2 = self.b - e2 - y1 * d1 * k12 - y2 * d2 * k22
        if 0 < a1 < self.c:
            b_new = b1
        elif 0 < a2 < self.c:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)
        self.errors += y1 * d1 * self.k[i1] + y2 * d2 * self.k[i2] + (b_new - self.b)
        self.alphas[i1], self.alphas[i2] = a1, a2
        self.b = b_new
        return True

    def examine(self, i2) -> bool:
        y2, a2 = self.y[i2], self.alphas[i2]
        r2 = self.errors[i2] * y2
        below_c = a2 < self.c - _SV_ALPHA_CUTOFF
        above_0 = a2 > _SV_ALPHA_CUTOFF
        if not ((r2 < -self.tol and below_c) or (r2 > self.tol and above_0)):
            return False
        non_bound = self.non_bound_indices()
        if len(non_bound) > 1:
            # second-choice heuristic: maximize |E1 - E2|, lowest index wins ties
            i1 = non_bound[int(np.argmax(np.abs(self.errors[non_bound] - self.errors[i2])))]
            if self.take_step(i1, i2):
                return True
        if len(non_bound) > 0:
            start = int(self.rng.integers(len(non_bound)))
            for j in range(len(non_bound)):
                if self.take_step(int(non_bound[(start + j) % len(non_bound)]), i2):
                    return True
        start = int(self.rng.integers(self.n))
        for j in range(self.n):
            if self.take_step((start + j) % self.n, i2):
                return True
        return False


def train_smo(
    features,
    labels,
    kernel: KernelSpec,
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 10_000,
    seed: int = 0,
    standardize: bool = True,
    schema_version: str = "1",
) -> SvmModel:
    """Train a binary SVM; labels must be +/-1 with both classes present.

    Runs SMO until a full sweep (with a freshly recomputed error cache)
    finds no KKT violation beyond ``tol``. Raises ConvergenceFailure with
    a violation report if ``max_passes`` sweeps are exhausted first.
    Only multipliers above 1e-9 are kept as support vectors.
    """
    model, _ = train_smo_full(
        features, labels, kernel, C, tol, max_passes, seed, standardize, schema_version
    )
    return model


def train_smo_full(
    features,
    labels,
    kernel: KernelSpec,
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 10_000,
    seed: int = 0,
    standardize: bool = True,
    schema_version: str = "1",
):
    """Like train_smo but also returns the full multiplier vector."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InsufficientData("training needs at least 2 rows")
    y = np.asarray(labels, dtype=np.float64).ravel()
    if y.shape[0] != x.shape[0]:
        raise InvalidInput("features and labels disagree in length")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise InvalidInput("labels must be -1 or +1")
    if len(np.unique(y)) < 2:
        raise InvalidInput("both classes must be present")
    if not C > 0:
        raise InvalidInput("C must be > 0")

    standardizer = standardize_fit(x) if standardize else identity_standardizer(x.shape[1])
    z = standardizer.apply(x)
    k = kernel_matrix(kernel, z, z)
    state = _SmoState(k, y, C, tol, np.random.default_rng(seed))

    passes = 0
    examine_all = True
    while True:
        if passes >= max_passes:
            violations = state.kkt_violations()
            raise ConvergenceFailure(
                f"SMO made {max_passes} sweeps without converging; "
                f"{int((violations > 0).sum())} samples violate KKT, "
                f"worst by {violations.max():.3g}"
            )
        if examine_all:
            state.refresh_errors()
            targets = range(state.n)
        else:
            targets = state.non_bound_indices()
        num_changed = 0
        for i in targets:
            num_changed += state.examine(int(i))
        passes += 1
        if examine_all:
            if num_changed == 0:
                # quiescent full sweep; with free vectors the running b
                # already satisfies KKT at tol. All-bound solutions leave
                # b ambiguous: pin it and re-verify before accepting.
                if state.has_free_vectors():
                    break
                state.refine_all_bound_bias()
                state.refresh_errors()
                if float(state.kkt_violations().max()) == 0.0:
                    break
            else:
                examine_all = False
        elif num_changed == 0:
            examine_all = True

    keep = np.flatnonzero(state.alphas > _SV_ALPHA_CUTOFF)
    model = SvmModel(
        kernel=kernel,
        support_vectors=z[keep].copy(),
        dual_coefs=(state.alphas * y)[keep],
        bias=float(state.b),
        C=float(C),
        standardizer=standardizer,
        schema_version=schema_version,
    )
    return model, state.alphas


def decision_values(model: SvmModel, features) -> np.ndarray:
    """Decision function values for a batch of raw (unstandardized) rows."""
    z = model.standardizer.apply(np.atleast_2d(np.asarray(features, dtype=np.float64)))
    k = kernel_matrix(model.kernel, z, model.support_vectors)
    return k @ model.dual_coefs + model.bias


def predict(model: SvmModel, x):
    """Classify one vector; returns (label, decision_value); sign(0) is +1."""
    value = float(decision_values(model, np.asarray(x, dtype=np.float64)[None, :])[0])
    return (1 if value >= 0 else -1), value


def predict_batch(model: SvmModel, features):
    values = decision_values(model, features)
    labels = np.where(values >= 0, 1, -1)
    return labels, values


def dual_objective(model: SvmModel) -> float:
    """Dual objective value achieved by a trained model."""
    k = kernel_matrix(model.kernel, model.support_vectors, model.support_vectors)
    dc = model.dual_coefs
    return float(np.abs(dc).sum() - 0.5 * dc @ k @ dc)


def kkt_max_violation(model: SvmModel, features, labels, alphas) -> float:
    """Largest KKT violation of a model over its training data.

    ``alphas`` is the full multiplier vector from train_smo_full. For
    each sample with margin m = y * f(x): alpha = 0 requires m >= 1,
    0 < alpha < C requires m = 1, and alpha = C requires m <= 1; the
    violation is the distance to the required region.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64).ravel()
    margins = y * decision_values(model, x)
    worst = 0.0
    for a, m in zip(np.asarray(alphas, dtype=np.float64), margins):
        if a <= _SV_ALPHA_CUTOFF:
            worst = max(worst, 1.0 - m)
        elif a >= model.C - _SV_ALPHA_CUTOFF:
            worst = max(worst, m - 1.0)
        else:
            worst = max(worst, abs(m - 1.0))
    return max(worst, 0.0)


# --- model file format ------------------------------------------------------


def model_to_dict(model: SvmModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "schema_version": model.schema_version,
        "kernel": {
            "kind": model.kernel.kind,
            "gamma": model.kernel.gamma,
            "degree": model.kernel.degree,
            "coef0": model.kernel.coef0,
        },
        "C": model.C,
        "bias": model.bias,
        "standardizer": {
            "means": model.standardizer.means.tolist(),
            "stds": model.standardizer.stds.tolist(),
        },
        "support_vectors": model.support_vectors.tolist(),
        "dual_coefs": model.dual_coefs.tolist(),
    }


def model_from_dict(doc: dict) -> SvmModel:
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise InvalidInput(
            f"unsupported model format_version {doc.get('format_version')!r}"
        )
    kd = doc["kernel"]
    kernel = KernelSpec(
        kind=kd["kind"], gamma=kd["gamma"], degree=kd["degree"], coef0=kd["coef0"]
    )
    means = np.asarray(doc["standardizer"]["means"], dtype=np.float64)
    stds = np.asarray(doc["standardizer"]["stds"], dtype=np.float64)
    # the constant-column flags are training-time diagnostics and are not
    # persisted; they do not affect apply()
    standardizer = Standardizer(
        means=means, stds=stds, constant_columns=np.zeros(len(stds), dtype=bool)
    )
    return SvmModel(
        kernel=kernel,
        support_vectors=np.asarray(doc["support_vectors"], dtype=np.float64),
        dual_coefs=np.asarray(doc["dual_coefs"], dtype=np.float64),
        bias=float(doc["bias"]),
        C=float(doc["C"]),
        standardizer=standardizer,
        schema_version=doc["schema_version"],
    )


def save_model(model: SvmModel, path, extra: dict | None = None) -> None:
    """Write a model as versioned JSON; floats keep full precision."""
    doc = model_to_dict(model)
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path):
    """Read a model JSON; returns (model, full_document)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return model_from_dict(doc), doc
