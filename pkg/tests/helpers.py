"""Shared test utilities: image builders and a brute-force SVM dual solver."""

import numpy as np

from splicestat.image_pipeline import GrayImage


def random_image(rng, height, width, low=0.0, high=255.0):
    return GrayImage(rng.uniform(low, high, (height, width)))


def qp_dual_objective(k, y, alphas):
    """W(a) = sum(a) - 1/2 a^T Q a with Q = (y y^T) * K."""
    q = (y[:, None] * y[None, :]) * k
    return float(alphas.sum() - 0.5 * alphas @ q @ alphas)


def _project_box_hyperplane(v, y, c):
    """Euclidean projection onto {0 <= a <= C, y . a = 0}.

    The projection is clip(v - lam * y, 0, C) where lam solves
    h(lam) = y . clip(v - lam * y, 0, C) = 0. h is continuous, piecewise
    linear, and nonincreasing, so the root is found exactly from the
    clip breakpoints.
    """
    breakpoints = np.sort(np.concatenate([(v - c) * y, v * y]))
    values = (y * np.clip(v - breakpoints[:, None] * y, 0.0, c)).sum(axis=1)
    if values[0] <= 0.0:
        lam = breakpoints[0]
    elif values[-1] >= 0.0:
        lam = breakpoints[-1]
    else:
        i = int(np.searchsorted(-values, 0.0, side="left")) - 1
        v0, v1 = values[i], values[i + 1]
        b0, b1 = breakpoints[i], breakpoints[i + 1]
        lam = b0 if v0 == v1 else b0 + (b1 - b0) * v0 / (v0 - v1)
    return np.clip(v - lam * y, 0.0, c)


def qp_dual_oracle(k, y, c, iterations=40_000):
    """Maximize the SVM dual by projected gradient ascent.

    Independent of the SMO implementation; intended as a slow reference
    for small problems (a handful of samples).
    """
    y = np.asarray(y, dtype=np.float64)
    q = (y[:, None] * y[None, :]) * k
    eig_bound = float(np.abs(q).sum(axis=1).max())  # Gershgorin
    step = 1.0 / max(eig_bound, 1e-12)
    alphas = _project_box_hyperplane(np.full(len(y), 0.5 * c), y, c)
    best = qp_dual_objective(k, y, alphas)
    for i in range(iterations):
        gradient = 1.0 - q @ alphas
        alphas = _project_box_hyperplane(alphas + step * gradient, y, c)
        if i % 500 == 499:
            value = qp_dual_objective(k, y, alphas)
            if value - best < 1e-13:
                break
            best = value
    return alphas, qp_dual_objective(k, y, alphas)
