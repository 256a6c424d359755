"""Level-1 and level-0 loss functions and their risks.

Both level-1 losses are strictly proper scoring rules: the Brier score
(squared error against the one-hot outcome, summed over classes) and the
logarithmic loss (natural log, clamped at the boundary so near-Dirac
predictions keep a finite objective).
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .dist import SimplexPoint

#: Probabilities are clamped at this floor before taking logs.
LOG_CLAMP = 1e-12


class Level1LossKind(Enum):
    BRIER = "brier"
    LOG_LOSS = "log_loss"


def level1_loss(kind: Level1LossKind, theta: SimplexPoint, y: int) -> float:
    """Loss of predicting ``theta`` when label ``y`` is observed."""
    if not 0 <= y < theta.k:
        raise ValueError(f"label {y} out of range for K={theta.k}")
    p = theta.probs
    if kind is Level1LossKind.BRIER:
        onehot = np.zeros(theta.k)
        onehot[y] = 1.0
        return float(((p - onehot) ** 2).sum())
    return -float(np.log(max(p[y], LOG_CLAMP)))


def empirical_risk(kind: Level1LossKind, predictions: list[SimplexPoint],
                   labels: list[int]) -> float:
    """Mean per-example loss over a nonempty sample."""
    if not labels or len(predictions) != len(labels):
        raise ValueError("predictions and labels must be nonempty and equal-length")
    return float(np.mean([level1_loss(kind, p, y) for p, y in zip(predictions, labels)]))


def expected_loss_under_truth(kind: Level1LossKind, theta: SimplexPoint,
                              theta_star: SimplexPoint) -> float:
    """Expected loss of predicting ``theta`` when labels follow ``theta_star``."""
    return float(sum(
        theta_star.probs[y] * level1_loss(kind, theta, y) for y in range(theta.k)
    ))


def expected_level0_loss(p: SimplexPoint, y: int) -> float:
    """Expected 0/1 loss of sampling the level-0 prediction from ``p``: 1 - p(y)."""
    if not 0 <= y < p.k:
        raise ValueError(f"label {y} out of range for K={p.k}")
    return 1.0 - float(p.probs[y])
