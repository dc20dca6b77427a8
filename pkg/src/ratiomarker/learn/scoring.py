"""Cross-validation folds and candidate scoring shared by the learners.

Folds are a pure function of the RNG, so every learner that draws its folds
from a seeded generator is reproducible bit for bit. Binary outcomes get
stratified folds. A candidate's score is the mean out-of-fold AUC (binary)
or R squared (continuous); folds whose score is undefined (a single-class
test fold, say) are skipped in the aggregation.
"""

import math

import numpy as np

from ..composition import Outcome
from ..errors import ValidationError
from ..glm import ModelSpec, fit_glm
from ..metrics import auc_score, r2_score


def make_folds(outcome: Outcome, n_folds: int, rng) -> list[tuple[np.ndarray, np.ndarray]]:
    """(train, test) index arrays for each fold, stratified when binary."""
    n = outcome.n
    if n_folds > n:
        raise ValidationError(f"cannot make {n_folds} folds from {n} samples")
    fold_of = np.empty(n, dtype=int)
    if outcome.kind == "binary":
        for cls in (0.0, 1.0):
            idx = np.flatnonzero(outcome.values == cls)
            idx = idx[rng.permutation(idx.size)]
            fold_of[idx] = np.arange(idx.size) % n_folds
    else:
        perm = rng.permutation(n)
        fold_of[perm] = np.arange(n) % n_folds
    return [
        (np.flatnonzero(fold_of != f), np.flatnonzero(fold_of == f))
        for f in range(n_folds)
    ]


def check_learnable(outcome: Outcome, n_folds: int):
    """Preconditions every learner shares."""
    if outcome.kind == "binary":
        n_pos = int(np.sum(outcome.values == 1.0))
        n_neg = outcome.n - n_pos
        if min(n_pos, n_neg) < 2:
            raise ValidationError(
                "binary outcome needs at least 2 samples per class"
            )
    if n_folds > outcome.n:
        raise ValidationError("more CV folds than samples")


def cv_score_values(
    z: np.ndarray,
    outcome: Outcome,
    spec: ModelSpec,
    folds,
) -> tuple[float, float, list[float]]:
    """Out-of-fold score of a fixed score vector.

    Returns (mean, standard error, per-fold scores). A candidate whose fit
    fails in any fold (constant score in training, say) is unusable and
    scores -inf.
    """
    scores = []
    for train, test in folds:
        try:
            fit = fit_glm(z[train], outcome.subset(train), spec)
        except ValidationError:
            return float("-inf"), 0.0, []
        eta = fit.beta * z[test] + fit.beta0
        if outcome.kind == "binary":
            scores.append(auc_score(outcome.values[test], eta))
        else:
            scores.append(r2_score(outcome.values[test], eta))
    arr = np.asarray(scores, dtype=float)
    valid = arr[~np.isnan(arr)]
    if valid.size == 0:
        return float("-inf"), 0.0, scores
    mean = float(valid.mean())
    if valid.size >= 2:
        se = float(valid.std(ddof=1) / math.sqrt(valid.size))
    else:
        se = 0.0
    return mean, se, scores
