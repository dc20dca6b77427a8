"""Scoring helpers: AUC for binary outcomes, R squared for continuous."""

import numpy as np
from scipy.stats import rankdata


def auc_score(y, scores) -> float:
    """Area under the ROC curve via midranks.

    Equals the probability that a random positive outscores a random
    negative, counting ties as one half. Returns NaN when either class is
    absent.
    """
    y = np.asarray(y, dtype=float)
    scores = np.asarray(scores, dtype=float)
    n_pos = int(np.sum(y == 1.0))
    n_neg = int(np.sum(y == 0.0))
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    ranks = rankdata(scores)
    rank_sum = ranks[y == 1.0].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def r2_score(y, predictions) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot.

    SS_tot is taken about the mean of `y`. Returns NaN when `y` is
    constant (SS_tot = 0), leaving the degenerate case to the caller.
    """
    y = np.asarray(y, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return float("nan")
    ss_res = float(np.sum((y - predictions) ** 2))
    return 1.0 - ss_res / ss_tot
