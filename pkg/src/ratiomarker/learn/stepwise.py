"""Forward-stepwise balance selection.

The search initializes with the exhaustive best single pair: every ordered
candidate is a 1-vs-1 balance, all G(G-1)/2 of them are scored by
cross-validation on a shared fold split, and the best one (first in
lexicographic order on ties) wins. Growth then proceeds greedily: each
remaining feature is tried on each side, and the best addition is accepted
only while it improves the CV score by more than one standard error of the
current model's fold scores.
"""

import numpy as np

from ..composition import Outcome, StrictlyPositiveMatrix
from ..errors import NoImprovingPair
from ..glm import ModelSpec
from .biomarker import (
    LearnedModel,
    LearnerConfig,
    RatioBiomarker,
    balance_from_logs,
    orient_and_fit,
)
from .scoring import check_learnable, cv_score_values, make_folds


def _default_spec(outcome: Outcome) -> ModelSpec:
    return ModelSpec(link="logistic" if outcome.kind == "binary" else "identity")


def forward_stepwise_balance(
    matrix: StrictlyPositiveMatrix,
    outcome: Outcome,
    config: LearnerConfig | None = None,
    spec: ModelSpec | None = None,
) -> LearnedModel:
    if config is None:
        config = LearnerConfig()
    if spec is None:
        spec = _default_spec(outcome)
    check_learnable(outcome, config.cv_folds)
    if outcome.n != matrix.n_samples:
        from ..errors import DimensionMismatch

        raise DimensionMismatch("outcome length does not match sample count")
    g = matrix.n_features
    rng = np.random.default_rng(config.seed)
    folds = make_folds(outcome, config.cv_folds, rng)
    logs = np.log(matrix.values)

    # Exhaustive 1-vs-1 initialization, lexicographic scan with strict
    # improvement, so ties resolve to the smallest (j, k).
    best_pair = None
    best_mean = float("-inf")
    best_se = 0.0
    for j in range(g - 1):
        for k in range(j + 1, g):
            z = logs[:, j] - logs[:, k]
            mean, se, _ = cv_score_values(z, outcome, spec, folds)
            if mean > best_mean:
                best_pair = (j, k)
                best_mean = mean
                best_se = se
    if best_pair is None or best_mean == float("-inf"):
        raise NoImprovingPair("no feature pair yields a fittable model")

    numerator = [best_pair[0]]
    denominator = [best_pair[1]]
    current_mean = best_mean
    current_se = best_se
    trace = [
        {
            "numerator": list(numerator),
            "denominator": list(denominator),
            "cv_score": current_mean,
            "cv_se": current_se,
        }
    ]

    while len(numerator) + len(denominator) < g:
        in_use = set(numerator) | set(denominator)
        best_add = None
        add_mean = float("-inf")
        add_se = 0.0
        for f in range(g):
            if f in in_use:
                continue
            for side in ("numerator", "denominator"):
                if side == "numerator":
                    z = balance_from_logs(logs, numerator + [f], denominator)
                else:
                    z = balance_from_logs(logs, numerator, denominator + [f])
                mean, se, _ = cv_score_values(z, outcome, spec, folds)
                if mean > add_mean:
                    best_add = (f, side)
                    add_mean = mean
                    add_se = se
        # One-standard-error stop: the addition must beat the current
        # score by more than the current model's fold-level SE.
        if best_add is None or add_mean <= current_mean + current_se:
            break
        f, side = best_add
        (numerator if side == "numerator" else denominator).append(f)
        current_mean = add_mean
        current_se = add_se
        trace.append(
            {
                "numerator": sorted(numerator),
                "denominator": sorted(denominator),
                "cv_score": current_mean,
                "cv_se": current_se,
            }
        )

    biomarker = RatioBiomarker(tuple(numerator), tuple(denominator), "balance")
    biomarker, fit, fitted = orient_and_fit(biomarker, matrix, outcome, spec)
    return LearnedModel(
        biomarker=biomarker,
        glm=fit,
        feature_ids=list(matrix.feature_ids),
        cv_score=current_mean,
        cv_se=current_se,
        training_scores=fitted,
        seed=config.seed,
        diagnostics={"steps": trace, "learner": "stepwise"},
    )
