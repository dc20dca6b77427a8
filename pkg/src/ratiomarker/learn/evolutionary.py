"""Evolutionary search over summed-log-ratio biomarkers.

A chromosome assigns each feature to the numerator (+1), the denominator
(-1), or neither (0). Fitness is the cross-validated score of the SLR minus
lam * (active features / G), so sparser chromosomes win ties. Selection is
tournament (size 3 by default) with single-elite carryover, uniform
crossover, and per-gene mutation at rate 1/G. Chromosomes with an empty
side are never evaluated; they get the worst possible fitness.
"""

import numpy as np

from ..composition import Outcome, StrictlyPositiveMatrix
from ..errors import DimensionMismatch
from ..glm import ModelSpec
from .biomarker import (
    LearnedModel,
    LearnerConfig,
    RatioBiomarker,
    orient_and_fit,
    slr_from_values,
)
from .scoring import check_learnable, cv_score_values, make_folds

_GENES = np.array([0, 1, -1], dtype=np.int8)


def evolutionary_slr(
    matrix: StrictlyPositiveMatrix,
    outcome: Outcome,
    config: LearnerConfig | None = None,
    spec: ModelSpec | None = None,
) -> LearnedModel:
    if config is None:
        config = LearnerConfig()
    if spec is None:
        spec = ModelSpec(
            link="logistic" if outcome.kind == "binary" else "identity"
        )
    if outcome.n != matrix.n_samples:
        raise DimensionMismatch("outcome length does not match sample count")
    check_learnable(outcome, config.cv_folds)

    g = matrix.n_features
    values = matrix.values
    rng = np.random.default_rng(config.seed)
    folds = make_folds(outcome, config.cv_folds, rng)
    mutation_rate = (
        config.mutation_rate if config.mutation_rate is not None else 1.0 / g
    )

    cache: dict[bytes, tuple[float, float, float]] = {}

    def fitness(chrom: np.ndarray) -> tuple[float, float, float]:
        key = chrom.tobytes()
        hit = cache.get(key)
        if hit is not None:
            return hit
        num = np.flatnonzero(chrom == 1)
        den = np.flatnonzero(chrom == -1)
        if num.size == 0 or den.size == 0:
            result = (float("-inf"), float("-inf"), 0.0)
        else:
            z = slr_from_values(values, num, den)
            mean, se, _ = cv_score_values(z, outcome, spec, folds)
            if mean == float("-inf"):
                result = (float("-inf"), float("-inf"), 0.0)
            else:
                penalty = config.lam * (num.size + den.size) / g
                result = (mean - penalty, mean, se)
        cache[key] = result
        return result

    population = rng.choice(
        _GENES, size=(config.population, g), p=[0.6, 0.2, 0.2]
    ).astype(np.int8)
    fits = np.array([fitness(c)[0] for c in population])
    best_curve = [float(fits.max())]

    def tournament() -> np.ndarray:
        idx = rng.integers(0, config.population, config.tournament_size)
        return population[idx[np.argmax(fits[idx])]]

    for _ in range(config.generations):
        new_pop = [population[int(np.argmax(fits))].copy()]  # elite
        while len(new_pop) < config.population:
            parent_a = tournament()
            parent_b = tournament()
            mask = rng.random(g) < 0.5
            child = np.where(mask, parent_a, parent_b).astype(np.int8)
            mut = rng.random(g) < mutation_rate
            n_mut = int(mut.sum())
            if n_mut:
                child[mut] = _GENES[rng.integers(0, 3, n_mut)]
            new_pop.append(child)
        population = np.array(new_pop, dtype=np.int8)
        fits = np.array([fitness(c)[0] for c in population])
        best_curve.append(float(fits.max()))

    best = population[int(np.argmax(fits))].copy()
    # A degenerate winner can only happen with a tiny population and no
    # working chromosome; repair it so the returned model is a real ratio.
    repaired = False
    for side, gene in (("num", 1), ("den", -1)):
        if not np.any(best == gene):
            free = np.flatnonzero(best == 0)
            pick = (
                int(free[rng.integers(0, free.size)])
                if free.size
                else int(rng.integers(0, g))
            )
            best[pick] = gene
            repaired = True
    _, cv_mean, cv_se = fitness(best)

    biomarker = RatioBiomarker(
        tuple(np.flatnonzero(best == 1).tolist()),
        tuple(np.flatnonzero(best == -1).tolist()),
        "slr",
    )
    biomarker, fit, fitted = orient_and_fit(biomarker, matrix, outcome, spec)
    return LearnedModel(
        biomarker=biomarker,
        glm=fit,
        feature_ids=list(matrix.feature_ids),
        cv_score=cv_mean,
        cv_se=cv_se,
        training_scores=fitted,
        seed=config.seed,
        diagnostics={
            "learner": "evolutionary",
            "best_fitness_curve": best_curve,
            "evaluations": len(cache),
            "repaired": repaired,
        },
    )
