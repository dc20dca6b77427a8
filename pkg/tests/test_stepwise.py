"""Forward-stepwise balance selection.

The initialization is checked against a brute-force scan written here from
first principles: enumerate every pair, cross-validate it with the same
folds, take the best. Recovery is checked on planted two-feature signals.
"""

import numpy as np
import pytest

from ratiomarker.composition import Outcome, StrictlyPositiveMatrix
from ratiomarker.errors import NoImprovingPair
from ratiomarker.glm import ModelSpec
from ratiomarker.learn.biomarker import LearnerConfig
from ratiomarker.learn.scoring import cv_score_values, make_folds
from ratiomarker.learn.stepwise import forward_stepwise_balance
from ratiomarker.simulate import (
    BiasModel,
    group_outcome,
    observe,
    planted_signal_scenario,
)


def brute_force_best_pair(matrix, outcome, config, spec):
    """Independent exhaustive search over ordered pairs (j, k), j < k."""
    rng = np.random.default_rng(config.seed)
    folds = make_folds(outcome, config.cv_folds, rng)
    logs = np.log(matrix.values)
    best, best_mean = None, float("-inf")
    g = matrix.n_features
    for j in range(g - 1):
        for k in range(j + 1, g):
            mean, _, _ = cv_score_values(
                logs[:, j] - logs[:, k], outcome, spec, folds
            )
            if mean > best_mean:
                best, best_mean = (j, k), mean
    return best, best_mean


def observed_planted(seed, n=60, g=10, effect=2.5):
    sc = planted_signal_scenario(n, g, effect=effect, seed=seed)
    bias = BiasModel.random(n, g, seed=seed + 500, noise_sd=0.2)
    obs = observe(sc, bias, seed=seed + 900)
    return sc, obs, group_outcome(sc)


class TestInitializationOracle:
    def test_matches_exhaustive_search(self):
        spec = ModelSpec(link="logistic")
        for seed in range(12):
            rng = np.random.default_rng(seed + 100)
            n, g = 30, 6
            vals = np.exp(rng.normal(0.0, 0.7, (n, g)))
            mat = StrictlyPositiveMatrix(
                vals,
                [f"s{i}" for i in range(n)],
                [f"f{j}" for j in range(g)],
            )
            y = np.zeros(n)
            y[n // 2:] = 1.0
            out = Outcome.binary(y)
            config = LearnerConfig(seed=seed)
            want, _ = brute_force_best_pair(mat, out, config, spec)
            model = forward_stepwise_balance(mat, out, config, spec)
            first = model.diagnostics["steps"][0]
            got = (first["numerator"][0], first["denominator"][0])
            assert got == want

    def test_first_step_score_matches_oracle(self):
        spec = ModelSpec(link="logistic")
        sc, obs, out = observed_planted(3)
        config = LearnerConfig(seed=3)
        _, want_mean = brute_force_best_pair(obs, out, config, spec)
        model = forward_stepwise_balance(obs, out, config, spec)
        np.testing.assert_allclose(
            model.diagnostics["steps"][0]["cv_score"], want_mean, rtol=1e-12
        )


class TestRecovery:
    def test_planted_pair_recovered(self):
        hits = 0
        for seed in range(10):
            sc, obs, out = observed_planted(seed)
            model = forward_stepwise_balance(
                obs, out, LearnerConfig(seed=seed)
            )
            planted = {sc.planted.numerator, sc.planted.denominator}
            got = {model.biomarker.numerator, model.biomarker.denominator}
            hits += (got == planted)
            # Even a miss must keep the planted features in the model.
            chosen = set(model.biomarker.numerator) | set(
                model.biomarker.denominator
            )
            assert sc.planted.numerator[0] in chosen
            assert sc.planted.denominator[0] in chosen
        assert hits >= 8

    def test_cv_score_is_high_on_planted_signal(self):
        sc, obs, out = observed_planted(21)
        model = forward_stepwise_balance(obs, out, LearnerConfig(seed=21))
        assert model.cv_score >= 0.9

    def test_coefficient_oriented_nonnegative(self):
        for seed in [5, 6]:
            sc, obs, out = observed_planted(seed)
            model = forward_stepwise_balance(obs, out, LearnerConfig(seed=seed))
            assert model.glm.beta >= 0.0


class TestStoppingRule:
    def test_trace_sizes_grow_one_at_a_time(self):
        sc, obs, out = observed_planted(9)
        model = forward_stepwise_balance(obs, out, LearnerConfig(seed=9))
        steps = model.diagnostics["steps"]
        sizes = [
            len(s["numerator"]) + len(s["denominator"]) for s in steps
        ]
        assert sizes[0] == 2
        assert all(b - a == 1 for a, b in zip(sizes, sizes[1:]))

    def test_each_accepted_step_clears_the_se_bar(self):
        sc, obs, out = observed_planted(10)
        model = forward_stepwise_balance(obs, out, LearnerConfig(seed=10))
        steps = model.diagnostics["steps"]
        for prev, nxt in zip(steps, steps[1:]):
            assert nxt["cv_score"] > prev["cv_score"] + prev["cv_se"]

    def test_final_model_matches_last_trace_entry(self):
        sc, obs, out = observed_planted(11)
        model = forward_stepwise_balance(obs, out, LearnerConfig(seed=11))
        last = model.diagnostics["steps"][-1]
        got = set(model.biomarker.numerator) | set(model.biomarker.denominator)
        want = set(last["numerator"]) | set(last["denominator"])
        assert got == want
        np.testing.assert_allclose(model.cv_score, last["cv_score"])


class TestDegenerateInputs:
    def test_all_constant_ratios_raise(self):
        # Four copies of the same column: every pairwise balance is exactly
        # zero, so no pair is fittable.
        n = 12
        rows = np.exp(np.random.default_rng(0).normal(0.0, 1.0, n))
        vals = np.tile(rows[:, None], (1, 4))
        mat = StrictlyPositiveMatrix(
            vals, [f"s{i}" for i in range(n)], [f"f{j}" for j in range(4)]
        )
        y = np.zeros(n)
        y[n // 2:] = 1.0
        with pytest.raises(NoImprovingPair):
            forward_stepwise_balance(
                mat, Outcome.binary(y), LearnerConfig(seed=0)
            )

    def test_reproducible_for_fixed_seed(self):
        sc, obs, out = observed_planted(13)
        a = forward_stepwise_balance(obs, out, LearnerConfig(seed=13))
        b = forward_stepwise_balance(obs, out, LearnerConfig(seed=13))
        assert a.biomarker == b.biomarker
        np.testing.assert_allclose(a.cv_score, b.cv_score, rtol=0)
