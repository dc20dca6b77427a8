"""Command-line interface.

Every subcommand reads delimited text, writes its outputs into --out-dir,
and finishes by writing manifest.json there: tool version, the fully
resolved configuration, sha256 digests of every input file, wall-clock
seconds, and the list of outputs. Options can come from a key=value config
file via --config; explicit flags win over the file, which wins over
defaults. A previously written manifest.json is itself a valid --config,
so any run can be repeated. Exit codes: 0 success, 2 parse errors,
3 precondition failures, 4 convergence failures.
"""

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .benchmark import benchmark_table, run_benchmark, synthetic_omics_pair
from .composition import (
    Outcome,
    ZeroPolicy,
    apply_zero_policy,
    clr_transform,
    close_to_proportions,
    pairwise_logratios,
)
from .errors import (
    NotConvergedError,
    ParseError,
    RatiomarkerError,
    ValidationError,
)
from .glm import ModelSpec, daa, differential_ratio_analysis
from .latent import (
    EncoderDecoderConfig,
    OmicsPair,
    approximate_latent_with_rbb,
    encoder_decoder_latent,
    pca_first_component,
    pls_first_component,
)
from .learn import (
    LearnerConfig,
    evolutionary_slr,
    forward_stepwise_balance,
    predict,
    relaxed_gradient_learner,
    serialize_model,
)
from .metrics import auc_score, r2_score
from .simulate import (
    BiasModel,
    da_notion_report,
    depth_confounded_scenario,
    observe,
    planted_signal_scenario,
)
from .tabular import (
    atomic_write_text,
    outcome_for_matrix,
    read_config,
    read_matrix,
    read_outcome_pairs,
    write_config,
    write_matrix,
    write_outcome,
    write_table,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_CONVERGENCE = 4

_COMMON_DEFAULTS = {
    "out_dir": "ratiomarker-out",
    "seed": 0,
    "max_zero_fraction": 0.5,
    "zero_replacement": "half_detection_limit",
}

_DEFAULTS = {
    "transform": {
        **_COMMON_DEFAULTS,
        "matrix": None,
        "transform": "clr",
    },
    "daa": {
        **_COMMON_DEFAULTS,
        "matrix": None,
        "outcome": None,
        "transform": "clr",
        "alpha": 0.05,
        "link": "auto",
        "outcome_kind": "auto",
    },
    "ratios": {
        **_COMMON_DEFAULTS,
        "matrix": None,
        "outcome": None,
        "alpha": 0.05,
        "max_features": 2000,
        "link": "auto",
        "outcome_kind": "auto",
    },
    "learn": {
        **_COMMON_DEFAULTS,
        "matrix": None,
        "outcome": None,
        "test_matrix": None,
        "test_outcome": None,
        "learner": "stepwise",
        "mode": "balance",
        "lam": 1.0,
        "epochs": 1000,
        "learning_rate": 1.0,
        "cv_folds": 5,
        "population": 64,
        "generations": 100,
        "mutation_rate": None,
        "tournament_size": 3,
        "outcome_kind": "auto",
    },
    "simulate": {
        **_COMMON_DEFAULTS,
        "preset": "planted",
        "n_samples": 100,
        "n_features": 20,
        "effect": 2.0,
        "log_sd": 0.5,
        "theta_sd": 0.5,
        "depth_sd": 0.5,
        "noise_sd": 0.1,
    },
    "approx": {
        **_COMMON_DEFAULTS,
        "matrix": None,
        "matrix2": None,
        "latent": "pca",
        "mode": "balance",
        "lam": 1.0,
        "epochs": 1000,
        "learning_rate": 1.0,
        "cv_folds": 5,
        "hidden_units": 32,
        "nn_epochs": 1000,
        "nn_learning_rate": 0.01,
    },
    "benchmark": {
        **_COMMON_DEFAULTS,
        "matrix": None,
        "matrix2": None,
        "synthetic": False,
        "n_samples": 200,
        "g_t": 50,
        "g_u": 80,
        "mode": "balance",
        "lam": 1.0,
        "epochs": 1000,
        "learning_rate": 1.0,
        "cv_folds": 5,
        "hidden_units": 32,
        "nn_epochs": 1000,
        "nn_learning_rate": 0.01,
    },
}

_CHOICES = {
    "transform": {
        "transform": ("clr", "prop", "pairwise"),
        "zero_replacement": ("half_detection_limit", "none"),
    },
    "daa": {
        "transform": ("clr", "prop"),
        "link": ("auto", "identity", "logistic"),
        "outcome_kind": ("auto", "binary", "continuous"),
        "zero_replacement": ("half_detection_limit", "none"),
    },
    "ratios": {
        "link": ("auto", "identity", "logistic"),
        "outcome_kind": ("auto", "binary", "continuous"),
        "zero_replacement": ("half_detection_limit", "none"),
    },
    "learn": {
        "learner": ("stepwise", "relaxed", "evolutionary"),
        "mode": ("balance", "slr"),
        "outcome_kind": ("auto", "binary", "continuous"),
        "zero_replacement": ("half_detection_limit", "none"),
    },
    "simulate": {
        "preset": ("planted", "depth_confounded"),
        "zero_replacement": ("half_detection_limit", "none"),
    },
    "approx": {
        "latent": ("pca", "pls", "nn"),
        "mode": ("balance", "slr"),
        "zero_replacement": ("half_detection_limit", "none"),
    },
    "benchmark": {
        "mode": ("balance", "slr"),
        "zero_replacement": ("half_detection_limit", "none"),
    },
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratiomarker",
        description="Ratio-based biomarker analysis for compositional count data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(cmd, help_text):
        p = sub.add_parser(cmd, help=help_text, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="key=value file or a previous manifest.json")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--seed", type=int)
        p.add_argument("--max-zero-fraction", dest="max_zero_fraction", type=float)
        p.add_argument(
            "--zero-replacement",
            dest="zero_replacement",
            choices=("half_detection_limit", "none"),
        )
        return p

    p = add("transform", "write clr / proportion / pairwise log-ratio matrices")
    p.add_argument("--matrix")
    p.add_argument("--transform", choices=("clr", "prop", "pairwise"))

    p = add("daa", "per-feature differential abundance under a chosen notion")
    p.add_argument("--matrix")
    p.add_argument("--outcome")
    p.add_argument("--transform", choices=("clr", "prop"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--link", choices=("auto", "identity", "logistic"))
    p.add_argument("--outcome-kind", dest="outcome_kind", choices=("auto", "binary", "continuous"))

    p = add("ratios", "GLM on every pairwise log-ratio plus feature attribution")
    p.add_argument("--matrix")
    p.add_argument("--outcome")
    p.add_argument("--alpha", type=float)
    p.add_argument("--max-features", dest="max_features", type=int)
    p.add_argument("--link", choices=("auto", "identity", "logistic"))
    p.add_argument("--outcome-kind", dest="outcome_kind", choices=("auto", "binary", "continuous"))

    p = add("learn", "fit a sparse ratio biomarker predicting the outcome")
    p.add_argument("--matrix")
    p.add_argument("--outcome")
    p.add_argument("--test-matrix", dest="test_matrix")
    p.add_argument("--test-outcome", dest="test_outcome")
    p.add_argument("--learner", choices=("stepwise", "relaxed", "evolutionary"))
    p.add_argument("--mode", choices=("balance", "slr"))
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--cv-folds", dest="cv_folds", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--mutation-rate", dest="mutation_rate", type=float)
    p.add_argument("--tournament-size", dest="tournament_size", type=int)
    p.add_argument("--outcome-kind", dest="outcome_kind", choices=("auto", "binary", "continuous"))

    p = add("simulate", "generate ground truth, biased observations, and a notion report")
    p.add_argument("--preset", choices=("planted", "depth_confounded"))
    p.add_argument("--n-samples", dest="n_samples", type=int)
    p.add_argument("--n-features", dest="n_features", type=int)
    p.add_argument("--effect", type=float)
    p.add_argument("--log-sd", dest="log_sd", type=float)
    p.add_argument("--theta-sd", dest="theta_sd", type=float)
    p.add_argument("--depth-sd", dest="depth_sd", type=float)
    p.add_argument("--noise-sd", dest="noise_sd", type=float)

    p = add("approx", "summarize by a latent score and refit it as a ratio biomarker")
    p.add_argument("--matrix")
    p.add_argument("--matrix2")
    p.add_argument("--latent", choices=("pca", "pls", "nn"))
    p.add_argument("--mode", choices=("balance", "slr"))
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--cv-folds", dest="cv_folds", type=int)
    p.add_argument("--hidden-units", dest="hidden_units", type=int)
    p.add_argument("--nn-epochs", dest="nn_epochs", type=int)
    p.add_argument("--nn-learning-rate", dest="nn_learning_rate", type=float)

    p = add("benchmark", "latent pipelines vs their RBB stand-ins, 12-row table")
    p.add_argument("--matrix")
    p.add_argument("--matrix2")
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--n-samples", dest="n_samples", type=int)
    p.add_argument("--g-t", dest="g_t", type=int)
    p.add_argument("--g-u", dest="g_u", type=int)
    p.add_argument("--mode", choices=("balance", "slr"))
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--cv-folds", dest="cv_folds", type=int)
    p.add_argument("--hidden-units", dest="hidden_units", type=int)
    p.add_argument("--nn-epochs", dest="nn_epochs", type=int)
    p.add_argument("--nn-learning-rate", dest="nn_learning_rate", type=float)

    return parser


def _coerce(key: str, raw: str, default):
    if raw == "" or raw.lower() == "none":
        return None
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int) and not isinstance(default, bool):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if key in ("mutation_rate",):
        return float(raw)
    return raw


def _resolve_config(command: str, args: argparse.Namespace) -> dict:
    resolved = dict(_DEFAULTS[command])
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        if not Path(config_path).is_file():
            raise ValidationError(f"config file does not exist: {config_path}")
        file_values = read_config(config_path)
        file_values.pop("command", None)
        for key, raw in file_values.items():
            if key not in resolved:
                raise ValidationError(
                    f"config key {key!r} is not an option of {command!r}"
                )
            resolved[key] = _coerce(key, raw, _DEFAULTS[command][key])
    resolved.update(flags)
    for key, allowed in _CHOICES.get(command, {}).items():
        if resolved.get(key) is not None and resolved[key] not in allowed:
            raise ValidationError(
                f"{key} must be one of {', '.join(allowed)}"
            )
    return resolved


def _require(config: dict, *keys):
    for key in keys:
        if config.get(key) is None:
            raise ValidationError(f"--{key.replace('_', '-')} is required")


def _check_inputs_exist(config: dict, keys) -> dict[str, str]:
    digests = {}
    for key in keys:
        path = config.get(key)
        if path is None:
            continue
        p = Path(path)
        if not p.is_file():
            raise ValidationError(f"input file does not exist: {path}")
        digests[str(path)] = hashlib.sha256(p.read_bytes()).hexdigest()
    return digests


def _json_ready(value):
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_json_ready(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def _write_json(out_dir: Path, name: str, payload: dict, outputs: list[str]):
    atomic_write_text(
        out_dir / name,
        json.dumps(_json_ready(payload), sort_keys=True, indent=2) + "\n",
    )
    outputs.append(name)


def _load_positive_matrix(config: dict, key: str = "matrix"):
    matrix = read_matrix(config[key])
    policy = ZeroPolicy(
        max_zero_fraction=config["max_zero_fraction"],
        replacement=config["zero_replacement"],
    )
    return apply_zero_policy(matrix, policy)


def _load_outcome(config: dict, matrix, key: str = "outcome") -> Outcome:
    ids, values = read_outcome_pairs(config[key])
    kind = config.get("outcome_kind", "auto")
    return outcome_for_matrix(
        matrix, ids, values, kind=None if kind == "auto" else kind
    )


def _model_spec(config: dict, outcome: Outcome) -> ModelSpec:
    link = config.get("link", "auto")
    if link == "auto":
        link = "logistic" if outcome.kind == "binary" else "identity"
    return ModelSpec(link=link)


def _learner_config(config: dict) -> LearnerConfig:
    return LearnerConfig(
        lam=config["lam"],
        epochs=config["epochs"],
        learning_rate=config["learning_rate"],
        cv_folds=config["cv_folds"],
        seed=config["seed"],
        population=config.get("population", 64),
        generations=config.get("generations", 100),
        mutation_rate=config.get("mutation_rate"),
        tournament_size=config.get("tournament_size", 3),
    )


def _cmd_transform(config: dict, out_dir: Path, outputs: list[str]):
    positive, removed = _load_positive_matrix(config)
    atomic_write_text(
        out_dir / "removed_features.txt",
        "\n".join(removed) + ("\n" if removed else ""),
    )
    outputs.append("removed_features.txt")
    kind = config["transform"]
    if kind == "clr":
        write_table(
            out_dir / "clr.tsv",
            positive.sample_ids,
            positive.feature_ids,
            clr_transform(positive),
        )
        outputs.append("clr.tsv")
    elif kind == "prop":
        write_matrix(out_dir / "proportions.tsv", close_to_proportions(positive))
        outputs.append("proportions.tsv")
    else:
        ratios, pairs = pairwise_logratios(positive)
        labels = [
            f"{positive.feature_ids[j]}/{positive.feature_ids[k]}"
            for j, k in pairs
        ]
        write_table(
            out_dir / "pairwise.tsv", positive.sample_ids, labels, ratios
        )
        outputs.append("pairwise.tsv")


def _cmd_daa(config: dict, out_dir: Path, outputs: list[str]):
    positive, removed = _load_positive_matrix(config)
    outcome = _load_outcome(config, positive)
    result = daa(
        positive,
        outcome,
        transform=config["transform"],
        spec=_model_spec(config, outcome),
    )
    lines = ["feature_id\tbeta\tp_value\tp_adjusted\tnote"]
    for i, fid in enumerate(result.feature_ids):
        lines.append(
            "\t".join(
                [
                    fid,
                    repr(float(result.beta[i])),
                    repr(float(result.p_value[i])),
                    repr(float(result.p_adjusted[i])),
                    result.notes[i],
                ]
            )
        )
    atomic_write_text(out_dir / "daa.tsv", "\n".join(lines) + "\n")
    outputs.append("daa.tsv")
    significant = result.significant(config["alpha"])
    _write_json(
        out_dir,
        "daa.json",
        {
            "notion": result.notion,
            "alpha": config["alpha"],
            "n_features": len(result.feature_ids),
            "n_significant": int(significant.sum()),
            "significant_features": [
                fid for fid, s in zip(result.feature_ids, significant) if s
            ],
            "removed_features": removed,
        },
        outputs,
    )


def _cmd_ratios(config: dict, out_dir: Path, outputs: list[str]):
    positive, removed = _load_positive_matrix(config)
    outcome = _load_outcome(config, positive)
    result = differential_ratio_analysis(
        positive,
        outcome,
        spec=_model_spec(config, outcome),
        alpha=config["alpha"],
        max_features=config["max_features"],
    )
    lines = ["ratio\tnumerator\tdenominator\tbeta\tp_value\tp_adjusted\tnote"]
    for i, (j, k) in enumerate(result.pair_indices):
        lines.append(
            "\t".join(
                [
                    result.pair_labels[i],
                    result.feature_ids[j],
                    result.feature_ids[k],
                    repr(float(result.beta[i])),
                    repr(float(result.p_value[i])),
                    repr(float(result.p_adjusted[i])),
                    result.notes[i],
                ]
            )
        )
    atomic_write_text(out_dir / "ratios.tsv", "\n".join(lines) + "\n")
    outputs.append("ratios.tsv")
    attr_lines = ["feature_id\tattribution"]
    for fid, score in zip(result.feature_ids, result.attribution):
        attr_lines.append(f"{fid}\t{repr(float(score))}")
    atomic_write_text(out_dir / "attribution.tsv", "\n".join(attr_lines) + "\n")
    outputs.append("attribution.tsv")
    _write_json(
        out_dir,
        "ratios.json",
        {
            "alpha": result.alpha,
            "n_ratios": len(result.pair_indices),
            "n_significant": result.n_significant,
            "top_features": [
                result.feature_ids[int(i)]
                for i in np.argsort(-result.attribution, kind="stable")[:10]
            ],
            "removed_features": removed,
        },
        outputs,
    )


_LEARNERS = {
    "stepwise": forward_stepwise_balance,
    "relaxed": relaxed_gradient_learner,
    "evolutionary": evolutionary_slr,
}


def _cmd_learn(config: dict, out_dir: Path, outputs: list[str]):
    positive, removed = _load_positive_matrix(config)
    outcome = _load_outcome(config, positive)
    learner_config = _learner_config(config)
    learner = config["learner"]
    mode = config["mode"]
    if learner == "stepwise":
        if mode != "balance":
            raise ValidationError("the stepwise learner builds balances only")
        model = forward_stepwise_balance(positive, outcome, learner_config)
    elif learner == "evolutionary":
        if mode != "slr":
            raise ValidationError(
                "the evolutionary learner builds summed log-ratios; use --mode slr"
            )
        model = evolutionary_slr(positive, outcome, learner_config)
    else:
        model = relaxed_gradient_learner(
            positive, outcome, learner_config, mode=mode
        )
    atomic_write_text(out_dir / "model.json", serialize_model(model))
    outputs.append("model.json")

    def score(y: Outcome, predictions) -> float:
        if y.kind == "binary":
            return auc_score(y.values, predictions)
        return r2_score(y.values, predictions)

    metrics = {
        "learner": learner,
        "mode": model.biomarker.mode,
        "numerator_features": [
            model.feature_ids[i] for i in model.biomarker.numerator
        ],
        "denominator_features": [
            model.feature_ids[i] for i in model.biomarker.denominator
        ],
        "beta": model.glm.beta,
        "beta0": model.glm.beta0,
        "converged": model.glm.converged,
        "cv_score": model.cv_score,
        "cv_se": model.cv_se,
        "train_score": score(outcome, model.training_scores),
        "seed": config["seed"],
        "removed_features": removed,
    }
    if config.get("test_matrix") is not None:
        _require(config, "test_outcome")
        test_matrix, _ = _load_positive_matrix(config, "test_matrix")
        test_outcome = _load_outcome(config, test_matrix, "test_outcome")
        predictions = predict(model, test_matrix)
        metrics["test_score"] = score(test_outcome, predictions)
        write_outcome(
            out_dir / "test_predictions.tsv", test_matrix.sample_ids, predictions
        )
        outputs.append("test_predictions.tsv")
    _write_json(out_dir, "metrics.json", metrics, outputs)


def _cmd_simulate(config: dict, out_dir: Path, outputs: list[str]):
    if config["preset"] == "depth_confounded":
        scenario = depth_confounded_scenario()
        bias = BiasModel.identity(scenario.n_samples, scenario.n_features)
        report_feature = "a"
    else:
        scenario = planted_signal_scenario(
            config["n_samples"],
            config["n_features"],
            effect=config["effect"],
            seed=config["seed"],
            log_sd=config["log_sd"],
        )
        bias = BiasModel.random(
            scenario.n_samples,
            scenario.n_features,
            seed=config["seed"] + 1,
            theta_sd=config["theta_sd"],
            depth_sd=config["depth_sd"],
            noise_sd=config["noise_sd"],
        )
        report_feature = scenario.feature_ids[scenario.planted.numerator[0]]
    observed = observe(scenario, bias, seed=config["seed"] + 2)
    write_matrix(out_dir / "true.tsv", scenario.true_matrix())
    outputs.append("true.tsv")
    write_matrix(out_dir / "observed.tsv", observed)
    outputs.append("observed.tsv")
    write_outcome(
        out_dir / "outcome.tsv",
        scenario.sample_ids,
        scenario.group.astype(float),
    )
    outputs.append("outcome.tsv")
    lines = ["feature_id\tabsolute\trelative\tpresential"]
    for fid in scenario.feature_ids:
        report = da_notion_report(scenario, observed, fid)
        lines.append(
            f"{fid}\t{report.absolute}\t{report.relative}\t{report.presential}"
        )
    atomic_write_text(out_dir / "da_report.tsv", "\n".join(lines) + "\n")
    outputs.append("da_report.tsv")
    scenario_echo = {
        "preset": config["preset"],
        "n_samples": scenario.n_samples,
        "n_features": scenario.n_features,
        "effect": scenario.planted_effect,
        "seed": config["seed"],
        "report_feature": report_feature,
    }
    if scenario.planted is not None:
        scenario_echo["planted_numerator"] = scenario.feature_ids[
            scenario.planted.numerator[0]
        ]
        scenario_echo["planted_denominator"] = scenario.feature_ids[
            scenario.planted.denominator[0]
        ]
    write_config(out_dir / "scenario.cfg", scenario_echo)
    outputs.append("scenario.cfg")


def _cmd_approx(config: dict, out_dir: Path, outputs: list[str]):
    positive, _ = _load_positive_matrix(config)
    clr_x = clr_transform(positive)
    latent_kind = config["latent"]
    if latent_kind == "pca":
        latent, _ = pca_first_component(clr_x, source="matrix")
    elif latent_kind == "pls":
        _require(config, "matrix2")
        second, _ = _load_positive_matrix(config, "matrix2")
        OmicsPair(positive, second)
        latent = pls_first_component(
            clr_x, clr_transform(second), source="matrix,matrix2"
        ).x_scores
    else:
        if config.get("matrix2") is not None:
            second, _ = _load_positive_matrix(config, "matrix2")
            OmicsPair(positive, second)
            target = clr_transform(second)
        else:
            target = clr_x
        nn = encoder_decoder_latent(
            clr_x,
            target,
            EncoderDecoderConfig(
                hidden_units=config["hidden_units"],
                epochs=config["nn_epochs"],
                learning_rate=config["nn_learning_rate"],
                seed=config["seed"],
            ),
            source="matrix",
        )
        latent = nn.encode(clr_x)
    approx = approximate_latent_with_rbb(
        latent, positive, _learner_config(config), mode=config["mode"]
    )
    write_outcome(out_dir / "latent.tsv", positive.sample_ids, latent.scores)
    outputs.append("latent.tsv")
    atomic_write_text(out_dir / "model.json", serialize_model(approx.model))
    outputs.append("model.json")
    _write_json(
        out_dir,
        "approx.json",
        {
            "latent_method": latent.method,
            "latent_r2": approx.latent_r2,
            "active_features": approx.active_features,
            "total_features": approx.total_features,
            "sparsity": approx.sparsity,
            "cv_score": approx.model.cv_score,
            "numerator_features": [
                approx.model.feature_ids[i]
                for i in approx.model.biomarker.numerator
            ],
            "denominator_features": [
                approx.model.feature_ids[i]
                for i in approx.model.biomarker.denominator
            ],
        },
        outputs,
    )


def _cmd_benchmark(config: dict, out_dir: Path, outputs: list[str]):
    if config.get("synthetic"):
        pair = synthetic_omics_pair(
            n_samples=config["n_samples"],
            g_t=config["g_t"],
            g_u=config["g_u"],
            seed=config["seed"],
        )
    else:
        _require(config, "matrix", "matrix2")
        first, _ = _load_positive_matrix(config)
        second, _ = _load_positive_matrix(config, "matrix2")
        pair = OmicsPair(first, second)
    rows = run_benchmark(
        pair,
        config=_learner_config(config),
        nn_config=EncoderDecoderConfig(
            hidden_units=config["hidden_units"],
            epochs=config["nn_epochs"],
            learning_rate=config["nn_learning_rate"],
            seed=config["seed"],
        ),
        mode=config["mode"],
    )
    atomic_write_text(out_dir / "benchmark.tsv", benchmark_table(rows))
    outputs.append("benchmark.tsv")
    _write_json(
        out_dir,
        "benchmark.json",
        {
            "rows": [
                {
                    "objective": r.objective,
                    "method": r.method,
                    "latent": r.latent,
                    "original_r2": r.original_r2,
                    "rbb_source": r.rbb_source,
                    "active_features": r.active_features,
                    "total_features": r.total_features,
                    "rbb_r2": r.rbb_r2,
                    "error": r.error,
                }
                for r in rows
            ]
        },
        outputs,
    )


_COMMANDS = {
    "transform": (_cmd_transform, ("matrix",), ("matrix",)),
    "daa": (_cmd_daa, ("matrix", "outcome"), ("matrix", "outcome")),
    "ratios": (_cmd_ratios, ("matrix", "outcome"), ("matrix", "outcome")),
    "learn": (
        _cmd_learn,
        ("matrix", "outcome"),
        ("matrix", "outcome", "test_matrix", "test_outcome"),
    ),
    "simulate": (_cmd_simulate, (), ()),
    "approx": (_cmd_approx, ("matrix",), ("matrix", "matrix2")),
    "benchmark": (_cmd_benchmark, (), ("matrix", "matrix2")),
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    command = args.command
    started = time.perf_counter()
    try:
        config = _resolve_config(command, args)
        runner, required, input_keys = _COMMANDS[command]
        _require(config, *required)
        digests = _check_inputs_exist(config, input_keys)
        config_path = getattr(args, "config", None)
        if config_path is not None:
            digests.update(_check_inputs_exist({"config": config_path}, ("config",)))
        out_dir = Path(config["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        outputs: list[str] = []
        runner(config, out_dir, outputs)
        manifest = {
            "tool": "ratiomarker",
            "version": __version__,
            "command": command,
            "config": {k: _json_ready(v) for k, v in config.items()},
            "inputs": digests,
            "outputs": outputs,
            "wall_seconds": time.perf_counter() - started,
        }
        atomic_write_text(
            out_dir / "manifest.json",
            json.dumps(manifest, sort_keys=True, indent=2) + "\n",
        )
        print(f"wrote {len(outputs) + 1} files to {out_dir}")
        return EXIT_OK
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except RatiomarkerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
