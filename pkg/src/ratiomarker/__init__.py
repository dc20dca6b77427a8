"""Ratio-based biomarker analysis for compositional count data."""

__version__ = "0.1.0"

from .benchmark import (
    BenchmarkRow,
    benchmark_table,
    run_benchmark,
    synthetic_omics_pair,
)
from .composition import (
    CompositionMatrix,
    Outcome,
    StrictlyPositiveMatrix,
    ZeroPolicy,
    apply_zero_policy,
    close_to_proportions,
    clr_transform,
    pairwise_logratios,
)
from .glm import (
    DaaResult,
    FittedGlm,
    ModelSpec,
    RatioAnalysis,
    benjamini_hochberg,
    daa,
    differential_ratio_analysis,
    fit_glm,
)
from .learn import (
    LearnedModel,
    LearnerConfig,
    RatioBiomarker,
    evaluate_biomarker,
    evolutionary_slr,
    forward_stepwise_balance,
    load_model,
    predict,
    relaxed_gradient_learner,
    serialize_model,
)
from .latent import (
    EncoderDecoderConfig,
    LatentRepresentation,
    OmicsPair,
    approximate_latent_with_rbb,
    encoder_decoder_latent,
    least_squares_decode,
    pca_first_component,
    pls_first_component,
    variance_explained,
)
from .simulate import (
    BiasModel,
    GroundTruthScenario,
    da_notion_report,
    depth_confounded_scenario,
    group_outcome,
    observe,
    planted_signal_scenario,
)

__all__ = [
    "BenchmarkRow",
    "BiasModel",
    "CompositionMatrix",
    "DaaResult",
    "EncoderDecoderConfig",
    "FittedGlm",
    "GroundTruthScenario",
    "LatentRepresentation",
    "LearnedModel",
    "LearnerConfig",
    "ModelSpec",
    "OmicsPair",
    "Outcome",
    "RatioAnalysis",
    "RatioBiomarker",
    "StrictlyPositiveMatrix",
    "ZeroPolicy",
    "apply_zero_policy",
    "approximate_latent_with_rbb",
    "benchmark_table",
    "benjamini_hochberg",
    "close_to_proportions",
    "clr_transform",
    "da_notion_report",
    "daa",
    "depth_confounded_scenario",
    "differential_ratio_analysis",
    "encoder_decoder_latent",
    "evaluate_biomarker",
    "evolutionary_slr",
    "fit_glm",
    "forward_stepwise_balance",
    "group_outcome",
    "least_squares_decode",
    "load_model",
    "observe",
    "pairwise_logratios",
    "pca_first_component",
    "planted_signal_scenario",
    "pls_first_component",
    "predict",
    "relaxed_gradient_learner",
    "run_benchmark",
    "serialize_model",
    "synthetic_omics_pair",
    "variance_explained",
]
