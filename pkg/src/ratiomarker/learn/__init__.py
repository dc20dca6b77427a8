from .biomarker import (
    LearnedModel,
    LearnerConfig,
    RatioBiomarker,
    evaluate_biomarker,
    load_model,
    predict,
    serialize_model,
)
from .evolutionary import evolutionary_slr
from .relaxed import relaxed_gradient_learner, relaxed_loss_and_grad
from .stepwise import forward_stepwise_balance

__all__ = [
    "LearnedModel",
    "LearnerConfig",
    "RatioBiomarker",
    "evaluate_biomarker",
    "evolutionary_slr",
    "forward_stepwise_balance",
    "load_model",
    "predict",
    "relaxed_gradient_learner",
    "relaxed_loss_and_grad",
    "serialize_model",
]
