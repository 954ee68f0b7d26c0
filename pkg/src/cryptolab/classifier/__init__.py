"""Classifier bench and repeated-holdout evaluation."""
from .core import (
    MODEL_KINDS,
    Dataset,
    EvaluationReport,
    Model,
    Scores,
    Standardizer,
    aggregate_website,
    evaluate,
    macro_scores,
    predict,
    stratified_split,
    train,
)
from .synthetic import CLASS_STATS, synthetic_dataset

__all__ = [
    "CLASS_STATS",
    "MODEL_KINDS",
    "Dataset",
    "EvaluationReport",
    "Model",
    "Scores",
    "Standardizer",
    "aggregate_website",
    "evaluate",
    "macro_scores",
    "predict",
    "stratified_split",
    "synthetic_dataset",
    "train",
]
