"""Speech-transcript classification pipeline.

Parses clinical picture-description transcripts, derives transparent
psycholinguistic indices or ingests precomputed embeddings, and
evaluates linear SVM classifiers over stratified cross-validation with
minority oversampling confined to training folds.
"""

from .config import PipelineConfig
from .corpus import (
    DIAGNOSIS_LABELS,
    LabeledDataset,
    Transcript,
    load_manifest,
    parse_chat,
    preprocess,
)
from .evaluate import (
    apply_scheme,
    confusion_and_metrics,
    cross_apply,
    get_scheme,
    run_cv,
    stratified_folds,
)
from .psyfeat import FeatureMatrix, extract_features, extract_matrix, registry_v1

__version__ = "1.0.0"

__all__ = [
    "DIAGNOSIS_LABELS",
    "FeatureMatrix",
    "LabeledDataset",
    "PipelineConfig",
    "Transcript",
    "apply_scheme",
    "confusion_and_metrics",
    "cross_apply",
    "extract_features",
    "extract_matrix",
    "get_scheme",
    "load_manifest",
    "parse_chat",
    "preprocess",
    "registry_v1",
    "run_cv",
    "stratified_folds",
    "__version__",
]
