"""Pipeline configuration: JSON file plus command-line overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

GROUPINGS = ("psy", "embed", "both")
SCHEMES = ("binary_ad", "three_class", "four_class")
REFIT_MODES = ("per_fold", "global")


@dataclass
class PipelineConfig:
    grouping: str = "psy"
    variance_threshold: float = 1e-4
    lasso_k: int = 28
    pca_k: int = 300
    smote_k_neighbors: int = 5
    svm_c: float = 1.0
    svm_tolerance: float = 1e-4
    svm_max_iterations: int = 5000
    folds_k: int = 10
    master_seed: int = 0
    scheme: str = "four_class"
    refit_mode: str = "per_fold"
    jobs: int = 1

    def __post_init__(self):
        if self.grouping not in GROUPINGS:
            raise ConfigError(f"grouping must be one of {GROUPINGS}, got {self.grouping!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.refit_mode not in REFIT_MODES:
            raise ConfigError(f"refit_mode must be one of {REFIT_MODES}, got {self.refit_mode!r}")
        if self.variance_threshold < 0:
            raise ConfigError("variance_threshold must be >= 0")
        for name in ("lasso_k", "pca_k", "smote_k_neighbors", "svm_max_iterations", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.folds_k < 2:
            raise ConfigError("folds_k must be >= 2")
        if self.svm_c <= 0:
            raise ConfigError("svm_c must be positive")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be a non-negative integer")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def replaced(self, **overrides) -> "PipelineConfig":
        doc = self.to_dict()
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return from_dict(doc)


def from_dict(doc: dict) -> PipelineConfig:
    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    try:
        return PipelineConfig(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> tuple[PipelineConfig, str]:
    """Parse a JSON config file; returns (config, raw file text)."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config root must be a JSON object")
    return from_dict(doc), raw
