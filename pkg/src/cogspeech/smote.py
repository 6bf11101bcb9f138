"""Synthetic minority oversampling on training-fold feature rows.

Each synthetic row is drawn on the closed segment between a real
minority row and one of its k nearest same-class neighbors, so the
output stays inside the minority class's convex hull.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NonFiniteValue


@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    target: str = "match_majority"
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise InputError("k_neighbors must be >= 1")
        if self.target != "match_majority":
            raise InputError(f"unsupported smote target {self.target!r}")


def _nearest_same_class(rows: np.ndarray) -> np.ndarray:
    """Index matrix of same-class neighbors sorted by distance, self excluded."""
    n = rows.shape[0]
    sq = np.sum(rows * rows, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (rows @ rows.T)
    np.fill_diagonal(d2, np.inf)
    return np.argsort(d2, axis=1, kind="stable")[:, : n - 1]


def smote_resample(
    x: np.ndarray, labels: list[str], cfg: SmoteConfig
) -> tuple[np.ndarray, list[str]]:
    """Oversample every minority class up to the majority-class count.

    Original rows pass through bit-identical and first; synthetic rows
    are appended grouped by class in sorted class order. Singleton
    classes have no neighbor and are duplicated verbatim.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise InputError("smote_resample requires a non-empty 2-D matrix")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("smote_resample input contains non-finite values")
    labels = list(labels)
    if len(labels) != x.shape[0]:
        raise InputError(f"{len(labels)} labels for {x.shape[0]} rows")

    classes = sorted(set(labels))
    label_arr = np.asarray(labels)
    counts = {c: int(np.sum(label_arr == c)) for c in classes}
    majority = max(counts.values())
    rng = np.random.default_rng(cfg.seed)

    synth_rows = []
    synth_labels = []
    for cls in classes:
        need = majority - counts[cls]
        if need == 0:
            continue
        idx = np.flatnonzero(label_arr == cls)
        rows = x[idx]
        size = rows.shape[0]
        if size == 1:
            synth_rows.append(np.repeat(rows, need, axis=0))
            synth_labels.extend([cls] * need)
            continue
        k_eff = min(cfg.k_neighbors, size - 1)
        neighbors = _nearest_same_class(rows)[:, :k_eff]
        base = rng.integers(0, size, size=need)
        pick = rng.integers(0, k_eff, size=need)
        delta = rng.random(need)
        nn = neighbors[base, pick]
        synth_rows.append(rows[base] + delta[:, None] * (rows[nn] - rows[base]))
        synth_labels.extend([cls] * need)

    if not synth_rows:
        return x.copy(), labels
    out = np.vstack([x, *synth_rows])
    return out, labels + synth_labels
