"""Fitted tabular transforms: min-max scaling, variance filtering, PCA.

Every transform is fit on training rows only and applied to held-out
rows. PCA eigendecomposition is a cyclic Jacobi iteration on the
symmetric covariance (or Gram matrix when rows < columns) rather than
a library call, so results are deterministic and dependency-free.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InputError
from .psyfeat import FeatureMatrix

logger = logging.getLogger(__name__)

JACOBI_TOL = 1e-11
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class ScalerModel:
    column_names: tuple[str, ...]
    mins: np.ndarray
    maxs: np.ndarray
    constant: np.ndarray  # boolean per column

    def to_dict(self) -> dict:
        return {
            "columns": list(self.column_names),
            "mins": self.mins.tolist(),
            "maxs": self.maxs.tolist(),
            "constant": [bool(c) for c in self.constant],
        }


@dataclass(frozen=True)
class VarianceMask:
    threshold: float
    kept: tuple[int, ...]
    kept_names: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "kept": list(self.kept),
            "kept_names": list(self.kept_names),
        }


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (k, n_columns), rows orthonormal
    explained_variances: np.ndarray  # descending

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variances": self.explained_variances.tolist(),
        }


def scaler_fit(train: FeatureMatrix) -> ScalerModel:
    """Record per-column min/max of the fit data; flag constant columns."""
    if train.rows.shape[0] == 0:
        raise InputError("scaler_fit requires at least one row")
    mins = train.rows.min(axis=0)
    maxs = train.rows.max(axis=0)
    return ScalerModel(tuple(train.column_names), mins, maxs, maxs == mins)


def scaler_apply(model: ScalerModel, x: FeatureMatrix) -> FeatureMatrix:
    """Map to (x-min)/(max-min), clipped to [0,1]; constant columns to 0."""
    if list(x.column_names) != list(model.column_names):
        raise DimensionMismatch(
            f"scaler fit on {len(model.column_names)} columns, got {len(x.column_names)}"
        )
    span = np.where(model.constant, 1.0, model.maxs - model.mins)
    scaled = (x.rows - model.mins) / span
    scaled = np.clip(scaled, 0.0, 1.0)
    scaled[:, model.constant] = 0.0
    return FeatureMatrix(list(x.column_names), scaled, list(x.row_ids))


def variance_filter(train: FeatureMatrix, threshold: float) -> VarianceMask:
    """Keep columns whose population variance exceeds the threshold."""
    variances = train.rows.var(axis=0, ddof=0)
    kept = tuple(int(i) for i in np.flatnonzero(variances > threshold))
    kept_names = tuple(train.column_names[i] for i in kept)
    return VarianceMask(float(threshold), kept, kept_names)


def apply_variance_mask(mask: VarianceMask, x: FeatureMatrix) -> FeatureMatrix:
    for i in mask.kept:
        if i >= len(x.column_names):
            raise DimensionMismatch(f"mask column {i} out of range for {len(x.column_names)} columns")
    return FeatureMatrix(
        [x.column_names[i] for i in mask.kept],
        x.rows[:, list(mask.kept)],
        list(x.row_ids),
    )


def jacobi_eigh(sym: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns,
    unsorted. Rotations repeat in sweeps until the off-diagonal norm
    falls below tol relative to the Frobenius norm.
    """
    a = np.array(sym, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionMismatch("jacobi_eigh requires a square matrix")
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    scale = float(np.sqrt(np.sum(a * a)))
    if scale == 0.0:
        return np.zeros(n), v
    skip = 1e-15 * scale
    for _ in range(max_sweeps):
        off = float(np.sqrt(max(np.sum(a * a) - np.sum(np.diagonal(a) ** 2), 0.0)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    return a.diagonal().copy(), v


def _orthonormalize(components: np.ndarray) -> np.ndarray:
    # two classical Gram-Schmidt passes: the rows arrive nearly
    # orthonormal from the eigensolver, so the second pass reaches
    # machine precision even when eigenvalues cluster
    out = components.copy()
    for _ in range(2):
        for i in range(out.shape[0]):
            if i:
                out[i] -= out[:i].T @ (out[:i] @ out[i])
            out[i] /= np.sqrt(out[i] @ out[i])
    return out


def _fix_signs(components: np.ndarray) -> np.ndarray:
    # Largest-magnitude entry of each component made positive.
    out = components.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def pca_fit(train: np.ndarray, k: int) -> PcaModel:
    """Principal components of mean-centered data, descending variance.

    k is truncated to min(n_rows - 1, n_columns) with a logged warning.
    When rows < columns the eigenproblem is solved on the Gram matrix
    and mapped back, avoiding a columns-squared workload.
    """
    x = np.asarray(train, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InputError("pca_fit requires a 2-D matrix with at least 2 rows")
    if k <= 0:
        raise InputError("pca_fit requires k >= 1")
    n, d = x.shape
    mean = x.mean(axis=0)
    centered = x - mean
    rank_bound = min(n - 1, d)
    if k > rank_bound:
        logger.warning("pca k=%d exceeds rank bound %d; truncating", k, rank_bound)
        k = rank_bound

    if n < d:
        gram = centered @ centered.T / (n - 1)
        evals, evecs = jacobi_eigh(gram)
        order = np.argsort(-evals, kind="stable")
        evals = np.clip(evals[order], 0.0, None)
        evecs = evecs[:, order]
        eps = max(evals[0], 1.0) * 1e-12
        usable = int(np.sum(evals > eps))
        if k > usable:
            logger.warning("pca k=%d exceeds numerical rank %d; truncating", k, usable)
            k = usable
        comps = np.empty((k, d))
        for i in range(k):
            vec = centered.T @ evecs[:, i]
            comps[i] = vec / np.sqrt((n - 1) * evals[i])
        variances = evals[:k]
    else:
        cov = centered.T @ centered / (n - 1)
        evals, evecs = jacobi_eigh(cov)
        order = np.argsort(-evals, kind="stable")
        evals = np.clip(evals[order], 0.0, None)
        comps = evecs[:, order].T[:k].copy()
        variances = evals[:k]

    return PcaModel(mean, _fix_signs(_orthonormalize(comps)), variances.copy())


def pca_transform(model: PcaModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.mean.shape[0]:
        raise DimensionMismatch(
            f"pca fit on {model.mean.shape[0]} columns, got {x.shape[1] if x.ndim == 2 else 'non-matrix'}"
        )
    return (x - model.mean) @ model.components.T


def pca_inverse_transform(model: PcaModel, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[1] != model.k:
        raise DimensionMismatch(f"pca scores have {model.k} columns, got {z.shape}")
    return z @ model.components + model.mean
