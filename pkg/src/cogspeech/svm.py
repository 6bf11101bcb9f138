"""Multi-class linear SVM: one-vs-rest L2-regularized hinge classifiers.

Each binary subproblem is solved in the dual by coordinate descent over
the box [0, C], with the bias absorbed as an augmented constant feature.
An active-set shrinking rule skips coordinates pinned at their bounds;
convergence is only declared after a full-set verification pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InputError, NonFiniteValue

SHRINK_EPS = 1e-12


@dataclass(frozen=True)
class SvmConfig:
    C: float = 1.0
    tolerance: float = 1e-4
    max_iterations: int = 5000  # coordinate-descent sweeps per class
    seed: int = 0

    def __post_init__(self):
        if self.C <= 0:
            raise InputError("C must be positive")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "tolerance": self.tolerance,
            "max_iterations": self.max_iterations,
            "seed": self.seed,
        }


@dataclass
class SvmModel:
    classes: tuple[str, ...]
    weights: np.ndarray  # (n_classes, feature_dim)
    biases: np.ndarray  # (n_classes,)
    config: SvmConfig
    # per-class sweep histories, kept for diagnostics; not serialized
    primal_history: dict = field(default_factory=dict, repr=False)
    dual_history: dict = field(default_factory=dict, repr=False)
    alphas: dict = field(default_factory=dict, repr=False)

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]

    def to_json(self) -> str:
        doc = {
            "version": 1,
            "classes": list(self.classes),
            "feature_dim": self.feature_dim,
            "weights": [[format(v, ".17g") for v in row] for row in self.weights],
            "biases": [format(v, ".17g") for v in self.biases],
            "config": self.config.to_dict(),
        }
        return json.dumps(doc, sort_keys=True)


def _solve_binary(
    xy: np.ndarray, q_diag: np.ndarray, cfg: SvmConfig, rng: np.random.Generator,
    x: np.ndarray, y: np.ndarray,
):
    """Dual coordinate descent for one +1/-1 problem.

    xy is the augmented feature matrix with each row pre-multiplied by
    its label, so the gradient at i is xy[i]@w - 1. Coordinates whose
    projected gradient pins them at a bound are shrunk from the active
    set; when the shrunk set converges, the full set is rechecked
    before termination.
    """
    n, dim = xy.shape
    alpha = np.zeros(n)
    w = np.zeros(dim)
    active = np.arange(n)
    c = cfg.C
    tol = cfg.tolerance
    pg_max_old = np.inf
    pg_min_old = -np.inf
    primal_hist = []
    dual_hist = []

    sweeps = 0
    while sweeps < cfg.max_iterations:
        sweeps += 1
        rng.shuffle(active)
        pg_max = -np.inf
        pg_min = np.inf
        keep = np.ones(active.size, dtype=bool)
        for pos in range(active.size):
            i = active[pos]
            g = float(xy[i] @ w) - 1.0
            a = alpha[i]
            if a == 0.0:
                if g > pg_max_old:
                    keep[pos] = False
                    continue
                pg = min(g, 0.0)
            elif a == c:
                if g < pg_min_old:
                    keep[pos] = False
                    continue
                pg = max(g, 0.0)
            else:
                pg = g
            if pg > pg_max:
                pg_max = pg
            if pg < pg_min:
                pg_min = pg
            if abs(pg) > SHRINK_EPS:
                new = min(max(a - g / q_diag[i], 0.0), c)
                if new != a:
                    w += (new - a) * xy[i]
                    alpha[i] = new

        margins = 1.0 - (x @ w) * y
        hinge = float(np.sum(np.clip(margins, 0.0, None)))
        wnorm = float(w @ w)
        primal_hist.append(0.5 * wnorm + c * hinge)
        dual_hist.append(0.5 * wnorm - float(np.sum(alpha)))

        if pg_max - pg_min <= tol:
            if active.size == n:
                break
            # shrunk problem converged: verify against the full set
            active = np.arange(n)
            pg_max_old = np.inf
            pg_min_old = -np.inf
            continue
        active = active[keep]
        if active.size == 0:
            active = np.arange(n)
            pg_max_old = np.inf
            pg_min_old = -np.inf
            continue
        pg_max_old = pg_max if pg_max > 0 else np.inf
        pg_min_old = pg_min if pg_min < 0 else -np.inf

    return w, alpha, primal_hist, dual_hist


def svm_fit(x: np.ndarray, labels: list[str], cfg: SvmConfig, classes=None) -> SvmModel:
    """One-vs-rest fit; per-class problems use independent seed streams."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InputError("svm_fit requires a 2-D matrix with at least 2 rows")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("svm_fit features must be finite")
    labels = list(labels)
    if len(labels) != x.shape[0]:
        raise InputError(f"{len(labels)} labels for {x.shape[0]} rows")
    present = set(labels)
    if classes is None:
        classes = sorted(present)
    else:
        classes = list(classes)
        missing = present - set(classes)
        if missing:
            raise InputError(f"labels outside class list: {sorted(missing)}")
    if len(present) < 2:
        raise InputError("svm_fit requires at least 2 classes")

    n, d = x.shape
    aug = np.hstack([x, np.ones((n, 1))])
    q_diag = np.sum(aug * aug, axis=1)
    label_arr = np.asarray(labels)

    weights = np.zeros((len(classes), d))
    biases = np.zeros(len(classes))
    model = SvmModel(tuple(classes), weights, biases, cfg)
    for ci, cls in enumerate(classes):
        y = np.where(label_arr == cls, 1.0, -1.0)
        xy = aug * y[:, None]
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, ci])))
        w, alpha, primal, dual = _solve_binary(xy, q_diag, cfg, rng, aug, y)
        weights[ci] = w[:-1]
        biases[ci] = w[-1]
        model.primal_history[cls] = primal
        model.dual_history[cls] = dual
        model.alphas[cls] = alpha
    return model


def svm_decision(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """Per-class scores w_c.x + b_c, in model class order."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.feature_dim:
        raise DimensionMismatch(
            f"model expects {model.feature_dim} features, got {x.shape[-1]}"
        )
    return x @ model.weights.T + model.biases


def svm_predict(model: SvmModel, x: np.ndarray) -> list[str]:
    """Argmax over class scores; ties go to the earlier class."""
    scores = np.atleast_2d(svm_decision(model, x))
    picks = np.argmax(scores, axis=1)  # argmax returns the first maximum
    return [model.classes[i] for i in picks]
