"""Experiment orchestration: schemes, stratified CV, pooled metrics.

Per fold, every fitted stage (scaling, variance filtering, feature
selection, PCA, SMOTE, SVM) sees training rows only; held-out rows are
transformed and predicted without touching any fit. Confusion counts
are pooled across folds and per-class metrics computed from the pooled
counts.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import seeding
from .corpus import DIAGNOSIS_LABELS, LabeledDataset
from .errors import ConfigError, FoldError, InputError, PipelineError
from .lasso import SelectionMask, apply_selection, select_topk
from .psyfeat import FeatureMatrix
from .smote import SmoteConfig, smote_resample
from .svm import SvmConfig, svm_fit, svm_predict
from .tabular import (
    PcaModel,
    apply_variance_mask,
    pca_fit,
    pca_transform,
    scaler_apply,
    scaler_fit,
    variance_filter,
)

logger = logging.getLogger(__name__)

EXCLUDED = None

GROUPINGS = ("psy", "embed", "both")


@dataclass(frozen=True)
class ClassScheme:
    name: str
    classes: tuple[str, ...]
    mapping: dict  # DiagnosisLabel -> scheme class, or None for excluded


_SCHEMES = {
    "binary_ad": ClassScheme(
        "binary_ad",
        ("nonAD", "AD"),
        {"control": "nonAD", "mci": EXCLUDED, "possible_ad": "AD", "probable_ad": "AD"},
    ),
    "three_class": ClassScheme(
        "three_class",
        ("control", "mci", "probable_ad"),
        {"control": "control", "mci": "mci", "possible_ad": EXCLUDED, "probable_ad": "probable_ad"},
    ),
    "four_class": ClassScheme(
        "four_class",
        DIAGNOSIS_LABELS,
        {label: label for label in DIAGNOSIS_LABELS},
    ),
}


def get_scheme(name: str) -> ClassScheme:
    try:
        return _SCHEMES[name]
    except KeyError:
        raise ConfigError(f"unknown scheme {name!r}; choose from {sorted(_SCHEMES)}") from None


def apply_scheme(ds: LabeledDataset, scheme: ClassScheme) -> LabeledDataset:
    """Relabel per scheme; excluded rows dropped, order preserved."""
    if not ds.samples:
        raise InputError("empty dataset")
    kept = []
    for transcript, label in ds.samples:
        mapped = scheme.mapping[label]
        if mapped is not EXCLUDED:
            kept.append((transcript, mapped))
    out = LabeledDataset(kept)
    if len(set(out.labels)) < 2:
        raise InputError(f"scheme {scheme.name} leaves fewer than 2 classes")
    return out


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    test_indices: tuple[tuple[int, ...], ...]
    warnings: tuple[str, ...] = ()


def stratified_folds(labels: list[str], k: int, seed: int) -> FoldPlan:
    """Shuffle each class's indices, deal round-robin to k folds."""
    if k < 2:
        raise InputError("stratified_folds requires k >= 2")
    labels = list(labels)
    if not labels:
        raise InputError("no labels to fold")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    warnings = []
    label_arr = np.asarray(labels)
    for cls in sorted(set(labels)):
        idx = np.flatnonzero(label_arr == cls)
        if idx.size < k:
            msg = f"class {cls!r} has {idx.size} samples for {k} folds; some folds will lack it"
            warnings.append(msg)
            logger.warning(msg)
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            folds[pos % k].append(int(i))
    return FoldPlan(k, int(seed), tuple(tuple(sorted(f)) for f in folds), tuple(warnings))


def confusion_and_metrics(
    true: list[str], predicted: list[str], classes: tuple[str, ...]
) -> dict:
    """Per-class TP/FP/FN/TN and P/R/F1 plus overall accuracy.

    Zero-denominator ratios are reported as 0 with an explicit flag.
    """
    if len(true) != len(predicted):
        raise InputError(f"{len(true)} true labels vs {len(predicted)} predictions")
    class_set = set(classes)
    for lab in true:
        if lab not in class_set:
            raise InputError(f"true label {lab!r} outside class list")
    for lab in predicted:
        if lab not in class_set:
            raise InputError(f"predicted label {lab!r} outside class list")
    total = len(true)
    per_class = []
    correct = sum(1 for t, p in zip(true, predicted) if t == p)
    for cls in classes:
        tp = sum(1 for t, p in zip(true, predicted) if t == cls and p == cls)
        fp = sum(1 for t, p in zip(true, predicted) if t != cls and p == cls)
        fn = sum(1 for t, p in zip(true, predicted) if t == cls and p != cls)
        tn = total - tp - fp - fn
        p_undef = (tp + fp) == 0
        r_undef = (tp + fn) == 0
        precision = 0.0 if p_undef else tp / (tp + fp)
        recall = 0.0 if r_undef else tp / (tp + fn)
        f_undef = (precision + recall) == 0
        f1 = 0.0 if f_undef else 2 * precision * recall / (precision + recall)
        per_class.append(
            {
                "label": cls,
                "tp": tp,
                "fp": fp,
                "fn": fn,
                "tn": tn,
                "precision": precision,
                "recall": recall,
                "f1": f1,
                "precision_undefined": p_undef,
                "recall_undefined": r_undef,
                "f1_undefined": f_undef,
            }
        )
    return {
        "per_class": per_class,
        "accuracy": correct / total if total else 0.0,
        "n_samples": total,
    }


@dataclass(frozen=True)
class FittedFold:
    """Transforms fitted on one training fold, applicable to any rows."""

    scaler: object | None
    variance_mask: object | None
    selection: SelectionMask | None
    pca: PcaModel | None
    grouping: str

    def transform(
        self, psy: FeatureMatrix | None, embed: FeatureMatrix | None
    ) -> FeatureMatrix:
        parts = []
        if self.grouping in ("psy", "both"):
            m = scaler_apply(self.scaler, psy)
            m = apply_variance_mask(self.variance_mask, m)
            m = apply_selection(self.selection, m)
            parts.append(m)
        if self.grouping in ("embed", "both"):
            scores = pca_transform(self.pca, embed.rows)
            names = [f"pc{i}" for i in range(scores.shape[1])]
            parts.append(FeatureMatrix(names, scores, list(embed.row_ids)))
        if len(parts) == 1:
            return parts[0]
        return FeatureMatrix(
            parts[0].column_names + parts[1].column_names,
            np.hstack([parts[0].rows, parts[1].rows]),
            list(parts[0].row_ids),
        )

    def params_hash(self) -> str:
        doc = {"grouping": self.grouping}
        if self.scaler is not None:
            doc["scaler"] = self.scaler.to_dict()
            doc["variance_mask"] = self.variance_mask.to_dict()
            doc["selection"] = self.selection.to_dict()
        if self.pca is not None:
            doc["pca"] = self.pca.to_dict()
        blob = json.dumps(doc, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def fit_fold_transforms(
    train_psy: FeatureMatrix | None,
    train_embed: FeatureMatrix | None,
    train_labels: list[str],
    cfg,
) -> FittedFold:
    """Fit the per-fold feature assembly on training rows only."""
    grouping = cfg.grouping
    scaler = mask = selection = pca = None
    if grouping in ("psy", "both"):
        if train_psy is None:
            raise ConfigError("grouping includes psycholinguistic features but none were given")
        scaler = scaler_fit(train_psy)
        scaled = scaler_apply(scaler, train_psy)
        mask = variance_filter(scaled, cfg.variance_threshold)
        if not mask.kept:
            raise InputError("variance filter removed every column")
        masked = apply_variance_mask(mask, scaled)
        raw = select_topk(masked.rows, train_labels, cfg.lasso_k)
        selection = SelectionMask(
            raw.kept, raw.k_requested, tuple(masked.column_names[i] for i in raw.kept)
        )
        if not selection.kept:
            raise InputError("lasso selection kept no columns")
    if grouping in ("embed", "both"):
        if train_embed is None:
            raise ConfigError("grouping includes embeddings but no embedding matrix was given")
        pca = pca_fit(train_embed.rows, cfg.pca_k)
    if grouping not in GROUPINGS:
        raise ConfigError(f"unknown grouping {grouping!r}")
    return FittedFold(scaler, mask, selection, pca, grouping)


def _run_one_fold(args):
    (
        fold_i,
        train_idx,
        test_idx,
        psy,
        embed,
        labels,
        classes,
        cfg,
        master_seed,
        global_fit,
    ) = args
    try:
        train_labels = [labels[i] for i in train_idx]
        tr_psy = psy.subset_by_ids([psy.row_ids[i] for i in train_idx]) if psy else None
        tr_embed = embed.subset_by_ids([embed.row_ids[i] for i in train_idx]) if embed else None
        if global_fit is not None:
            fitted = global_fit
        else:
            fitted = fit_fold_transforms(tr_psy, tr_embed, train_labels, cfg)
        train_x = fitted.transform(tr_psy, tr_embed)

        smote_cfg = SmoteConfig(
            k_neighbors=cfg.smote_k_neighbors,
            seed=seeding.substream_seed(master_seed, seeding.STAGE_SMOTE, fold_i),
        )
        res_x, res_labels = smote_resample(train_x.rows, train_labels, smote_cfg)

        svm_cfg = SvmConfig(
            C=cfg.svm_c,
            tolerance=cfg.svm_tolerance,
            max_iterations=cfg.svm_max_iterations,
            seed=seeding.substream_seed(master_seed, seeding.STAGE_SVM, fold_i),
        )
        model = svm_fit(res_x, res_labels, svm_cfg, classes=classes)

        te_psy = psy.subset_by_ids([psy.row_ids[i] for i in test_idx]) if psy else None
        te_embed = embed.subset_by_ids([embed.row_ids[i] for i in test_idx]) if embed else None
        test_x = fitted.transform(te_psy, te_embed)
        predictions = svm_predict(model, test_x.rows)

        fitted_hash = hashlib.sha256(
            (fitted.params_hash() + model.to_json()).encode()
        ).hexdigest()
        diag = {
            "fold": fold_i,
            "train_size": len(train_idx),
            "test_size": len(test_idx),
            "train_class_counts": {c: train_labels.count(c) for c in classes},
            "test_class_counts": {c: [labels[i] for i in test_idx].count(c) for c in classes},
            "feature_width": train_x.rows.shape[1],
            "selected_features": list(fitted.selection.kept_names) if fitted.selection else [],
            "pca_components": fitted.pca.k if fitted.pca else 0,
            "fitted_hash": fitted_hash,
        }
        return fold_i, list(test_idx), predictions, diag
    except PipelineError as exc:
        raise FoldError(fold_i, exc) from exc


def run_cv(
    ds: LabeledDataset,
    scheme: ClassScheme,
    cfg,
    psy: FeatureMatrix | None = None,
    embed: FeatureMatrix | None = None,
) -> dict:
    """Stratified k-fold evaluation; returns the report document."""
    schemed = apply_scheme(ds, scheme)
    labels = schemed.labels
    ids = schemed.ids
    psy_m = psy.subset_by_ids(ids) if psy is not None else None
    embed_m = embed.subset_by_ids(ids) if embed is not None else None
    if cfg.grouping in ("psy", "both") and psy_m is None:
        raise ConfigError("grouping requires a psycholinguistic feature matrix")
    if cfg.grouping in ("embed", "both") and embed_m is None:
        raise ConfigError("grouping requires an embedding matrix")

    plan = stratified_folds(
        labels, cfg.folds_k, seeding.substream_seed(cfg.master_seed, seeding.STAGE_FOLDS)
    )
    # Replication mode: transforms fit once on all rows, accepting the
    # leakage that per-fold refitting (the default) avoids.
    global_fit = None
    if cfg.refit_mode == "global":
        global_fit = fit_fold_transforms(psy_m, embed_m, labels, cfg)
    elif cfg.refit_mode != "per_fold":
        raise ConfigError(f"unknown refit mode {cfg.refit_mode!r}")

    all_idx = set(range(len(labels)))
    fold_args = []
    for fold_i, test_idx in enumerate(plan.test_indices):
        train_idx = tuple(sorted(all_idx - set(test_idx)))
        fold_args.append(
            (
                fold_i,
                train_idx,
                test_idx,
                psy_m,
                embed_m,
                labels,
                scheme.classes,
                cfg,
                cfg.master_seed,
                global_fit,
            )
        )

    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_one_fold, fold_args))
    else:
        results = [_run_one_fold(a) for a in fold_args]
    results.sort(key=lambda r: r[0])

    test_order = [i for _, test_idx, _, _ in results for i in test_idx]
    predicted = [p for _, _, preds, _ in results for p in preds]
    true = [labels[i] for i in test_order]
    metrics = confusion_and_metrics(true, predicted, scheme.classes)

    predictions_doc = [
        {"id": ids[i], "true": labels[i], "predicted": p}
        for i, p in zip(test_order, predicted)
    ]
    return {
        "scheme": scheme.name,
        "classes": list(scheme.classes),
        "class_counts": {c: labels.count(c) for c in scheme.classes},
        "metrics": metrics,
        "folds": [diag for _, _, _, diag in results],
        "fold_warnings": list(plan.warnings),
        "predictions": predictions_doc,
    }


def cross_apply(
    ds: LabeledDataset,
    train_scheme: ClassScheme,
    probe_label: str,
    cfg,
    psy: FeatureMatrix | None = None,
    embed: FeatureMatrix | None = None,
) -> dict:
    """Train once on the scheme-filtered data, predict the probe rows."""
    if train_scheme.mapping.get(probe_label) is not EXCLUDED:
        raise InputError(
            f"probe label {probe_label!r} is not excluded by scheme {train_scheme.name}"
        )
    probe_ids = [t.id for t, lab in ds.samples if lab == probe_label]
    if not probe_ids:
        raise InputError(f"no rows labeled {probe_label!r} to probe")

    schemed = apply_scheme(ds, train_scheme)
    train_labels = schemed.labels
    train_ids = schemed.ids
    tr_psy = psy.subset_by_ids(train_ids) if psy is not None else None
    tr_embed = embed.subset_by_ids(train_ids) if embed is not None else None
    fitted = fit_fold_transforms(tr_psy, tr_embed, train_labels, cfg)
    train_x = fitted.transform(tr_psy, tr_embed)

    smote_cfg = SmoteConfig(
        k_neighbors=cfg.smote_k_neighbors,
        seed=seeding.substream_seed(cfg.master_seed, seeding.STAGE_CROSS, 0),
    )
    res_x, res_labels = smote_resample(train_x.rows, train_labels, smote_cfg)
    svm_cfg = SvmConfig(
        C=cfg.svm_c,
        tolerance=cfg.svm_tolerance,
        max_iterations=cfg.svm_max_iterations,
        seed=seeding.substream_seed(cfg.master_seed, seeding.STAGE_CROSS, 1),
    )
    model = svm_fit(res_x, res_labels, svm_cfg, classes=train_scheme.classes)

    pr_psy = psy.subset_by_ids(probe_ids) if psy is not None else None
    pr_embed = embed.subset_by_ids(probe_ids) if embed is not None else None
    probe_x = fitted.transform(pr_psy, pr_embed)
    predictions = svm_predict(model, probe_x.rows)

    histogram = {c: 0 for c in train_scheme.classes}
    for p in predictions:
        histogram[p] += 1
    return {
        "scheme": train_scheme.name,
        "probe_label": probe_label,
        "probe_count": len(probe_ids),
        "histogram": histogram,
        "predictions": [
            {"id": rid, "predicted": p} for rid, p in zip(probe_ids, predictions)
        ],
    }
