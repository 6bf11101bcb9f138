"""Schemes, stratified folds, pooled metrics, and CV orchestration."""

import json

import numpy as np
import pytest

from cogspeech import seeding
from cogspeech.config import PipelineConfig
from cogspeech.corpus import LabeledDataset, Transcript
from cogspeech.errors import ConfigError, InputError
from cogspeech.evaluate import (
    apply_scheme,
    confusion_and_metrics,
    cross_apply,
    fit_fold_transforms,
    get_scheme,
    run_cv,
    stratified_folds,
)
from cogspeech.psyfeat import FeatureMatrix

from conftest import random_embeddings


def label_dataset(labels):
    samples = [
        (Transcript(id=f"t{i}", raw_text="x", clean_text="x."), lab)
        for i, lab in enumerate(labels)
    ]
    return LabeledDataset(samples)


def recount(true, predicted, classes):
    """Independent confusion recount used as the metrics oracle."""
    out = []
    for cls in classes:
        tp = fp = fn = tn = 0
        for t, p in zip(true, predicted):
            if t == cls and p == cls:
                tp += 1
            elif t != cls and p == cls:
                fp += 1
            elif t == cls:
                fn += 1
            else:
                tn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall
            else 0.0
        )
        out.append((tp, fp, fn, tn, precision, recall, f1))
    return out


# ---------------------------------------------------------------- schemes


def test_scheme_lookup():
    assert get_scheme("binary_ad").classes == ("nonAD", "AD")
    assert get_scheme("three_class").classes == ("control", "mci", "probable_ad")
    assert get_scheme("four_class").classes == (
        "control",
        "mci",
        "possible_ad",
        "probable_ad",
    )
    with pytest.raises(ConfigError):
        get_scheme("five_class")


def test_binary_scheme_merges_ad_grades_and_drops_mci():
    ds = label_dataset(
        ["control", "mci", "possible_ad", "probable_ad", "control", "mci"]
    )
    out = apply_scheme(ds, get_scheme("binary_ad"))
    assert out.labels == ["nonAD", "AD", "AD", "nonAD"]
    assert out.ids == ["t0", "t2", "t3", "t4"]  # order preserved, mci gone


def test_three_class_scheme_drops_possible_ad_only():
    ds = label_dataset(["control", "possible_ad", "mci", "probable_ad", "possible_ad"])
    out = apply_scheme(ds, get_scheme("three_class"))
    assert out.labels == ["control", "mci", "probable_ad"]
    assert len(ds) - len(out) == 2


def test_four_class_scheme_keeps_everything():
    ds = label_dataset(["control", "mci", "possible_ad", "probable_ad"])
    out = apply_scheme(ds, get_scheme("four_class"))
    assert out.labels == ds.labels


def test_scheme_needs_two_surviving_classes():
    ds = label_dataset(["control", "mci", "control"])
    with pytest.raises(InputError):
        apply_scheme(ds, get_scheme("binary_ad"))  # only nonAD survives


# ------------------------------------------------------------ stratification


def test_folds_partition_exactly():
    labels = ["a"] * 17 + ["b"] * 9 + ["c"] * 4
    plan = stratified_folds(labels, 4, seed=0)
    flat = sorted(i for fold in plan.test_indices for i in fold)
    assert flat == list(range(30))


def test_folds_proportional_within_one():
    labels = ["a"] * 23 + ["b"] * 11
    plan = stratified_folds(labels, 5, seed=1)
    arr = np.asarray(labels)
    for fold in plan.test_indices:
        for cls, total in (("a", 23), ("b", 11)):
            got = sum(1 for i in fold if arr[i] == cls)
            assert abs(got - total / 5) < 1.0


def test_folds_deterministic_by_seed():
    labels = ["a"] * 12 + ["b"] * 8
    assert stratified_folds(labels, 4, 9).test_indices == stratified_folds(labels, 4, 9).test_indices
    assert stratified_folds(labels, 4, 9).test_indices != stratified_folds(labels, 4, 10).test_indices


def test_folds_warn_when_class_smaller_than_k():
    plan = stratified_folds(["a"] * 12 + ["b"] * 3, 5, seed=0)
    assert len(plan.warnings) == 1
    assert "'b'" in plan.warnings[0]


def test_folds_validation():
    with pytest.raises(InputError):
        stratified_folds(["a", "b"], 1, 0)
    with pytest.raises(InputError):
        stratified_folds([], 2, 0)


# ---------------------------------------------------------------- metrics


def test_metrics_match_independent_recount():
    rng = np.random.default_rng(51)
    classes = ("x", "y", "z")
    for _ in range(20):
        n = int(rng.integers(1, 40))
        true = [classes[i] for i in rng.integers(0, 3, size=n)]
        pred = [classes[i] for i in rng.integers(0, 3, size=n)]
        doc = confusion_and_metrics(true, pred, classes)
        expected = recount(true, pred, classes)
        for entry, (tp, fp, fn, tn, precision, recall, f1) in zip(
            doc["per_class"], expected
        ):
            assert (entry["tp"], entry["fp"], entry["fn"], entry["tn"]) == (tp, fp, fn, tn)
            assert abs(entry["precision"] - precision) <= 1e-12
            assert abs(entry["recall"] - recall) <= 1e-12
            assert abs(entry["f1"] - f1) <= 1e-12
        correct = sum(1 for t, p in zip(true, pred) if t == p)
        assert abs(doc["accuracy"] - correct / n) <= 1e-12


def test_metrics_flag_undefined_ratios():
    doc = confusion_and_metrics(["a", "a"], ["b", "b"], ("a", "b"))
    by_label = {e["label"]: e for e in doc["per_class"]}
    a = by_label["a"]
    assert a["precision_undefined"] and a["precision"] == 0.0  # never predicted
    assert not a["recall_undefined"] and a["recall"] == 0.0
    assert a["f1_undefined"] and a["f1"] == 0.0
    b = by_label["b"]
    assert b["recall_undefined"] and b["recall"] == 0.0  # never true
    assert not b["precision_undefined"]


def test_metrics_validation():
    with pytest.raises(InputError):
        confusion_and_metrics(["a"], ["a", "b"], ("a", "b"))
    with pytest.raises(InputError):
        confusion_and_metrics(["q"], ["a"], ("a", "b"))
    with pytest.raises(InputError):
        confusion_and_metrics(["a"], ["q"], ("a", "b"))


# ------------------------------------------------------- per-fold transforms


def _cfg(**overrides):
    # trimmed solver budgets: these tests exercise orchestration, not
    # solver accuracy, and the full budgets cost minutes at this scale
    base = dict(
        grouping="psy",
        folds_k=5,
        lasso_k=6,
        pca_k=4,
        master_seed=3,
        svm_max_iterations=300,
        svm_tolerance=1e-3,
    )
    base.update(overrides)
    return PipelineConfig(**base)


def test_fitted_fold_width_psy(small_corpus, small_psy):
    cfg = _cfg()
    fitted = fit_fold_transforms(small_psy, None, small_corpus.labels, cfg)
    out = fitted.transform(small_psy, None)
    assert out.rows.shape == (len(small_corpus), 6)
    assert list(out.column_names) == list(fitted.selection.kept_names)


def test_fitted_fold_width_embed(small_corpus, small_embed):
    cfg = _cfg(grouping="embed")
    fitted = fit_fold_transforms(None, small_embed, small_corpus.labels, cfg)
    out = fitted.transform(None, small_embed)
    assert out.rows.shape == (len(small_corpus), 4)
    assert out.column_names == ["pc0", "pc1", "pc2", "pc3"]


def test_fitted_fold_width_both_concatenates(small_corpus, small_psy, small_embed):
    cfg = _cfg(grouping="both")
    fitted = fit_fold_transforms(small_psy, small_embed, small_corpus.labels, cfg)
    out = fitted.transform(small_psy, small_embed)
    assert out.rows.shape == (len(small_corpus), 10)
    assert out.column_names[-4:] == ["pc0", "pc1", "pc2", "pc3"]


def test_fitted_fold_requires_matching_inputs(small_corpus, small_psy):
    with pytest.raises(ConfigError):
        fit_fold_transforms(None, None, small_corpus.labels, _cfg())
    with pytest.raises(ConfigError):
        fit_fold_transforms(small_psy, None, small_corpus.labels, _cfg(grouping="embed"))


def test_params_hash_tracks_training_data(small_corpus, small_psy):
    cfg = _cfg()
    whole = fit_fold_transforms(small_psy, None, small_corpus.labels, cfg)
    part = fit_fold_transforms(
        small_psy.subset_by_ids(small_corpus.ids[:30]),
        None,
        small_corpus.labels[:30],
        cfg,
    )
    assert whole.params_hash() == whole.params_hash()
    assert whole.params_hash() != part.params_hash()


# ------------------------------------------------------------------ run_cv


@pytest.fixture(scope="module")
def cv_clean(small_corpus, small_psy):
    """One canonical run shared by the read-only run_cv assertions."""
    return run_cv(small_corpus, get_scheme("four_class"), _cfg(), psy=small_psy)


def test_run_cv_report_shape(small_corpus, cv_clean):
    doc = cv_clean
    assert doc["scheme"] == "four_class"
    assert doc["class_counts"] == {
        "control": 14, "mci": 10, "possible_ad": 8, "probable_ad": 12,
    }
    assert len(doc["folds"]) == 5
    assert doc["metrics"]["n_samples"] == 44
    # every sample predicted exactly once
    seen = sorted(p["id"] for p in doc["predictions"])
    assert seen == sorted(small_corpus.ids)
    for fold in doc["folds"]:
        assert fold["feature_width"] == 6
        assert len(fold["selected_features"]) == 6


def test_run_cv_pooled_metrics_recount(cv_clean):
    doc = cv_clean
    true = [p["true"] for p in doc["predictions"]]
    pred = [p["predicted"] for p in doc["predictions"]]
    expected = recount(true, pred, tuple(doc["classes"]))
    for entry, (tp, fp, fn, tn, precision, recall, f1) in zip(
        doc["metrics"]["per_class"], expected
    ):
        assert (entry["tp"], entry["fp"], entry["fn"], entry["tn"]) == (tp, fp, fn, tn)
        assert abs(entry["f1"] - f1) <= 1e-12


def test_run_cv_is_deterministic(small_corpus, small_psy, cv_clean):
    again = run_cv(small_corpus, get_scheme("four_class"), _cfg(), psy=small_psy)
    assert json.dumps(again, sort_keys=True) == json.dumps(cv_clean, sort_keys=True)


def test_run_cv_results_identical_across_job_counts(small_corpus, small_psy, cv_clean):
    b = run_cv(small_corpus, get_scheme("four_class"), _cfg(jobs=2), psy=small_psy)
    assert json.dumps(b, sort_keys=True) == json.dumps(cv_clean, sort_keys=True)


def test_run_cv_seed_changes_results(small_corpus, small_psy, cv_clean):
    b = run_cv(small_corpus, get_scheme("four_class"), _cfg(master_seed=4), psy=small_psy)
    # fold assignment shifts with the seed, so fold diagnostics differ
    assert json.dumps(b, sort_keys=True) != json.dumps(cv_clean, sort_keys=True)


def test_run_cv_test_rows_cannot_move_fitted_params(small_corpus, small_psy, cv_clean):
    cfg = _cfg()
    clean = cv_clean
    plan = stratified_folds(
        small_corpus.labels,
        cfg.folds_k,
        seeding.substream_seed(cfg.master_seed, seeding.STAGE_FOLDS),
    )
    poisoned_rows = small_psy.rows.copy()
    poisoned_rows[list(plan.test_indices[0])] = 1e6
    poisoned = FeatureMatrix(
        small_psy.column_names, poisoned_rows, list(small_psy.row_ids)
    )
    doc = run_cv(small_corpus, get_scheme("four_class"), cfg, psy=poisoned)
    assert doc["folds"][0]["fitted_hash"] == clean["folds"][0]["fitted_hash"]


def test_run_cv_train_rows_do_move_fitted_params(small_corpus, small_psy, cv_clean):
    cfg = _cfg()
    clean = cv_clean
    plan = stratified_folds(
        small_corpus.labels,
        cfg.folds_k,
        seeding.substream_seed(cfg.master_seed, seeding.STAGE_FOLDS),
    )
    train_row = plan.test_indices[1][0]  # a fold-0 training row
    assert train_row not in plan.test_indices[0]
    poisoned_rows = small_psy.rows.copy()
    poisoned_rows[train_row] = 1e6
    poisoned = FeatureMatrix(
        small_psy.column_names, poisoned_rows, list(small_psy.row_ids)
    )
    doc = run_cv(small_corpus, get_scheme("four_class"), cfg, psy=poisoned)
    assert doc["folds"][0]["fitted_hash"] != clean["folds"][0]["fitted_hash"]


def test_run_cv_global_refit_mode_runs(small_corpus, small_psy):
    doc = run_cv(
        small_corpus,
        get_scheme("four_class"),
        _cfg(refit_mode="global"),
        psy=small_psy,
    )
    assert len(doc["folds"]) == 5


def test_run_cv_missing_matrix_rejected(small_corpus):
    with pytest.raises(ConfigError):
        run_cv(small_corpus, get_scheme("four_class"), _cfg(), psy=None)


def test_run_cv_embed_grouping(small_corpus, small_embed):
    doc = run_cv(
        small_corpus,
        get_scheme("four_class"),
        _cfg(grouping="embed"),
        embed=small_embed,
    )
    for fold in doc["folds"]:
        assert fold["feature_width"] == 4
        assert fold["pca_components"] == 4


# -------------------------------------------------------------- cross_apply


def test_cross_apply_probes_excluded_rows(small_corpus, small_psy):
    result = cross_apply(
        small_corpus, get_scheme("three_class"), "possible_ad", _cfg(), psy=small_psy
    )
    assert result["probe_count"] == 8
    assert sum(result["histogram"].values()) == 8
    assert set(result["histogram"]) == {"control", "mci", "probable_ad"}
    assert [p["id"] for p in result["predictions"]] == [
        i for i in small_corpus.ids if i.startswith("possible_ad")
    ]


def test_cross_apply_rejects_non_excluded_probe(small_corpus, small_psy):
    with pytest.raises(InputError):
        cross_apply(
            small_corpus, get_scheme("three_class"), "control", _cfg(), psy=small_psy
        )


def test_cross_apply_deterministic(small_corpus, small_psy):
    a = cross_apply(
        small_corpus, get_scheme("binary_ad"), "mci", _cfg(), psy=small_psy
    )
    b = cross_apply(
        small_corpus, get_scheme("binary_ad"), "mci", _cfg(), psy=small_psy
    )
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_random_embeddings_helper_is_deterministic(small_corpus):
    a = random_embeddings(small_corpus.ids, 5, seed=1)
    b = random_embeddings(small_corpus.ids, 5, seed=1)
    np.testing.assert_array_equal(a.rows, b.rows)
