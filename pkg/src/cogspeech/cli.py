"""Command-line entry points for the transcript classification pipeline.

Exit codes: 0 success, 1 pipeline failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import config as config_mod
from . import embeddings, evaluate, psyfeat, reporting, synth
from .corpus import DIAGNOSIS_LABELS, load_manifest
from .errors import InputError, PipelineError


def _parse_counts(text: str) -> tuple[int, int, int, int]:
    parts = text.split(",")
    if len(parts) != 4:
        raise InputError("counts must be four comma-separated integers")
    try:
        counts = tuple(int(p) for p in parts)
    except ValueError:
        raise InputError(f"counts must be integers, got {text!r}") from None
    return counts


def _resolve_config(args) -> tuple[config_mod.PipelineConfig, str | None]:
    if getattr(args, "config", None):
        cfg, echo = config_mod.load_config(args.config)
    else:
        cfg, echo = config_mod.PipelineConfig(), None
    overrides = {}
    for cli_name, cfg_name in (
        ("scheme", "scheme"),
        ("grouping", "grouping"),
        ("seed", "master_seed"),
        ("jobs", "jobs"),
    ):
        value = getattr(args, cli_name, None)
        if value is not None:
            overrides[cfg_name] = value
    return cfg.replaced(**overrides), echo


def _gather_matrices(args, cfg, dataset):
    """Feature inputs for the chosen grouping, plus files to hash."""
    hashed = [Path(args.manifest)]
    manifest_dir = Path(args.manifest).parent
    for _, _, rel in _manifest_rows(args.manifest):
        p = Path(rel)
        hashed.append(p if p.is_absolute() else manifest_dir / p)

    psy_m = None
    if cfg.grouping in ("psy", "both"):
        if args.features:
            psy_m = psyfeat.load_feature_csv(args.features, dataset)
            hashed.append(Path(args.features))
        else:
            psy_m = psyfeat.extract_matrix(dataset)
    embed_m = None
    if cfg.grouping in ("embed", "both"):
        if not args.embeddings:
            raise InputError(
                f"grouping {cfg.grouping!r} needs --embeddings with an embedding CSV"
            )
        embed_m = embeddings.load_embedding_csv(args.embeddings, dataset)
        hashed.append(Path(args.embeddings))
    return psy_m, embed_m, hashed


def _manifest_rows(path):
    lines = Path(path).read_text("utf-8").splitlines()
    for line in lines[1:]:
        if line.strip():
            sample_id, label, rel = line.split("\t")
            yield sample_id.strip(), label.strip(), rel.strip()


def cmd_extract_features(args) -> int:
    dataset = load_manifest(args.manifest)
    matrix = psyfeat.extract_matrix(dataset)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    psyfeat.write_feature_csv(out, matrix)
    print(f"wrote {len(matrix.row_ids)} rows x {len(matrix.column_names)} features to {out}")
    return 0


def cmd_train_eval(args) -> int:
    cfg, echo = _resolve_config(args)
    dataset = load_manifest(args.manifest)
    psy_m, embed_m, hashed = _gather_matrices(args, cfg, dataset)
    scheme = evaluate.get_scheme(cfg.scheme)
    cv_doc = evaluate.run_cv(dataset, scheme, cfg, psy=psy_m, embed=embed_m)
    doc = reporting.build_report(cv_doc, cfg, reporting.hash_files(hashed), echo)
    json_path, md_path = reporting.write_reports(args.out, doc)
    accuracy = doc["metrics"]["accuracy"]
    print(f"wrote {json_path} and {md_path} (pooled accuracy {accuracy:.4f})")
    return 0


def cmd_cross_apply(args) -> int:
    cfg, _ = _resolve_config(args)
    dataset = load_manifest(args.manifest)
    psy_m, embed_m, _ = _gather_matrices(args, cfg, dataset)
    scheme = evaluate.get_scheme(cfg.scheme)
    result = evaluate.cross_apply(
        dataset, scheme, args.probe_label, cfg, psy=psy_m, embed=embed_m
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "cross_apply.json"
    out.write_text(json.dumps(result, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out}: {result['histogram']}")
    return 0


def cmd_synth_corpus(args) -> int:
    cfg = synth.SynthCorpusConfig(
        per_class_counts=_parse_counts(args.counts),
        seed=args.seed if args.seed is not None else 0,
        signal_strength=args.signal_strength,
    )
    ds = synth.synth_corpus(cfg)
    manifest = synth.write_corpus(ds, args.out)
    print(f"wrote {len(ds)} transcripts and {manifest}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogspeech",
        description="Classify speech transcripts into diagnosis groups "
        "with transparent text indices, embeddings, and a linear SVM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-features", help="write the index feature CSV for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_extract_features)

    p = sub.add_parser("train-eval", help="run stratified cross-validation and write reports")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--features", help="precomputed feature CSV (default: extract)")
    p.add_argument("--embeddings", help="embedding CSV (required for embed/both groupings)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--scheme", choices=config_mod.SCHEMES)
    p.add_argument("--grouping", choices=config_mod.GROUPINGS)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_train_eval)

    p = sub.add_parser("cross-apply", help="train on a scheme, predict rows the scheme excludes")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--features", help="precomputed feature CSV (default: extract)")
    p.add_argument("--embeddings", help="embedding CSV (required for embed/both groupings)")
    p.add_argument("--probe-label", required=True, choices=DIAGNOSIS_LABELS)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--scheme", choices=config_mod.SCHEMES)
    p.add_argument("--grouping", choices=config_mod.GROUPINGS)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_cross_apply)

    p = sub.add_parser("synth-corpus", help="generate a deterministic synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--counts", default="240,45,20,235",
                   help="per-class sample counts: control,mci,possible_ad,probable_ad")
    p.add_argument("--signal-strength", type=float, default=0.9)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth_corpus)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
