"""Report assembly: JSON document plus a Markdown class-score table.

Reports contain no timestamps or host details, so a rerun with the
same inputs, config, and seed produces byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

REPORT_VERSION = 1


def hash_files(paths: list[str | Path]) -> str:
    """Order-sensitive content hash over the run's input files."""
    digest = hashlib.sha256()
    for p in paths:
        data = Path(p).read_bytes()
        digest.update(str(len(data)).encode())
        digest.update(b"\x00")
        digest.update(data)
    return digest.hexdigest()


def build_report(
    cv_doc: dict, cfg, inputs_hash: str, config_echo: str | None
) -> dict:
    doc = {
        "version": REPORT_VERSION,
        "inputs_hash": inputs_hash,
        "config": cfg.to_dict(),
        "config_file_echo": config_echo,
    }
    doc.update(cv_doc)
    return doc


def _fmt(value: float, undefined: bool) -> str:
    mark = "*" if undefined else ""
    return f"{value:.4f}{mark}"


def report_markdown(doc: dict) -> str:
    metrics = doc["metrics"]
    lines = [
        "# Evaluation report",
        "",
        f"- scheme: {doc['scheme']}",
        f"- grouping: {doc['config']['grouping']}",
        f"- folds: {doc['config']['folds_k']}",
        f"- samples: {metrics['n_samples']}",
        f"- pooled accuracy: {metrics['accuracy']:.4f}",
        f"- inputs hash: {doc['inputs_hash']}",
        "",
        "| Class | Micro-F1 | Precision | Recall | Test n |",
        "|---|---|---|---|---|",
    ]
    any_undefined = False
    for row in metrics["per_class"]:
        undef = row["precision_undefined"] or row["recall_undefined"] or row["f1_undefined"]
        any_undefined = any_undefined or undef
        lines.append(
            "| {label} | {f1} | {p} | {r} | {n} |".format(
                label=row["label"],
                f1=_fmt(row["f1"], row["f1_undefined"]),
                p=_fmt(row["precision"], row["precision_undefined"]),
                r=_fmt(row["recall"], row["recall_undefined"]),
                n=row["tp"] + row["fn"],
            )
        )
    if any_undefined:
        lines += ["", "`*` zero denominator reported as 0."]
    lines += ["", "## Folds", "", "| Fold | Train | Test | Feature width |", "|---|---|---|---|"]
    for fold in doc["folds"]:
        lines.append(
            f"| {fold['fold']} | {fold['train_size']} | {fold['test_size']} | {fold['feature_width']} |"
        )
    if doc.get("fold_warnings"):
        lines += ["", "## Warnings", ""]
        lines += [f"- {w}" for w in doc["fold_warnings"]]
    return "\n".join(lines) + "\n"


def write_reports(out_dir: str | Path, doc: dict) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "report.json"
    md_path = out_dir / "report.md"
    json_path.write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    md_path.write_text(report_markdown(doc), encoding="utf-8")
    return json_path, md_path
