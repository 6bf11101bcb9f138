"""Ingestion of externally computed transcript embeddings.

Embeddings arrive as a CSV produced by a separate encoder tool: one row
per transcript, header ``id,e0,e1,...,e{d-1}``. This module validates
the schema and aligns rows to a dataset; it never computes embeddings.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .corpus import LabeledDataset
from .errors import (
    DimensionMismatch,
    DuplicateId,
    IdMismatch,
    MissingFeatureRow,
    NonFiniteValue,
)
from .psyfeat import FeatureMatrix

EXPECTED_DIM = 1024


def embedding_column_names(dim: int) -> list[str]:
    return [f"e{i}" for i in range(dim)]


def load_embedding_csv(
    path: str | Path,
    dataset: LabeledDataset,
    expected_dim: int | None = None,
) -> FeatureMatrix:
    """Load an embedding CSV, reordered to dataset sample order.

    The header must be exactly ``id,e0,...,e{d-1}``. When expected_dim
    is given the file's width must match it.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "id" or len(header) < 2:
            raise DimensionMismatch(f"{path}: header must be 'id,e0,...,e{{d-1}}'")
        dim = len(header) - 1
        if header[1:] != embedding_column_names(dim):
            raise DimensionMismatch(f"{path}: dimension columns must be named e0..e{dim - 1} in order")
        if expected_dim is not None and dim != expected_dim:
            raise DimensionMismatch(f"{path}: expected {expected_dim} dimensions, file has {dim}")
        by_id: dict[str, list[float]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dim + 1:
                raise DimensionMismatch(f"{path}:{lineno}: expected {dim + 1} cells, got {len(row)}")
            rid = row[0]
            if rid in by_id:
                raise DuplicateId(f"{path}:{lineno}: duplicate id {rid!r}")
            values = []
            for i, cell in enumerate(row[1:]):
                try:
                    v = float(cell)
                except ValueError:
                    raise NonFiniteValue(f"{path}:{lineno}: non-numeric cell {cell!r} in column e{i}") from None
                if not math.isfinite(v):
                    raise NonFiniteValue(f"{path}:{lineno}: non-finite cell in column e{i}")
                values.append(v)
            by_id[rid] = values

    wanted = set(dataset.ids)
    extra = [rid for rid in by_id if rid not in wanted]
    if extra:
        raise IdMismatch(f"{path}: ids not present in dataset: {extra[:5]}")
    missing = [rid for rid in dataset.ids if rid not in by_id]
    if missing:
        raise MissingFeatureRow(f"{path}: no embedding row for id {missing[0]!r}")
    rows = np.array([by_id[rid] for rid in dataset.ids], dtype=float)
    return FeatureMatrix(embedding_column_names(dim), rows, dataset.ids)


def write_embedding_csv(path: str | Path, matrix: FeatureMatrix) -> None:
    """Write embeddings in the CSV schema load_embedding_csv reads."""
    path = Path(path)
    dim = len(matrix.column_names)
    if matrix.column_names != embedding_column_names(dim):
        raise DimensionMismatch("matrix columns are not embedding dimensions e0..e{d-1}")
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *matrix.column_names])
        for rid, row in zip(matrix.row_ids, matrix.rows):
            writer.writerow([rid, *[format(v, ".17g") for v in row]])
