"""Psycholinguistic indices computed per transcript.

Registry v1 holds 24 transparent indices covering descriptive counts,
lexical diversity, closed-class incidence, sentence-to-sentence
cohesion, and readability. Externally computed index sets (e.g. a
genuine Coh-Metrix export) can be ingested from CSV instead.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import lexicons
from .corpus import LabeledDataset, Transcript
from .errors import (
    DuplicateId,
    EmptyTranscript,
    IdMismatch,
    MissingFeatureRow,
    NonFiniteValue,
)

_SENTENCE_SPLIT = re.compile(r"[.?!]+")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")

_STEM_SUFFIXES = ("ingly", "edly", "fully", "ness", "ment", "ions",
                  "ion", "ies", "ing", "est", "ed", "er", "ly", "es", "s")

MATTR_WINDOW = 20
SHORT_SENTENCE_TOKENS = 5
LONG_SENTENCE_TOKENS = 20


def count_syllables(word: str) -> int:
    """Vowel-group heuristic with a silent-e adjustment; minimum 1."""
    groups = _VOWEL_GROUP.findall(word)
    n = len(groups)
    if n > 1 and word.endswith("e") and not word.endswith("le"):
        n -= 1
    return max(n, 1)


def stem(word: str) -> str:
    """Crude suffix stripper used only for stem-overlap cohesion."""
    for suffix in _STEM_SUFFIXES:
        if word.endswith(suffix) and len(word) - len(suffix) >= 3:
            return word[: -len(suffix)]
    return word


class _TextStats:
    """Tokenization shared by all indices of one transcript."""

    def __init__(self, clean_text: str):
        self.sentences = [seg.split() for seg in _SENTENCE_SPLIT.split(clean_text)]
        self.sentences = [s for s in self.sentences if s]
        self.tokens = [tok for sent in self.sentences for tok in sent]
        self.n_tokens = len(self.tokens)
        self.n_sentences = len(self.sentences)
        self.types: dict[str, int] = {}
        for tok in self.tokens:
            self.types[tok] = self.types.get(tok, 0) + 1
        self.n_types = len(self.types)
        self.n_hapax = sum(1 for c in self.types.values() if c == 1)
        self.syllables = [count_syllables(t) for t in self.tokens]
        self.n_syllables = sum(self.syllables)
        self.content_sets = [
            {t for t in sent if t not in lexicons.FUNCTION_WORDS} for sent in self.sentences
        ]
        self.stem_sets = [{stem(t) for t in s} for s in self.content_sets]

    def incidence(self, lexicon) -> float:
        hits = sum(1 for t in self.tokens if t in lexicon)
        return 1000.0 * hits / self.n_tokens


def _jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def _mean_adjacent(sets: list[set]) -> float:
    if len(sets) < 2:
        return 0.0
    return sum(_jaccard(sets[i], sets[i + 1]) for i in range(len(sets) - 1)) / (len(sets) - 1)


def _mean_pairwise(sets: list[set]) -> float:
    n = len(sets)
    if n < 2:
        return 0.0
    total = sum(_jaccard(sets[i], sets[j]) for i in range(n) for j in range(i + 1, n))
    return total / (n * (n - 1) / 2)


def _mattr(tokens: list[str], window: int = MATTR_WINDOW) -> float:
    n = len(tokens)
    if n == 0:
        return 0.0
    if n < window:
        return len(set(tokens)) / n
    total = 0.0
    for i in range(n - window + 1):
        total += len(set(tokens[i : i + window])) / window
    return total / (n - window + 1)


def _brunet(n_tokens: int, n_types: int) -> float:
    return float(n_tokens ** (n_types ** -0.165))


def _honore(n_tokens: int, n_types: int, n_hapax: int) -> float:
    v1 = n_hapax
    if v1 == n_types:  # all words unique: back off half a count
        v1 = n_types - 0.5
    return 100.0 * math.log(n_tokens) / (1.0 - v1 / n_types)


def _index_functions():
    # Registry v1: name -> function of _TextStats. Order fixes columns.
    return [
        ("token_count", lambda s: float(s.n_tokens)),
        ("sentence_count", lambda s: float(s.n_sentences)),
        ("mean_sentence_length", lambda s: s.n_tokens / s.n_sentences),
        ("mean_word_length_letters", lambda s: sum(len(t) for t in s.tokens) / s.n_tokens),
        ("mean_word_length_syllables", lambda s: s.n_syllables / s.n_tokens),
        ("type_token_ratio", lambda s: s.n_types / s.n_tokens),
        ("mattr_20", lambda s: _mattr(s.tokens)),
        ("hapax_ratio", lambda s: s.n_hapax / s.n_tokens),
        ("brunet_index", lambda s: _brunet(s.n_tokens, s.n_types)),
        ("honore_statistic", lambda s: _honore(s.n_tokens, s.n_types, s.n_hapax)),
        ("pronoun_incidence", lambda s: s.incidence(lexicons.PRONOUNS)),
        ("connective_incidence", lambda s: s.incidence(lexicons.CONNECTIVES)),
        ("determiner_incidence", lambda s: s.incidence(lexicons.DETERMINERS)),
        ("function_word_incidence", lambda s: s.incidence(lexicons.FUNCTION_WORDS)),
        ("content_word_incidence",
         lambda s: 1000.0 * sum(1 for t in s.tokens if t not in lexicons.FUNCTION_WORDS) / s.n_tokens),
        ("negation_incidence", lambda s: s.incidence(lexicons.NEGATIONS)),
        ("adjacent_content_overlap", lambda s: _mean_adjacent(s.content_sets)),
        ("adjacent_stem_overlap", lambda s: _mean_adjacent(s.stem_sets)),
        ("global_content_overlap", lambda s: _mean_pairwise(s.content_sets)),
        ("flesch_reading_ease",
         lambda s: 206.835 - 1.015 * (s.n_tokens / s.n_sentences) - 84.6 * (s.n_syllables / s.n_tokens)),
        ("flesch_kincaid_grade",
         lambda s: 0.39 * (s.n_tokens / s.n_sentences) + 11.8 * (s.n_syllables / s.n_tokens) - 15.59),
        ("mean_syllables_per_sentence", lambda s: s.n_syllables / s.n_sentences),
        ("short_sentence_fraction",
         lambda s: sum(1 for sent in s.sentences if len(sent) < SHORT_SENTENCE_TOKENS) / s.n_sentences),
        ("long_sentence_fraction",
         lambda s: sum(1 for sent in s.sentences if len(sent) > LONG_SENTENCE_TOKENS) / s.n_sentences),
    ]


@dataclass
class FeatureRegistry:
    """Ordered index set; registry order fixes feature-matrix columns."""

    indices: list[tuple[str, object]]
    lexicons: dict[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        names = [n for n, _ in self.indices]
        if len(names) != len(set(names)):
            raise ValueError("duplicate index names in registry")

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.indices]


def registry_v1() -> FeatureRegistry:
    return FeatureRegistry(
        indices=_index_functions(),
        lexicons={
            "pronouns": lexicons.PRONOUNS,
            "connectives": lexicons.CONNECTIVES,
            "determiners": lexicons.DETERMINERS,
            "function_words": lexicons.FUNCTION_WORDS,
            "negations": lexicons.NEGATIONS,
        },
    )


@dataclass
class FeatureMatrix:
    """Sample-major real matrix with named columns, aligned to a dataset."""

    column_names: list[str]
    rows: np.ndarray
    row_ids: list[str]

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2 or self.rows.shape != (len(self.row_ids), len(self.column_names)):
            raise ValueError(
                f"matrix shape {self.rows.shape} does not match "
                f"{len(self.row_ids)} ids x {len(self.column_names)} columns"
            )
        if not np.all(np.isfinite(self.rows)):
            raise NonFiniteValue("feature matrix contains non-finite values")

    def subset_by_ids(self, ids: list[str]) -> "FeatureMatrix":
        pos = {rid: i for i, rid in enumerate(self.row_ids)}
        missing = [i for i in ids if i not in pos]
        if missing:
            raise MissingFeatureRow(f"ids missing from feature matrix: {missing[:5]}")
        take = [pos[i] for i in ids]
        return FeatureMatrix(self.column_names, self.rows[take], list(ids))


def extract_features(t: Transcript, registry: FeatureRegistry | None = None) -> dict[str, float]:
    """One finite real per registry index for a cleaned transcript."""
    if registry is None:
        registry = registry_v1()
    stats = _TextStats(t.clean_text)
    if stats.n_sentences == 0:
        raise EmptyTranscript(f"no sentences after segmentation{' in ' + t.id if t.id else ''}")
    row = {}
    for name, fn in registry.indices:
        value = float(fn(stats))
        if not math.isfinite(value):
            raise NonFiniteValue(f"index {name} is non-finite for transcript {t.id!r}")
        row[name] = value
    return row


def extract_matrix(dataset: LabeledDataset, registry: FeatureRegistry | None = None) -> FeatureMatrix:
    """Feature matrix for a whole dataset, rows in dataset order."""
    if registry is None:
        registry = registry_v1()
    rows = []
    for t in dataset.transcripts:
        row = extract_features(t, registry)
        rows.append([row[name] for name in registry.names])
    return FeatureMatrix(registry.names, np.array(rows, dtype=float), dataset.ids)


def load_feature_csv(path: str | Path, dataset: LabeledDataset) -> FeatureMatrix:
    """Ingest an external feature CSV, reordered to dataset sample order.

    Header must be ``id,<name1>,<name2>,...``; every dataset id must
    appear exactly once and every cell must parse as a finite real.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "id" or len(header) < 2:
            raise IdMismatch(f"{path}: header must start with 'id' and name at least one feature")
        names = header[1:]
        by_id: dict[str, list[float]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise NonFiniteValue(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
            rid = row[0]
            if rid in by_id:
                raise DuplicateId(f"{path}:{lineno}: duplicate id {rid!r}")
            values = []
            for name, cell in zip(names, row[1:]):
                try:
                    v = float(cell)
                except ValueError:
                    raise NonFiniteValue(f"{path}:{lineno}: non-numeric cell {cell!r} in column {name!r}") from None
                if not math.isfinite(v):
                    raise NonFiniteValue(f"{path}:{lineno}: non-finite cell in column {name!r}")
                values.append(v)
            by_id[rid] = values

    wanted = set(dataset.ids)
    extra = [rid for rid in by_id if rid not in wanted]
    if extra:
        raise IdMismatch(f"{path}: ids not present in dataset: {extra[:5]}")
    missing = [rid for rid in dataset.ids if rid not in by_id]
    if missing:
        raise MissingFeatureRow(f"{path}: no feature row for id {missing[0]!r}")
    rows = np.array([by_id[rid] for rid in dataset.ids], dtype=float)
    return FeatureMatrix(names, rows, dataset.ids)


def write_feature_csv(path: str | Path, matrix: FeatureMatrix) -> None:
    """Write a feature matrix in the CSV schema load_feature_csv reads."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *matrix.column_names])
        for rid, row in zip(matrix.row_ids, matrix.rows):
            writer.writerow([rid, *[format(v, ".17g") for v in row]])
