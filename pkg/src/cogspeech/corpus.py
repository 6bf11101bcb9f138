"""Transcript parsing, text cleaning, and dataset manifests.

Supports a minimal subset of the CHAT transcript format (participant
tier only) plus plain-text files, and loads tab-separated manifests
mapping sample ids to diagnosis labels and transcript paths.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import DuplicateId, EmptyTranscript, ManifestError, UnknownLabel

DIAGNOSIS_LABELS = ("control", "mci", "possible_ad", "probable_ad")

SOURCE_FORMATS = ("chat", "plain", "synthetic")

# Characters allowed in clean_text: lowercase alphanumerics, whitespace,
# and sentence-final punctuation (kept so sentence segmentation survives
# cleaning).
_CLEAN_DISALLOWED = re.compile(r"[^a-z0-9\s.?!]")
_PUNCT_RUN = re.compile(r"([.?!])[.?!]+")
_WS_RUN = re.compile(r"\s+")

# CHAT annotation machinery stripped from participant utterances.
_TIMECODE = re.compile("\x15[^\x15]*\x15")
_BRACKET_CODE = re.compile(r"\[[^\[\]]*\]")
_ANGLE_GROUP = re.compile(r"<([^<>]*)>")
_PAUSE_MARK = re.compile(r"\(\.{1,3}\)")
_RESIDUAL_CHAT_CHARS = re.compile(r"[*%@&\[\]<>]")


@dataclass(frozen=True)
class Transcript:
    """One participant's utterance text plus provenance."""

    id: str
    raw_text: str
    clean_text: str = ""
    source_format: str = "plain"


@dataclass
class LabeledDataset:
    """Ordered transcripts with diagnosis (or scheme) labels."""

    samples: list[tuple[Transcript, str]] = field(default_factory=list)

    def __post_init__(self):
        ids = [t.id for t, _ in self.samples]
        seen = set()
        for i in ids:
            if i in seen:
                raise DuplicateId(f"duplicate transcript id {i!r}")
            seen.add(i)

    @property
    def ids(self) -> list[str]:
        return [t.id for t, _ in self.samples]

    @property
    def labels(self) -> list[str]:
        return [label for _, label in self.samples]

    @property
    def transcripts(self) -> list[Transcript]:
        return [t for t, _ in self.samples]

    @property
    def stats(self) -> dict[str, int]:
        return dict(Counter(self.labels))

    def __len__(self) -> int:
        return len(self.samples)


def load_contractions() -> list[tuple[str, str]]:
    """Shipped contraction table, longest key first."""
    text = resources.files("cogspeech.data").joinpath("contractions.json").read_text("utf-8")
    table = json.loads(text)
    return sorted(table.items(), key=lambda kv: (-len(kv[0]), kv[0]))


def _strip_chat_annotations(body: str) -> str:
    body = _TIMECODE.sub(" ", body)
    for _ in range(3):  # bracket codes may sit side by side, not nested
        new = _BRACKET_CODE.sub(" ", body)
        if new == body:
            break
        body = new
    body = _ANGLE_GROUP.sub(r"\1", body)
    body = _PAUSE_MARK.sub(" ", body)
    kept = []
    for token in body.split():
        if token.startswith("&") or token.startswith("+"):
            continue
        # neologism/error markers like word@n: keep the word itself
        token = token.split("@")[0]
        token = _RESIDUAL_CHAT_CHARS.sub("", token)
        if token:
            kept.append(token)
    return " ".join(kept)


def parse_chat(text: str, id: str = "") -> Transcript:
    """Extract the participant tier from a CHAT transcript.

    Keeps ``*PAR:`` utterances in order (including tab-indented
    continuation lines), drops investigator tiers, ``%`` dependent
    tiers, and ``@`` headers, then strips CHAT annotations: bracketed
    codes, retrace angle brackets (inner words kept), ``&`` fillers,
    ``+`` codes, pause marks, and time-alignment marks.
    """
    logical: list[str] = []
    for line in text.split("\n"):
        line = line.rstrip("\r")
        if (line.startswith("\t") or line.startswith("    ")) and logical:
            logical[-1] += " " + line.strip()
        else:
            logical.append(line)

    bodies = []
    for line in logical:
        if line.startswith("*PAR:"):
            bodies.append(line[len("*PAR:"):].strip())
    if not bodies:
        raise EmptyTranscript(f"no *PAR: tier found{' in ' + id if id else ''}")

    stripped = [_strip_chat_annotations(b) for b in bodies]
    raw = _WS_RUN.sub(" ", " ".join(s for s in stripped if s)).strip()
    if not raw:
        raise EmptyTranscript(f"participant tier empty after annotation stripping{' in ' + id if id else ''}")
    return Transcript(id=id, raw_text=raw, source_format="chat")


def _compile_contractions(table: list[tuple[str, str]]):
    keys = sorted((k for k, _ in table), key=lambda k: (-len(k), k))
    pattern = re.compile(
        r"(?<![a-z0-9'])(" + "|".join(re.escape(k) for k in keys) + r")(?![a-z0-9'])"
    )
    lookup = dict(table)
    return pattern, lookup


_DEFAULT_TABLE: list[tuple[str, str]] | None = None


def preprocess(t: Transcript, contraction_map: list[tuple[str, str]] | None = None) -> Transcript:
    """Lowercase, expand contractions, drop special characters.

    Contractions expand by longest-match-first lookup before the
    character filter removes apostrophes. Characters outside
    ``[a-z0-9 \\s . ? !]`` are deleted, runs of sentence punctuation
    collapse to their first mark, and whitespace collapses to single
    spaces.
    """
    global _DEFAULT_TABLE
    if contraction_map is None:
        if _DEFAULT_TABLE is None:
            _DEFAULT_TABLE = load_contractions()
        contraction_map = _DEFAULT_TABLE

    s = t.raw_text.lower()
    if contraction_map:
        pattern, lookup = _compile_contractions(contraction_map)
        s = pattern.sub(lambda m: lookup[m.group(1)], s)
    s = _CLEAN_DISALLOWED.sub("", s)
    s = _PUNCT_RUN.sub(r"\1", s)
    s = _WS_RUN.sub(" ", s).strip()
    if not s:
        raise EmptyTranscript(f"nothing left after cleaning{' in ' + t.id if t.id else ''}")
    return Transcript(id=t.id, raw_text=t.raw_text, clean_text=s, source_format=t.source_format)


def load_manifest(path: str | Path) -> LabeledDataset:
    """Load a ``id<TAB>label<TAB>path`` manifest into a dataset.

    Transcript paths resolve relative to the manifest's directory;
    ``.cha`` files go through the CHAT parser, ``.txt`` files are taken
    verbatim as raw text. Every transcript is preprocessed on load, so
    row order in the manifest fixes sample order downstream.
    """
    path = Path(path)
    try:
        lines = path.read_text("utf-8").splitlines()
    except OSError as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from e
    if not lines or lines[0].rstrip("\n") != "id\tlabel\tpath":
        raise ManifestError(f"{path}: first line must be exactly 'id\\tlabel\\tpath'")

    samples: list[tuple[Transcript, str]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ManifestError(f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}")
        sample_id, label, rel = (p.strip() for p in parts)
        if label not in DIAGNOSIS_LABELS:
            raise UnknownLabel(f"{path}:{lineno}: unknown label {label!r} for id {sample_id!r}")
        if sample_id in seen:
            raise DuplicateId(f"{path}:{lineno}: duplicate id {sample_id!r}")
        seen.add(sample_id)

        tpath = Path(rel)
        if not tpath.is_absolute():
            tpath = path.parent / tpath
        try:
            text = tpath.read_text("utf-8")
        except OSError as e:
            raise ManifestError(f"{path}:{lineno}: cannot read transcript {tpath}: {e}") from e

        if tpath.suffix == ".cha":
            t = parse_chat(text, id=sample_id)
        elif tpath.suffix == ".txt":
            t = Transcript(id=sample_id, raw_text=text.strip(), source_format="plain")
        else:
            raise ManifestError(f"{path}:{lineno}: unsupported transcript extension {tpath.suffix!r}")
        samples.append((preprocess(t), label))

    return LabeledDataset(samples)
