"""Deterministic synthetic corpus generation for desk-scale testing.

Transcripts are sampled from a shared base vocabulary plus class-keyed
marker words. A signal-strength knob interpolates per-class generation
parameters (utterance counts, utterance lengths, closed-class rates,
word-repetition odds) between a common baseline (strength 0, classes
indistinguishable) and fully separated targets (strength 1). Response
length shrinks from control to probable_ad.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import seeding
from .corpus import DIAGNOSIS_LABELS, LabeledDataset, Transcript, preprocess
from .errors import ConfigError

PRONOUN_POOL = ("he", "she", "it", "they", "we", "him", "her", "them")
CONNECTIVE_POOL = ("and", "then", "because", "so", "but", "while", "also", "when")
NEGATION_POOL = ("not", "no", "never", "without")
DETERMINER_POOL = ("the", "a", "an", "every")

BASE_CONTENT = tuple("""
cookie jar stool mother boy girl sister water sink plate dish cup
floor hand foot head chair towel apron dress shoe sock cabinet shelf
counter faucet garden tree grass fence path gate bird dog cat house
roof door step yard bowl spoon fork knife glass bread cake milk tea
wash washes washing reach reaches reaching fall falls falling stand
stands standing look looks looking take takes taking give gives
giving run runs running climb climbs climbing spill spills spilling
dry dries drying open opens opening close closes closing laugh
laughs laughing play plays playing help helps helping hold holds
holding wobble tips leans splashes drips grabs points smiles slips
wet dirty clean tall small young old busy quiet happy careless
""".split())

CLASS_MARKERS = {
    "control": (
        "refrigerator", "immediately", "overflowing", "completely",
        "particularly", "remarkable", "comfortable", "automatically",
        "curtains", "windowsill",
    ),
    "mci": (
        "yesterday", "remember", "probably", "tomorrow", "afternoon",
        "grocery", "telephone", "medicine", "calendar", "radio",
    ),
    "possible_ad": (
        "story", "paper", "corner", "button", "basket",
        "middle", "person", "table", "window", "somewhere",
    ),
    "probable_ad": (
        "thing", "stuff", "spot", "bit", "lot",
        "way", "place", "part", "side", "mess",
    ),
}

# Interpolation anchors: value(strength) = base + strength * (target - base).
_BASES = {
    "utterances": 18.0,
    "tokens": 11.0,
    "pronoun": 0.13,
    "connective": 0.32,
    "negation": 0.03,
    "repeat": 0.35,
}
_TARGETS = {
    "control": {"utterances": 28.0, "tokens": 15.0, "pronoun": 0.04,
                "connective": 0.55, "negation": 0.005, "repeat": 0.08},
    "mci": {"utterances": 20.0, "tokens": 12.0, "pronoun": 0.09,
            "connective": 0.42, "negation": 0.02, "repeat": 0.25},
    "possible_ad": {"utterances": 14.0, "tokens": 10.0, "pronoun": 0.16,
                    "connective": 0.22, "negation": 0.045, "repeat": 0.48},
    "probable_ad": {"utterances": 8.0, "tokens": 7.5, "pronoun": 0.24,
                    "connective": 0.08, "negation": 0.07, "repeat": 0.68},
}
MARKER_RATE = 0.15  # per-token odds at strength 1
DETERMINER_RATE = 0.12
QUESTION_RATE = 0.05


@dataclass(frozen=True)
class SynthCorpusConfig:
    per_class_counts: tuple[int, int, int, int]
    seed: int = 0
    signal_strength: float = 0.9

    def __post_init__(self):
        if len(self.per_class_counts) != 4:
            raise ConfigError("per_class_counts needs one count per diagnosis label")
        if any(c < 0 for c in self.per_class_counts):
            raise ConfigError("per_class_counts must be non-negative")
        if not 0.0 <= self.signal_strength <= 1.0:
            raise ConfigError("signal_strength must be in [0, 1]")


def _params(label: str, strength: float) -> dict[str, float]:
    target = _TARGETS[label]
    return {k: _BASES[k] + strength * (target[k] - _BASES[k]) for k in _BASES}


def _pick(rng, pool):
    return pool[int(rng.integers(len(pool)))]


def _sample_text(label: str, strength: float, rng) -> str:
    p = _params(label, strength)
    markers = CLASS_MARKERS[label]
    marker_rate = strength * MARKER_RATE
    cut_pron = p["pronoun"]
    cut_conn = cut_pron + p["connective"]
    cut_neg = cut_conn + p["negation"]
    cut_marker = cut_neg + marker_rate
    cut_det = cut_marker + DETERMINER_RATE

    n_utt = max(2, round(rng.normal(p["utterances"], 1.0)))
    used: list[str] = []
    utterances = []
    for _ in range(n_utt):
        length = max(3, round(rng.normal(p["tokens"], 1.5)))
        words = []
        for _ in range(length):
            r = rng.random()
            if r < cut_pron:
                words.append(_pick(rng, PRONOUN_POOL))
            elif r < cut_conn:
                words.append(_pick(rng, CONNECTIVE_POOL))
            elif r < cut_neg:
                words.append(_pick(rng, NEGATION_POOL))
            elif r < cut_marker:
                words.append(_pick(rng, markers))
            elif r < cut_det:
                words.append(_pick(rng, DETERMINER_POOL))
            elif used and rng.random() < p["repeat"]:
                words.append(used[int(rng.integers(len(used)))])
            else:
                word = _pick(rng, BASE_CONTENT)
                words.append(word)
                used.append(word)
        terminator = "?" if rng.random() < QUESTION_RATE else "."
        utterances.append(" ".join(words) + terminator)
    return "\n".join(utterances)


def synth_corpus(cfg: SynthCorpusConfig) -> LabeledDataset:
    """Generate a labeled dataset; byte-stable for equal configs.

    Each sample draws from its own seed substream keyed by (seed,
    class index, sample index), so a sample's text is independent of
    the other class counts.
    """
    samples = []
    for class_idx, label in enumerate(DIAGNOSIS_LABELS):
        for sample_idx in range(cfg.per_class_counts[class_idx]):
            rng = seeding.generator(
                cfg.seed, seeding.STAGE_SYNTH, class_idx, sample_idx
            )
            text = _sample_text(label, cfg.signal_strength, rng)
            t = Transcript(
                id=f"{label}_{sample_idx:04d}",
                raw_text=text,
                source_format="synthetic",
            )
            samples.append((preprocess(t), label))
    return LabeledDataset(samples)


def write_corpus(ds: LabeledDataset, out_dir: str | Path) -> Path:
    """Write transcript .txt files plus a manifest; returns manifest path."""
    out_dir = Path(out_dir)
    transcript_dir = out_dir / "transcripts"
    transcript_dir.mkdir(parents=True, exist_ok=True)
    lines = ["id\tlabel\tpath"]
    for t, label in ds.samples:
        rel = f"transcripts/{t.id}.txt"
        (out_dir / rel).write_text(t.raw_text + "\n", encoding="utf-8")
        lines.append(f"{t.id}\t{label}\t{rel}")
    manifest = out_dir / "manifest.tsv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest
