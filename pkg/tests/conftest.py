"""Shared fixtures: a small deterministic corpus and feature matrices.

Session scope keeps the expensive extraction work to one pass; tests
must not mutate the shared objects (copy first).
"""

import numpy as np
import pytest

from cogspeech.embeddings import embedding_column_names
from cogspeech.psyfeat import FeatureMatrix, extract_matrix
from cogspeech.synth import SynthCorpusConfig, synth_corpus

SMALL_COUNTS = (14, 10, 8, 12)


@pytest.fixture(scope="session")
def small_corpus():
    return synth_corpus(SynthCorpusConfig(per_class_counts=SMALL_COUNTS, seed=11))


@pytest.fixture(scope="session")
def small_psy(small_corpus):
    return extract_matrix(small_corpus)


def random_embeddings(ids, dim, seed):
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(len(ids), dim))
    return FeatureMatrix(embedding_column_names(dim), rows, list(ids))


@pytest.fixture(scope="session")
def small_embed(small_corpus):
    return random_embeddings(small_corpus.ids, 12, seed=202)
