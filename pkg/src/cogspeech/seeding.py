"""Deterministic substream derivation from one master seed.

Every randomized stage draws its seed from the master seed plus a fixed
stage code (and fold index where applicable), so results are identical
regardless of execution order or fold-level parallelism.
"""

import numpy as np

STAGE_FOLDS = 1
STAGE_SMOTE = 2
STAGE_SVM = 3
STAGE_SYNTH = 4
STAGE_CROSS = 5


def substream_seed(master_seed: int, *path: int) -> int:
    """64-bit seed for the substream identified by (master, *path)."""
    seq = np.random.SeedSequence([int(master_seed), *[int(p) for p in path]])
    return int(seq.generate_state(1, np.uint64)[0])


def generator(master_seed: int, *path: int) -> np.random.Generator:
    seq = np.random.SeedSequence([int(master_seed), *[int(p) for p in path]])
    return np.random.Generator(np.random.PCG64(seq))
