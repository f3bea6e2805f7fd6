"""Multi-treebank batch sampling, proportional to sqrt(sentence count)."""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from .conllu import Sentence, Treebank
from .errors import DataError


class EmptyInput(DataError):
    pass


class ZeroCount(DataError):
    pass


def treebank_weights(counts: Sequence[int]) -> np.ndarray:
    """Sampling probability of each treebank: sqrt(count_i) / sum_j sqrt(count_j)."""
    if len(counts) == 0:
        raise EmptyInput("no treebanks to weight")
    counts = np.asarray(counts, dtype=np.float64)
    if np.any(counts < 1):
        raise ZeroCount(f"every treebank needs at least one sentence, got {counts.tolist()}")
    roots = np.sqrt(counts)
    return roots / roots.sum()


def sample_batches(
    rng: np.random.Generator,
    treebanks: Sequence[Treebank],
    weights: Sequence[float],
    batch_size: int,
    n_batches: int,
) -> Iterator[list[Sentence]]:
    """Yield ``n_batches`` batches of sentences.

    Each slot picks a treebank by ``weights``, then a sentence uniformly
    with replacement, so batches mix treebanks.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if len(weights) != len(treebanks):
        raise ValueError(f"{len(weights)} weights for {len(treebanks)} treebanks")
    sizes = np.array([len(tb) for tb in treebanks])
    for _ in range(n_batches):
        which = rng.choice(len(treebanks), size=batch_size, p=weights)
        # one uniform draw per slot, scaled to that treebank's size
        picks = np.floor(rng.random(batch_size) * sizes[which]).astype(np.int64)
        yield [treebanks[t].sentences[i] for t, i in zip(which, picks)]


def sample_report(treebanks: Sequence[Treebank]) -> list[str]:
    weights = treebank_weights([tb.sentence_count for tb in treebanks])
    return [f"{tb.name}\t{tb.sentence_count}\t{w:.6f}" for tb, w in zip(treebanks, weights)]
