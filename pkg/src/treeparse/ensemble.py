"""Probability-averaging ensembles of independently trained parsers."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .conllu import Sentence
from .errors import DataError
from .model.inference import annotate, log_arc_scores
from .model.network import (
    ParserModel,
    ScoredSentence,
    encode,
    head_distribution,
    label_distribution,
    tag_distributions,
)


class ShapeMismatch(DataError):
    pass


class VocabularyMismatch(DataError):
    pass


def _mean(arrays: list[np.ndarray]) -> np.ndarray:
    # sorting along the model axis makes the sum independent of model order
    stacked = np.sort(np.stack([a.astype(np.float64) for a in arrays]), axis=0)
    return stacked.sum(axis=0) / len(arrays)


def average_scored(outputs: Sequence[ScoredSentence]) -> ScoredSentence:
    """Element-wise mean of every probability table across models."""
    if not outputs:
        raise ValueError("nothing to average")
    first = outputs[0]
    for other in outputs[1:]:
        if other.vocabs != first.vocabs:
            raise VocabularyMismatch("ensembled models were trained with different vocabularies")
        for attr in ("head_probs", "label_probs", "upos_probs", "feats_probs"):
            if getattr(other, attr).shape != getattr(first, attr).shape:
                raise ShapeMismatch(f"{attr}: {getattr(other, attr).shape} vs {getattr(first, attr).shape}")
    head_probs = _mean([o.head_probs for o in outputs])
    return ScoredSentence(
        arc_scores=log_arc_scores(head_probs),
        head_probs=head_probs,
        label_probs=_mean([o.label_probs for o in outputs]),
        upos_probs=_mean([o.upos_probs for o in outputs]),
        feats_probs=_mean([o.feats_probs for o in outputs]),
        vocabs=first.vocabs,
    )


def check_compatible(models: Sequence[ParserModel]) -> None:
    if not models:
        raise ValueError("an ensemble needs at least one model")
    first = models[0]
    for other in models[1:]:
        if other.vocabs != first.vocabs:
            raise VocabularyMismatch("ensembled models were trained with different vocabularies")
        if other.config.use_gold_upos != first.config.use_gold_upos:
            raise VocabularyMismatch("ensembled models disagree on gold UPOS input")


def ensemble_scores(models: Sequence[ParserModel], sentence: Sentence) -> ScoredSentence:
    """Averaged outputs, with every model's label head conditioned on the
    most probable head under the averaged head distribution."""
    check_compatible(models)
    encoded = [encode(m, sentence) for m in models]
    heads = [head_distribution(m, e) for m, e in zip(models, encoded)]
    mean_heads = _mean([probs for _, probs in heads])
    label_heads = np.argmax(mean_heads, axis=1)
    outputs = []
    for model, enc, (logits, probs) in zip(models, encoded, heads):
        upos, feats = tag_distributions(model, enc)
        outputs.append(ScoredSentence(
            logits, probs, label_distribution(model, enc, label_heads), upos, feats, model.vocabs,
        ))
    return average_scored(outputs)


def ensemble_predict(models: Sequence[ParserModel], sentence: Sentence) -> Sentence:
    scored = ensemble_scores(models, sentence)
    return annotate(sentence, scored, models[0].config.use_gold_upos)
