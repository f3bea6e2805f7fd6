"""Turning network outputs into annotated sentences."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..conllu import Sentence, parse_feats
from ..decoder import decode_mst
from .network import ParserModel, ScoredSentence, arc_matrix, forward

LOG_EPS = 1e-12


def log_arc_scores(head_probs: np.ndarray) -> np.ndarray:
    """Decoder input: ``log(p + eps)`` as a ``[head, dependent]`` table."""
    return arc_matrix(np.log(head_probs.astype(np.float64) + LOG_EPS))


def annotate(sentence: Sentence, scored: ScoredSentence, echo_upos: bool) -> Sentence:
    """Write decoded heads and argmax labels/tags into ``sentence``.

    Labels come from ``label_probs``, which the network conditioned on each
    token's most probable head rather than the decoded tree.
    """
    vocabs = scored.vocabs
    heads = decode_mst(log_arc_scores(scored.head_probs))
    labels = np.argmax(scored.label_probs, axis=1)
    upos = np.argmax(scored.upos_probs, axis=1)
    feats = np.argmax(scored.feats_probs, axis=1)
    tokens = []
    for i, tok in enumerate(sentence.tokens):
        tokens.append(replace(
            tok,
            head=heads[i],
            deprel=vocabs.labels[labels[i]],
            upos=tok.upos if echo_upos else vocabs.upos[upos[i]],
            feats=parse_feats(vocabs.feats[feats[i]]),
        ))
    return sentence.with_tokens(tokens)


def predict(model: ParserModel, sentence: Sentence) -> Sentence:
    return annotate(sentence, forward(model, sentence), model.config.use_gold_upos)
