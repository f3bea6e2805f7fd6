"""Adam and the two-stage training loop.

Stage 1 keeps the embedding tables fixed and trains everything else at a
constant rate. Stage 2 trains all parameters with linear warmup followed by
cosine decay to zero. Each stage starts with fresh Adam moments.
"""

from __future__ import annotations

import logging
from typing import Callable, Sequence

import numpy as np

from ..conllu import Treebank
from ..errors import DataError
from ..sampler import sample_batches, treebank_weights
from .config import ModelConfig, TrainSchedule
from .network import ParserModel, Vocabularies, loss_and_gradients

log = logging.getLogger(__name__)


class EmptyTreebank(DataError):
    pass


class Adam:
    def __init__(self, params: dict[str, np.ndarray], beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray], lr: float,
             frozen: frozenset[str] = frozenset()) -> None:
        """Update ``params`` in place, skipping names in ``frozen``."""
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for name, g in grads.items():
            if name in frozen:
                continue
            m, v = self.m[name], self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            update = (lr / c1) * m / (np.sqrt(v / c2) + self.eps)
            params[name] -= update.astype(params[name].dtype, copy=False)


Callback = Callable[[str, int, ParserModel, float], None]


def train(
    config: ModelConfig,
    schedule: TrainSchedule,
    treebanks: Sequence[Treebank],
    callback: Callback | None = None,
    dtype=np.float32,
) -> ParserModel:
    """Train a parser on one or more treebanks.

    Batches are drawn with sqrt-proportional treebank sampling. ``callback``
    is called after every epoch as ``callback(stage, epoch, model, mean_loss)``
    with stage ``"frozen"`` or ``"main"``. Fully determined by ``config.seed``.
    """
    if not treebanks:
        raise EmptyTreebank("no training treebanks given")
    for tb in treebanks:
        if tb.sentence_count == 0:
            raise EmptyTreebank(f"treebank {tb.name!r} has no sentences")

    init_seq, sample_seq = np.random.SeedSequence(config.seed).spawn(2)
    vocabs = Vocabularies.build(treebanks, case_fold=config.case_fold)
    model = ParserModel.initialize(config, vocabs, dtype=dtype, rng=np.random.default_rng(init_seq))
    weights = treebank_weights([tb.sentence_count for tb in treebanks])
    rng = np.random.default_rng(sample_seq)

    stages = [
        ("frozen", schedule.frozen_epochs, frozenset(model.embedding_names), lambda step: schedule.frozen_lr),
        ("main", schedule.main_epochs, frozenset(), schedule.lr),
    ]
    for stage, epochs, frozen, lr_at in stages:
        optimizer = Adam(model.params)
        step = 0
        for epoch in range(epochs):
            losses = []
            for batch in sample_batches(rng, treebanks, weights, schedule.batch_size, schedule.batches_per_epoch):
                value, grads = loss_and_gradients(model, batch)
                optimizer.step(model.params, grads, lr_at(step), frozen)
                losses.append(value)
                step += 1
            mean_loss = float(np.mean(losses)) if losses else float("nan")
            log.info("%s epoch %d/%d loss %.4f", stage, epoch + 1, epochs, mean_loss)
            if callback is not None:
                callback(stage, epoch, model, mean_loss)
    return model
