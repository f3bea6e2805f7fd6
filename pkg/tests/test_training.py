from dataclasses import replace

import numpy as np
import pytest

from treeparse.conllu import validate_tree
from treeparse.evaluation import evaluate
from treeparse.model import TrainSchedule, dumps, predict, train
from treeparse.toy import desk_config, toy_treebank

from conftest import predict_treebank, toy_corpus, trained_toy_model

SHORT = TrainSchedule(frozen_epochs=2, frozen_lr=1e-3, main_epochs=2, batches_per_epoch=3,
                      batch_size=4, peak_lr=3e-3, warmup_epochs=1)
SMALL = replace(desk_config(seed=5), lstm_dim=8, head_hidden_dim=16, qk_dim=8)


def _snapshots(config, schedule, treebanks):
    seen = {}

    def callback(stage, epoch, model, mean_loss):
        seen[(stage, epoch)] = {k: v.copy() for k, v in model.params.items()}

    model = train(config, schedule, treebanks, callback=callback)
    return model, seen


def test_frozen_stage_keeps_embeddings_and_moves_the_rest():
    tb = toy_treebank(10, seed=2)
    _, seen = _snapshots(SMALL, SHORT, [tb])
    init_seq, _ = np.random.SeedSequence(SMALL.seed).spawn(2)
    from treeparse.model import ParserModel, Vocabularies

    initial = ParserModel.initialize(SMALL, Vocabularies.build([tb]), rng=np.random.default_rng(init_seq))
    after_frozen = seen[("frozen", SHORT.frozen_epochs - 1)]
    assert np.array_equal(after_frozen["emb.0"], initial.params["emb.0"])
    assert any(not np.array_equal(after_frozen[k], initial.params[k]) for k in initial.params if k != "emb.0")
    # the second stage trains the embeddings too
    assert not np.array_equal(seen[("main", SHORT.main_epochs - 1)]["emb.0"], initial.params["emb.0"])


def test_callback_sees_every_epoch():
    _, seen = _snapshots(SMALL, SHORT, [toy_treebank(5, seed=1)])
    assert list(seen) == [("frozen", 0), ("frozen", 1), ("main", 0), ("main", 1)]


def test_training_is_deterministic():
    tbs = [toy_treebank(6, seed=1, name="a"), toy_treebank(9, seed=2, name="b")]
    assert dumps(train(SMALL, SHORT, tbs)) == dumps(train(SMALL, SHORT, tbs))
    assert dumps(train(SMALL, SHORT, tbs)) != dumps(train(replace(SMALL, seed=6), SHORT, tbs))


def test_loss_decreases():
    losses = []
    train(SMALL, replace(SHORT, main_epochs=6, batches_per_epoch=5), [toy_treebank(10)],
          callback=lambda stage, epoch, model, value: losses.append(value))
    assert losses[-1] < losses[0]


def test_predictions_are_trees():
    model = train(SMALL, SHORT, [toy_treebank(10)])
    for sentence in toy_treebank(20, seed=9).sentences:
        validate_tree(predict(model, sentence))


def test_gold_upos_is_echoed():
    config = replace(desk_config(seed=3, use_gold_upos=True), lstm_dim=8, head_hidden_dim=16, qk_dim=8)
    model = train(config, SHORT, [toy_treebank(10)])
    for sentence in toy_treebank(10, seed=4).sentences:
        out = predict(model, sentence)
        assert [t.upos for t in out.tokens] == [t.upos for t in sentence.tokens]


@pytest.mark.slow
def test_overfit_toy_corpus():
    gold = toy_corpus()
    predicted = predict_treebank(trained_toy_model(1), gold)
    scores = evaluate(gold, predicted)
    assert scores.las >= 99.0
    matches = sum(p == g for p, g in zip(predicted.sentences, gold.sentences))
    assert matches >= 0.9 * gold.sentence_count
