import math
from dataclasses import replace

import numpy as np
import pytest

from treeparse.conllu import Sentence, Token, Treebank, parse_feats
from treeparse.model import (
    Channel,
    ConfigError,
    ConfigTypeError,
    EmptyTreebank,
    MissingGoldUpos,
    ModelConfig,
    ModelFormatError,
    ParserModel,
    TrainSchedule,
    UnknownKey,
    UnknownLabel,
    batch_loss,
    dumps,
    forward,
    gradients,
    load_config,
    loads,
    loss,
    train,
)
from treeparse.toy import micro_treebank

from conftest import micro_model
from gradcheck import max_relative_error
from oracle import oracle_forward, oracle_loss


def _two_tokens(upos=("NOUN", "VERB")):
    return Sentence((
        Token(1, "puer", "puer", upos[0], "_", parse_feats("Case=Nom"), 2, "nsubj"),
        Token(2, "videt", "video", upos[1], "_", (), 0, "root"),
    ))


def _zeroed(model, prefixes):
    params = {k: (np.zeros_like(v) if k.startswith(prefixes) else v.copy()) for k, v in model.params.items()}
    return ParserModel(model.config, model.vocabs, params)


def test_forward_shapes_and_normalisation():
    model = micro_model()
    sentence = micro_treebank().sentences[0]
    scored = forward(model, sentence)
    assert scored.head_probs.shape == (3, 4)
    np.testing.assert_allclose(scored.head_probs.sum(axis=1), 1.0, atol=1e-6)
    for d in range(1, 4):
        assert scored.head_probs[d - 1, d] == 0.0
    for probs in (scored.label_probs, scored.upos_probs, scored.feats_probs):
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-6)
    assert scored.arc_scores.shape == (4, 4)
    assert np.all(np.isneginf(scored.arc_scores[:, 0]))
    assert np.all(np.isneginf(np.diag(scored.arc_scores)))


def test_zero_head_projection_gives_uniform_heads():
    model = _zeroed(micro_model(), ("arc_q.W2", "arc_q.b2"))
    scored = forward(model, micro_treebank().sentences[0])
    expected = np.array([[1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]]) / 3
    np.testing.assert_allclose(scored.head_probs, expected, rtol=0, atol=1e-15)


def test_zero_model_loss_is_sum_of_uniform_entropies():
    model = _zeroed(micro_model(), ("",))
    v = model.vocabs
    expected = math.log(3) + math.log(len(v.labels)) + math.log(len(v.upos)) + math.log(len(v.feats))
    assert loss(model, micro_treebank().sentences[0]) == pytest.approx(expected, abs=1e-12)


def test_confident_model_loss_tends_to_zero():
    # sharpening every head towards its gold target drives each CE down
    tb = micro_treebank()
    model = micro_model(dtype=np.float64)
    sentence = tb.sentences[0]
    before = loss(model, sentence)
    state = model.copy()
    for _ in range(300):
        g = gradients(state, [sentence])
        for k in state.params:
            state.params[k] -= 0.5 * g[k]
    assert loss(state, sentence) < 0.01 * before


@pytest.mark.parametrize("use_gold_upos", [True, False])
def test_forward_matches_scalar_oracle(use_gold_upos):
    model = micro_model(seed=42, use_gold_upos=use_gold_upos)
    sentence = _two_tokens()
    arc, logp, _ = oracle_forward(model, sentence)
    scored = forward(model, sentence)
    n = len(sentence)
    for d in range(1, n + 1):
        for h in range(n + 1):
            if h == d:
                continue
            assert abs(scored.arc_scores[h, d] - arc[d - 1][h]) <= 1e-10
            assert abs(scored.head_probs[d - 1, h] - math.exp(logp[d - 1][h])) <= 1e-10


@pytest.mark.parametrize("sentence", [_two_tokens()] + list(micro_treebank().sentences))
def test_loss_matches_scalar_oracle(sentence):
    model = micro_model(seed=42)
    assert abs(loss(model, sentence) - oracle_loss(model, sentence)) <= 1e-10


def test_gradient_shapes():
    model = micro_model()
    grads = gradients(model, list(micro_treebank().sentences))
    assert set(grads) == set(model.params)
    for name, g in grads.items():
        assert g.shape == model.params[name].shape


def test_duplicated_sentence_keeps_mean_gradient():
    model = micro_model()
    s = micro_treebank().sentences[1]
    one, two = gradients(model, [s]), gradients(model, [s, s])
    for name in one:
        np.testing.assert_allclose(two[name], one[name], rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_gradients_match_finite_differences(seed):
    model = micro_model(seed=seed)
    worst, where = max_relative_error(model, list(micro_treebank().sentences))
    assert worst < 1e-4, f"{where}: {worst:.3g}"


def test_gradient_check_covers_zero_layer_encoder():
    cfg = replace(micro_model().config, lstm_layers=0)
    model = ParserModel.initialize(cfg, micro_model().vocabs, dtype=np.float64)
    worst, where = max_relative_error(model, list(micro_treebank().sentences))
    assert worst < 1e-4, f"{where}: {worst:.3g}"


def test_two_channels_concatenate():
    cfg = ModelConfig(channels=(Channel("form", 5), Channel("form", 7)), lstm_layers=1, lstm_dim=3,
                      head_hidden_dim=4, qk_dim=2)
    assert cfg.input_dim == 12
    model = ParserModel.initialize(cfg, micro_model().vocabs)
    assert model.params["lstm.0.fwd.W"].shape == (12, 12)
    assert model.params["lstm.0.bwd.W"].shape[1] == 12


def test_missing_gold_upos():
    with pytest.raises(MissingGoldUpos):
        forward(micro_model(use_gold_upos=True), _two_tokens(upos=("_", "VERB")))
    # a form-only model does not need the column
    forward(micro_model(use_gold_upos=False), _two_tokens(upos=("_", "VERB")))


def test_unknown_label():
    s = _two_tokens()
    bad = s.with_tokens([s.tokens[0], replace(s.tokens[1], deprel="vocative")])
    with pytest.raises(UnknownLabel):
        loss(micro_model(), bad)


def test_unknown_form_uses_unknown_row():
    s = Sentence((Token(1, "zzz", upos="NOUN", head=0, deprel="root"),))
    scored = forward(micro_model(), s)
    assert scored.head_probs.tolist() == [[1.0, 0.0]]


def test_empty_training_input():
    with pytest.raises(EmptyTreebank):
        train(micro_model().config, TrainSchedule(), [])
    with pytest.raises(EmptyTreebank):
        train(micro_model().config, TrainSchedule(), [Treebank("empty", ())])


class TestSchedule:
    def test_default_endpoints(self):
        s = TrainSchedule()
        assert s.lr(0) == 0.0
        assert abs(s.lr(s.warmup_steps) - s.peak_lr) <= 1e-12
        assert s.lr(s.main_steps - 1) <= 1e-12 * s.peak_lr
        assert s.lr(s.warmup_steps // 2) == pytest.approx(s.peak_lr / 2)

    def test_monotone_after_warmup(self):
        s = TrainSchedule(main_epochs=5, batches_per_epoch=10, warmup_epochs=1, peak_lr=1.0)
        lrs = [s.lr(i) for i in range(s.main_steps)]
        assert all(a <= b for a, b in zip(lrs[:10], lrs[1:11]))
        assert all(a >= b for a, b in zip(lrs[10:], lrs[11:]))

    def test_no_warmup(self):
        s = TrainSchedule(main_epochs=2, batches_per_epoch=3, warmup_epochs=0, peak_lr=1.0)
        assert s.lr(0) == 1.0 and s.lr(5) <= 1e-12


class TestConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("")
        model_cfg, schedule = load_config(path)
        assert (model_cfg.lstm_layers, model_cfg.lstm_dim, model_cfg.qk_dim, model_cfg.head_hidden_dim) == (2, 256, 512, 2048)
        assert (schedule.frozen_epochs, schedule.main_epochs, schedule.batches_per_epoch, schedule.batch_size) == (10, 30, 1000, 32)
        assert (schedule.peak_lr, schedule.warmup_epochs, schedule.frozen_lr) == (2e-5, 2, 1e-3)

    def test_override(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"lstm_layers": 1}')
        model_cfg, schedule = load_config(path)
        assert model_cfg == replace(ModelConfig(), lstm_layers=1)
        assert schedule == TrainSchedule()

    def test_gold_upos_flag_adds_channel(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"use_gold_upos": true}')
        assert load_config(path)[0].use_gold_upos

    def test_strictness(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"lstm_layer": 1}')
        with pytest.raises(UnknownKey):
            load_config(path)
        path.write_text('{"lstm_dim": "big"}')
        with pytest.raises(ConfigTypeError, match="lstm_dim"):
            load_config(path)
        path.write_text('{"peak_lr": -1}')
        with pytest.raises(ConfigError):
            load_config(path)


def test_model_file_round_trip():
    model = micro_model(dtype=np.float32)
    again = loads(dumps(model))
    assert again.config == model.config and again.vocabs == model.vocabs
    for name in model.params:
        assert again.params[name].dtype == np.float32
        np.testing.assert_array_equal(again.params[name], model.params[name])
    assert dumps(again) == dumps(model)


@pytest.mark.parametrize("mutate", [lambda b: b"XXXXXXXX" + b[8:], lambda b: b[:-3], lambda b: b + b"\0"])
def test_corrupt_model_file(mutate):
    with pytest.raises(ModelFormatError):
        loads(mutate(dumps(micro_model(dtype=np.float32))))


def test_float32_loss_close_to_float64():
    m64 = micro_model()
    batch = list(micro_treebank().sentences)
    assert batch_loss(m64.astype(np.float32), batch) == pytest.approx(batch_loss(m64, batch), rel=1e-5)
