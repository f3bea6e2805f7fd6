import functools
from pathlib import Path

import numpy as np
import pytest

from treeparse.conllu import Treebank
from treeparse.model import Channel, ModelConfig, ParserModel, Vocabularies, predict, train
from treeparse.toy import desk_config, desk_schedule, micro_treebank, toy_treebank

DATA = Path(__file__).parent / "data"


def micro_config(seed=42, use_gold_upos=True):
    channels = (Channel("form", 4),) + ((Channel("upos", 3),) if use_gold_upos else ())
    return ModelConfig(channels=channels, lstm_layers=2, lstm_dim=4, head_hidden_dim=8, qk_dim=4, seed=seed)


def micro_model(seed=42, use_gold_upos=True, dtype=np.float64):
    tb = micro_treebank()
    cfg = micro_config(seed, use_gold_upos)
    return ParserModel.initialize(cfg, Vocabularies.build([tb]), dtype=dtype)


@functools.lru_cache(maxsize=None)
def toy_corpus():
    return toy_treebank(50, seed=0)


@functools.lru_cache(maxsize=None)
def trained_toy_model(seed=1):
    """Desk-config model trained on the 50-sentence toy corpus (cached per session)."""
    return train(desk_config(seed), desk_schedule(), [toy_corpus()])


def predict_treebank(model, treebank):
    return Treebank(treebank.name, tuple(predict(model, s) for s in treebank.sentences))


@pytest.fixture
def data_dir():
    return DATA


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, title, passed, detail):
    """Print one PASS/FAIL line for an acceptance criterion and keep it for the summary."""
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
