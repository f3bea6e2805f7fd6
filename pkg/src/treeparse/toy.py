"""Synthetic Latin-flavoured treebanks for tests and demos.

Sentences are built from a small case-marking grammar with free
constituent order: subject (nominative), object (accusative), optional
prepositional phrase (ablative), optional adverb, a verb and final
punctuation. Adjectives agree with their noun. Because order is free,
attachment has to be read off the endings.
"""

from __future__ import annotations

import numpy as np

from .conllu import Sentence, Token, Treebank, parse_feats
from .model.config import Channel, ModelConfig, TrainSchedule

NOUN_STEMS = ("domin", "serv", "amic", "equ", "hort", "mur", "libr", "agr", "fili", "popul")
ADJ_STEMS = ("bon", "magn", "alt", "nov", "lat")
VERBS = {"videt": "video", "amat": "amo", "laudat": "laudo", "portat": "porto", "vocat": "voco", "habet": "habeo"}
PLURAL_VERBS = {"vident": "video", "amant": "amo", "laudant": "laudo", "portant": "porto", "vocant": "voco", "habent": "habeo"}
ADPS = ("in", "cum", "sub", "ex")
ADVS = ("bene", "saepe", "nunc")
ENDINGS = {
    ("Nom", "Sing"): "us", ("Nom", "Plur"): "i",
    ("Acc", "Sing"): "um", ("Acc", "Plur"): "os",
    ("Abl", "Sing"): "o", ("Abl", "Plur"): "is",
}


def _nominal(rng, stems, case, number, upos):
    stem = stems[rng.integers(len(stems))]
    feats = f"Case={case}|Gender=Masc|Number={number}"
    return {"form": stem + ENDINGS[case, number], "lemma": stem + "us", "upos": upos, "feats": feats}


def _phrase(rng, case, relation, with_adp=False):
    """A noun with optional adjective (and preposition); returns words and the noun's index."""
    number = "Sing" if rng.random() < 0.6 else "Plur"
    noun = dict(_nominal(rng, NOUN_STEMS, case, number, "NOUN"), deprel=relation)
    words = [noun]
    if rng.random() < 0.5:
        adj = dict(_nominal(rng, ADJ_STEMS, case, number, "ADJ"), deprel="amod", head_local=0)
        words = [adj, noun] if rng.random() < 0.5 else [noun, adj]
    noun_at = words.index(noun)
    for w in words:
        if w is not noun:
            w["head_local"] = noun_at
    if with_adp:
        adp = ADPS[rng.integers(len(ADPS))]
        words.insert(0, {"form": adp, "lemma": adp, "upos": "ADP", "feats": "_", "deprel": "case", "head_local": noun_at + 1})
        for w in words[1:]:
            if "head_local" in w:
                w["head_local"] += 1
        noun_at += 1
    return words, noun_at


def toy_sentence(rng: np.random.Generator, index: int) -> Sentence:
    subj, _ = _phrase(rng, "Nom", "nsubj")
    subj_number = next(w["feats"] for w in subj if w["upos"] == "NOUN").split("Number=")[1]
    obj, _ = _phrase(rng, "Acc", "obj")
    table = VERBS if subj_number == "Sing" else PLURAL_VERBS
    form = list(table)[rng.integers(len(table))]
    verb = [{"form": form, "lemma": table[form], "upos": "VERB",
             "feats": f"Mood=Ind|Number={subj_number}|Person=3|Tense=Pres", "deprel": "root"}]
    chunks = [subj, obj, verb]
    if rng.random() < 0.5:
        chunks.append(_phrase(rng, "Abl", "obl", with_adp=True)[0])
    if rng.random() < 0.4:
        adv = ADVS[rng.integers(len(ADVS))]
        chunks.append([{"form": adv, "lemma": adv, "upos": "ADV", "feats": "_", "deprel": "advmod"}])
    order = rng.permutation(len(chunks))

    words, verb_id = [], None
    for c in order:
        chunk = chunks[c]
        base = len(words)
        for w in chunk:
            w = dict(w)
            if "head_local" in w:
                w["head"] = base + w.pop("head_local") + 1
            words.append(w)
        if chunk is verb:
            verb_id = base + 1
    words.append({"form": ".", "lemma": ".", "upos": "PUNCT", "feats": "_", "deprel": "punct"})
    tokens = []
    for i, w in enumerate(words, start=1):
        if w["deprel"] == "root":
            head = 0
        else:
            head = w.get("head", verb_id)
        tokens.append(Token(i, w["form"], w["lemma"], w["upos"], "_", parse_feats(w["feats"]), head, w["deprel"]))
    text = " ".join(w["form"] for w in words)
    return Sentence(tuple(tokens), (f"# sent_id = toy-{index}", f"# text = {text}"))


def toy_treebank(n_sentences: int = 50, seed: int = 0, name: str = "toy") -> Treebank:
    rng = np.random.default_rng(seed)
    return Treebank(name, tuple(toy_sentence(rng, i + 1) for i in range(n_sentences)))


_MICRO = [
    [("puer", "NOUN", "Case=Nom", 2, "nsubj"), ("videt", "VERB", "_", 0, "root"),
     ("equum", "NOUN", "Case=Acc", 2, "obj")],
    [("equus", "NOUN", "Case=Nom", 3, "nsubj"), ("bene", "ADV", "_", 3, "advmod"),
     ("currit", "VERB", "_", 0, "root"), (".", "PUNCT", "_", 3, "punct")],
    [("puerum", "NOUN", "Case=Acc", 2, "obj"), ("amat", "VERB", "_", 0, "root"),
     ("magnus", "ADJ", "Case=Nom", 4, "amod"), ("equus", "NOUN", "Case=Nom", 2, "nsubj")],
]


def micro_treebank() -> Treebank:
    """Three hand-written sentences over a vocabulary of under 20 forms."""
    sentences = []
    for rows in _MICRO:
        tokens = tuple(
            Token(i, form, form, upos, "_", parse_feats(feats), head, rel)
            for i, (form, upos, feats, head, rel) in enumerate(rows, start=1)
        )
        sentences.append(Sentence(tokens))
    return Treebank("micro", tuple(sentences))


def desk_config(seed: int = 1, use_gold_upos: bool = False) -> ModelConfig:
    """Small network that memorises the toy corpus on one CPU core."""
    channels = (Channel("form", 32),) + ((Channel("upos", 8),) if use_gold_upos else ())
    return ModelConfig(channels=channels, lstm_layers=2, lstm_dim=64, head_hidden_dim=128, qk_dim=32, seed=seed)


def desk_schedule() -> TrainSchedule:
    return TrainSchedule(frozen_epochs=5, frozen_lr=1e-3, main_epochs=30, batches_per_epoch=20,
                         batch_size=16, peak_lr=3e-3, warmup_epochs=2)


DESK_CONFIG_JSON = {
    "channels": [{"source": "form", "dim": 32}],
    "lstm_layers": 2, "lstm_dim": 64, "head_hidden_dim": 128, "qk_dim": 32, "seed": 1,
    "frozen_epochs": 5, "frozen_lr": 1e-3, "main_epochs": 30, "batches_per_epoch": 20,
    "batch_size": 16, "peak_lr": 3e-3, "warmup_epochs": 2,
}
