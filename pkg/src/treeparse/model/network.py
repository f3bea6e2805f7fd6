"""The joint parsing and tagging network.

Architecture, per sentence of n tokens::

    inputs   concat of channel embeddings (word form and/or gold UPOS)
    encoder  stacked BiLSTM -> one row per token, plus a learned root row
    arcs     score(h, d) = query(d) . key(h), query/key = MLP(encoder)
    labels   MLP([enc(d); enc(most likely head of d)])
    tags     MLP(enc(d)) for UPOS and for whole UFeats bundles

Every MLP is ``linear(relu(linear(x)))`` with a ``head_hidden_dim`` hidden
layer. Forward passes never mutate the model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..conllu import Sentence, Treebank
from ..errors import DataError
from . import layers
from .config import ModelConfig

class MissingGoldUpos(DataError):
    pass


class UnknownLabel(DataError):
    pass


class MissingAnnotation(DataError):
    pass


@dataclass(frozen=True)
class Vocabularies:
    """Index maps built from training data.

    ``forms`` and ``upos`` are looked up with index 0 reserved for unknown
    input values; the output vocabularies are ``upos``, ``labels`` and
    ``feats`` as stored.
    """

    forms: tuple[str, ...]
    upos: tuple[str, ...]
    labels: tuple[str, ...]
    feats: tuple[str, ...]
    case_fold: bool = False

    def __post_init__(self):
        object.__setattr__(self, "_form_index", {f: i + 1 for i, f in enumerate(self.forms)})
        object.__setattr__(self, "_upos_index", {u: i for i, u in enumerate(self.upos)})
        object.__setattr__(self, "_label_index", {l: i for i, l in enumerate(self.labels)})
        object.__setattr__(self, "_feats_index", {f: i for i, f in enumerate(self.feats)})

    @classmethod
    def build(cls, treebanks: Iterable[Treebank], case_fold: bool = False) -> "Vocabularies":
        forms, upos, labels, feats = set(), set(), set(), set()
        for tb in treebanks:
            for sent in tb.sentences:
                for tok in sent.tokens:
                    forms.add(tok.form.lower() if case_fold else tok.form)
                    upos.add(tok.upos)
                    labels.add(tok.deprel)
                    feats.add(tok.feats_str)
        return cls(tuple(sorted(forms)), tuple(sorted(upos)), tuple(sorted(labels)),
                   tuple(sorted(feats)), case_fold)

    def to_dict(self) -> dict:
        return {"forms": list(self.forms), "upos": list(self.upos), "labels": list(self.labels),
                "feats": list(self.feats), "case_fold": self.case_fold}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabularies":
        return cls(tuple(d["forms"]), tuple(d["upos"]), tuple(d["labels"]),
                   tuple(d["feats"]), bool(d["case_fold"]))

    def form_ids(self, sentence: Sentence) -> np.ndarray:
        fold = str.lower if self.case_fold else (lambda s: s)
        return np.array([self._form_index.get(fold(t.form), 0) for t in sentence.tokens])

    def upos_input_ids(self, sentence: Sentence) -> np.ndarray:
        ids = []
        for tok in sentence.tokens:
            if tok.upos == "_":
                raise MissingGoldUpos(f"token {tok.id} ({tok.form!r}) has no UPOS but the model reads gold UPOS")
            ids.append(self._upos_index.get(tok.upos, -1) + 1)
        return np.array(ids)

    def _lookup(self, index: dict, value: str, what: str) -> int:
        try:
            return index[value]
        except KeyError:
            raise UnknownLabel(f"{what} {value!r} not in the training vocabulary") from None

    def gold_ids(self, sentence: Sentence) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        heads, labels, upos, feats = [], [], [], []
        for tok in sentence.tokens:
            if tok.head is None:
                raise MissingAnnotation(f"token {tok.id} ({tok.form!r}) has no gold head")
            heads.append(tok.head)
            labels.append(self._lookup(self._label_index, tok.deprel, "deprel"))
            upos.append(self._lookup(self._upos_index, tok.upos, "UPOS"))
            feats.append(self._lookup(self._feats_index, tok.feats_str, "feature bundle"))
        return np.array(heads), np.array(labels), np.array(upos), np.array(feats)


def parameter_shapes(config: ModelConfig, vocabs: Vocabularies) -> dict[str, tuple[int, ...]]:
    shapes: dict[str, tuple[int, ...]] = {}
    for i, ch in enumerate(config.channels):
        rows = len(vocabs.forms) + 1 if ch.source == "form" else len(vocabs.upos) + 1
        shapes[f"emb.{i}"] = (rows, ch.dim)
    size = config.lstm_dim
    in_dim = config.input_dim
    for layer in range(config.lstm_layers):
        for direction in ("fwd", "bwd"):
            prefix = f"lstm.{layer}.{direction}"
            shapes[prefix + ".W"] = (4 * size, in_dim)
            shapes[prefix + ".U"] = (4 * size, size)
            shapes[prefix + ".b"] = (4 * size,)
        in_dim = 2 * size
    enc = config.encoder_dim
    shapes["root"] = (enc,)
    hid = config.head_hidden_dim
    outputs = {
        "arc_q": (enc, config.qk_dim),
        "arc_k": (enc, config.qk_dim),
        "label": (2 * enc, len(vocabs.labels)),
        "upos": (enc, len(vocabs.upos)),
        "feats": (enc, len(vocabs.feats)),
    }
    for head, (fan_in, fan_out) in outputs.items():
        shapes[head + ".W1"] = (hid, fan_in)
        shapes[head + ".b1"] = (hid,)
        shapes[head + ".W2"] = (fan_out, hid)
        shapes[head + ".b2"] = (fan_out,)
    return shapes


def _is_bias(name: str) -> bool:
    return name.endswith(".b") or name.endswith(".b1") or name.endswith(".b2")


class ParserModel:
    """Configuration, vocabularies and named parameter arrays."""

    def __init__(self, config: ModelConfig, vocabs: Vocabularies, params: dict[str, np.ndarray]):
        expected = parameter_shapes(config, vocabs)
        if set(expected) != set(params):
            raise ValueError(f"parameter names do not match config: {sorted(set(expected) ^ set(params))}")
        for name, shape in expected.items():
            if params[name].shape != shape:
                raise ValueError(f"{name}: expected shape {shape}, got {params[name].shape}")
        self.config = config
        self.vocabs = vocabs
        self.params = params

    @classmethod
    def initialize(cls, config: ModelConfig, vocabs: Vocabularies, dtype=np.float32,
                   rng: np.random.Generator | None = None) -> "ParserModel":
        """Glorot-uniform matrices and vectors, zero biases."""
        if rng is None:
            rng = np.random.default_rng(config.seed)
        params = {}
        for name, shape in parameter_shapes(config, vocabs).items():
            if _is_bias(name):
                params[name] = np.zeros(shape, dtype=dtype)
                continue
            fan_out, fan_in = shape if len(shape) == 2 else (1, shape[0])
            r = np.sqrt(6.0 / (fan_in + fan_out))
            params[name] = rng.uniform(-r, r, size=shape).astype(dtype)
        return cls(config, vocabs, params)

    @property
    def dtype(self):
        return self.params["root"].dtype

    def astype(self, dtype) -> "ParserModel":
        return ParserModel(self.config, self.vocabs, {k: v.astype(dtype) for k, v in self.params.items()})

    def copy(self) -> "ParserModel":
        return ParserModel(self.config, self.vocabs, {k: v.copy() for k, v in self.params.items()})

    @property
    def embedding_names(self) -> list[str]:
        return [f"emb.{i}" for i in range(len(self.config.channels))]

    def mlp(self, head: str):
        p = self.params
        return p[head + ".W1"], p[head + ".b1"], p[head + ".W2"], p[head + ".b2"]


@dataclass
class ScoredSentence:
    """Network outputs for one sentence.

    ``arc_scores`` is ``(n+1, n+1)`` indexed ``[head, dependent]`` with
    ``-inf`` outside the domain; the probability arrays have one row per
    dependent. ``head_probs`` rows cover heads 0..n.
    """

    arc_scores: np.ndarray
    head_probs: np.ndarray
    label_probs: np.ndarray
    upos_probs: np.ndarray
    feats_probs: np.ndarray
    vocabs: Vocabularies

    @property
    def label_heads(self) -> np.ndarray:
        return np.argmax(self.head_probs, axis=1)


@dataclass
class Encoded:
    """Encoder states plus what the backward pass needs."""

    states: np.ndarray  # (n+1, enc), row 0 is the root vector
    input_ids: list[np.ndarray]
    lstm_caches: list[tuple]


def encode(model: ParserModel, sentence: Sentence) -> Encoded:
    if len(sentence) == 0:
        raise ValueError("cannot encode an empty sentence")
    p = model.params
    ids, parts = [], []
    for i, ch in enumerate(model.config.channels):
        idx = model.vocabs.form_ids(sentence) if ch.source == "form" else model.vocabs.upos_input_ids(sentence)
        ids.append(idx)
        parts.append(p[f"emb.{i}"][idx])
    x = np.concatenate(parts, axis=1)
    caches = []
    for layer in range(model.config.lstm_layers):
        fwd, cf = layers.lstm_forward(x, *(p[f"lstm.{layer}.fwd.{k}"] for k in "WUb"))
        bwd, cb = layers.lstm_forward(x, *(p[f"lstm.{layer}.bwd.{k}"] for k in "WUb"), reverse=True)
        caches.append((cf, cb))
        x = np.concatenate([fwd, bwd], axis=1)
    states = np.concatenate([p["root"][None, :], x], axis=0)
    return Encoded(states, ids, caches)


def _arc_logits(model: ParserModel, states: np.ndarray):
    """Dot-product scores as ``(n, n+1)``: one row per dependent."""
    q, cq = layers.mlp_forward(states[1:], *model.mlp("arc_q"))
    k, ck = layers.mlp_forward(states, *model.mlp("arc_k"))
    logits = q @ k.T
    n = logits.shape[0]
    logits[np.arange(n), np.arange(1, n + 1)] = -np.inf
    return logits, (q, k, cq, ck)


def _label_logits(model: ParserModel, states: np.ndarray, label_heads: np.ndarray):
    z = np.concatenate([states[1:], states[label_heads]], axis=1)
    return layers.mlp_forward(z, *model.mlp("label"))


def head_distribution(model: ParserModel, enc: Encoded) -> tuple[np.ndarray, np.ndarray]:
    logits, _ = _arc_logits(model, enc.states)
    return logits, layers.softmax(logits)


def label_distribution(model: ParserModel, enc: Encoded, label_heads: np.ndarray) -> np.ndarray:
    logits, _ = _label_logits(model, enc.states, label_heads)
    return layers.softmax(logits)


def tag_distributions(model: ParserModel, enc: Encoded) -> tuple[np.ndarray, np.ndarray]:
    upos, _ = layers.mlp_forward(enc.states[1:], *model.mlp("upos"))
    feats, _ = layers.mlp_forward(enc.states[1:], *model.mlp("feats"))
    return layers.softmax(upos), layers.softmax(feats)


def arc_matrix(dependent_rows: np.ndarray) -> np.ndarray:
    """Turn ``(n, n+1)`` per-dependent rows into an ``(n+1, n+1)`` [head, dep] table."""
    n = dependent_rows.shape[0]
    table = np.full((n + 1, n + 1), -np.inf, dtype=np.float64)
    table[:, 1:] = dependent_rows.T
    table[np.arange(1, n + 1), np.arange(1, n + 1)] = -np.inf
    return table


def forward(model: ParserModel, sentence: Sentence, label_heads: np.ndarray | None = None) -> ScoredSentence:
    """Score a sentence.

    Labels are conditioned on ``label_heads`` when given, otherwise on each
    token's most probable head (not the decoded tree).
    """
    enc = encode(model, sentence)
    logits, head_probs = head_distribution(model, enc)
    if label_heads is None:
        label_heads = np.argmax(head_probs, axis=1)
    label_probs = label_distribution(model, enc, label_heads)
    upos_probs, feats_probs = tag_distributions(model, enc)
    return ScoredSentence(arc_matrix(logits), head_probs, label_probs, upos_probs, feats_probs, model.vocabs)


def _sentence_loss(model: ParserModel, sentence: Sentence, scale: float, grads: dict | None) -> float:
    """Token-averaged joint loss; adds ``scale * dloss`` into ``grads`` if given."""
    gold_heads, gold_labels, gold_upos, gold_feats = model.vocabs.gold_ids(sentence)
    n = len(sentence)
    rows = np.arange(n)
    enc = encode(model, sentence)
    states = enc.states

    arc_logits, (q, k, cq, ck) = _arc_logits(model, states)
    label_heads = np.argmax(layers.softmax(arc_logits), axis=1)
    label_logits, clabel = _label_logits(model, states, label_heads)
    upos_logits, cupos = layers.mlp_forward(states[1:], *model.mlp("upos"))
    feats_logits, cfeats = layers.mlp_forward(states[1:], *model.mlp("feats"))

    total = 0.0
    dlogits = []
    for logits, gold in ((arc_logits, gold_heads), (label_logits, gold_labels),
                         (upos_logits, gold_upos), (feats_logits, gold_feats)):
        logp = layers.log_softmax(logits)
        total -= float(logp[rows, gold].sum())
        if grads is not None:
            d = np.exp(logp)
            d[rows, gold] -= 1.0
            dlogits.append(d * (scale / n))
    loss = total / n
    if grads is None:
        return loss

    d_arc, d_label, d_upos, d_feats = dlogits
    dstates = np.zeros_like(states)

    def acc(name: str, value: np.ndarray):
        grads[name] += value

    dq = d_arc @ k
    dk = d_arc.T @ q
    for head, dout, cache, target in (("arc_q", dq, cq, slice(1, None)), ("arc_k", dk, ck, slice(None)),
                                      ("upos", d_upos, cupos, slice(1, None)),
                                      ("feats", d_feats, cfeats, slice(1, None))):
        dx, (dw1, db1, dw2, db2) = layers.mlp_backward(dout, cache)
        dstates[target] += dx
        acc(head + ".W1", dw1), acc(head + ".b1", db1), acc(head + ".W2", dw2), acc(head + ".b2", db2)
    dz, (dw1, db1, dw2, db2) = layers.mlp_backward(d_label, clabel)
    acc("label.W1", dw1), acc("label.b1", db1), acc("label.W2", dw2), acc("label.b2", db2)
    enc_dim = states.shape[1]
    dstates[1:] += dz[:, :enc_dim]
    np.add.at(dstates, label_heads, dz[:, enc_dim:])

    acc("root", dstates[0])
    dx = dstates[1:]
    size = model.config.lstm_dim
    for layer in range(model.config.lstm_layers - 1, -1, -1):
        cf, cb = enc.lstm_caches[layer]
        dxf, (dw, du, db) = layers.lstm_backward(dx[:, :size], cf)
        prefix = f"lstm.{layer}.fwd"
        acc(prefix + ".W", dw), acc(prefix + ".U", du), acc(prefix + ".b", db)
        dxb, (dw, du, db) = layers.lstm_backward(dx[:, size:], cb)
        prefix = f"lstm.{layer}.bwd"
        acc(prefix + ".W", dw), acc(prefix + ".U", du), acc(prefix + ".b", db)
        dx = dxf + dxb

    offset = 0
    for i, ch in enumerate(model.config.channels):
        np.add.at(grads[f"emb.{i}"], enc.input_ids[i], dx[:, offset:offset + ch.dim])
        offset += ch.dim
    return loss


def loss(model: ParserModel, sentence: Sentence) -> float:
    """Mean over tokens of the summed head, label, UPOS and UFeats cross-entropies."""
    return _sentence_loss(model, sentence, 1.0, None)


def batch_loss(model: ParserModel, batch: Sequence[Sentence]) -> float:
    return sum(loss(model, s) for s in batch) / len(batch)


def loss_and_gradients(model: ParserModel, batch: Sequence[Sentence]) -> tuple[float, dict[str, np.ndarray]]:
    """Mean sentence loss over ``batch`` and its exact gradient."""
    if not batch:
        raise ValueError("empty batch")
    grads = {name: np.zeros_like(value) for name, value in model.params.items()}
    scale = 1.0 / len(batch)
    total = 0.0
    for sentence in batch:
        total += _sentence_loss(model, sentence, scale, grads)
    return total / len(batch), grads


def gradients(model: ParserModel, batch: Sequence[Sentence]) -> dict[str, np.ndarray]:
    return loss_and_gradients(model, batch)[1]
