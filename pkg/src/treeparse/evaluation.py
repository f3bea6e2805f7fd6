"""Attachment and tagging accuracy, plus macro averages over treebanks."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

from .conllu import Treebank
from .errors import DataError


class AlignmentError(DataError):
    def __init__(self, message: str, sentence_index: int):
        self.sentence_index = sentence_index
        super().__init__(f"sentence {sentence_index}: {message}")


class EmptyInput(DataError):
    pass


def _aligned_pairs(gold: Treebank, system: Treebank):
    if gold.sentence_count != system.sentence_count:
        raise AlignmentError(
            f"gold has {gold.sentence_count} sentences, system {system.sentence_count}",
            min(gold.sentence_count, system.sentence_count),
        )
    for i, (g, s) in enumerate(zip(gold.sentences, system.sentences)):
        if len(g) != len(s):
            raise AlignmentError(f"{len(g)} gold tokens vs {len(s)} system tokens", i)
        if g.forms != s.forms:
            raise AlignmentError("token forms differ", i)
        yield from zip(g.tokens, s.tokens)


def _pct(hits: int, total: int) -> float:
    return 100.0 * hits / total if total else 0.0


def attachment_scores(gold: Treebank, system: Treebank, strip_subtypes: bool = True) -> tuple[float, float]:
    """Return ``(uas, las)`` as percentages over all tokens, punctuation included."""
    total = uas = las = 0
    for g, s in _aligned_pairs(gold, system):
        total += 1
        if g.head == s.head:
            uas += 1
            if strip_subtypes:
                las += g.udeprel == s.udeprel
            else:
                las += g.deprel == s.deprel
    return _pct(uas, total), _pct(las, total)


def tagging_accuracy(gold: Treebank, system: Treebank) -> tuple[float, float]:
    """Return ``(upos_acc, ufeats_acc)``; features compare as unordered sets."""
    total = upos = feats = 0
    for g, s in _aligned_pairs(gold, system):
        total += 1
        upos += g.upos == s.upos
        feats += set(g.feats) == set(s.feats)
    return _pct(upos, total), _pct(feats, total)


def round_half_up(value: float, places: int = 2) -> float:
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def macro_average(values: Sequence[float]) -> float:
    """Unweighted mean rounded half-up to two decimals.

    The sum is taken in decimal arithmetic over the values' shortest
    representations, so printed two-decimal inputs average exactly.
    """
    if len(values) == 0:
        raise EmptyInput("macro average of nothing")
    total = sum(Decimal(repr(float(v))) for v in values)
    mean = total / len(values)
    return float(mean.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


METRICS = ("uas", "las", "upos", "ufeats")
METRIC_LABELS = {"uas": "UAS", "las": "LAS", "upos": "UPOS", "ufeats": "UFeats"}


@dataclass
class TreebankScores:
    uas: float
    las: float
    upos: float
    ufeats: float


@dataclass
class MetricReport:
    treebanks: dict[str, TreebankScores] = field(default_factory=dict)

    @property
    def macro(self) -> dict[str, float]:
        return {
            m: macro_average([getattr(s, m) for s in self.treebanks.values()])
            for m in METRICS
        }

    def to_dict(self) -> dict:
        return {
            "treebanks": {
                name: {m: round_half_up(v) for m, v in asdict(s).items()}
                for name, s in self.treebanks.items()
            },
            "macro": self.macro,
        }

    def lines(self) -> list[str]:
        if len(self.treebanks) == 1:
            (scores,) = self.treebanks.values()
            return [f"{METRIC_LABELS[m]}: {getattr(scores, m):.2f}" for m in METRICS]
        out = []
        for name, scores in self.treebanks.items():
            out += [f"{name} {METRIC_LABELS[m]}: {getattr(scores, m):.2f}" for m in METRICS]
        out += [f"Avg {METRIC_LABELS[m]}: {v:.2f}" for m, v in self.macro.items()]
        return out


def evaluate(gold: Treebank, system: Treebank, strip_subtypes: bool = True) -> TreebankScores:
    uas, las = attachment_scores(gold, system, strip_subtypes)
    upos, ufeats = tagging_accuracy(gold, system)
    return TreebankScores(uas, las, upos, ufeats)


def evaluate_many(pairs: Sequence[tuple[Treebank, Treebank]], strip_subtypes: bool = True) -> MetricReport:
    report = MetricReport()
    for gold, system in pairs:
        report.treebanks[gold.name] = evaluate(gold, system, strip_subtypes)
    return report
