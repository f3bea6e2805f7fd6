"""Annotation-style harmonization and the dummy-punctuation shim.

The two relation transforms only ever touch the DEPREL column.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, NamedTuple

from .conllu import UPOS_TAGS, Sentence, Token
from .errors import DataError

PUNCT_FORMS = frozenset({".", ",", ";", ":", "?", "!"})


class MalformedRule(DataError):
    pass


class InconsistentMarker(DataError):
    pass


class DepRule(NamedTuple):
    dep_upos: str
    head_upos: str  # "*" matches anything, including the root
    deprel: str


DEFAULT_DEP_RULES = (
    DepRule("ADJ", "*", "amod"),
    DepRule("ADV", "*", "advmod"),
    DepRule("NOUN", "VERB", "obl"),
    DepRule("PROPN", "VERB", "obl"),
    DepRule("PRON", "VERB", "obl"),
    DepRule("NOUN", "*", "nmod"),
    DepRule("PROPN", "*", "nmod"),
    DepRule("PRON", "*", "nmod"),
    DepRule("VERB", "*", "advcl"),
)


def _head_upos(sentence: Sentence, tok: Token) -> str | None:
    if tok.head is None or tok.head == 0:
        return None
    return sentence.tokens[tok.head - 1].upos


def fixed_numerals_to_flat(sentence: Sentence) -> Sentence:
    """Relabel ``fixed`` between two numerals as ``flat``."""
    tokens = []
    for tok in sentence.tokens:
        if tok.udeprel == "fixed" and tok.upos == "NUM" and _head_upos(sentence, tok) == "NUM":
            tok = replace(tok, deprel="flat")
        tokens.append(tok)
    return sentence.with_tokens(tokens)


def relabel_dep(sentence: Sentence, rules: Iterable[DepRule] = DEFAULT_DEP_RULES) -> Sentence:
    """Replace underspecified ``dep`` relations using the first matching rule."""
    rules = tuple(rules)
    tokens = []
    for tok in sentence.tokens:
        if tok.udeprel == "dep":
            head_upos = _head_upos(sentence, tok)
            for rule in rules:
                if rule.dep_upos == tok.upos and rule.head_upos in ("*", head_upos):
                    tok = replace(tok, deprel=rule.deprel)
                    break
        tokens.append(tok)
    return sentence.with_tokens(tokens)


def parse_rules(text: str) -> tuple[DepRule, ...]:
    """Parse a rule table: ``DEP_UPOS HEAD_UPOS_OR_* NEW_DEPREL`` per line."""
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise MalformedRule(f"line {lineno}: expected 3 fields, found {len(fields)}")
        dep_upos, head_upos, deprel = fields
        if dep_upos not in UPOS_TAGS:
            raise MalformedRule(f"line {lineno}: unknown UPOS {dep_upos!r}")
        if head_upos != "*" and head_upos not in UPOS_TAGS:
            raise MalformedRule(f"line {lineno}: unknown head UPOS {head_upos!r}")
        rules.append(DepRule(dep_upos, head_upos, deprel))
    return tuple(rules)


def read_rules(path: str | Path) -> tuple[DepRule, ...]:
    return parse_rules(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class PunctMarker:
    appended: bool
    original_length: int


def add_dummy_punct(sentence: Sentence) -> tuple[Sentence, PunctMarker]:
    """Append a final period unless the sentence already ends in punctuation."""
    n = len(sentence)
    last = sentence.tokens[-1]
    if last.upos == "PUNCT" or last.form in PUNCT_FORMS:
        return sentence, PunctMarker(False, n)
    dummy = Token(n + 1, ".", upos="PUNCT")
    return sentence.with_tokens(sentence.tokens + (dummy,)), PunctMarker(True, n)


def strip_dummy_punct(sentence: Sentence, marker: PunctMarker) -> Sentence:
    """Remove the dummy period again, reattaching its dependents.

    Dependents of the dummy move to the dummy's own head. When the dummy was
    the root, its first dependent takes over the root and the remaining
    dependents attach to that token.
    """
    if not marker.appended:
        if len(sentence) != marker.original_length:
            raise InconsistentMarker("sentence length changed but no dummy was added")
        return sentence
    n = marker.original_length
    if len(sentence) != n + 1 or sentence.tokens[-1].form != ".":
        raise InconsistentMarker("sentence does not end with the dummy token")
    dummy = sentence.tokens[-1]
    kept = sentence.tokens[:-1]
    orphans = [t.id for t in kept if t.head == n + 1]
    if not orphans:
        return sentence.with_tokens(kept)

    new_root = None
    if dummy.head == 0:
        new_root = orphans[0]
        target = new_root
    else:
        target = dummy.head
    tokens = []
    for tok in kept:
        if tok.id == new_root:
            tok = replace(tok, head=0, deprel="root")
        elif tok.head == n + 1:
            tok = replace(tok, head=target)
        tokens.append(tok)
    return sentence.with_tokens(tokens)
