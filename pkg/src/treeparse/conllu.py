"""Reading, writing and validating CoNLL-U treebanks.

Tokens and sentences are immutable; transforms elsewhere in the package
return modified copies via :func:`dataclasses.replace`.

Canonical form, which :func:`serialize_conllu` always produces:

* ten tab-separated columns, ``_`` for empty values;
* FEATS sorted by key (case-insensitive);
* every sentence followed by one blank line.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError

UPOS_TAGS = (
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
)


class ConlluError(DataError):
    """Malformed CoNLL-U input. ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class MalformedLine(ConlluError):
    pass


class NonContiguousIds(ConlluError):
    pass


class HeadOutOfRange(ConlluError):
    pass


class EmptyNodeUnsupported(ConlluError):
    pass


class TreeError(DataError):
    pass


class NoRoot(TreeError):
    pass


class MultipleRoots(TreeError):
    pass


class CycleError(TreeError):
    def __init__(self, cycle: Sequence[int]):
        self.cycle = sorted(cycle)
        super().__init__(f"cycle through tokens {self.cycle}")


Feats = tuple[tuple[str, str], ...]


def parse_feats(text: str) -> Feats:
    """Parse a FEATS column into sorted ``(key, value)`` pairs."""
    if text == "_" or text == "":
        return ()
    pairs = []
    for item in text.split("|"):
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise ValueError(f"malformed feature {item!r}")
        pairs.append((key, value))
    return tuple(sorted(pairs, key=lambda kv: (kv[0].lower(), kv[0])))


def format_feats(feats: Feats) -> str:
    if not feats:
        return "_"
    return "|".join(f"{k}={v}" for k, v in feats)


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    lemma: str = "_"
    upos: str = "_"
    xpos: str = "_"
    feats: Feats = ()
    head: int | None = None
    deprel: str = "_"
    deps: str = "_"
    misc: str = "_"

    @property
    def feats_str(self) -> str:
        return format_feats(self.feats)

    @property
    def udeprel(self) -> str:
        """Universal part of the relation, without ``:subtype``."""
        return self.deprel.split(":", 1)[0]

    def to_line(self) -> str:
        head = "_" if self.head is None else str(self.head)
        return "\t".join((
            str(self.id), self.form, self.lemma, self.upos, self.xpos,
            self.feats_str, head, self.deprel, self.deps, self.misc,
        ))


@dataclass(frozen=True)
class MultiwordToken:
    """A range line ``a-b``; kept verbatim so files round-trip."""

    start: int
    end: int
    form: str
    columns: tuple[str, ...] = ("_",) * 8

    def to_line(self) -> str:
        return "\t".join((f"{self.start}-{self.end}", self.form) + self.columns)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    comments: tuple[str, ...] = ()
    mwt_ranges: tuple[MultiwordToken, ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def heads(self) -> list[int | None]:
        return [t.head for t in self.tokens]

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    def with_tokens(self, tokens: Iterable[Token]) -> "Sentence":
        return replace(self, tokens=tuple(tokens))


@dataclass(frozen=True)
class Treebank:
    name: str
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    @property
    def sentence_count(self) -> int:
        return len(self.sentences)

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


def _parse_block(lines: list[tuple[int, str]]) -> Sentence:
    comments: list[str] = []
    tokens: list[Token] = []
    mwts: list[tuple[int, MultiwordToken]] = []
    token_lines: list[int] = []
    for lineno, line in lines:
        if line.startswith("#"):
            if tokens or mwts:
                raise MalformedLine("comment line inside token block", lineno)
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise MalformedLine(f"expected 10 columns, found {len(cols)}", lineno)
        tid = cols[0]
        if "." in tid:
            raise EmptyNodeUnsupported(f"empty node {tid!r}", lineno)
        if "-" in tid:
            a, _, b = tid.partition("-")
            try:
                start, end = int(a), int(b)
            except ValueError:
                raise MalformedLine(f"bad range id {tid!r}", lineno) from None
            if start > end or start < 1:
                raise MalformedLine(f"bad range id {tid!r}", lineno)
            mwts.append((lineno, MultiwordToken(start, end, cols[1], tuple(cols[2:]))))
            continue
        try:
            idx = int(tid)
        except ValueError:
            raise MalformedLine(f"bad token id {tid!r}", lineno) from None
        if idx != len(tokens) + 1:
            raise NonContiguousIds(f"expected id {len(tokens) + 1}, found {idx}", lineno)
        if cols[6] == "_":
            head = None
        else:
            try:
                head = int(cols[6])
            except ValueError:
                raise MalformedLine(f"bad head {cols[6]!r}", lineno) from None
        try:
            feats = parse_feats(cols[5])
        except ValueError as err:
            raise MalformedLine(str(err), lineno) from None
        token_lines.append(lineno)
        tokens.append(Token(idx, cols[1], cols[2], cols[3], cols[4], feats,
                            head, cols[7], cols[8], cols[9]))

    if not tokens:
        raise MalformedLine("sentence without tokens", lines[0][0])
    n = len(tokens)
    for lineno, tok in zip(token_lines, tokens):
        if tok.head is not None and (tok.head < 0 or tok.head > n or tok.head == tok.id):
            raise HeadOutOfRange(f"head {tok.head} invalid for token {tok.id} (n={n})", lineno)
    for lineno, mwt in mwts:
        if mwt.end > n:
            raise MalformedLine(f"range {mwt.start}-{mwt.end} exceeds {n} tokens", lineno)
    return Sentence(tuple(tokens), tuple(comments), tuple(m for _, m in mwts))


def parse_conllu(text: str, name: str = "treebank") -> Treebank:
    """Parse CoNLL-U text. Raises a :class:`ConlluError` subclass on bad input."""
    sentences = []
    block: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if line.strip():
            block.append((lineno, line))
        elif block:
            sentences.append(_parse_block(block))
            block = []
    if block:
        sentences.append(_parse_block(block))
    return Treebank(name, tuple(sentences))


def serialize_sentence(sentence: Sentence) -> str:
    lines = list(sentence.comments)
    pending = sorted(sentence.mwt_ranges, key=lambda m: m.start)
    k = 0
    for tok in sentence.tokens:
        while k < len(pending) and pending[k].start == tok.id:
            lines.append(pending[k].to_line())
            k += 1
        lines.append(tok.to_line())
    return "\n".join(lines) + "\n\n"


def serialize_conllu(treebank: Treebank | Iterable[Sentence]) -> str:
    sentences = treebank.sentences if isinstance(treebank, Treebank) else treebank
    return "".join(serialize_sentence(s) for s in sentences)


def read_conllu(path: str | Path, name: str | None = None) -> Treebank:
    path = Path(path)
    return parse_conllu(path.read_text(encoding="utf-8"), name or path.stem)


def write_conllu(treebank: Treebank | Iterable[Sentence], path: str | Path) -> None:
    Path(path).write_text(serialize_conllu(treebank), encoding="utf-8")


def check_heads(heads: Sequence[int]) -> None:
    """Raise a :class:`TreeError` unless ``heads`` (1-based, 0 = root) is a tree.

    Multiple root arcs are reported first, then cycles.
    """
    n = len(heads)
    roots = [i + 1 for i, h in enumerate(heads) if h == 0]
    if len(roots) > 1:
        raise MultipleRoots(f"tokens {roots} are all attached to the root")
    # 0 = unvisited, 1 = on current path, 2 = known to reach the root
    state = [0] * (n + 1)
    state[0] = 2
    for start in range(1, n + 1):
        path = []
        node = start
        while state[node] == 0:
            state[node] = 1
            path.append(node)
            head = heads[node - 1]
            if not 0 <= head <= n:
                raise TreeError(f"head {head} of token {node} out of range")
            node = head
        if state[node] == 1:
            raise CycleError(path[path.index(node):])
        for p in path:
            state[p] = 2
    if not roots:
        # unreachable for complete head vectors: no root arc implies a cycle
        raise NoRoot("no token attached to the root")


def is_tree(heads: Sequence[int]) -> bool:
    try:
        check_heads(heads)
    except TreeError:
        return False
    return True


def validate_tree(sentence: Sentence) -> None:
    """Check that the sentence heads form one rooted arborescence.

    Returns ``None`` when valid, raises :class:`NoRoot`,
    :class:`MultipleRoots` or :class:`CycleError` otherwise.
    """
    heads = sentence.heads
    if any(h is None for h in heads):
        raise ValueError("validate_tree requires every head to be set")
    check_heads(heads)  # type: ignore[arg-type]
