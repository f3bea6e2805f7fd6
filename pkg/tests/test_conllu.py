import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeparse.conllu import (
    CycleError,
    EmptyNodeUnsupported,
    HeadOutOfRange,
    MalformedLine,
    MultipleRoots,
    NoRoot,
    NonContiguousIds,
    Sentence,
    Token,
    Treebank,
    parse_conllu,
    parse_feats,
    serialize_conllu,
    validate_tree,
)

from conftest import DATA

MINIMAL = "1\tarma\tarma\tNOUN\t_\t_\t2\tobj\t_\t_\n2\tcano\tcano\tVERB\t_\t_\t0\troot\t_\t_\n\n"


def _sentence(heads):
    return Sentence(tuple(Token(i, f"w{i}", head=h) for i, h in enumerate(heads, start=1)))


def test_minimal_sentence():
    tb = parse_conllu(MINIMAL, "tiny")
    assert tb.sentence_count == 1
    assert tb.token_count == 2
    assert tb.sentences[0].tokens[1].head == 0


def test_non_contiguous_ids_reports_line():
    text = "# c\n1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n3\tb\t_\t_\t_\t_\t1\tdep\t_\t_\n\n"
    with pytest.raises(NonContiguousIds) as err:
        parse_conllu(text)
    assert err.value.lineno == 3


@pytest.mark.parametrize("line, error", [
    ("1\ta\t_\t_\t_\t_\t0\troot\t_", MalformedLine),
    ("1\ta\t_\t_\t_\t_\t5\troot\t_\t_", HeadOutOfRange),
    ("1\ta\t_\t_\t_\t_\t1\troot\t_\t_", HeadOutOfRange),
    ("1.1\ta\t_\t_\t_\t_\t_\t_\t_\t_", EmptyNodeUnsupported),
    ("1\ta\t_\t_\t_\tCase\t0\troot\t_\t_", MalformedLine),
])
def test_malformed_input(line, error):
    with pytest.raises(error) as err:
        parse_conllu(line + "\n\n")
    assert err.value.lineno == 1


def test_multiword_token_passthrough():
    tb = parse_conllu((DATA / "mwt.conllu").read_text(encoding="utf-8"))
    first = tb.sentences[0]
    assert [(m.start, m.end, m.form) for m in first.mwt_ranges] == [(1, 2, "della")]
    assert len(first) == 3


@pytest.mark.parametrize("name", ["mwt.conllu", "harmonize.conllu", "toy_sample.conllu"])
def test_round_trip_is_byte_identical(name):
    text = (DATA / name).read_text(encoding="utf-8")
    assert serialize_conllu(parse_conllu(text)) == text


def test_non_canonical_input_becomes_canonical():
    text = "1\tx\t_\tNOUN\t_\tNumber=Sing|Case=Nom\t0\troot\t_\t_\r\n\n\n\n"
    out = serialize_conllu(parse_conllu(text))
    assert out == "1\tx\t_\tNOUN\t_\tCase=Nom|Number=Sing\t0\troot\t_\t_\n\n"


def test_empty_feats_and_comments_are_rendered():
    s = Sentence((Token(1, "x", head=0, deprel="root"),), comments=("# sent_id = 1",))
    out = serialize_conllu(Treebank("t", (s,)))
    assert out.splitlines()[0] == "# sent_id = 1"
    assert out.splitlines()[1].split("\t")[5] == "_"


def test_feats_sorted_case_insensitively():
    assert parse_feats("number=Sing|Case=Nom|Abbr=Yes") == (("Abbr", "Yes"), ("Case", "Nom"), ("number", "Sing"))


_field = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc", "Zs", "Zl", "Zp")), min_size=1, max_size=6).filter(lambda s: s != "_" and "\t" not in s)
_feats = st.dictionaries(st.sampled_from(["Case", "Number", "Gender"]), st.sampled_from(["Nom", "Sing", "Masc"]), max_size=3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(_field, st.sampled_from(["NOUN", "VERB", "_"]), _feats), min_size=1, max_size=6))
def test_parse_serialize_preserves_fields(rows):
    tokens = tuple(
        Token(i, form, form, upos, "_", tuple(sorted(feats.items())), i - 1, "dep" if i > 1 else "root")
        for i, (form, upos, feats) in enumerate(rows, start=1)
    )
    tb = Treebank("t", (Sentence(tokens),))
    again = parse_conllu(serialize_conllu(tb), "t")
    assert again.token_count == tb.token_count
    assert again.sentences[0].tokens == tokens


@pytest.mark.parametrize("heads, error", [
    ([0, 1, 1], None),
    ([2, 1], CycleError),
    ([0, 0, 1], MultipleRoots),
    ([2, 3, 2], CycleError),
])
def test_validate_tree(heads, error):
    if error is None:
        validate_tree(_sentence(heads))
    else:
        with pytest.raises(error):
            validate_tree(_sentence(heads))


def test_cycle_reports_members():
    with pytest.raises(CycleError) as err:
        validate_tree(_sentence([2, 1]))
    assert err.value.cycle == [1, 2]
    with pytest.raises(CycleError) as err:
        validate_tree(_sentence([0, 3, 4, 2]))
    assert err.value.cycle == [2, 3, 4]


def _reachability_ok(heads):
    """Independent check: one root arc and a DFS from 0 visits every token once."""
    n = len(heads)
    if sum(h == 0 for h in heads) != 1:
        return False
    children = {h: [] for h in range(n + 1)}
    for d, h in enumerate(heads, start=1):
        children[h].append(d)
    seen, stack = [], [0]
    while stack:
        node = stack.pop()
        for c in children[node]:
            seen.append(c)
            stack.append(c)
    return sorted(seen) == list(range(1, n + 1))


def test_validate_tree_agrees_with_reachability():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        heads = [int(h) for h in rng.integers(0, n + 1, size=n)]
        heads = [h if h != d else 0 for d, h in enumerate(heads, start=1)]
        try:
            validate_tree(_sentence(heads))
            ok = True
        except (NoRoot, MultipleRoots, CycleError):
            ok = False
        assert ok == _reachability_ok(heads), heads
