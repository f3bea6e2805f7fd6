"""
Reading and writing CoNLL-U
===========================

A treebank file is parsed into frozen ``Sentence`` objects and written back.
Canonical files survive the trip byte for byte.
"""

from treeparse.conllu import parse_conllu, serialize_conllu, validate_tree

text = """# sent_id = 1
# text = della casa
1-2\tdella\t_\t_\t_\t_\t_\t_\t_\t_
1\tde\tde\tADP\t_\t_\t3\tcase\t_\t_
2\tla\tla\tDET\t_\t_\t3\tdet\t_\t_
3\tcasa\tcasa\tNOUN\t_\tNumber=Sing|Gender=Fem\t0\troot\t_\t_

"""

# %%
# Multiword-token lines are kept aside and written back in place.
treebank = parse_conllu(text, name="demo")
sentence = treebank.sentences[0]
print("forms:", sentence.forms)
print("heads:", sentence.heads)
print("multiword tokens:", [(m.start, m.end, m.form) for m in sentence.mwt_ranges])

# %%
# Feature bundles are stored sorted, so this input is not yet canonical:
# ``Number`` comes before ``Gender``. Serialising fixes the order, and a
# second round trip is then exact.
once = serialize_conllu(treebank)
print(once)
assert serialize_conllu(parse_conllu(once)) == once

# %%
# ``validate_tree`` raises a ``TreeError`` subclass for anything that is not
# a single-rooted tree.
validate_tree(sentence)
print("tree is well formed")
