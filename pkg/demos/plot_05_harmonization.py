"""
Harmonising annotation styles
=============================

Two rewrites bring treebanks closer to a shared style. Compound numerals
joined with ``fixed`` become ``flat``. Bare ``dep`` relations get a label
chosen from the parts of speech of the dependent and its head. Only the
deprel column changes.
"""

from treeparse.conllu import parse_conllu, serialize_conllu
from treeparse.harmonizer import add_dummy_punct, fixed_numerals_to_flat, parse_rules, relabel_dep, strip_dummy_punct

text = """1\tviginti\tviginti\tNUM\t_\t_\t3\tnummod\t_\t_
2\tquattuor\tquattuor\tNUM\t_\t_\t1\tfixed\t_\t_
3\tmilites\tmiles\tNOUN\t_\t_\t4\tdep\t_\t_
4\tvenerunt\tvenio\tVERB\t_\t_\t0\troot\t_\t_
5\theu\theu\tINTJ\t_\t_\t4\tdep\t_\t_

"""
sentence = parse_conllu(text).sentences[0]

# %%
# Default rules: a noun under a verb becomes ``obl``. The interjection has
# no matching rule and keeps ``dep``.
harmonised = relabel_dep(fixed_numerals_to_flat(sentence))
print(serialize_conllu([harmonised]))

# %%
# A custom rule table is plain text: dependent UPOS, head UPOS (``*`` for
# any), new label. The first matching rule wins.
rules = parse_rules("INTJ * discourse\nNOUN VERB nsubj\n")
print([t.deprel for t in relabel_dep(sentence, rules).tokens])

# %%
# Sentences without final punctuation can get a temporary period before
# parsing. Stripping it afterwards restores the original tokens.
padded, marker = add_dummy_punct(sentence)
print("padded forms:", padded.forms)
assert strip_dummy_punct(padded, marker) == sentence
