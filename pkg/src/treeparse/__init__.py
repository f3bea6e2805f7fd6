"""Graph-based dependency parsing: CoNLL-U I/O, MST decoding, a joint
parsing/tagging network, multi-treebank training, ensembling, annotation
harmonization and evaluation."""

from .conllu import Sentence, Token, Treebank, parse_conllu, read_conllu, serialize_conllu, validate_tree, write_conllu
from .decoder import brute_force_mst, decode_mst
from .ensemble import average_scored, ensemble_predict
from .evaluation import attachment_scores, macro_average, tagging_accuracy
from .harmonizer import add_dummy_punct, fixed_numerals_to_flat, relabel_dep, strip_dummy_punct
from .sampler import sample_batches, treebank_weights

__version__ = "0.1.0"
