"""
Multi-treebank sampling and evaluation
======================================

Treebanks are mixed in proportion to the square root of their sentence
counts, so small treebanks are seen more often than their size suggests.
Scores are then macro-averaged across treebanks.
"""

import numpy as np

from treeparse.evaluation import evaluate_many, macro_average
from treeparse.sampler import sample_batches, sample_report, treebank_weights
from treeparse.toy import toy_treebank

big, small = toy_treebank(400, seed=1, name="big"), toy_treebank(100, seed=2, name="small")
print("\n".join(sample_report([big, small])))

rng = np.random.default_rng(0)
drawn = [s for batch in sample_batches(rng, [big, small], treebank_weights([400, 100]), 32, 200) for s in batch]
share = np.mean([any(s is t for t in small.sentences) for s in drawn[:2000]])
print(f"share of 'small' in the first 2000 draws: {share:.3f} (expected 1/3)")

# %%
# Macro averages are rounded half up on the decimal value, so 0.005 rounds
# to 0.01 rather than to the nearest even digit.
print(f"{macro_average([90.91, 94.54, 86.75, 66.71, 77.08]):.2f}")

# %%
# A report lists per-treebank LAS followed by the averages.
report = evaluate_many([(big, big), (small, small)])
print("\n".join(report.lines()))
