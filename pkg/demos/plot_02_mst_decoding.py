"""
Decoding the best dependency tree
=================================

Scores live in an ``(n+1, n+1)`` table indexed ``[head, dependent]``; row 0
is the artificial root. ``decode_mst`` returns the highest-scoring tree
with exactly one token attached to the root.
"""

import numpy as np

from treeparse.decoder import brute_force_mst, decode_mst, tree_score

scores = np.zeros((3, 3))
scores[0, 1], scores[0, 2] = 5.0, 1.0
scores[1, 2], scores[2, 1] = 4.0, 3.0

heads = decode_mst(scores)
print("heads:", heads, "score:", tree_score(scores, heads))

# %%
# When two tokens both prefer the root, the unconstrained optimum has two
# roots. The decoder tries every candidate root and keeps the best tree.
two_roots = np.full((3, 3), -1.0)
two_roots[0, 1] = two_roots[0, 2] = 5.0
two_roots[1, 2] = 1.0
print("single-rooted:", decode_mst(two_roots))

# %%
# For short sentences an exhaustive search gives the same total score.
rng = np.random.default_rng(0)
for n in range(1, 7):
    s = rng.uniform(-1, 1, size=(n + 1, n + 1))
    assert tree_score(s, decode_mst(s)) == tree_score(s, brute_force_mst(s))
print("matches brute force for n = 1..6")
