"""Maximum spanning arborescence decoding.

Arc scores are a square array ``scores[h, d]`` of shape ``(n + 1, n + 1)``:
the score of attaching dependent ``d`` (1..n) to head ``h`` (0..n, 0 being
the artificial root). Column 0 and the diagonal are outside the domain and
are ignored.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import TreeparseError

BRUTE_FORCE_LIMIT = 8


class SizeLimitExceeded(TreeparseError):
    pass


def _domain(scores) -> np.ndarray:
    """Float copy of ``scores`` with out-of-domain cells set to -inf."""
    w = np.array(scores, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 2:
        raise ValueError(f"arc scores must be (n+1, n+1) with n >= 1, got {w.shape}")
    w[:, 0] = -np.inf
    np.fill_diagonal(w, -np.inf)
    return w


def tree_score(scores, heads) -> float:
    """Total score of a head vector, summed in dependent order."""
    scores = np.asarray(scores, dtype=np.float64)
    total = 0.0
    for d, h in enumerate(heads, start=1):
        total += float(scores[h, d])
    return total


def _find_cycle(heads: np.ndarray) -> list[int] | None:
    n = len(heads)
    color = np.zeros(n, dtype=np.int8)
    color[0] = 2
    for start in range(1, n):
        path = []
        node = start
        while color[node] == 0:
            color[node] = 1
            path.append(node)
            node = heads[node]
        if color[node] == 1:
            return path[path.index(node):]
        for p in path:
            color[p] = 2
    return None


def _chu_liu_edmonds(w: np.ndarray) -> np.ndarray:
    """Unconstrained maximum arborescence rooted at node 0.

    ``w[h, d]`` with -inf for forbidden arcs. Returns ``heads`` with
    ``heads[0] = -1``.
    """
    size = w.shape[0]
    heads = np.argmax(w, axis=0)
    heads[0] = -1
    cycle = _find_cycle(heads)
    if cycle is None:
        return heads

    in_cycle = np.zeros(size, dtype=bool)
    in_cycle[cycle] = True
    outside = np.flatnonzero(~in_cycle)
    m = len(outside)
    c = m  # index of the contracted node

    sub = np.full((m + 1, m + 1), -np.inf)
    sub[:m, :m] = w[np.ix_(outside, outside)]

    cyc = np.array(cycle)
    # arcs entering the cycle: gain relative to the arc they would break
    enter = w[np.ix_(outside, cyc)] - w[heads[cyc], cyc][None, :]
    enter_best = np.argmax(enter, axis=1)
    sub[:m, c] = enter[np.arange(m), enter_best]
    # arcs leaving the cycle
    leave = w[np.ix_(cyc, outside)]
    leave_best = np.argmax(leave, axis=0)
    sub[c, :m] = leave[leave_best, np.arange(m)]

    sub_heads = _chu_liu_edmonds(sub)

    result = heads.copy()
    for j in range(1, m):
        v = outside[j]
        h = sub_heads[j]
        result[v] = cyc[leave_best[j]] if h == c else outside[h]
    entering_from = sub_heads[c]
    v = cyc[enter_best[entering_from]]
    result[v] = outside[entering_from]
    return result


def decode_mst(scores) -> list[int]:
    """Highest-scoring dependency tree with exactly one token on the root.

    The unconstrained optimum is used when it already has a single root;
    otherwise each token is tried as the sole root dependent and the best
    resulting tree is kept.
    """
    w = _domain(scores)
    n = w.shape[0] - 1
    heads = _chu_liu_edmonds(w)[1:]
    if np.count_nonzero(heads == 0) == 1:
        return heads.tolist()

    best, best_score = None, -np.inf
    for root in range(1, n + 1):
        constrained = w.copy()
        constrained[0, :] = -np.inf
        constrained[0, root] = w[0, root]
        candidate = _chu_liu_edmonds(constrained)[1:].tolist()
        score = tree_score(w, candidate)
        if score > best_score:
            best, best_score = candidate, score
    return best


@functools.lru_cache(maxsize=None)
def enumerate_trees(n: int) -> np.ndarray:
    """All single-rooted head vectors over n tokens, in lexicographic order.

    Heads are assigned token by token; an assignment is pruned as soon as it
    adds a second root arc or closes a cycle.
    """
    heads = [-1] * (n + 1)
    out: list[list[int]] = []

    def closes_cycle(d: int, h: int) -> bool:
        while h > 0:
            if h == d:
                return True
            h = heads[h]
        return False

    def assign(d: int, has_root: bool) -> None:
        if d > n:
            if has_root:
                out.append(heads[1:])
            return
        for h in range(n + 1):
            if h == d or (h == 0 and has_root) or closes_cycle(d, h):
                continue
            heads[d] = h
            assign(d + 1, has_root or h == 0)
            heads[d] = -1

    assign(1, False)
    trees = np.array(out, dtype=np.int64).reshape(-1, n)
    trees.setflags(write=False)
    return trees


def brute_force_mst(scores) -> list[int]:
    """Exhaustive search over all single-rooted trees (n <= 8).

    Ties are broken towards the lexicographically smallest head vector.
    """
    w = _domain(scores)
    n = w.shape[0] - 1
    if n > BRUTE_FORCE_LIMIT:
        raise SizeLimitExceeded(f"brute force supports n <= {BRUTE_FORCE_LIMIT}, got {n}")
    trees = enumerate_trees(n)
    # accumulate in dependent order so totals match tree_score bit for bit
    totals = np.zeros(len(trees))
    for d in range(1, n + 1):
        totals += w[trees[:, d - 1], d]
    # argmax returns the first maximum, i.e. the lexicographically smallest tree
    return trees[int(np.argmax(totals))].tolist()
