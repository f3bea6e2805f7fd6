"""Forward/backward pairs for the network's building blocks.

Each ``*_forward`` returns its output plus a cache; the matching
``*_backward`` takes the upstream gradient and that cache. Weight matrices
are stored ``(out, in)``.
"""

from __future__ import annotations

import numpy as np


def sigmoid(x):
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax; ``-inf`` entries get probability exactly 0."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def mlp_forward(x, w1, b1, w2, b2):
    """``w2 @ relu(w1 @ x + b1) + b2`` applied to each row of ``x``."""
    pre = x @ w1.T + b1
    hidden = np.maximum(pre, 0)
    return hidden @ w2.T + b2, (x, pre, hidden, w1, w2)


def mlp_backward(dout, cache):
    x, pre, hidden, w1, w2 = cache
    dw2 = dout.T @ hidden
    db2 = dout.sum(axis=0)
    dhidden = dout @ w2
    dpre = dhidden * (pre > 0)
    dw1 = dpre.T @ x
    db1 = dpre.sum(axis=0)
    return dpre @ w1, (dw1, db1, dw2, db2)


def lstm_forward(x, w, u, b, reverse=False):
    """Run one LSTM direction over ``x`` of shape ``(T, in)``.

    Gates are packed ``[input, forget, cell, output]`` along the first axis
    of ``w`` (4H, in), ``u`` (4H, H) and ``b`` (4H,).
    """
    if reverse:
        x = x[::-1]
    steps = x.shape[0]
    size = u.shape[1]
    xw = x @ w.T + b
    h = np.zeros((steps + 1, size), dtype=x.dtype)
    c = np.zeros((steps + 1, size), dtype=x.dtype)
    gates = np.empty((steps, 4 * size), dtype=x.dtype)
    tanh_c = np.empty((steps, size), dtype=x.dtype)
    for t in range(steps):
        z = xw[t] + u @ h[t]
        g = gates[t]
        g[:size] = sigmoid(z[:size])
        g[size:2 * size] = sigmoid(z[size:2 * size])
        g[2 * size:3 * size] = np.tanh(z[2 * size:3 * size])
        g[3 * size:] = sigmoid(z[3 * size:])
        c[t + 1] = g[size:2 * size] * c[t] + g[:size] * g[2 * size:3 * size]
        tanh_c[t] = np.tanh(c[t + 1])
        h[t + 1] = g[3 * size:] * tanh_c[t]
    out = h[1:]
    if reverse:
        out = out[::-1]
    return out, (x, h, c, gates, tanh_c, w, u, reverse)


def lstm_backward(dout, cache):
    x, h, c, gates, tanh_c, w, u, reverse = cache
    if reverse:
        dout = dout[::-1]
    steps, size = tanh_c.shape
    dz = np.empty_like(gates)
    dh_next = np.zeros(size, dtype=x.dtype)
    dc_next = np.zeros(size, dtype=x.dtype)
    for t in range(steps - 1, -1, -1):
        g = gates[t]
        i, f, cand, o = g[:size], g[size:2 * size], g[2 * size:3 * size], g[3 * size:]
        dh = dout[t] + dh_next
        dc = dc_next + dh * o * (1.0 - tanh_c[t] ** 2)
        dzt = dz[t]
        dzt[:size] = dc * cand * i * (1.0 - i)
        dzt[size:2 * size] = dc * c[t] * f * (1.0 - f)
        dzt[2 * size:3 * size] = dc * i * (1.0 - cand ** 2)
        dzt[3 * size:] = dh * tanh_c[t] * o * (1.0 - o)
        dh_next = u.T @ dzt
        dc_next = dc * f
    dw = dz.T @ x
    du = dz.T @ h[:-1]
    db = dz.sum(axis=0)
    dx = dz @ w
    if reverse:
        dx = dx[::-1]
    return dx, (dw, du, db)
