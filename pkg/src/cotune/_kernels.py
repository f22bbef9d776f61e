"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The logistic-regression training loop dominates runtime whenever the search
based tuner is used (hundreds of fits per run), so it is JIT-compiled when
numba is importable. Set the environment variable COTUNE_NUMBA=0 to force the
numpy path (useful for debugging and for the benchmark comparison); the flag
is read once at import time.

Both paths implement the identical algorithm: full-batch gradient descent on
L2-regularized binary cross-entropy over already-standardized inputs, with
zero-initialized weights. Results agree to floating-point noise (the two
paths may differ in the last ulp because their elementwise transcendentals
come from different vector libraries).
"""

from __future__ import annotations

import os

import numpy as np

_FALSEY = {"0", "false", "no", "off"}


def numba_requested() -> bool:
    return os.environ.get("COTUNE_NUMBA", "1").strip().lower() not in _FALSEY


def train_logistic_numpy(X, y, lr, epochs, l2):
    """Gradient descent on the regularized log loss; returns (w, b, losses).

    losses[e] is the loss evaluated at the start of epoch e (before that
    epoch's update), so the sequence tracks descent progress.
    """
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    losses = np.empty(epochs)
    for e in range(epochs):
        z = X @ w + b
        ez = np.exp(-np.abs(z))
        p = np.where(z >= 0.0, 1.0 / (1.0 + ez), ez / (1.0 + ez))
        # log(1+e^z) - y*z, written via -|z| so exp never overflows
        losses[e] = float(
            np.mean(np.log1p(ez) + np.maximum(z, 0.0) - y * z) + 0.5 * l2 * np.dot(w, w)
        )
        err = p - y
        w -= lr * (X.T @ err / n + l2 * w)
        b -= lr * (float(np.sum(err)) / n)
    return w, b, losses


def _train_logistic_jit_impl(X, y, lr, epochs, l2):  # pragma: no cover - compiled
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    losses = np.empty(epochs)
    err = np.empty(n)
    for e in range(epochs):
        z = np.dot(X, w)
        loss = 0.0
        for i in range(n):
            zi = z[i] + b
            ez = np.exp(-abs(zi))
            if zi >= 0.0:
                p = 1.0 / (1.0 + ez)
                loss += np.log1p(ez) + zi - y[i] * zi
            else:
                p = ez / (1.0 + ez)
                loss += np.log1p(ez) - y[i] * zi
            err[i] = p - y[i]
        reg = 0.0
        for j in range(d):
            reg += w[j] * w[j]
        losses[e] = loss / n + 0.5 * l2 * reg
        gw = np.dot(X.T, err)
        gb = 0.0
        for i in range(n):
            gb += err[i]
        for j in range(d):
            w[j] -= lr * (gw[j] / n + l2 * w[j])
        b -= lr * (gb / n)
    return w, b, losses


def _resolve_backend():
    if numba_requested():
        try:
            from numba import njit
        except ImportError:
            return train_logistic_numpy, "numpy"
        return njit(cache=True)(_train_logistic_jit_impl), "numba"
    return train_logistic_numpy, "numpy"


train_logistic, BACKEND = _resolve_backend()


def logistic_loss_grad(w, b, X, y, l2):
    """Loss and analytic gradient at (w, b); used by gradient-check tests."""
    n = X.shape[0]
    z = X @ w + b
    ez = np.exp(-np.abs(z))
    p = np.where(z >= 0.0, 1.0 / (1.0 + ez), ez / (1.0 + ez))
    loss = float(np.mean(np.log1p(ez) + np.maximum(z, 0.0) - y * z) + 0.5 * l2 * np.dot(w, w))
    err = p - y
    grad_w = X.T @ err / n + l2 * w
    grad_b = float(np.sum(err)) / n
    return loss, grad_w, grad_b
