"""Truncated Taylor series arithmetic on batched coefficient arrays.

A series is an array ``c`` whose axis 0 holds Taylor coefficients
(``c[k] = f^(k)(x0) / k!``); any trailing axes are independent batch
elements. Results are truncated to the order of the inputs.
"""
from __future__ import annotations

import math

import numpy as np


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    K = min(a.shape[0], b.shape[0])
    out = np.zeros((K,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(K):
        for i in range(k + 1):
            out[k] += a[i] * b[k - i]
    return out


def div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    K = min(a.shape[0], b.shape[0])
    out = np.zeros((K,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for k in range(K):
        acc = np.array(a[k], dtype=float)
        for i in range(1, k + 1):
            acc = acc - b[i] * out[k - i]
        out[k] = acc / b[0]
    return out


def log_abs(a: np.ndarray) -> np.ndarray:
    """Series of ``log|a|`` (requires a[0] != 0)."""
    K = a.shape[0]
    out = np.zeros(a.shape)
    out[0] = np.log(np.abs(a[0]))
    for k in range(1, K):
        acc = k * a[k]
        for j in range(1, k):
            acc = acc - j * out[j] * a[k - j]
        out[k] = acc / (k * a[0])
    return out


def derivative(a: np.ndarray) -> np.ndarray:
    """Series of the derivative; one order shorter."""
    k = np.arange(1, a.shape[0]).reshape((-1,) + (1,) * (a.ndim - 1))
    return a[1:] * k


def compose(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Series of ``f(g(t))`` for ``g`` with zero constant term (Horner)."""
    K = g.shape[0]
    out = np.zeros((K,) + np.broadcast_shapes(f.shape[1:], g.shape[1:]))
    top = min(f.shape[0], K) - 1
    out[0] = f[top]
    for k in range(top - 1, -1, -1):
        out = mul(out, g)
        out[0] = out[0] + f[k]
    return out


def revert(c: np.ndarray) -> np.ndarray:
    """Inverse series: given ``y(t) = sum_{k>=1} c[k] t^k`` return ``t(y)``.

    ``c[0]`` is ignored (treated as zero); ``c[1]`` must be non-zero.
    """
    K = c.shape[0]
    c = c.copy()
    c[0] = 0.0
    d = np.zeros(c.shape)
    if K > 1:
        d[1] = 1.0 / c[1]
    for m in range(2, K):
        # the t^m coefficient of c(d(y)) is c[1] d[m] + (terms in lower d's)
        partial = compose(c[: m + 1], d[: m + 1])
        d[m] = -partial[m] / c[1]
    return d


def dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Minkowski product of vector series shaped (D, K, ...)."""
    out = -mul(u[0], v[0])
    for i in range(1, u.shape[0]):
        out = out + mul(u[i], v[i])
    return out


def nth_derivative(c: np.ndarray, n: int) -> np.ndarray:
    return math.factorial(n) * c[n]
