"""Discrete-time query/key/value attention over a phase history.

The history matrix has one row per time step and one column per oscillator,
holding unit phasors. Queries and keys are linear read-outs of each row, the
score between two times is the modulus of their complex inner product, and
the value matrix is the identity, so the attention vector is a convex
combination of past rows.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AttentionParams",
    "AttentionOutput",
    "phase_history",
    "softmax",
    "attention_scores",
    "discrete_attention",
    "exponential_kernel_weights",
    "exponential_kernel_convolution",
]


def phase_history(theta) -> np.ndarray:
    """Complex history ``exp(i theta)`` from a (T, N) array of phase angles."""
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    return np.exp(1j * theta)


def _check_history(hist: np.ndarray) -> np.ndarray:
    hist = np.atleast_2d(np.asarray(hist, dtype=complex))
    if hist.shape[0] < 1:
        raise ValueError("history needs at least one time step")
    if not np.allclose(np.abs(hist), 1.0, rtol=0, atol=1e-12):
        raise ValueError("history entries must be unit phasors")
    return hist


@dataclass(frozen=True)
class AttentionParams:
    W_Q: np.ndarray
    W_K: np.ndarray

    def __post_init__(self):
        wq = np.atleast_2d(np.asarray(self.W_Q, dtype=float))
        wk = np.atleast_2d(np.asarray(self.W_K, dtype=float))
        if wq.shape != wk.shape:
            raise ValueError(f"W_Q {wq.shape} and W_K {wk.shape} must have equal shapes")
        object.__setattr__(self, "W_Q", wq)
        object.__setattr__(self, "W_K", wk)

    @property
    def d(self) -> int:
        return self.W_Q.shape[1]

    @classmethod
    def identity(cls, n: int) -> "AttentionParams":
        return cls(np.eye(n), np.eye(n))


@dataclass
class AttentionOutput:
    kernel_row: np.ndarray
    M: np.ndarray
    C: np.ndarray


def softmax(scores: np.ndarray, axis: int = -1) -> np.ndarray:
    """Row-wise softmax with max subtraction."""
    s = np.asarray(scores, dtype=float)
    e = np.exp(s - s.max(axis=axis, keepdims=True))
    return e / e.sum(axis=axis, keepdims=True)


def attention_scores(hist: np.ndarray, params: AttentionParams) -> np.ndarray:
    """``U[s, t] = |Q[s] . conj(K[t])| / sqrt(d)``."""
    hist = _check_history(hist)
    if hist.shape[1] != params.W_Q.shape[0]:
        raise ValueError(f"history has {hist.shape[1]} oscillators, weights expect {params.W_Q.shape[0]}")
    Q = hist @ params.W_Q
    K = hist @ params.W_K
    return np.abs(Q @ K.conj().T) / np.sqrt(params.d)


def discrete_attention(hist: np.ndarray, params: AttentionParams) -> AttentionOutput:
    """Attention kernel of the newest step and the resulting attention vector."""
    hist = _check_history(hist)
    C = softmax(attention_scores(hist, params), axis=1)
    row = C[-1]
    return AttentionOutput(kernel_row=row, M=row @ hist, C=C)


def exponential_kernel_weights(beta: float, times) -> np.ndarray:
    """Normalised weights ``exp(beta (tau - t))`` on a grid ending at ``t``.

    Equal to a softmax of the scores ``beta (tau_k - t)``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    tau = np.asarray(times, dtype=float)
    if tau.size == 0:
        raise ValueError("empty time grid")
    if np.any(np.diff(tau) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return softmax(beta * (tau - tau[-1]))


def exponential_kernel_convolution(theta_hist, times, beta: float, M0) -> np.ndarray:
    """Closed-form attention state from a stored phase history.

    ``M(t) = exp(-beta t) M0 + beta * int_0^t exp(beta (s - t)) exp(i theta(s)) ds``,
    with the integral taken by the trapezoid rule. ``theta_hist`` is (T, N);
    the result is the attention state at every grid time, shape (T, N).
    """
    tau = np.asarray(times, dtype=float)
    z = np.exp(1j * np.asarray(theta_hist, dtype=float))
    if z.shape[0] != tau.size:
        raise ValueError("history length differs from time grid")
    M0 = np.asarray(M0, dtype=complex)
    out = np.empty_like(z)
    out[0] = M0
    # running trapezoid sum, rescaled each step to avoid exp overflow
    acc = np.zeros(z.shape[1], complex)
    for k in range(1, tau.size):
        h = tau[k] - tau[k - 1]
        decay = np.exp(-beta * h)
        acc = decay * acc + 0.5 * h * beta * (decay * z[k - 1] + z[k])
        out[k] = np.exp(-beta * (tau[k] - tau[0])) * M0 + acc
    return out
