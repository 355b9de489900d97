import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from dtasync.attention import (
    AttentionParams,
    attention_scores,
    discrete_attention,
    exponential_kernel_convolution,
    exponential_kernel_weights,
    phase_history,
    softmax,
)


def test_single_step():
    hist = phase_history([[0.3, 1.1, -2.0]])
    out = discrete_attention(hist, AttentionParams.identity(3))
    assert out.kernel_row.tolist() == [1.0]
    assert np.allclose(out.M, hist[0])


def test_constant_history_uniform():
    hist = phase_history(np.tile([0.2, 1.5, 3.0], (6, 1)))
    out = discrete_attention(hist, AttentionParams(np.random.default_rng(0).normal(size=(3, 2)),
                                                   np.random.default_rng(1).normal(size=(3, 2))))
    assert np.allclose(out.kernel_row, 1 / 6, atol=1e-14)
    assert np.allclose(out.M, hist[0])


def test_two_by_two_hand_example():
    hist = np.array([[1, 1], [1j, 1]], complex)
    w = np.array([[1.0], [0.0]])
    out = discrete_attention(hist, AttentionParams(w, w))
    assert np.allclose(attention_scores(hist, AttentionParams(w, w))[1], [1.0, 1.0])
    assert np.allclose(out.kernel_row, [0.5, 0.5])
    assert np.allclose(out.M, [(1 + 1j) / 2, 1])


def test_degenerate_single_feature_is_uniform():
    rng = np.random.default_rng(3)
    hist = phase_history(rng.uniform(0, 2 * np.pi, (7, 4)))
    e1 = np.zeros((4, 1))
    e1[0] = 1
    out = discrete_attention(hist, AttentionParams(e1, e1))
    assert np.allclose(out.C, 1 / 7)


def test_softmax_matches_scipy():
    from scipy.special import softmax as sp_softmax
    x = np.random.default_rng(0).normal(size=(5, 9)) * 50
    assert np.allclose(softmax(x, axis=1), sp_softmax(x, axis=1), atol=1e-15)


def test_rejects_non_unit_history():
    with pytest.raises(ValueError, match="unit"):
        discrete_attention(np.array([[2.0, 1.0]]), AttentionParams.identity(2))


def test_shape_mismatch():
    with pytest.raises(ValueError):
        discrete_attention(phase_history([[0.0, 1.0]]), AttentionParams.identity(3))


@settings(max_examples=40, deadline=None)
@given(th=arrays(float, st.tuples(st.integers(1, 8), st.integers(1, 5)), elements=st.floats(-10, 10)),
       seed=st.integers(0, 1000), d=st.integers(1, 4))
def test_rows_are_distributions(th, seed, d):
    rng = np.random.default_rng(seed)
    n = th.shape[1]
    params = AttentionParams(rng.normal(size=(n, d)), rng.normal(size=(n, d)))
    out = discrete_attention(phase_history(th), params)
    assert np.allclose(out.C.sum(axis=1), 1.0, atol=1e-10)
    assert np.all((out.C >= 0) & (out.C <= 1))
    assert np.all(np.abs(out.M) <= 1 + 1e-12)


def test_exponential_scores_reproduce_kernel_weights():
    t = np.sort(np.random.default_rng(2).uniform(0, 5, 12))
    beta = 0.7
    scores = beta * (t - t[-1])
    assert np.allclose(softmax(scores), exponential_kernel_weights(beta, t), atol=1e-15)


def test_kernel_weight_limits():
    t = np.linspace(0, 1, 11)
    assert exponential_kernel_weights(1e4, t)[-1] == pytest.approx(1.0)
    assert exponential_kernel_weights(1.0, [0.0, 1e3])[0] < 1e-300
    w = exponential_kernel_weights(2.0, t)
    assert np.all(np.diff(w) >= 0)
    assert w.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [[], [0.0, 0.0], [1.0, 0.5]])
def test_kernel_weight_grid_errors(bad):
    with pytest.raises(ValueError):
        exponential_kernel_weights(1.0, bad)


def test_convolution_matches_ode_solution():
    # theta(t) = w t: the attention ODE has a closed-form solution
    beta, w = 0.8, 1.3
    t = np.linspace(0, 10, 20001)
    th = (w * t)[:, None]
    M = exponential_kernel_convolution(th, t, beta, np.array([1.0 + 0j]))
    exact = np.exp(-beta * t) + beta / (beta + 1j * w) * (np.exp(1j * w * t) - np.exp(-beta * t))
    assert np.max(np.abs(M[:, 0] - exact)) < 1e-6
