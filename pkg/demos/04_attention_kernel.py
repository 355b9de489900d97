"""
Discrete attention and the exponential kernel
=============================================

The discrete query/key attention weights past phase snapshots with a
softmax. Replacing its scores by ``beta (t_k - t)`` gives an exponential
kernel, which is what the attention ODE integrates.
"""
import numpy as np

from dtasync.attention import (AttentionParams, discrete_attention, exponential_kernel_weights,
                               phase_history, softmax)

rng = np.random.default_rng(0)
theta = np.cumsum(rng.normal(0, 0.4, (6, 3)), axis=0)  # 6 steps of 3 oscillators
hist = phase_history(theta)

out = discrete_attention(hist, AttentionParams(rng.normal(size=(3, 2)), rng.normal(size=(3, 2))))
print("kernel row (newest step attends to):", np.round(out.kernel_row, 3))
print("attention vector |M|:", np.round(np.abs(out.M), 3))

# with a single feature and unit weights every score is 1: attention is flat
e1 = np.eye(3)[:, :1]
print("d=1 identity weights:", np.round(discrete_attention(hist, AttentionParams(e1, e1)).kernel_row, 3))

t = np.linspace(0, 5, 6)
print("exponential kernel  :", np.round(exponential_kernel_weights(1.0, t), 3))
print("softmax of scores   :", np.round(softmax(1.0 * (t - t[-1])), 3))
