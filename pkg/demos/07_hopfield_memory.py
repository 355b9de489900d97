"""
Continual learning in an oscillatory associative memory
=======================================================

Old letters K, U, R are stored in the spatial coupling and new letters
A, M, O, T in the attention coupling. Raising the attention weight trades
the old memories for the new ones.
"""
import numpy as np

from dtasync.hopfield import glyph_config, glyph_pattern, random_mask, recover, render, stability_map

cfg = glyph_config(eps=0.15)
alpha = np.round(np.linspace(0, 1, 6), 2)
print("leading real part of the Jacobian at eps=0.15 (negative = stable)")
print("       " + "  ".join(f"{a:6.1f}" for a in alpha))
for L in "KURAMOT":
    v = stability_map(cfg, glyph_pattern(L), [0.15], alpha).values[:, 0]
    print(f"  {L}    " + "  ".join(f"{x:+6.2f}" for x in v))

eta = glyph_pattern("A")
mask = random_mask(64, 0.2, seed=3)
print("\nmasked letter A:\n" + render(eta, mask))
for a in (0.0, 0.9):
    decoded, ov = recover(cfg.with_(alpha=a), eta, mask, steps=3000, seed=1)
    print(f"\nalpha={a}: overlap {ov:.3f}\n" + render(decoded))
