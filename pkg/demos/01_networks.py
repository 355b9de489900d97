"""
Spatial networks and their path lengths
=======================================

Builds the four network families used by the simulations and prints the
seed-averaged average shortest path length (ASPL) of each.
"""
import numpy as np

from dtasync.netgraph import NetworkSpec, aspl, generate

# the complete graph is stored without sampling; its ASPL is 1 by definition
fc = generate(NetworkSpec("complete", n=200))
print(f"complete   n=200  edges={fc.n_edges:6d}  ASPL={aspl(fc):.3f}")

# random families: average over 20 seeds
specs = {
    "erdos-renyi(p=0.5)": dict(kind="erdos-renyi", p=0.5),
    "barabasi-albert(m=2)": dict(kind="barabasi-albert", m=2),
    "watts-strogatz(k=4, p=0.1)": dict(kind="watts-strogatz", k=4, p=0.1),
}
for label, kw in specs.items():
    vals = [aspl(generate(NetworkSpec(n=200, seed=s, **kw))) for s in range(20)]
    print(f"{label:28s} ASPL={np.mean(vals):.3f} +- {np.std(vals, ddof=1):.3f}")

# a ring lattice (no rewiring) is the large-ASPL extreme
ring = generate(NetworkSpec("watts-strogatz", n=200, k=4, p=0.0))
print(f"ring lattice k=4          ASPL={aspl(ring):.3f}")
