"""
Variants: opinion dynamics and amplitude oscillators
====================================================

Opinion dynamics replaces natural frequencies by a pull toward each node's
inherent opinion. The Stuart-Landau variant keeps amplitudes, so the
attention state follows the complex state itself.
"""
import numpy as np

from dtasync.dynamics import OpinionConfig, SimConfig, SLConfig, simulate_opinion, simulate_stuart_landau
from dtasync.netgraph import NetworkSpec, generate

er = generate(NetworkSpec("erdos-renyi", n=200, p=0.5, seed=0))
print("opinion model on ER(200, 0.5), self attention, rho=0.1, coupling 1.5")
for alpha in (0.0, 0.3, 0.6, 0.9):
    R = [simulate_opinion(OpinionConfig(SimConfig(coupling=1.5, alpha=alpha, attention="self", t_end=500, seed=s),
                                        rho=0.1), er).R_mean for s in range(3)]
    print(f"  alpha={alpha:.1f}  R={np.mean(R):.3f}")

ws = generate(NetworkSpec("watts-strogatz", n=100, k=4, p=0.1, seed=0))
print("\nStuart-Landau, a=b=1, amplitude relaxes to 1")
for lam in (0.0, 0.5):
    out = simulate_stuart_landau(SLConfig(coupling=lam, alpha=0.5, sigma=0.05, t_end=40, seed=2), ws)
    print(f"  coupling={lam:.1f}  R={out.R_mean:.3f}  mean |z| at end={out.amplitude_mean[-1]:.3f}")
