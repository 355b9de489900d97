"""
Critical coupling: continuum limit versus simulation
====================================================

The continuum-limit solver gives the coupling at which incoherence loses
stability. The simulation estimator finds where the order parameter first
rises clearly above the finite-size noise floor.
"""
import numpy as np

from dtasync.dynamics import FrequencyDist
from dtasync.estimator import EstimationProtocol, System, estimate_lambda_c
from dtasync.meanfield import lambda_c_neighbor, lambda_c_self, lambda_c_self_delta
from dtasync.netgraph import NetworkSpec

D = 0.5
print("neighbor attention, identical oscillators:", lambda_c_neighbor(D).lambda_c)
print("neighbor attention, g = N(0,1):           ", round(lambda_c_neighbor(D, FrequencyDist("normal", 1.0)).lambda_c, 4))

print("\nself attention, identical oscillators (bisection / closed form)")
for beta in (1.0, 0.01):
    for alpha in (0.0, 0.3, 0.6, 0.9):
        r = lambda_c_self(D, alpha, beta)
        print(f"  beta={beta:<5g} alpha={alpha:.1f}  {r.lambda_c:.6f}  {lambda_c_self_delta(D, alpha, beta):.6f}")

print("\nsimulation estimates, complete graph N=300, 5 seeds")
grid = tuple(np.round(np.arange(0.5, 1.81, 0.1), 2))
for mode, alpha in [("neighbor", 0.0), ("neighbor", 1.0), ("self", 0.3)]:
    system = System(network=NetworkSpec("complete", n=300), attention=mode, alpha=alpha, t_end=200)
    est = estimate_lambda_c(system, EstimationProtocol(grid=grid, seeds=5))
    print(f"  {mode:8s} alpha={alpha:.1f}  lambda_c = {est.lambda_c:.3f} +- {est.half_width:.3f}")
