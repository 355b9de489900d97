"""Phase oscillators with dynamical temporal attention.

Modules:

- ``netgraph``: network generation, edge-list input, average shortest path
- ``dynamics``: Euler-Maruyama integrators (phase, opinion, Stuart-Landau)
- ``attention``: discrete query/key attention and the exponential kernel
- ``meanfield``: continuum-limit critical coupling
- ``estimator``: critical coupling from simulations, parameter sweeps
- ``hopfield``: oscillatory associative memory with attention
- ``cli``: command-line experiment runner
"""
__version__ = "0.1.0"
