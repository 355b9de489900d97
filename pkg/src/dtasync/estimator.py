"""Critical coupling from simulations, and parameter sweeps.

Two estimators are offered. ``noise-floor-crossing`` scans a coupling grid
and reports where the seed-averaged order parameter rises above ``c`` times
the mean resultant length of ``N`` uniform phases, ``sqrt(pi / (4N))``, by
at least one seed standard deviation. ``finite-size-crossing`` compares
``R * sqrt(N)`` for the two largest sizes: below threshold it is size
independent, above it grows with ``N``.

Replica seeds depend only on the master seed and the seed index, so every
grid point sees the same initial conditions and noise (common random
numbers), which keeps differences between grid points free of seed scatter.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from .dynamics import FrequencyDist, simulate_batch
from .netgraph import Network, NetworkSpec, generate

__all__ = [
    "System",
    "EstimationProtocol",
    "LambdaCEstimate",
    "SweepTable",
    "EstimationError",
    "noise_floor",
    "replica_seeds",
    "mean_R",
    "estimate_lambda_c",
    "sweep",
]

Axis = Literal["alpha", "beta", "coupling"]


class EstimationError(ValueError):
    pass


def noise_floor(n: int) -> float:
    """Expected ``R`` of ``n`` independent uniform phases (large-``n`` form)."""
    return math.sqrt(math.pi / (4.0 * n))


@dataclass(frozen=True)
class System:
    """Everything a run needs except coupling grid and seeds."""

    network: NetworkSpec = field(default_factory=lambda: NetworkSpec("complete", n=200))
    attention: str = "neighbor"
    alpha: float = 0.0
    beta: float = 1.0
    noise: float = 0.5
    coupling: float = 1.0
    freq: FrequencyDist = field(default_factory=FrequencyDist)
    dt: float = 0.05
    t_end: float = 500.0
    measure_window: float = 0.2

    def with_size(self, n: int) -> "System":
        return replace(self, network=replace(self.network, n=n))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["freq"] = {"kind": self.freq.kind, "variance": self.freq.variance}
        return d


@dataclass(frozen=True)
class EstimationProtocol:
    grid: tuple[float, ...]
    seeds: int = 5
    sizes: tuple[int, ...] = ()
    criterion: Literal["noise-floor-crossing", "finite-size-crossing"] = "noise-floor-crossing"
    c: float = 3.0
    refine: bool = True
    master_seed: int = 0

    def validate(self) -> None:
        g = np.asarray(self.grid, float)
        if g.size < 2 or np.any(np.diff(g) <= 0):
            raise EstimationError("the coupling grid needs >= 2 strictly increasing values")
        if self.seeds < 3:
            raise EstimationError(f"at least 3 seeds per point are needed, got {self.seeds}")
        if self.criterion == "finite-size-crossing" and len(self.sizes) < 2:
            raise EstimationError("finite-size-crossing needs at least two sizes")
        if self.criterion not in ("noise-floor-crossing", "finite-size-crossing"):
            raise EstimationError(f"unknown criterion {self.criterion!r}")
        if not self.c > 0:
            raise EstimationError("noise-floor multiplier must be positive")


@dataclass
class LambdaCEstimate:
    lambda_c: float
    half_width: float
    bracket: tuple[float, float]
    criterion: str
    table: list[tuple[float, int, int, float]]  # (lambda, N, seed index, R_mean)
    threshold: float = math.nan

    def to_dict(self) -> dict:
        return {
            "lambda_c": self.lambda_c,
            "half_width": self.half_width,
            "bracket": list(self.bracket),
            "criterion": self.criterion,
            "threshold": self.threshold,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["lambda", "N", "seed", "R_mean"])
            for lam, n, s, r in self.table:
                w.writerow([repr(float(lam)), n, s, repr(float(r))])

    def summary(self, lam: float, n: int | None = None) -> tuple[float, float]:
        """Seed mean and standard deviation of ``R_mean`` at one grid point."""
        r = np.array([row[3] for row in self.table if row[0] == lam and (n is None or row[1] == n)])
        return float(r.mean()), float(r.std(ddof=1))


@dataclass
class SweepTable:
    axis: str
    values: np.ndarray
    R: np.ndarray  # (n_values, n_seeds)

    @property
    def mean(self) -> np.ndarray:
        return self.R.mean(axis=1)

    @property
    def std(self) -> np.ndarray:
        return self.R.std(axis=1, ddof=1) if self.R.shape[1] > 1 else np.zeros(len(self.values))

    @property
    def sem(self) -> np.ndarray:
        return self.std / math.sqrt(self.R.shape[1])

    def diff_sigma(self, i: int, j: int) -> float:
        """Standard error of ``mean[i] - mean[j]`` from the two seed samples."""
        return float(math.hypot(self.sem[i], self.sem[j]))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([self.axis, "R_mean", "R_std", "R_sem", "n_seeds"])
            for v, m, s, e in zip(self.values, self.mean, self.std, self.sem):
                w.writerow([repr(float(v)), repr(float(m)), repr(float(s)), repr(float(e)), self.R.shape[1]])


def replica_seeds(master_seed: int, n_seeds: int) -> list[np.random.SeedSequence]:
    return [np.random.SeedSequence((int(master_seed), k)) for k in range(n_seeds)]


def _run_chunk(args):
    net, seeds, params, sysd = args
    out = simulate_batch(net, seeds, **params, **sysd)
    return [s.R_mean for s in out]


def mean_R(system: System, net: Network, points: Sequence[dict], seeds: Sequence,
           jobs: int = 1) -> np.ndarray:
    """Time-averaged ``R`` for every (point, seed) pair, shape ``(len(points), len(seeds))``.

    ``points`` override ``alpha``, ``beta`` or ``coupling`` of ``system``.
    All replicas run as one batch (split across ``jobs`` processes).
    """
    reps = [(p, s) for p in points for s in seeds]
    params = {key: np.array([p.get(key, getattr(system, key)) for p, _ in reps], float)
              for key in ("alpha", "beta", "coupling")}
    all_seeds = [s for _, s in reps]
    sysd = dict(noise=system.noise, attention=system.attention, freq=system.freq, dt=system.dt,
                t_end=system.t_end, measure_window=system.measure_window)
    jobs = max(1, min(int(jobs), len(reps)))
    if jobs == 1:
        flat = _run_chunk((net, all_seeds, params, sysd))
    else:
        bounds = np.linspace(0, len(reps), jobs + 1).astype(int)
        tasks = [(net, all_seeds[a:b], {k: v[a:b] for k, v in params.items()}, sysd)
                 for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            flat = [r for chunk in pool.map(_run_chunk, tasks) for r in chunk]
    return np.asarray(flat, float).reshape(len(points), len(seeds))


def _noise_floor_estimate(system, protocol, jobs):
    n = protocol.sizes[-1] if protocol.sizes else system.network.n
    sysn = system.with_size(n)
    net = generate(sysn.network)
    grid = np.asarray(protocol.grid, float)
    seeds = replica_seeds(protocol.master_seed, protocol.seeds)
    R = mean_R(sysn, net, [{"coupling": g} for g in grid], seeds, jobs)
    thr = protocol.c * noise_floor(n)
    table = [(float(g), n, k, float(r)) for g, row in zip(grid, R) for k, r in enumerate(row)]

    def score(r):
        return r.mean() - r.std(ddof=1) - thr

    s = np.array([score(r) for r in R])
    above = np.flatnonzero(s > 0)
    if above.size == 0:
        raise EstimationError(
            f"no crossing in [{grid[0]:g}, {grid[-1]:g}]: R stays below {thr:.4f} (c x noise floor)")
    k = int(above[0])
    if k == 0:
        raise EstimationError(f"no crossing in [{grid[0]:g}, {grid[-1]:g}]: already above threshold at the lower end")
    lo, hi = float(grid[k - 1]), float(grid[k])
    s_lo, s_hi = s[k - 1], s[k]
    r_lo, r_hi = R[k - 1], R[k]
    if protocol.refine:
        mid = 0.5 * (lo + hi)
        r_mid = mean_R(sysn, net, [{"coupling": mid}], seeds, jobs)[0]
        table += [(mid, n, k2, float(r)) for k2, r in enumerate(r_mid)]
        s_mid = score(r_mid)
        if s_mid > 0:
            hi, s_hi, r_hi = mid, s_mid, r_mid
        else:
            lo, s_lo, r_lo = mid, s_mid, r_mid
    # linear interpolation of the margin-adjusted score inside the final bracket
    lam = lo + (hi - lo) * (-s_lo) / (s_hi - s_lo)
    slope = (r_hi.mean() - r_lo.mean()) / (hi - lo)
    sem = math.hypot(r_lo.std(ddof=1), r_hi.std(ddof=1)) / math.sqrt(2 * len(seeds))
    half = 0.5 * (hi - lo) + (sem / slope if slope > 0 else (hi - lo))
    return LambdaCEstimate(float(lam), float(half), (float(grid[0]), float(grid[-1])),
                           protocol.criterion, table, thr)


def _finite_size_estimate(system, protocol, jobs):
    grid = np.asarray(protocol.grid, float)
    seeds = replica_seeds(protocol.master_seed, protocol.seeds)
    sizes = sorted(protocol.sizes)[-2:]
    table, curves, errs = [], [], []
    for n in sizes:
        sysn = system.with_size(n)
        R = mean_R(sysn, generate(sysn.network), [{"coupling": g} for g in grid], seeds, jobs)
        table += [(float(g), n, k, float(r)) for g, row in zip(grid, R) for k, r in enumerate(row)]
        curves.append(R.mean(axis=1) * math.sqrt(n))
        errs.append(R.std(axis=1, ddof=1) * math.sqrt(n / len(seeds)))
    d = curves[1] - curves[0]
    if d[-1] <= 0:
        raise EstimationError(f"no crossing in [{grid[0]:g}, {grid[-1]:g}]: curves never separate")
    nonpos = np.flatnonzero(d <= 0)
    if nonpos.size == 0:
        raise EstimationError(f"no crossing in [{grid[0]:g}, {grid[-1]:g}]: larger size above everywhere")
    k = int(nonpos[-1]) + 1
    lo, hi = grid[k - 1], grid[k]
    lam = lo + (hi - lo) * (-d[k - 1]) / (d[k] - d[k - 1])
    slope = (d[k] - d[k - 1]) / (hi - lo)
    err = math.hypot(errs[0][k], errs[1][k])
    half = 0.5 * (hi - lo) + err / slope
    return LambdaCEstimate(float(lam), float(half), (float(grid[0]), float(grid[-1])),
                           protocol.criterion, table)


def estimate_lambda_c(system: System, protocol: EstimationProtocol, jobs: int = 1) -> LambdaCEstimate:
    """Estimate the critical coupling of ``system`` over ``protocol.grid``."""
    protocol.validate()
    if protocol.criterion == "noise-floor-crossing":
        return _noise_floor_estimate(system, protocol, jobs)
    return _finite_size_estimate(system, protocol, jobs)


def sweep(template: System, axis: Axis, values, seeds: int = 5, master_seed: int = 0,
          jobs: int = 1, net: Network | None = None) -> SweepTable:
    """Seed-resolved ``R`` over one parameter axis, one network for all points."""
    if axis not in ("alpha", "beta", "coupling"):
        raise EstimationError(f"cannot sweep over {axis!r}; use alpha, beta or coupling")
    values = np.atleast_1d(np.asarray(values, float))
    if values.size == 0:
        raise EstimationError("sweep values are empty")
    if seeds < 1:
        raise EstimationError("need at least one seed")
    net = net if net is not None else generate(template.network)
    R = mean_R(template, net, [{axis: v} for v in values], replica_seeds(master_seed, seeds), jobs)
    return SweepTable(axis, values, R)
