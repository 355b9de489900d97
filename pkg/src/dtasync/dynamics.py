"""Euler-Maruyama integration of phase oscillators with dynamical temporal attention.

Each oscillator carries a phase ``theta`` and a complex attention state ``M``
that relaxes toward ``exp(i theta)`` at rate ``beta``. The received field mixes
the instantaneous phasors of spatial neighbours with the attention states of
attention neighbours (``neighbor`` mode: the spatial network itself; ``self``
mode: the identity).

All integrators run on a batch of independent replicas stacked along the last
axis, so a parameter sweep costs one pass over time. Every replica owns its
random streams, derived from its own seed, so a replica's trajectory does not
depend on what else shares its batch.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .netgraph import Network

__all__ = [
    "FrequencyDist",
    "SimConfig",
    "OpinionConfig",
    "SLConfig",
    "EnsembleState",
    "ObservableSeries",
    "SimulationError",
    "sample_frequencies",
    "order_parameter",
    "initial_state",
    "step",
    "simulate",
    "simulate_batch",
    "simulate_opinion",
    "simulate_stuart_landau",
    "run_streams",
]

AttentionMode = Literal["neighbor", "self", "none"]

NOISE_CHUNK = 256


class SimulationError(RuntimeError):
    """Numerical blow-up or inconsistent simulation inputs."""


@dataclass(frozen=True)
class FrequencyDist:
    """Natural-frequency law: ``delta`` (all zero), ``normal`` or ``tabulated``.

    Every law is centred: a tabulated sample has its mean subtracted.
    """

    kind: Literal["delta", "normal", "tabulated"] = "delta"
    variance: float = 0.0
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "normal" and not self.variance > 0:
            raise ValueError(f"normal law needs variance > 0, got {self.variance}")
        if self.kind == "tabulated":
            if not self.values:
                raise ValueError("tabulated law needs values")
            v = np.asarray(self.values, dtype=float)
            object.__setattr__(self, "values", tuple((v - v.mean()).tolist()))
        elif self.kind not in ("delta", "normal"):
            raise ValueError(f"unknown frequency law {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "FrequencyDist":
        """``delta`` or ``normal:<variance>``."""
        if text == "delta":
            return cls("delta")
        kind, _, arg = text.partition(":")
        if kind == "normal" and arg:
            return cls("normal", variance=float(arg))
        raise ValueError(f"cannot parse frequency law {text!r}; use 'delta' or 'normal:<variance>'")

    def label(self) -> str:
        if self.kind == "normal":
            return f"normal:{self.variance:g}"
        return self.kind


def sample_frequencies(dist: FrequencyDist, n: int, seed) -> np.ndarray:
    """Draw ``n`` natural frequencies. ``seed`` is anything ``default_rng`` accepts."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if dist.kind == "delta":
        return np.zeros(n)
    rng = np.random.default_rng(seed)
    if dist.kind == "normal":
        return rng.normal(0.0, math.sqrt(dist.variance), size=n)
    return rng.choice(np.asarray(dist.values), size=n, replace=True)


def order_parameter(theta) -> tuple[float, float]:
    """Modulus and argument of the mean phasor ``mean(exp(i theta))``."""
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise ValueError("order parameter of an empty phase vector")
    z = np.exp(1j * theta).mean()
    return min(abs(z), 1.0), float(np.angle(z))


@dataclass(frozen=True)
class SimConfig:
    coupling: float = 1.0
    alpha: float = 0.0
    beta: float = 1.0
    noise: float = 0.5
    dt: float = 0.05
    t_end: float = 2000.0
    seed: int = 0
    attention: AttentionMode = "neighbor"
    freq: FrequencyDist = field(default_factory=FrequencyDist)
    measure_window: float = 0.2
    record_every: int = 20
    attention_init: Literal["phase", "zero"] = "phase"

    def __post_init__(self):
        if self.attention not in ("neighbor", "self", "none"):
            raise ValueError(f"attention must be neighbor, self or none, got {self.attention!r}")
        if self.attention == "none" and self.alpha != 0:
            object.__setattr__(self, "alpha", 0.0)
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.coupling < 0 or self.noise < 0:
            raise ValueError("coupling and noise must be nonnegative")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (self.dt > 0 and self.t_end > 0):
            raise ValueError("dt and t_end must be positive")
        if not 0.0 < self.measure_window <= 1.0:
            raise ValueError("measure_window must lie in (0, 1]")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.attention_init not in ("phase", "zero"):
            raise ValueError(f"unknown attention_init {self.attention_init!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["freq"] = {"kind": self.freq.kind, "variance": self.freq.variance, "values": list(self.freq.values)}
        return d


@dataclass(frozen=True)
class OpinionConfig:
    """Opinion model: the natural-frequency drift becomes ``rho sin(phi - theta)``.

    ``rho`` is a scalar or per-node array; ``phi`` defaults to i.i.d. uniform
    inherent opinions drawn from the run seed.
    """

    sim: SimConfig
    rho: float | Sequence[float] = 0.0
    phi: Sequence[float] | None = None


@dataclass(frozen=True)
class SLConfig:
    """Stuart-Landau oscillators with attention on the complex state."""

    a: float = 1.0
    b: float = 1.0
    sigma: float = 0.0
    coupling: float = 0.0
    alpha: float = 0.0
    beta: float = 1.0
    dt: float = 0.01
    t_end: float = 20.0
    seed: int = 0
    attention: AttentionMode = "neighbor"
    freq: FrequencyDist = field(default_factory=FrequencyDist)
    omega: float | None = None  # overrides freq with a common frequency
    amplitude0: float | None = None  # None: uniform in [0, 1]
    measure_window: float = 0.2
    record_every: int = 10

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("a and b must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.attention == "none":
            object.__setattr__(self, "alpha", 0.0)


@dataclass
class EnsembleState:
    theta: np.ndarray
    M: np.ndarray
    omega: np.ndarray
    t: float = 0.0


@dataclass
class ObservableSeries:
    t: np.ndarray
    R: np.ndarray
    psi: np.ndarray
    R_mean: float
    theta_final: np.ndarray
    M_final: np.ndarray | None = None
    amplitude_mean: np.ndarray | None = None
    theta_history: np.ndarray | None = None
    M_history: np.ndarray | None = None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "R", "psi"])
            for row in zip(self.t, self.R, self.psi):
                w.writerow([repr(float(x)) for x in row])

    def write_sidecar(self, path, config: dict, network: Network | None = None) -> None:
        meta = {"config": config, "R_mean": float(self.R_mean), "n_samples": int(self.t.size)}
        if network is not None:
            meta["network"] = {"name": network.name, "n": network.n, "edges": network.n_edges,
                               "sha1": network.content_hash()}
        Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def run_streams(seed) -> dict[str, np.random.Generator]:
    """Independent generators for one run: initial phases, frequencies, noise, opinions."""
    if isinstance(seed, np.random.SeedSequence):
        # spawn() advances the caller's sequence; work on a fresh copy so a
        # seed reused across parameter points yields the same streams
        ss = np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key, pool_size=seed.pool_size)
    else:
        ss = np.random.SeedSequence(seed)
    phases, freqs, noise, opinions = ss.spawn(4)
    return {
        "phases": np.random.default_rng(phases),
        "freqs": freqs,
        "noise": np.random.default_rng(noise),
        "opinions": np.random.default_rng(opinions),
    }


def _adjacency_sum(net: Network, w: np.ndarray) -> np.ndarray:
    if net.complete:
        return w.sum(axis=0) - w
    return net.adjacency @ w


def _received_field(net, att_net, degrees, att_degrees, z, M, alpha, mode):
    """The complex field I_i received by every oscillator (any trailing batch shape)."""
    if mode == "neighbor" and att_net is None:
        w = (1.0 - alpha) * z + alpha * M
        return _adjacency_sum(net, w) / degrees
    spatial = (1.0 - alpha) * (_adjacency_sum(net, z) / degrees)
    if mode == "self":
        return spatial + alpha * M
    if mode == "none":
        return spatial + 0.0 * M
    return spatial + alpha * (_adjacency_sum(att_net, M) / att_degrees)


def _phase_velocity(field_, z):
    # Im(I e^{-i theta})
    return field_.imag * z.real - field_.real * z.imag


def initial_state(cfg: SimConfig, net: Network, seed=None) -> EnsembleState:
    """Uniform random phases, frequencies from ``cfg.freq``, attention per ``cfg.attention_init``."""
    streams = run_streams(cfg.seed if seed is None else seed)
    theta = streams["phases"].uniform(0.0, 2 * np.pi, size=net.n)
    omega = sample_frequencies(cfg.freq, net.n, streams["freqs"])
    M = np.exp(1j * theta) if cfg.attention_init == "phase" else np.zeros(net.n, complex)
    return EnsembleState(theta=theta, M=M, omega=omega)


def step(state: EnsembleState, cfg: SimConfig, net: Network, rng: np.random.Generator,
         attention_net: Network | None = None) -> EnsembleState:
    """One explicit Euler-Maruyama step; both updates use the pre-step state."""
    if state.theta.shape[0] != net.n or (attention_net is not None and attention_net.n != net.n):
        raise SimulationError("state and network dimensions differ")
    deg = net.degrees.astype(float)
    att_deg = attention_net.degrees.astype(float) if attention_net is not None else None
    z = np.exp(1j * state.theta)
    I = _received_field(net, attention_net, deg, att_deg, z, state.M, cfg.alpha, cfg.attention)
    drift = state.omega + cfg.coupling * _phase_velocity(I, z)
    xi = rng.standard_normal(state.theta.shape)
    theta = state.theta + drift * cfg.dt + math.sqrt(2 * cfg.noise * cfg.dt) * xi
    M = state.M + cfg.beta * (z - state.M) * cfg.dt
    return EnsembleState(theta=theta, M=M, omega=state.omega, t=state.t + cfg.dt)


class _NoiseSource:
    """Per-replica Gaussian increments drawn in fixed-size blocks.

    The block size is a constant so a replica sees the same stream whatever
    batch it runs in.
    """

    def __init__(self, rngs: list[np.random.Generator], n: int):
        self.rngs = rngs
        self.n = n
        self.block = np.empty((NOISE_CHUNK, n, len(rngs)))
        self.pos = NOISE_CHUNK

    def next(self) -> np.ndarray:
        if self.pos == NOISE_CHUNK:
            for b, rng in enumerate(self.rngs):
                self.block[:, :, b] = rng.standard_normal((NOISE_CHUNK, self.n))
            self.pos = 0
        out = self.block[self.pos]
        self.pos += 1
        return out


def _as_batch(x, n_batch, name):
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        return np.full(n_batch, float(a))
    if a.shape != (n_batch,):
        raise SimulationError(f"{name} must be scalar or length-{n_batch}")
    return a


def simulate_batch(net: Network, seeds: Sequence, *, coupling, alpha, beta, noise,
                   attention: AttentionMode = "neighbor", freq: FrequencyDist = FrequencyDist(),
                   dt: float = 0.05, t_end: float = 2000.0, measure_window: float = 0.2,
                   record_every: int = 20, attention_init: str = "phase",
                   attention_net: Network | None = None, rho=None, phi=None,
                   keep_history: bool = False) -> list[ObservableSeries]:
    """Integrate ``len(seeds)`` independent replicas in lock-step.

    ``coupling``, ``alpha``, ``beta`` and ``noise`` are scalars or one value per
    replica. ``rho`` switches the frequency drift to the opinion drift
    ``rho_i sin(phi_i - theta_i)``; ``rho`` may be scalar, per-node, or
    (nodes, replicas). ``phi`` defaults to uniform draws from each replica's
    opinion stream.
    """
    n, nb = net.n, len(seeds)
    if nb == 0:
        raise SimulationError("empty batch")
    lam = _as_batch(coupling, nb, "coupling")
    alph = _as_batch(alpha, nb, "alpha")
    bet = _as_batch(beta, nb, "beta")
    D = _as_batch(noise, nb, "noise")
    if attention == "none":
        alph = np.zeros(nb)
    if np.any((alph < 0) | (alph > 1)) or np.any(bet <= 0) or np.any(D < 0):
        raise SimulationError("alpha must lie in [0,1], beta > 0, noise >= 0")
    if attention_net is not None and attention_net.n != n:
        raise SimulationError("attention network size differs from spatial network")
    if attention == "self":
        attention_net = None

    streams = [run_streams(s) for s in seeds]
    theta = np.stack([s["phases"].uniform(0.0, 2 * np.pi, size=n) for s in streams], axis=1)
    omega = np.stack([sample_frequencies(freq, n, s["freqs"]) for s in streams], axis=1)
    if rho is not None:
        rho_arr = np.broadcast_to(np.asarray(rho, dtype=float).reshape(
            (n, 1) if np.ndim(rho) == 1 else np.shape(rho)), (n, nb)).copy()
        if phi is None:
            phi_arr = np.stack([s["opinions"].uniform(0.0, 2 * np.pi, size=n) for s in streams], axis=1)
        else:
            phi_arr = np.broadcast_to(np.asarray(phi, dtype=float).reshape(
                (n, 1) if np.ndim(phi) == 1 else np.shape(phi)), (n, nb)).copy()
        omega = np.zeros((n, nb))
    M = np.exp(1j * theta) if attention_init == "phase" else np.zeros((n, nb), complex)

    deg = net.degrees.astype(float)[:, None]
    att_deg = attention_net.degrees.astype(float)[:, None] if attention_net is not None else None
    noise_src = _NoiseSource([s["noise"] for s in streams], n)
    amp = np.sqrt(2.0 * D * dt)
    bdt = bet * dt

    n_steps = int(round(t_end / dt))
    tail_start = n_steps - max(1, int(round(measure_window * n_steps)))
    n_rec = n_steps // record_every + 1
    t_rec = np.arange(n_rec) * record_every * dt
    R_rec = np.empty((n_rec, nb))
    psi_rec = np.empty((n_rec, nb))
    R_sum = np.zeros(nb)
    hist_th = np.empty((n_steps + 1, n, nb)) if keep_history else None
    hist_M = np.empty((n_steps + 1, n, nb), complex) if keep_history else None

    def observe(z):
        mean = z.mean(axis=0)
        return np.minimum(np.abs(mean), 1.0), np.angle(mean)

    z = np.exp(1j * theta)
    R_rec[0], psi_rec[0] = observe(z)
    if keep_history:
        hist_th[0], hist_M[0] = theta, M
    for k in range(1, n_steps + 1):
        I = _received_field(net, attention_net, deg, att_deg, z, M, alph, attention)
        drift = omega + lam * _phase_velocity(I, z)
        if rho is not None:
            drift = drift + rho_arr * np.sin(phi_arr - theta)
        theta = theta + drift * dt + amp * noise_src.next()
        M = M + bdt * (z - M)
        z = np.exp(1j * theta)
        if k > tail_start:
            R_sum += np.abs(z.mean(axis=0))
        if k % record_every == 0:
            R_rec[k // record_every], psi_rec[k // record_every] = observe(z)
        if keep_history:
            hist_th[k], hist_M[k] = theta, M
        if k % NOISE_CHUNK == 0 and not np.isfinite(theta).all():
            bad = np.flatnonzero(~np.isfinite(theta).all(axis=0))
            raise SimulationError(f"non-finite phases at t={k * dt:g} in replica(s) {bad.tolist()}")
    if not np.isfinite(theta).all():
        raise SimulationError("non-finite phases at end of run")
    R_mean = np.minimum(R_sum / (n_steps - tail_start), 1.0)

    return [
        ObservableSeries(
            t=t_rec, R=R_rec[:, b].copy(), psi=psi_rec[:, b].copy(), R_mean=float(R_mean[b]),
            theta_final=theta[:, b].copy(), M_final=M[:, b].copy(),
            theta_history=hist_th[:, :, b] if keep_history else None,
            M_history=hist_M[:, :, b] if keep_history else None,
        )
        for b in range(nb)
    ]


def simulate(cfg: SimConfig, net: Network, attention_net: Network | None = None,
             keep_history: bool = False) -> ObservableSeries:
    """Run one trajectory of the phase model from uniform random initial phases."""
    return simulate_batch(
        net, [cfg.seed], coupling=cfg.coupling, alpha=cfg.alpha, beta=cfg.beta, noise=cfg.noise,
        attention=cfg.attention, freq=cfg.freq, dt=cfg.dt, t_end=cfg.t_end,
        measure_window=cfg.measure_window, record_every=cfg.record_every,
        attention_init=cfg.attention_init, attention_net=attention_net, keep_history=keep_history,
    )[0]


def simulate_opinion(cfg: OpinionConfig, net: Network, attention_net: Network | None = None,
                     keep_history: bool = False) -> ObservableSeries:
    """Opinion dynamics: each node is pulled toward its inherent opinion ``phi``."""
    s = cfg.sim
    rho = np.asarray(cfg.rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be nonnegative")
    if rho.ndim == 1 and rho.size != net.n:
        raise SimulationError("rho length differs from network size")
    if cfg.phi is not None and np.size(cfg.phi) != net.n:
        raise SimulationError("phi length differs from network size")
    return simulate_batch(
        net, [s.seed], coupling=s.coupling, alpha=s.alpha, beta=s.beta, noise=s.noise,
        attention=s.attention, dt=s.dt, t_end=s.t_end, measure_window=s.measure_window,
        record_every=s.record_every, attention_init=s.attention_init, attention_net=attention_net,
        rho=rho, phi=cfg.phi, keep_history=keep_history,
    )[0]


def simulate_stuart_landau(cfg: SLConfig, net: Network, attention_net: Network | None = None,
                           z0: np.ndarray | None = None, keep_history: bool = False) -> ObservableSeries:
    """Euler-Maruyama for coupled Stuart-Landau oscillators with attention ``Q``.

    The reported ``R``/``psi`` are the order parameter of ``arg z``;
    ``amplitude_mean`` holds the mean ``|z|`` at each recorded sample.
    """
    n = net.n
    streams = run_streams(cfg.seed)
    if z0 is None:
        phase = streams["phases"].uniform(0.0, 2 * np.pi, size=n)
        r0 = streams["phases"].uniform(0.0, 1.0, size=n) if cfg.amplitude0 is None else cfg.amplitude0
        z = r0 * np.exp(1j * phase)
    else:
        z = np.asarray(z0, dtype=complex).copy()
        if z.shape != (n,):
            raise SimulationError("z0 length differs from network size")
    omega = np.full(n, cfg.omega) if cfg.omega is not None else sample_frequencies(cfg.freq, n, streams["freqs"])
    Q = z.copy()
    deg = net.degrees.astype(float)
    att = None if cfg.attention == "self" else attention_net
    att_deg = att.degrees.astype(float) if att is not None else None
    rng = streams["noise"]
    amp = math.sqrt(2.0 * cfg.sigma * cfg.dt)
    lin = 1j * omega + cfg.a

    n_steps = int(round(cfg.t_end / cfg.dt))
    tail_start = n_steps - max(1, int(round(cfg.measure_window * n_steps)))
    n_rec = n_steps // cfg.record_every + 1
    t_rec = np.arange(n_rec) * cfg.record_every * cfg.dt
    R_rec, psi_rec, amp_rec = np.empty(n_rec), np.empty(n_rec), np.empty(n_rec)
    hist = np.empty((n_rec, n), complex) if keep_history else None
    R_sum = 0.0

    def record(i, z):
        R_rec[i], psi_rec[i] = order_parameter(np.angle(z))
        amp_rec[i] = np.abs(z).mean()
        if keep_history:
            hist[i] = z

    record(0, z)
    for k in range(1, n_steps + 1):
        coupled = _received_field(net, att, deg, att_deg, z, Q, cfg.alpha, cfg.attention)
        dz = (lin * z - cfg.b * (z.real**2 + z.imag**2) * z + cfg.coupling * coupled) * cfg.dt
        if cfg.sigma:
            w = rng.standard_normal((2, n))
            dz = dz + amp * (w[0] + 1j * w[1])
        Q = Q + cfg.beta * (z - Q) * cfg.dt
        z = z + dz
        if k > tail_start:
            R_sum += order_parameter(np.angle(z))[0]
        if k % cfg.record_every == 0:
            record(k // cfg.record_every, z)
        if not np.isfinite(z).all():
            raise SimulationError(f"Stuart-Landau state blew up at t={k * cfg.dt:g}")
    return ObservableSeries(
        t=t_rec, R=R_rec, psi=psi_rec, R_mean=R_sum / (n_steps - tail_start),
        theta_final=np.angle(z), M_final=Q, amplitude_mean=amp_rec,
        theta_history=np.angle(hist) if keep_history else None,
    )
