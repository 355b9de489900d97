"""Oscillatory associative memory with second-order coupling and attention.

Binary patterns ``eta in {-1, +1}^N`` are phase-locked states
``theta_i = (1 - eta_i) pi / 2``. Old patterns are stored in the spatial
coupling ``C`` and new ones in the attention coupling ``C_hat``; the attention
states relax toward ``exp(i theta)`` at rate ``beta``. The field is::

    dtheta_i/dt = Im[I_i e^{-i theta_i}] + eps Im[S e^{-2 i theta_i}]
    I_i = (1 - alpha) sum_j C_ij e^{i theta_j} + alpha sum_j C_hat_ij M_j
    dM_i/dt = beta (e^{i theta_i} - M_i)

with ``S = mean(e^{2 i theta})`` (``second_order="complex"``) or its modulus
(``second_order="modulus"``). Only the complex form is invariant under a global
phase shift.

The Jacobian acts on the real state ``(theta, Re M, Im M)`` of size ``3N``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

__all__ = [
    "GLYPHS",
    "HnnConfig",
    "StabilityMap",
    "HopfieldError",
    "as_pattern",
    "glyph_pattern",
    "load_pattern_file",
    "render",
    "hebbian_matrix",
    "pattern_state",
    "hnn_vector_field",
    "jacobian",
    "jacobian_at_pattern",
    "numerical_jacobian",
    "zero_mode",
    "leading_eigenvalue",
    "stability_map",
    "recover",
    "recovery_rate",
    "random_mask",
    "glyph_config",
    "overlap",
]

ZERO_TOL = 1e-8


class HopfieldError(ValueError):
    pass


# 8x8 bitmaps, '#' = +1, '.' = -1. Letters sit at different offsets in the
# frame, which keeps pairwise overlaps within each group at or below 0.19.
GLYPHS: dict[str, tuple[str, ...]] = {
    "K": (
        "..##..##",
        "..##.##.",
        "..####..",
        "..###...",
        "..####..",
        "..##.##.",
        "..##..##",
        "........",
    ),
    "U": (
        "........",
        ".##..##.",
        ".##..##.",
        ".##..##.",
        ".##..##.",
        ".##..##.",
        ".##..##.",
        "..####..",
    ),
    "R": (
        "........",
        "#####...",
        "##..##..",
        "##..##..",
        "#####...",
        "####....",
        "##.##...",
        "##..##..",
    ),
    "A": (
        "........",
        ".####...",
        "##..##..",
        "##..##..",
        "######..",
        "##..##..",
        "##..##..",
        "##..##..",
    ),
    "M": (
        "..#....#",
        "..##..##",
        "..######",
        "..#.##.#",
        "..#....#",
        "..#....#",
        "..#....#",
        "........",
    ),
    "O": (
        "..####..",
        ".##..##.",
        ".##..##.",
        ".##..##.",
        ".##..##.",
        ".##..##.",
        "..####..",
        "........",
    ),
    "T": (
        ".######.",
        ".######.",
        "...##...",
        "...##...",
        "...##...",
        "...##...",
        "...##...",
        "........",
    ),
}


def as_pattern(x) -> np.ndarray:
    eta = np.asarray(x)
    if eta.ndim != 1 or eta.size == 0:
        raise HopfieldError("a pattern is a non-empty 1-D vector")
    if not np.all((eta == 1) | (eta == -1)):
        raise HopfieldError("pattern entries must be exactly +1 or -1")
    return eta.astype(np.int64)


def _parse_rows(rows: Sequence[str]) -> np.ndarray:
    rows = [r.strip() for r in rows if r.strip()]
    if len(rows) != 8 or any(len(r) != 8 for r in rows):
        raise HopfieldError("a glyph is 8 lines of 8 characters")
    if any(c not in "#." for r in rows for c in r):
        raise HopfieldError("glyph characters must be '#' or '.'")
    return np.array([1 if c == "#" else -1 for r in rows for c in r], dtype=np.int64)


def glyph_pattern(letter: str) -> np.ndarray:
    try:
        return _parse_rows(GLYPHS[letter.upper()])
    except KeyError:
        raise HopfieldError(f"no glyph for {letter!r}; available: {''.join(GLYPHS)}") from None


def load_pattern_file(path) -> np.ndarray:
    return _parse_rows(Path(path).read_text().splitlines())


def render(pattern, mask=None, width: int = 8) -> str:
    """ASCII bitmap; masked sites are shown as ``?``."""
    eta = np.asarray(pattern)
    chars = np.where(eta > 0, "#", ".")
    if mask is not None:
        chars = np.where(np.asarray(mask, bool), "?", chars)
    return "\n".join("".join(chars[i:i + width]) for i in range(0, eta.size, width))


def hebbian_matrix(patterns) -> np.ndarray:
    """``C_ij = (1/N) sum_mu eta_i^mu eta_j^mu`` (diagonal kept: ``C_ii = p/N``)."""
    pats = [as_pattern(p) for p in patterns]
    if not pats:
        raise HopfieldError("need at least one pattern")
    n = pats[0].size
    if any(p.size != n for p in pats):
        raise HopfieldError("patterns have different lengths")
    X = np.stack(pats).astype(np.int64)
    return (X.T @ X).astype(float) / n


@dataclass(frozen=True)
class HnnConfig:
    C: np.ndarray
    C_hat: np.ndarray
    eps: float = 0.5
    alpha: float = 0.0
    beta: float = 1.0
    second_order: Literal["complex", "modulus"] = "complex"

    def __post_init__(self):
        C, Ch = np.asarray(self.C, float), np.asarray(self.C_hat, float)
        if C.shape != Ch.shape or C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise HopfieldError("C and C_hat must be square matrices of equal shape")
        if not (np.allclose(C, C.T) and np.allclose(Ch, Ch.T)):
            raise HopfieldError("C and C_hat must be symmetric")
        if not 0.0 <= self.alpha <= 1.0:
            raise HopfieldError("alpha must lie in [0, 1]")
        if not self.beta > 0:
            raise HopfieldError("beta must be positive")
        if self.second_order not in ("complex", "modulus"):
            raise HopfieldError(f"unknown second_order {self.second_order!r}")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "C_hat", Ch)

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @classmethod
    def from_patterns(cls, old, new, **kwargs) -> "HnnConfig":
        C = hebbian_matrix(old)
        C_hat = hebbian_matrix(new) if len(new) else np.zeros_like(C)
        return cls(C, C_hat, **kwargs)

    def with_(self, **kwargs) -> "HnnConfig":
        return replace(self, **kwargs)


def pattern_state(pattern) -> tuple[np.ndarray, np.ndarray]:
    """Phases and attention states of the locked state encoding ``pattern``."""
    eta = as_pattern(pattern)
    theta = (1 - eta) * np.pi / 2
    return theta.astype(float), eta.astype(complex)


def hnn_vector_field(theta, M, cfg: HnnConfig) -> tuple[np.ndarray, np.ndarray]:
    theta = np.asarray(theta, float)
    M = np.asarray(M, complex)
    if theta.shape != (cfg.n,) or M.shape != (cfg.n,):
        raise HopfieldError(f"state dimensions {theta.shape}, {M.shape} differ from N={cfg.n}")
    z = np.exp(1j * theta)
    I = (1 - cfg.alpha) * (cfg.C @ z) + cfg.alpha * (cfg.C_hat @ M)
    S = np.mean(z * z)
    if cfg.second_order == "modulus":
        S = abs(S)
    zc = z.conj()
    dtheta = (I * zc).imag + cfg.eps * (S * zc * zc).imag
    dM = cfg.beta * (z - M)
    return dtheta, dM


def _pack(theta, M):
    return np.concatenate([theta, M.real, M.imag])


def _unpack(x, n):
    return x[:n], x[n:2 * n] + 1j * x[2 * n:]


def _flat_field(x, cfg):
    th, M = hnn_vector_field(*_unpack(x, cfg.n), cfg)
    return _pack(th, M)


def jacobian(cfg: HnnConfig, theta, M) -> np.ndarray:
    """Analytic Jacobian of the field at ``(theta, M)`` in ``(theta, Re M, Im M)`` coordinates."""
    n = cfg.n
    theta = np.asarray(theta, float)
    M = np.asarray(M, complex)
    z = np.exp(1j * theta)
    zc = z.conj()
    a, eps, beta = cfg.alpha, cfg.eps, cfg.beta
    I = (1 - a) * (cfg.C @ z) + a * (cfg.C_hat @ M)
    z2 = z * z
    S = np.mean(z2)

    J = np.zeros((3 * n, 3 * n))
    tt = (1 - a) * cfg.C * np.real(np.outer(zc, z))
    tt -= np.diag(np.real(I * zc))
    if cfg.second_order == "complex":
        tt += (2 * eps / n) * np.real(np.outer(zc * zc, z2))
        tt -= np.diag(2 * eps * np.real(S * zc * zc))
    else:
        absS = abs(S)
        # d|S|/dtheta_j = -(2/N) Im(conj(S) z_j^2) / |S|
        dabs = -(2.0 / n) * np.imag(np.conj(S) * z2) / absS if absS > 0 else np.zeros(n)
        tt += -eps * np.outer(np.sin(2 * theta), dabs)
        tt -= np.diag(2 * eps * absS * np.cos(2 * theta))
    J[:n, :n] = tt
    J[:n, n:2 * n] = -a * cfg.C_hat * np.sin(theta)[:, None]
    J[:n, 2 * n:] = a * cfg.C_hat * np.cos(theta)[:, None]
    idx = np.arange(n)
    J[n + idx, idx] = -beta * np.sin(theta)
    J[2 * n + idx, idx] = beta * np.cos(theta)
    J[n + idx, n + idx] = -beta
    J[2 * n + idx, 2 * n + idx] = -beta
    return J


def jacobian_at_pattern(cfg: HnnConfig, pattern) -> np.ndarray:
    eta = as_pattern(pattern)
    if eta.size != cfg.n:
        raise HopfieldError(f"pattern length {eta.size} differs from N={cfg.n}")
    return jacobian(cfg, *pattern_state(eta))


def numerical_jacobian(cfg: HnnConfig, theta, M, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of the field."""
    x0 = _pack(np.asarray(theta, float), np.asarray(M, complex))
    J = np.empty((x0.size, x0.size))
    for k in range(x0.size):
        e = np.zeros_like(x0)
        e[k] = h
        J[:, k] = (_flat_field(x0 + e, cfg) - _flat_field(x0 - e, cfg)) / (2 * h)
    return J


def zero_mode(pattern) -> np.ndarray:
    """Tangent of a global phase shift at the pattern state: ``(1, 0, eta)``."""
    eta = as_pattern(pattern).astype(float)
    return np.concatenate([np.ones_like(eta), np.zeros_like(eta), eta])


def leading_eigenvalue(J, zero_vector=None, exclude_zero: bool = True, tol: float = ZERO_TOL) -> complex:
    """Rightmost eigenvalue once the phase-shift zero mode is removed.

    Eigenvalues with modulus below ``tol`` are zero-mode candidates. A single
    candidate is dropped. With several, ``zero_vector`` (the known null
    direction) selects which to drop; without it the call fails rather than
    guess.
    """
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise HopfieldError("Jacobian must be square")
    try:
        ev = np.linalg.eigvals(J)
    except np.linalg.LinAlgError as exc:
        raise HopfieldError(f"eigensolver failed: {exc}") from None
    if exclude_zero:
        cand = np.flatnonzero(np.abs(ev) < tol)
        if cand.size == 0:
            raise HopfieldError(f"no eigenvalue below {tol:g}: zero mode not found")
        if cand.size == 1:
            drop = cand[0]
        elif zero_vector is None:
            raise HopfieldError(f"{cand.size} eigenvalues below {tol:g}; zero mode is ambiguous")
        else:
            w, V = np.linalg.eig(J)
            v0 = np.asarray(zero_vector, float)
            v0 = v0 / np.linalg.norm(v0)
            near = np.flatnonzero(np.abs(w) < tol)
            align = np.abs(V[:, near].conj().T @ v0)
            drop_val = w[near[np.argmax(align)]]
            drop = int(np.argmin(np.abs(ev - drop_val)))
        ev = np.delete(ev, drop)
    return complex(ev[np.argmax(ev.real)])


@dataclass
class StabilityMap:
    eps: np.ndarray
    alpha: np.ndarray
    values: np.ndarray  # (len(alpha), len(eps)) leading real parts
    zero_eigs: np.ndarray  # |eigenvalue| of the dropped zero mode, same shape

    @property
    def boundary(self) -> np.ndarray:
        """Points ``(eps, alpha)`` where the leading real part crosses zero along grid edges."""
        pts = []
        v, e, a = self.values, self.eps, self.alpha
        for i in range(len(a)):
            for j in range(len(e)):
                if j + 1 < len(e) and v[i, j] * v[i, j + 1] < 0:
                    s = v[i, j] / (v[i, j] - v[i, j + 1])
                    pts.append((e[j] + s * (e[j + 1] - e[j]), a[i]))
                if i + 1 < len(a) and v[i, j] * v[i + 1, j] < 0:
                    s = v[i, j] / (v[i, j] - v[i + 1, j])
                    pts.append((e[j], a[i] + s * (a[i + 1] - a[i])))
        return np.array(pts).reshape(-1, 2)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("alpha,eps,leading_real\n")
            for i, al in enumerate(self.alpha):
                for j, ep in enumerate(self.eps):
                    fh.write(f"{al!r},{ep!r},{self.values[i, j]!r}\n")


def stability_map(cfg: HnnConfig, pattern, eps_grid, alpha_grid) -> StabilityMap:
    """Leading real part of the pattern's Jacobian on an ``alpha x eps`` grid."""
    eps_grid = np.asarray(eps_grid, float)
    alpha_grid = np.asarray(alpha_grid, float)
    if eps_grid.size == 0 or alpha_grid.size == 0:
        raise HopfieldError("grids must be non-empty")
    for g in (eps_grid, alpha_grid):
        if np.any(np.diff(g) <= 0):
            raise HopfieldError("grids must be strictly increasing")
    eta = as_pattern(pattern)
    v0 = zero_mode(eta)
    complex_mode = cfg.second_order == "complex"
    vals = np.empty((alpha_grid.size, eps_grid.size))
    zeros = np.full_like(vals, np.nan)
    for i, a in enumerate(alpha_grid):
        for j, e in enumerate(eps_grid):
            J = jacobian_at_pattern(cfg.with_(alpha=a, eps=e), eta)
            vals[i, j] = leading_eigenvalue(J, v0, exclude_zero=complex_mode).real
            if complex_mode:
                zeros[i, j] = np.min(np.abs(np.linalg.eigvals(J)))
    return StabilityMap(eps_grid, alpha_grid, vals, zeros)


def overlap(theta, pattern, reference_phase: float = 0.0) -> float:
    eta = as_pattern(pattern)
    return float(abs(np.mean(eta * np.exp(1j * (np.asarray(theta) - reference_phase)))))


def _rk4(cfg, theta, M, dt, steps):
    n = cfg.n
    x = _pack(theta, M)
    for _ in range(steps):
        k1 = _flat_field(x, cfg)
        k2 = _flat_field(x + 0.5 * dt * k1, cfg)
        k3 = _flat_field(x + 0.5 * dt * k2, cfg)
        k4 = _flat_field(x + dt * k3, cfg)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return _unpack(x, n)


def recover(cfg: HnnConfig, target, mask, steps: int = 4000, seed=0, dt: float = 0.05):
    """Complete a masked pattern by integrating the deterministic field.

    Unmasked sites start at the pattern phases, masked sites at uniform random
    phases, and attention states at ``exp(i theta)``. Returns the decoded
    pattern and ``|mean(eta exp(i (theta - psi_ref)))|``.
    """
    eta = as_pattern(target)
    mask = np.asarray(mask, bool)
    if mask.shape != eta.shape:
        raise HopfieldError("mask length differs from pattern length")
    if mask.all():
        raise HopfieldError("every site is masked; nothing to recover from")
    rng = np.random.default_rng(seed)
    theta = (1 - eta) * np.pi / 2.0
    theta = np.where(mask, rng.uniform(0.0, 2 * np.pi, eta.size), theta)
    theta, _ = _rk4(cfg, theta, np.exp(1j * theta), dt, steps)
    # reference phase: circular mean of the unmasked sites, pattern-aligned
    ref = np.angle(np.mean((eta * np.exp(1j * theta))[~mask]))
    decoded = np.where(np.cos(theta - ref) >= 0, 1, -1).astype(np.int64)
    return decoded, overlap(theta, eta, ref)


def random_mask(n: int, frac: float, seed=0) -> np.ndarray:
    """Boolean mask with ``round(frac * n)`` sites chosen uniformly."""
    if not 0.0 <= frac < 1.0:
        raise HopfieldError("mask fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    mask = np.zeros(n, bool)
    mask[rng.choice(n, int(round(frac * n)), replace=False)] = True
    return mask


def recovery_rate(cfg: HnnConfig, pattern, mask_frac: float = 0.2, seeds=range(10),
                  steps: int = 3000, threshold: float = 0.99) -> float:
    """Fraction of seeds whose masked recovery reaches overlap above ``threshold``."""
    eta = as_pattern(pattern)
    hits = 0
    seeds = list(seeds)
    for s in seeds:
        # mask and masked-site phases come from separate streams of one seed
        ms, ps = np.random.SeedSequence(s).spawn(2)
        mask = random_mask(eta.size, mask_frac, ms)
        _, ov = recover(cfg, eta, mask, steps=steps, seed=ps)
        hits += ov > threshold
    return hits / len(seeds)


def glyph_config(eps: float = 0.15, alpha: float = 0.0, beta: float = 1.0,
                 old: str = "KUR", new: str = "AMOT", **kwargs) -> HnnConfig:
    """Network storing ``old`` letters in ``C`` and ``new`` letters in ``C_hat``."""
    return HnnConfig.from_patterns([glyph_pattern(c) for c in old], [glyph_pattern(c) for c in new],
                                   eps=eps, alpha=alpha, beta=beta, **kwargs)
