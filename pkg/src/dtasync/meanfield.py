"""Critical coupling of the fully connected ensemble in the continuum limit.

Neighbor attention leaves the incoherence threshold of the noisy Kuramoto
model unchanged::

    lambda_c * E_g[ D / (D^2 + w^2) ] = 2

Self attention replaces the integrand by ``Re f(w, lambda)`` with::

    f = (1 - a) lambda / (D + i w - (a lambda / 2) (4D + 2i w) / (b + 4D + 2i w))

and lambda_c is the real root of ``E_g[Re f] = 2``, found by bisection.
``f`` is rational in ``w`` with a real pole at ``w = 0`` when
``lambda = (b + 4D) / (2a)``; close to it the integrand is a spike narrower
than any practical Gauss-Hermite grid, so the normal-law expectation of
``f`` is evaluated exactly by partial fractions and the Faddeeva function.
For ``g = delta(0)`` both reduce to closed forms that the tests use as oracles.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

from .dynamics import FrequencyDist

__all__ = [
    "LambdaCResult",
    "MeanFieldError",
    "f_eval",
    "quadrature",
    "quadrature_with_error",
    "lambda_c_neighbor",
    "lambda_c_self",
    "lambda_c_self_delta",
    "expected_f",
]

GH_START = 64
GH_MAX = 1 << 14
GH_TOL = 1e-10
MAX_DOUBLINGS = 15
RESIDUAL_TOL = 1e-8


class MeanFieldError(ValueError):
    """Ill-posed condition, singular integrand, or no root in the bracket."""


@dataclass
class LambdaCResult:
    lambda_c: float
    residual: float
    bracket: tuple[float, float]
    quad_error: float
    quad_nodes: int = 0
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "lambda_c": self.lambda_c,
            "residual": self.residual,
            "bracket": list(self.bracket),
            "quad_error": self.quad_error,
            "quad_nodes": self.quad_nodes,
            "iterations": self.iterations,
        }


def f_eval(omega, alpha: float, beta: float, lam: float, D: float):
    """``f(0, omega, alpha, beta, lambda)`` for scalar or array ``omega``."""
    w = np.asarray(omega, dtype=float)
    u = 4 * D + 2j * w
    denom = D + 1j * w - 0.5 * alpha * lam * u / (beta + u)
    if np.any(np.abs(denom) < 1e-300):
        raise MeanFieldError(
            f"singular denominator in f at omega=0, alpha={alpha}, beta={beta}, lambda={lam}, D={D}"
        )
    out = (1 - alpha) * lam / denom
    return complex(out) if out.ndim == 0 else out


@lru_cache(maxsize=16)
def _hermite(n: int):
    x, w = special.roots_hermite(n)
    return x, w / math.sqrt(math.pi)


def quadrature_with_error(dist: FrequencyDist, integrand: Callable) -> tuple[float, float, int]:
    """``E_g[integrand]`` with an error estimate and the node count used.

    ``integrand`` must accept a numpy array of frequencies. The normal law uses
    Gauss-Hermite rules doubled from 64 nodes until successive results agree
    to 1e-10; beyond 2**14 nodes it falls back to adaptive quadrature.
    """
    if dist.kind == "delta":
        return float(np.real(integrand(np.zeros(1)))[0]), 0.0, 1
    if dist.kind == "tabulated":
        vals = np.real(integrand(np.asarray(dist.values)))
        return float(np.mean(vals)), 0.0, len(dist.values)
    scale = math.sqrt(2.0 * dist.variance)
    prev = None
    n = GH_START
    while n <= GH_MAX:
        x, w = _hermite(n)
        val = float(np.dot(w, np.real(integrand(scale * x))))
        if not np.isfinite(val):
            raise MeanFieldError("integrand is not finite on the quadrature nodes")
        if prev is not None and abs(val - prev) < GH_TOL:
            return val, abs(val - prev), n
        prev, n = val, 2 * n
    sd = math.sqrt(dist.variance)

    def weighted(w):
        return float(np.real(integrand(np.array([w])))[0]) * math.exp(-0.5 * (w / sd) ** 2) / (sd * math.sqrt(2 * math.pi))

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            lo, err_lo = integrate.quad(weighted, -40 * sd, 0.0, limit=500, epsabs=1e-13, epsrel=1e-12)
            hi, err_hi = integrate.quad(weighted, 0.0, 40 * sd, limit=500, epsabs=1e-13, epsrel=1e-12)
        except integrate.IntegrationWarning as exc:
            raise MeanFieldError(f"quadrature did not converge: {exc}") from None
    return lo + hi, err_lo + err_hi, -1


def quadrature(dist: FrequencyDist, integrand: Callable) -> float:
    """``E_g[integrand]`` over the frequency law ``dist``."""
    return quadrature_with_error(dist, integrand)[0]


def _normal_resolvent(p: complex, sd: float) -> complex:
    """``E[1 / (w - p)]`` for ``w ~ N(0, sd^2)`` and non-real ``p``."""
    s2 = sd * math.sqrt(2.0)
    if p.imag > 0:
        return 1j * math.sqrt(math.pi) * special.wofz(p / s2) / s2
    return np.conj(1j * math.sqrt(math.pi) * special.wofz(np.conj(p) / s2) / s2)


def expected_f(dist: FrequencyDist, alpha: float, beta: float, lam: float, D: float) -> complex:
    """``E_g[f(0, w, alpha, beta, lambda)]``, exact for every supported law.

    For the normal law ``f`` is split into partial fractions over the two
    roots of its quadratic denominator and each term is integrated with the
    Faddeeva function. A root on the real axis (only at ``w = 0`` and
    ``lambda = (beta + 4D) / (2 alpha)``) is reported as singular.
    """
    if dist.kind == "delta":
        return f_eval(0.0, alpha, beta, lam, D)
    if dist.kind == "tabulated":
        return complex(np.mean(f_eval(np.asarray(dist.values), alpha, beta, lam, D)))
    # denominator  -2 w^2 + i (beta + 6D - alpha lam) w + D (beta + 4D) - 2 alpha lam D
    c2, c1 = -2.0, 1j * (beta + 6 * D - alpha * lam)
    c0 = D * (beta + 4 * D) - 2 * alpha * lam * D
    total = 0.0j
    for p in np.roots([c2, c1, c0]):
        if abs(p.imag) < 1e-14 * max(1.0, abs(p)):
            raise MeanFieldError(f"singular denominator in f on the real axis (lambda={lam}, alpha={alpha})")
        residue = (1 - alpha) * lam * (2j * p + beta + 4 * D) / (2 * c2 * p + c1)
        total += residue * _normal_resolvent(complex(p), math.sqrt(dist.variance))
    return complex(total)


def _check(D, alpha=0.0, beta=1.0):
    if not D > 0:
        raise MeanFieldError(f"noise strength must be positive, got D={D}")
    if not 0.0 <= alpha < 1.0:
        raise MeanFieldError(
            f"alpha must lie in [0, 1); at alpha=1 the spatial term vanishes and no finite lambda_c exists"
        )
    if not beta > 0:
        raise MeanFieldError(f"beta must be positive, got {beta}")


def lambda_c_neighbor(D: float, dist: FrequencyDist = FrequencyDist()) -> LambdaCResult:
    """Incoherence threshold with neighbor attention (independent of alpha, beta)."""
    _check(D)
    if dist.kind == "delta":
        return LambdaCResult(2.0 * D, 0.0, (2.0 * D, 2.0 * D), 0.0, 1)
    mass, err, nodes = quadrature_with_error(dist, lambda w: D / (D * D + w * w))
    lam = 2.0 / mass
    residual = lam * mass - 2.0
    return LambdaCResult(lam, residual, (lam, lam), err, nodes)


def lambda_c_self_delta(D: float, alpha: float, beta: float) -> float:
    """Closed form ``2D / (1 - alpha beta / (beta + 4D))`` for identical frequencies."""
    return 2.0 * D / (1.0 - alpha * beta / (beta + 4.0 * D))


def lambda_c_self(D: float, alpha: float, beta: float,
                  dist: FrequencyDist = FrequencyDist()) -> LambdaCResult:
    """Incoherence threshold with self attention, by bracketing bisection.

    The bracket starts at ``[2D, 8D / (1 - alpha)]`` and the upper end doubles
    until the condition changes sign. At ``omega = 0`` the integrand has a
    pole at ``lambda_p = (beta + 4D) / (2 alpha)``; beyond it ``E[Re f]`` is
    below 2, so the search stops just short of the pole. For identical
    frequencies the condition diverges there and a root always exists; for a
    spread of frequencies it may stay below 2, and the call then fails.
    """
    _check(D, alpha, beta)

    def F(lam):
        return expected_f(dist, alpha, beta, lam, D).real - 2.0

    pole = (beta + 4 * D) / (2 * alpha) if alpha > 0 else math.inf
    lo = 2.0 * D
    while F(lo) > 0:
        lo *= 0.5
        if lo < 1e-12:
            raise MeanFieldError("condition is positive down to lambda=0")
    cap = pole * (1 - 1e-9)
    hi = min(8.0 * D / (1.0 - alpha), cap)
    doublings = 0
    f_hi = F(hi)
    while f_hi <= 0:
        if hi >= cap:
            # past the pole E[Re f] < 2 for every law, so no root exists above
            raise MeanFieldError(
                f"condition stays below 2 up to the pole at lambda={pole:g}; "
                f"no finite lambda_c for D={D}, alpha={alpha}, beta={beta}"
            )
        lo, hi = hi, min(2 * hi, cap)
        doublings += 1
        if doublings > MAX_DOUBLINGS:
            raise MeanFieldError(
                f"no sign change up to lambda={hi:g}; no finite lambda_c for D={D}, alpha={alpha}, beta={beta}"
            )
        f_hi = F(hi)
    bracket = (lo, hi)

    it = 0
    a, b = lo, hi
    while b - a > 4 * np.finfo(float).eps * b and it < 200:
        mid = 0.5 * (a + b)
        fm = F(mid)
        it += 1
        if fm == 0:
            a = b = mid
            break
        if fm < 0:
            a = mid
        else:
            b = mid
    fa, fb = F(a), F(b)
    root, residual = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
    if abs(residual) >= RESIDUAL_TOL:
        raise MeanFieldError(f"bisection stopped with residual {residual:.3e} at lambda={root}")
    # a Gauss-Hermite estimate at the root documents the quadrature error
    quad_err, quad_nodes = 0.0, 1
    if dist.kind == "normal":
        try:
            gh, _, quad_nodes = quadrature_with_error(dist, lambda w: f_eval(w, alpha, beta, root, D).real)
            quad_err = abs(gh - (residual + 2.0))
        except MeanFieldError:
            quad_err, quad_nodes = math.nan, 0
    return LambdaCResult(root, residual, bracket, quad_err, quad_nodes, it)
