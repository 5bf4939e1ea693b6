"""Large-N limit laws of the joint density and finite-N convergence helpers.

Three regimes:

bulk
    ``|z| < 1 + tau`` in units of ``sqrt(N)``, overlap ``t`` in units of ``N``;
    an inverse-gamma law in ``t``.
edge
    ``z = sqrt(N)(1+tau) + delta sqrt(1-tau^2)``, ``q = sigma sqrt(N(1-tau^2))``.
weak
    ``tau = 1 - a^2/(2N)``, ``|z| < 2`` in units of ``sqrt(N)``, ``t = O(1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .jdf import jdf_q, jdf_t
from .prt import EnsembleParams
from .specfun import gaussian_tail

__all__ = [
    "BulkPoint",
    "EdgePoint",
    "WeakPoint",
    "GAUSS_NODES",
    "semicircle",
    "bulk_jdf",
    "bulk_density",
    "edge_jdf",
    "weak_jdf",
    "weak_jdf_by_parts",
    "weak_density",
    "bulk_convergence_error",
    "edge_convergence_error",
    "weak_convergence_error",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# fixed Gauss-Legendre rule on [0, 1] for the smooth s-integrals; 1e-12 up to A = 1e4
GAUSS_NODES = 64
_x, _w = np.polynomial.legendre.leggauss(GAUSS_NODES)
_S = 0.5 * (_x + 1.0)
_W = 0.5 * _w
_A_MAX = 1e4


@dataclass(frozen=True)
class BulkPoint:
    tau: float
    z: float
    t: float

    def __post_init__(self):
        if not (0.0 <= self.tau < 1.0):
            raise ValueError(f"bulk regime needs 0 <= tau < 1, got {self.tau}")
        if not abs(self.z) < 1.0 + self.tau:
            raise ValueError(f"bulk regime needs |z| < 1 + tau, got z={self.z}")
        if not self.t > 0:
            raise ValueError(f"t must be > 0, got {self.t}")


@dataclass(frozen=True)
class EdgePoint:
    tau: float
    delta: float
    sigma: float

    def __post_init__(self):
        if not (0.0 <= self.tau < 1.0):
            raise ValueError(f"edge regime needs 0 <= tau < 1, got {self.tau}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


@dataclass(frozen=True)
class WeakPoint:
    a: float
    z: float
    t: float
    A: float = field(init=False)

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be > 0, got {self.a}")
        if not abs(self.z) < 2.0:
            raise ValueError(f"weak regime needs |z| < 2, got {self.z}")
        if not self.t > 0:
            raise ValueError(f"t must be > 0, got {self.t}")
        object.__setattr__(self, "A", _weak_A(self.a, self.z))


def semicircle(z: float) -> float:
    """Wigner semicircle density ``sqrt(4 - z^2) / (2 pi)``; zero outside [-2, 2]."""
    return math.sqrt(max(4.0 - z * z, 0.0)) / (2.0 * math.pi)


def _weak_A(a, z):
    return (math.pi * semicircle(z) * a) ** 2


def _gauss01(f):
    return float(np.dot(_W, f(_S)))


def bulk_jdf(p: BulkPoint) -> float:
    tau, z, t = p.tau, p.z, p.t
    c = 1.0 - z * z / (1.0 + tau) ** 2
    s = math.sqrt(1.0 - tau * tau)
    return s / (2.0 * _SQRT_2PI) * c / (t * t) * math.exp(-(1.0 - tau * tau) / (2.0 * t) * c)


def bulk_density(tau: float) -> float:
    """Limiting density of real eigenvalues in the bulk, ``1/sqrt(2 pi (1 - tau^2))``."""
    return 1.0 / math.sqrt(2.0 * math.pi * (1.0 - tau * tau))


def edge_jdf(p: EdgePoint) -> float:
    tau, d, s = p.tau, p.delta, p.sigma
    pre = 1.0 / (4.0 * math.pi * s * s * (1.0 - tau * tau))
    expo = -1.0 / (4.0 * s * s) + d / s
    br = math.exp(-2.0 * d * d) + (1.0 / s - 2.0 * d) * gaussian_tail(2.0 * d)
    if br == 0.0:
        return 0.0
    return pre * math.exp(expo) * br


def _check_A(A):
    if A > _A_MAX:
        raise ValueError(f"A = {A:g} exceeds the {GAUSS_NODES}-node rule's validated range (A <= {_A_MAX:g})")


def weak_jdf(p: WeakPoint, check: bool = True) -> float:
    """Weak non-Hermiticity limit of the joint density.

    With ``check=True`` the by-parts form is evaluated as well and the two
    must agree to 1e-12 relative.
    """
    A, t = p.A, p.t
    _check_A(A)
    if A == 0.0:
        return 0.0
    rho = semicircle(p.z)
    integral = _gauss01(lambda s: np.exp(-0.5 * A * s * s) * (1.0 + A + A / t - A * s * s) * s * s)
    val = 0.5 * A * rho * math.exp(-A / (2.0 * t)) / (t * t) * integral
    if check:
        alt = weak_jdf_by_parts(p)
        if abs(val - alt) > 1e-12 * max(abs(val), 1e-300):
            raise ArithmeticError(f"weak-regime forms disagree at {p}: {val!r} vs {alt!r}")
    return val


def weak_jdf_by_parts(p: WeakPoint) -> float:
    """Same law with the ``s^2``-weighted integral removed by integration by parts."""
    A, t = p.A, p.t
    _check_A(A)
    if A == 0.0:
        return 0.0
    rho = semicircle(p.z)
    i0 = _gauss01(lambda s: np.exp(-0.5 * A * s * s))
    br = (2.0 / A - 1.0 / t) * math.exp(-0.5 * A) + (1.0 + 1.0 / t - 2.0 / A) * i0
    return 0.5 * A * rho * math.exp(-A / (2.0 * t)) / (t * t) * br


def weak_density(a: float, z: float) -> float:
    """Limiting density of real eigenvalues (per unit ``z/sqrt(N)``, divided by ``N``)."""
    if abs(z) > 2.0:
        raise ValueError(f"weak density needs |z| <= 2, got {z}")
    if a < 0:
        raise ValueError(f"a must be >= 0, got {a}")
    A = _weak_A(a, z)
    _check_A(A)
    return semicircle(z) * _gauss01(lambda s: np.exp(-0.5 * A * s * s))


def bulk_convergence_error(params: EnsembleParams, z: float, t: float) -> float:
    """``|N jdf_t(z sqrt(N), N t) - bulk_jdf(z, t)|``."""
    n = params.n
    limit = bulk_jdf(BulkPoint(params.tau, z, t))
    return abs(n * jdf_t(params, z * math.sqrt(n), n * t) - limit)


def edge_finite(params: EnsembleParams, delta: float, sigma: float) -> float:
    """``sqrt(N)`` times the ``(z, q)`` density at the edge coordinates."""
    n, tau = params.n, params.tau
    s = math.sqrt(1.0 - tau * tau)
    z = math.sqrt(n) * (1.0 + tau) + delta * s
    q = sigma * math.sqrt(n) * s
    return math.sqrt(n) * jdf_q(params, z, q)


def edge_convergence_error(params: EnsembleParams, delta: float, sigma: float) -> float:
    return abs(edge_finite(params, delta, sigma) - edge_jdf(EdgePoint(params.tau, delta, sigma)))


def weak_finite(n: int, a: float, z: float, t: float) -> float:
    """``N^{-1/2} jdf_t(z sqrt(N), t)`` at ``tau = 1 - a^2/(2N)``."""
    params = EnsembleParams.weak(n, a)
    return jdf_t(params, z * math.sqrt(n), t) / math.sqrt(n)


def weak_convergence_error(n: int, a: float, z: float, t: float) -> float:
    return abs(weak_finite(n, a, z, t) - weak_jdf(WeakPoint(a, z, t)))
