"""The Hermite cross-product kernels ``P_m``, ``R_m`` and ``T_m``.

``P_m(z) = m! sum_k tau^k/k! [(k+1) He_k^2 - k He_{k-1} He_{k+1}]`` with the
Hermite argument ``z / sqrt(tau)``; ``R_m`` and ``T_m`` are the companion sums
entering the finite-N joint density.  ``P_m`` is the mean squared
characteristic polynomial of an ``m x m`` elliptic matrix, hence positive.

Two evaluation routes are provided and cross-checked in the tests:

* :func:`prt_eval` sums the rewritten summands in the ``phi_k`` basis
  (compiled kernel), carrying the ``m!`` separately.
* :func:`prt_recurrence_path` builds the unreduced values bottom-up from raw
  Hermite values in log space, ``P_m = m P_{m-1} + A_m`` and friends.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Tuple

from ._backend import kernels as _k
from .specfun import SignedLogValue, hermite_sequence, upper_incomplete_gamma

__all__ = [
    "EnsembleParams",
    "PrtBundle",
    "prt_eval",
    "prt_reduced",
    "prt_recurrence_path",
    "identity_terms",
    "identity_residual",
]

Triple = Tuple[SignedLogValue, SignedLogValue, SignedLogValue]


@dataclass(frozen=True)
class EnsembleParams:
    """Matrix size ``n`` and asymmetry ``tau`` (0 = real Ginibre, 1 = GOE)."""

    n: int
    tau: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not (0.0 <= self.tau <= 1.0):
            raise ValueError(f"tau must lie in [0, 1], got {self.tau}")

    @classmethod
    def weak(cls, n: int, a: float) -> "EnsembleParams":
        """Weak non-Hermiticity point ``tau = 1 - a^2 / (2n)``."""
        if a <= 0:
            raise ValueError(f"a must be positive, got {a}")
        return cls(n, 1.0 - a * a / (2.0 * n))


@dataclass(frozen=True)
class PrtBundle:
    z: float
    tau: float
    orders: Dict[int, Triple] = field(default_factory=dict)

    def P(self, m: int) -> SignedLogValue:
        return self.orders[m][0]

    def R(self, m: int) -> SignedLogValue:
        return self.orders[m][1]

    def T(self, m: int) -> SignedLogValue:
        return self.orders[m][2]


_ZERO3 = (SignedLogValue.zero(), SignedLogValue.zero(), SignedLogValue.zero())


def _check_tau(tau):
    if tau >= 1.0:
        raise ValueError("tau = 1 is not supported by the kernel evaluators (the matrix is symmetric)")


def prt_reduced(tau: float, z: float, m_max: int):
    """Reduced kernels ``(P_m/m!, R_m/m!, T_m/m!)`` for ``m = 0..m_max``.

    Returns a list indexed by ``m`` of :class:`SignedLogValue` triples.
    ``tau == 0`` uses the closed forms ``P_m = e^{z^2} Gamma(m+1, z^2)``,
    ``R_m = z P_m`` and ``T_m = m z^2 P_{m-1}``.
    """
    _check_tau(tau)
    if m_max < 0:
        return []
    if tau == 0.0:
        zz = z * z
        zs = SignedLogValue.from_float(z)
        zzs = SignedLogValue.from_float(zz)
        p = [upper_incomplete_gamma(m, zz) * SignedLogValue.exp(zz - math.lgamma(m + 1.0)) for m in range(m_max + 1)]
        out = []
        for m in range(m_max + 1):
            t = zzs * p[m - 1] if m > 0 else SignedLogValue.zero()
            out.append((p[m], zs * p[m], t))
        return out
    pm, pe, rm, re, tm, te = _k.prt_reduced(float(z), float(tau), int(m_max))
    f = SignedLogValue.from_mantissa
    return [(f(pm[m], int(pe[m])), f(rm[m], int(re[m])), f(tm[m], int(te[m]))) for m in range(m_max + 1)]


def prt_eval(params: EnsembleParams, z: float, orders: Iterable[int]) -> PrtBundle:
    """``P_m, R_m, T_m`` at ``z`` for each requested order (``m = -1`` gives zeros).

    Examples
    --------
    >>> b = prt_eval(EnsembleParams(4, 0.4), 0.0, [2])
    >>> round(float(b.P(2)), 12)
    3.28
    """
    orders = sorted(set(int(m) for m in orders))
    if orders and orders[0] < -1:
        raise ValueError(f"kernel order must be >= -1, got {orders[0]}")
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    _check_tau(params.tau)
    m_max = orders[-1] if orders else -1
    red = prt_reduced(params.tau, z, m_max)
    out = {}
    for m in orders:
        if m < 0:
            out[m] = _ZERO3
            continue
        fact = SignedLogValue(math.lgamma(m + 1.0), 1)
        out[m] = tuple(v * fact for v in red[m])
    return PrtBundle(float(z), params.tau, out)


def prt_recurrence_path(params: EnsembleParams, z: float, m_max: int) -> PrtBundle:
    """Bottom-up evaluation from raw Hermite values at ``z / sqrt(tau)``.

    ``P_m = m P_{m-1} + A_m``, ``R_m = m R_{m-1} + B_m``, ``T_m = m T_{m-1} + m A_m`` with
    ``A_m = tau^m [(m+1) He_m^2 - m He_{m+1} He_{m-1}]`` and
    ``B_m = tau^(m+1/2)/2 [(m+2) He_{m+1} He_m - m He_{m+2} He_{m-1}]``.
    """
    tau = params.tau
    if not tau > 0:
        raise ValueError("the recurrence path needs tau > 0")
    _check_tau(tau)
    if m_max < 0:
        raise ValueError(f"m_max must be >= 0, got {m_max}")
    he = hermite_sequence(z / math.sqrt(tau), m_max + 2)
    zero = SignedLogValue.zero()

    def H(n):
        return he[n] if n >= 0 else zero

    log_tau = math.log(tau)
    P = R = T = zero
    out = {}
    for m in range(m_max + 1):
        tm = SignedLogValue(m * log_tau, 1)
        A = tm * ((m + 1) * H(m) * H(m) - m * H(m + 1) * H(m - 1))
        B = SignedLogValue((m + 0.5) * log_tau, 1) * 0.5 * ((m + 2) * H(m + 1) * H(m) - m * H(m + 2) * H(m - 1))
        P = m * P + A
        R = m * R + B
        T = m * T + m * A
        out[m] = (P, R, T)
    return PrtBundle(float(z), tau, out)


def identity_terms(params: EnsembleParams, z: float):
    """The five summands of the kernel identity, which add up to zero:

    ``P_N - P_{N-1}(1+tau-z^2) - (N-1)(2 tau^2 + N - 1) P_{N-2} - 2 z R_{N-1}
    + (1-tau^2)(N-1) T_{N-2}``.
    """
    n, tau = params.n, params.tau
    if n < 3:
        raise ValueError(f"the identity needs n >= 3, got {n}")
    b = prt_eval(params, z, [n, n - 1, n - 2])
    return [
        b.P(n),
        -(b.P(n - 1) * (1.0 + tau - z * z)),
        -(b.P(n - 2) * ((n - 1) * (2.0 * tau * tau + n - 1))),
        -(b.R(n - 1) * (2.0 * z)),
        b.T(n - 2) * ((1.0 - tau * tau) * (n - 1)),
    ]


def identity_residual(params: EnsembleParams, z: float) -> float:
    """Sum of :func:`identity_terms` relative to the largest summand."""
    terms = [t for t in identity_terms(params, z) if not t.is_zero()]
    top = max(t.log_abs for t in terms)
    return abs(math.fsum(t.sign * math.exp(t.log_abs - top) for t in terms))
