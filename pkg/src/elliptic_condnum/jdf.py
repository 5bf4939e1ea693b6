"""Exact finite-N joint density of a real eigenvalue and its overlap.

The density counts eigenvalues: integrated over both variables it gives the
mean number of real eigenvalues, not 1.  Variables:

* ``z`` -- real eigenvalue location (unscaled);
* ``t`` -- shifted overlap ``O_ii - 1 = kappa^2 - 1``;
* ``q`` -- rescaled overlap ``t / (1 - tau)``, the natural variable of the
  closed form (the overlap equals ``(1 - tau) q``; this is what Monte Carlo
  measures and what all three large-N limits require).

The ``q``-form density multiplies a prefactor by a bracket of five rational
terms in ``q`` whose coefficients are the kernels ``P, R, T`` at orders
``N-2`` and ``N-3``.  The coefficients depend on ``z`` only, so
:class:`JdfSlice` computes them once and then evaluates any number of ``q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .prt import EnsembleParams, prt_reduced
from .specfun import SignedLogValue, phi_sequence_scaled

__all__ = [
    "NumericalError",
    "JdfPoint",
    "JdfSlice",
    "jdf_q",
    "jdf_t",
    "marginal_density",
    "fn_density",
    "mean_real_count",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LN2 = math.log(2.0)


class NumericalError(ArithmeticError):
    """Quadrature failure or overflow; carries the best estimate and its error bound."""

    def __init__(self, message, estimate=math.nan, error=math.nan):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class JdfPoint:
    """One evaluation of the joint density, with ``t = (1 - tau) q`` and ``density`` per unit ``t``."""

    z: float
    q: float
    t: float
    density: float

    @classmethod
    def evaluate(cls, params: EnsembleParams, z: float, *, q: float = None, t: float = None) -> "JdfPoint":
        """Evaluate at ``q`` or ``t`` (exactly one)."""
        if (q is None) == (t is None):
            raise ValueError("give exactly one of q and t")
        s = 1.0 - params.tau
        if q is None:
            return cls(float(z), t / s, float(t), jdf_t(params, z, t))
        return cls(float(z), float(q), s * q, jdf_q(params, z, q) / s)


def _check_params(params: EnsembleParams):
    if params.n < 2:
        raise ValueError(f"the joint density needs n >= 2, got {params.n}")
    if params.tau >= 1.0:
        raise ValueError("tau = 1 is unsupported: every overlap vanishes for symmetric matrices")


class JdfSlice:
    """Joint density at a fixed ``z`` as a function of ``q`` (vectorized).

    Attributes ``x1, pz2, k3, k4, k5`` are the bracket coefficients scaled by
    ``exp(-log_scale)``; :meth:`terms` returns the five bracket terms
    separately, which is where cancellations near the spectral edge show up.
    """

    def __init__(self, params: EnsembleParams, z: float):
        _check_params(params)
        if not math.isfinite(z):
            raise ValueError(f"z must be finite, got {z}")
        self.params = params
        self.z = float(z)
        n, tau = params.n, params.tau
        red = prt_reduced(tau, self.z, n - 2)
        zero = SignedLogValue.zero()
        p2, r2, _ = red[n - 2]
        p3, r3, t3 = red[n - 3] if n >= 3 else (zero, zero, zero)
        logs = [v.log_abs for v in (p2, r2, p3, r3, t3) if not v.is_zero()]
        top = max(logs) if logs else 0.0
        self.log_scale = top

        def f(v):
            return 0.0 if v.is_zero() else v.sign * math.exp(v.log_abs - top)

        P2, R2, P3, R3, T3 = f(p2), f(r2), f(p3), f(r3), f(t3)
        z = self.z
        self.x1 = (1.0 + tau - 2.0 * z * z) * P2 + 2.0 * z * (R2 + tau * R3)
        self.pz2 = P2 * z * z
        self.k3 = tau * tau * (1.0 + tau) ** 2 * n * P3
        self.k4 = (1.0 + tau) * (1.0 - tau * tau) * ((n - 2) * P3 - T3)
        self.k5 = 2.0 * tau * (1.0 + tau) * z * R3
        self._log_const = top - math.log(2.0 * (1.0 + tau)) - _LOG_SQRT_2PI

    def terms(self, q):
        """The five bracket terms at ``q`` (scaled by ``exp(-log_scale)``)."""
        q = np.asarray(q, dtype=float)
        tau = self.params.tau
        a = 1.0 / (1.0 + q)
        b = 1.0 / (1.0 + tau + q)
        return np.stack([self.x1 * a, self.pz2 * a * a, self.k3 * b * b, self.k4 * b, -self.k5 * a * b])

    def log_prefactor(self, q):
        q = np.asarray(q, dtype=float)
        n, tau = self.params.n, self.params.tau
        z = self.z
        out = self._log_const - z * z / (2.0 * (1.0 + tau)) * (1.0 + q / (1.0 + q)) - 0.5 * np.log(q * (1.0 + q))
        if n != 2:
            out = out + (0.5 * n - 1.0) * np.log(q / (q + 1.0 + tau))
        return out

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        if np.any(q <= 0):
            raise ValueError("q must be > 0")
        bracket = self.terms(q).sum(axis=0)
        with np.errstate(over="raise"):
            try:
                val = bracket * np.exp(self.log_prefactor(q))
            except FloatingPointError as exc:
                raise NumericalError(f"joint density overflows at z={self.z}") from exc
        return np.maximum(val, 0.0) if val.ndim else float(max(val, 0.0))

    def u_integrand(self, u):
        """Integrand of the ``q``-marginal after ``u^2 = q/(1+q)``; smooth on [0, 1]."""
        u = np.asarray(u, dtype=float)
        n, tau = self.params.n, self.params.tau
        z = self.z
        c = 1.0 - u * u
        w = 1.0 + tau * c
        bracket = self.x1 + self.pz2 * c + self.k3 * c / (w * w) + self.k4 / w - self.k5 * c / w
        logp = self._log_const + _LN2 - z * z * (1.0 + u * u) / (2.0 * (1.0 + tau))
        with np.errstate(divide="ignore"):
            if n != 2:
                logp = logp + (0.5 * n - 1.0) * np.log(u * u / (1.0 + tau - tau * u * u))
        return bracket * np.exp(logp)


def jdf_q(params: EnsembleParams, z: float, q: float) -> float:
    """Joint density of ``(z, q)`` with ``q = t / (1 - tau)``.

    >>> round(jdf_q(EnsembleParams(2, 0.5), 0.0, 1.0), 6)
    0.070524
    """
    if not q > 0:
        raise ValueError(f"q must be > 0, got {q}")
    return float(JdfSlice(params, z)(q))


def jdf_t(params: EnsembleParams, z: float, t: float) -> float:
    """Joint density of ``(z, t)``, i.e. ``jdf_q(z, t / (1 - tau)) / (1 - tau)``."""
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t}")
    _check_params(params)
    s = 1.0 - params.tau
    return jdf_q(params, z, t / s) / s


def marginal_density(params: EnsembleParams, z: float, epsabs: float = 1e-10, epsrel: float = 1e-8) -> float:
    """Density of real eigenvalues at ``z``: the joint density integrated over ``q``."""
    sl = JdfSlice(params, z)
    val, err, info = integrate.quad(lambda u: float(sl.u_integrand(u)), 0.0, 1.0,
                                    epsabs=epsabs, epsrel=epsrel, limit=200, full_output=True)[:3]
    if err > max(epsabs, epsrel * abs(val)):
        raise NumericalError(f"marginal quadrature did not converge at z={z}", val, err)
    return max(val, 0.0)


def _phi_log(z, tau, k):
    # (sign, log|phi_k(z)|)
    mant, exp2 = phi_sequence_scaled(z, tau, k)
    m = mant[k]
    if m == 0.0:
        return 0, -math.inf
    return (1 if m > 0 else -1), math.log(abs(m)) + int(exp2[k]) * _LN2


def fn_density(params: EnsembleParams, z: float) -> float:
    """Mean density of real eigenvalues for even ``n`` (closed form plus one quadrature)."""
    n, tau = params.n, params.tau
    if n % 2:
        raise NotImplementedError("unsupported: odd N (closed-form real density is only available for even N)")
    if not (0.0 < tau < 1.0):
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    z = float(z)
    mant, exp2 = phi_sequence_scaled(z, tau, n - 1)
    # rho1: e^{-z^2/(1+tau)} sum_{k <= n-2} phi_k^2 / sqrt(2 pi)
    logs = [2.0 * (math.log(abs(mant[k])) + int(exp2[k]) * _LN2) for k in range(n - 1) if mant[k] != 0.0]
    top = max(logs)
    s = math.fsum(math.exp(v - top) for v in logs)
    rho1 = math.exp(top + math.log(s) - z * z / (1.0 + tau) - _LOG_SQRT_2PI)
    if z == 0.0:
        return rho1
    g = 2.0 * (1.0 + tau)

    def integrand(u):
        sg, lg = _phi_log(u, tau, n - 2)
        return 0.0 if sg == 0 else sg * math.exp(lg - u * u / g)

    integral, err = integrate.quad(integrand, 0.0, z, epsabs=1e-13, epsrel=1e-13, limit=400)
    if err > 1e-10:
        raise NumericalError(f"real-density quadrature did not converge at z={z}", integral, err)
    sg, lg = _phi_log(z, tau, n - 1)
    rho2 = sg * math.sqrt(n - 1.0) / (1.0 + tau) * math.exp(lg - z * z / g - _LOG_SQRT_2PI) * integral
    return rho1 + rho2


def mean_real_count(params: EnsembleParams, density=None, epsrel: float = 1e-10) -> float:
    """Integral of a real-eigenvalue density over the real line.

    Defaults to :func:`fn_density` for even ``n`` and :func:`marginal_density`
    otherwise.
    """
    if density is None:
        density = fn_density if params.n % 2 == 0 else marginal_density
    half = (1.0 + params.tau) * math.sqrt(params.n) + 10.0 * math.sqrt(1.0 + params.tau)
    val, _ = integrate.quad(lambda z: density(params, z), 0.0, half, epsabs=1e-12, epsrel=epsrel, limit=400)
    return 2.0 * val
