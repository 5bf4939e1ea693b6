"""Scalar special functions used by the analytic evaluators.

Everything that can leave double-precision range (Hermite values at large
argument, factorials, upper incomplete gamma) is returned as a
:class:`SignedLogValue`.  Hermite polynomials are the monic (probabilists')
family, ``He_{n+1}(x) = x He_n(x) - n He_{n-1}(x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ._backend import kernels as _k

__all__ = [
    "SignedLogValue",
    "HermiteSequence",
    "hermite_sequence",
    "phi_sequence",
    "upper_incomplete_gamma",
    "theta_step",
    "gaussian_tail",
]

_LN2 = math.log(2.0)
_NEG_INF = float("-inf")


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as ``sign * exp(log_abs)``.

    Exact zero is ``sign == 0`` with ``log_abs == -inf``.
    """

    log_abs: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if (self.sign == 0) != (self.log_abs == _NEG_INF):
            raise ValueError("sign == 0 must coincide with log_abs == -inf")
        if math.isnan(self.log_abs) or self.log_abs == math.inf:
            raise ValueError(f"log_abs must be finite or -inf, got {self.log_abs}")

    @classmethod
    def zero(cls) -> "SignedLogValue":
        return cls(_NEG_INF, 0)

    @classmethod
    def from_float(cls, x: float) -> "SignedLogValue":
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r}")
        if x == 0.0:
            return cls.zero()
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    @classmethod
    def from_mantissa(cls, mant: float, exp2: int) -> "SignedLogValue":
        """Build ``mant * 2**exp2`` without forming it in floating point."""
        if mant == 0.0:
            return cls.zero()
        return cls(math.log(abs(mant)) + exp2 * _LN2, 1 if mant > 0 else -1)

    @classmethod
    def exp(cls, x: float) -> "SignedLogValue":
        return cls(float(x), 1)

    def is_zero(self) -> bool:
        return self.sign == 0

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.log_abs > 709.78:
            raise OverflowError(f"exp({self.log_abs}) overflows a double")
        return self.sign * math.exp(self.log_abs)

    def to_float(self) -> float:
        return float(self)

    def __neg__(self) -> "SignedLogValue":
        return SignedLogValue(self.log_abs, -self.sign)

    def __abs__(self) -> "SignedLogValue":
        return SignedLogValue(self.log_abs, abs(self.sign))

    def __mul__(self, other: Union["SignedLogValue", float, int]) -> "SignedLogValue":
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_float(float(other))
        if self.sign == 0 or other.sign == 0:
            return SignedLogValue.zero()
        return SignedLogValue(self.log_abs + other.log_abs, self.sign * other.sign)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["SignedLogValue", float, int]) -> "SignedLogValue":
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_float(float(other))
        if other.sign == 0:
            raise ZeroDivisionError("division by an exact zero SignedLogValue")
        if self.sign == 0:
            return SignedLogValue.zero()
        return SignedLogValue(self.log_abs - other.log_abs, self.sign * other.sign)

    def __add__(self, other: Union["SignedLogValue", float, int]) -> "SignedLogValue":
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_float(float(other))
        if other.sign == 0:
            return self
        if self.sign == 0:
            return other
        big, small = (self, other) if self.log_abs >= other.log_abs else (other, self)
        ratio = math.exp(small.log_abs - big.log_abs)
        if big.sign == small.sign:
            return SignedLogValue(big.log_abs + math.log1p(ratio), big.sign)
        if ratio == 1.0:
            return SignedLogValue.zero()
        return SignedLogValue(big.log_abs + math.log1p(-ratio), big.sign)

    __radd__ = __add__

    def __sub__(self, other: Union["SignedLogValue", float, int]) -> "SignedLogValue":
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_float(float(other))
        return self + (-other)

    def __rsub__(self, other: Union[float, int]) -> "SignedLogValue":
        return SignedLogValue.from_float(float(other)) - self

    def isclose(self, other: "SignedLogValue", rel: float) -> bool:
        """Relative comparison carried out in log space."""
        if self.sign != other.sign:
            return False
        if self.sign == 0:
            return True
        return abs(math.expm1(self.log_abs - other.log_abs)) <= rel


def log_sum(values: Sequence[SignedLogValue]) -> SignedLogValue:
    """Sum of signed log values, shifted by the largest magnitude first."""
    nz = [v for v in values if v.sign != 0]
    if not nz:
        return SignedLogValue.zero()
    top = max(v.log_abs for v in nz)
    s = math.fsum(v.sign * math.exp(v.log_abs - top) for v in nz)
    if s == 0.0:
        return SignedLogValue.zero()
    return SignedLogValue(top + math.log(abs(s)), 1 if s > 0 else -1)


@dataclass(frozen=True)
class HermiteSequence:
    argument: float
    values: List[SignedLogValue]
    # exact power-of-two representation, when the sequence came from the kernel
    scaled: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def as_floats(self) -> np.ndarray:
        """Plain doubles; raises ``OverflowError`` if any entry is out of range."""
        if self.scaled is None:
            return np.array([float(v) for v in self.values])
        mant, exp2 = self.scaled
        with np.errstate(over="ignore"):
            out = np.ldexp(mant, np.clip(exp2, -4000, 4000).astype(np.int32))
        if not np.all(np.isfinite(out)):
            raise OverflowError("Hermite value exceeds double range")
        return out


def _check_finite(name, x):
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x!r}")


def hermite_sequence(x: float, n_max: int) -> HermiteSequence:
    """Monic Hermite values ``He_0(x) .. He_{n_max}(x)``.

    The forward recurrence runs on power-of-two rescaled pairs, so the values
    agree bit-for-bit with the plain recurrence wherever that one does not
    overflow.

    Examples
    --------
    >>> hermite_sequence(2.0, 2).as_floats()
    array([1., 2., 3.])
    """
    _check_finite("x", x)
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    mant, exp2 = _k.hermite_scaled(float(x), int(n_max))
    values = [SignedLogValue.from_mantissa(m, int(e)) for m, e in zip(mant, exp2)]
    return HermiteSequence(float(x), values, (mant, exp2))


def phi_sequence(z: float, tau: float, n_max: int) -> np.ndarray:
    """Rescaled Hermite values ``tau**(k/2) He_k(z/sqrt(tau)) / sqrt(k!)``.

    Computed from ``phi_{k+1} = z phi_k / sqrt(k+1) - tau sqrt(k/(k+1)) phi_{k-1}``,
    which stays finite where the raw ``tau**k He_k**2 / k!`` products would not.
    Entries beyond double range come back as ``inf``; use
    :func:`phi_sequence_scaled` for those.
    """
    mant, exp2 = phi_sequence_scaled(z, tau, n_max)
    with np.errstate(over="ignore"):
        return np.ldexp(mant, exp2.astype(np.int32))


def phi_sequence_scaled(z: float, tau: float, n_max: int):
    """Mantissas and base-2 exponents of :func:`phi_sequence`."""
    _check_finite("z", z)
    if not tau > 0:
        raise ValueError(f"tau must be > 0 for the rescaled recurrence, got {tau}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    return _k.phi_scaled(float(z), float(tau), int(n_max))


def _log_gamma_series_lower(a: float, x: float) -> float:
    # regularized lower gamma P(a, x) by its power series; converges fast for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10_000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    else:
        raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")
    return math.log(total) - x + a * math.log(x) - math.lgamma(a)


def _log_gamma_cf_upper(a: float, x: float) -> float:
    # regularized upper gamma Q(a, x) by modified Lentz continued fraction; x >= a + 1
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")
    return math.log(h) - x + a * math.log(x) - math.lgamma(a)


def log_regularized_upper_gamma(a: float, x: float) -> float:
    """``log Q(a, x)`` with ``Q = Gamma(a, x) / Gamma(a)``."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        p = math.exp(_log_gamma_series_lower(a, x))
        return math.log1p(-p)
    return _log_gamma_cf_upper(a, x)


def upper_incomplete_gamma(n: int, x: float) -> SignedLogValue:
    """``Gamma(n+1, x) = int_x^inf u**n exp(-u) du`` for integer ``n >= 0``.

    Uses the series for ``x < n + 1`` and the continued fraction otherwise.

    >>> float(upper_incomplete_gamma(5, 0.0))
    120.0
    """
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    _check_finite("x", x)
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    a = float(n) + 1.0
    if x == 0.0:
        return SignedLogValue(math.lgamma(a), 1)
    return SignedLogValue(math.lgamma(a) + log_regularized_upper_gamma(a, x), 1)


def theta_step(n: int, x: float) -> float:
    """Regularized ratio ``Gamma(n+1, n x) / Gamma(n+1)``.

    Equal to 1 for ``x <= 0`` and tends to the indicator of ``x < 1`` as
    ``n`` grows.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if math.isnan(x):
        raise ValueError("x is NaN")
    if x <= 0:
        return 1.0
    if x == math.inf:
        return 0.0
    return math.exp(log_regularized_upper_gamma(n + 1.0, n * x))


_SQRT_PI_2 = math.sqrt(math.pi / 2.0)


def gaussian_tail(x: float) -> float:
    """``int_x^inf exp(-u**2/2) du``."""
    if math.isnan(x):
        raise ValueError("x is NaN")
    return _SQRT_PI_2 * math.erfc(x / math.sqrt(2.0))
