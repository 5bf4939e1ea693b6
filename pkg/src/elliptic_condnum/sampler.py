"""Sampling from the real elliptic Gaussian ensemble and measuring overlaps.

Matrices are ``X = sqrt((1+tau)/2) S + sqrt((1-tau)/2) A`` with
``S = (G + G^T)/sqrt(2)`` and ``A = (G' - G'^T)/sqrt(2)``, which gives unit
off-diagonal variance, ``E[X_ij X_ji] = tau`` and diagonal variance ``1 + tau``.

Each matrix is keyed by ``(seed, index)``: the Philox key is the seed and the
index selects a disjoint counter block, so any partition of the index range
over workers reproduces the same matrices.

Real eigenvalues are read off the 1x1 diagonal blocks of the real Schur form,
never by thresholding imaginary parts.  The shifted overlap ``t = kappa^2 - 1``
is measured three ways:

``method="direct"`` (default)
    left and right eigenvectors of the Schur factor by quasi-triangular
    substitution (compiled kernel), ``t = |x|^2 + |y|^2 + |x|^2 |y|^2``;
``method="reorder"``
    the eigenvalue is moved to the leading position with LAPACK ``trexc``,
    exposing ``(lambda, w^T; 0, X')``, and ``t = b^T b`` with
    ``(lambda - X'^T) b = w``;
:func:`overlaps_via_eigvecs`
    independent cross-check from the eigenvector matrix and its inverse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from ._backend import kernels as _k

__all__ = [
    "MatrixSample",
    "RealEigObservation",
    "MeasureStats",
    "rng_for",
    "sample_matrix",
    "real_schur",
    "real_block_positions",
    "real_eig_overlaps",
    "measure_arrays",
    "overlaps_via_eigvecs",
    "count_real_eigenvalues",
]

# pivot tolerance for the substitutions, relative to ||T||_F
DEFAULT_TOL = 64 * np.finfo(float).eps
DEFAULT_QUALITY_GATE = 1e-6


@dataclass
class MatrixSample:
    n: int
    tau: float
    entries: np.ndarray
    seed: int
    index: int


@dataclass(frozen=True)
class RealEigObservation:
    lam: float
    t: float
    residual: float
    sample_ref: Tuple[int, int]

    @property
    def kappa(self) -> float:
        return math.sqrt(1.0 + self.t)


@dataclass
class MeasureStats:
    """Per-call diagnostics: discarded observations and why."""

    discarded: int = 0
    reasons: List[str] = field(default_factory=list)


def rng_for(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for matrix ``index`` under ``seed``."""
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    bg = np.random.Philox(key=int(seed) & ((1 << 128) - 1), counter=[0, 0, int(index), 0])
    return np.random.Generator(bg)


def sample_matrix(n: int, tau: float, seed: int = 0, index: int = 0,
                  rng: Optional[np.random.Generator] = None) -> MatrixSample:
    """Draw one ``n x n`` matrix; reproducible from ``(seed, index)`` unless ``rng`` is given."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not (0.0 <= tau <= 1.0):
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    if rng is None:
        rng = rng_for(seed, index)
    g = rng.standard_normal((2, n, n))
    s = (g[0] + g[0].T) / math.sqrt(2.0)
    a = (g[1] - g[1].T) / math.sqrt(2.0)
    x = math.sqrt((1.0 + tau) / 2.0) * s + math.sqrt((1.0 - tau) / 2.0) * a
    return MatrixSample(n, float(tau), x, int(seed), int(index))


def real_schur(x: np.ndarray) -> np.ndarray:
    t, _ = linalg.schur(x, output="real", check_finite=False)
    return t


def real_block_positions(t: np.ndarray) -> np.ndarray:
    """Indices of the 1x1 diagonal blocks of a quasi-upper-triangular matrix."""
    n = t.shape[0]
    if n == 1:
        return np.array([0], dtype=np.int64)
    sub = np.diagonal(t, -1) != 0.0
    below = np.append(sub, False)   # block continues downward
    above = np.insert(sub, 0, False)  # block started above
    return np.flatnonzero(~(below | above)).astype(np.int64)


def count_real_eigenvalues(x: np.ndarray) -> int:
    return int(len(real_block_positions(real_schur(x))))


def _reorder_overlaps(t: np.ndarray, positions: np.ndarray, tol: float):
    n = t.shape[0]
    lam = np.empty(len(positions))
    tt = np.empty(len(positions))
    res = np.empty(len(positions))
    ok = np.ones(len(positions), dtype=np.int8)
    q = np.zeros((n, n), order="F")  # ignored with wantq=0, but LAPACK checks its shape
    zero = np.zeros(1, dtype=np.int64)
    for j, i in enumerate(positions):
        if i == 0:
            tr = t
        else:
            tr, _, info = lapack.dtrexc(t, q, int(i) + 1, 1, wantq=0)
            if info != 0:
                ok[j] = 0
                lam[j], tt[j], res[j] = t[i, i], math.inf, math.inf
                continue
        lam[j] = tr[0, 0]
        a, r, k = _k.schur_overlaps(tr, zero, tol)
        tt[j], res[j], ok[j] = a[0], r[0], k[0]
    return lam, tt, res, ok


def measure_arrays(x: np.ndarray, tol: float = DEFAULT_TOL, method: str = "direct",
                   quality_gate: float = DEFAULT_QUALITY_GATE):
    """Array form of :func:`real_eig_overlaps` for a raw matrix.

    Returns ``(lam, t, residual, keep)``; ``keep`` is False where the solve
    broke down or the residual failed the quality gate.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("matrix has non-finite entries")
    t = real_schur(x)
    positions = real_block_positions(t)
    abs_tol = tol * max(np.linalg.norm(t), np.finfo(float).tiny)
    if method == "direct":
        tt, res, ok = _k.schur_overlaps(t, positions, abs_tol)
        lam = np.diagonal(t)[positions]
    elif method == "reorder":
        lam, tt, res, ok = _reorder_overlaps(np.asfortranarray(t), positions, abs_tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    tt = np.asarray(tt)
    res = np.asarray(res)
    with np.errstate(invalid="ignore"):
        keep = (np.asarray(ok) != 0) & (res <= quality_gate) & (tt >= 0.0)
    return np.asarray(lam), tt, res, keep


def real_eig_overlaps(m: MatrixSample, tol: float = DEFAULT_TOL, method: str = "direct",
                      quality_gate: float = DEFAULT_QUALITY_GATE,
                      stats: Optional[MeasureStats] = None) -> List[RealEigObservation]:
    """Real eigenvalues of ``m`` with their shifted overlaps ``t = kappa^2 - 1``.

    ``tol`` is the breakdown threshold for solve pivots relative to the
    Frobenius norm of the matrix.  Observations whose solve breaks down or
    whose relative residual exceeds ``quality_gate`` are dropped and counted
    in ``stats``.
    """
    lam, tt, res, keep = measure_arrays(m.entries, tol, method, quality_gate)
    out = []
    for j in range(len(lam)):
        if not keep[j]:
            if stats is not None:
                stats.discarded += 1
                stats.reasons.append(f"index {m.index}: lambda={lam[j]:.6g} residual={res[j]:.3g}")
            continue
        out.append(RealEigObservation(float(lam[j]), float(tt[j]), float(res[j]), (m.seed, m.index)))
    return out


def overlaps_via_eigvecs(m: MatrixSample, max_cond: float = 1e12,
                         eig_residual: float = 1e-10) -> List[RealEigObservation]:
    """Overlaps from the eigenvector matrix ``V`` and ``V^{-1}``.

    ``O_ii = |row_i(V^{-1})|^2 |col_i(V)|^2``.  Raises ``ArithmeticError`` when
    ``V`` is too ill-conditioned or an eigenpair residual exceeds
    ``eig_residual * ||X||``.
    """
    x = np.asarray(m.entries, dtype=float)
    w, v = linalg.eig(x, check_finite=False)
    xn = np.linalg.norm(x, 2)
    if np.max(np.linalg.norm(x @ v - v * w, axis=0)) > eig_residual * xn:
        raise ArithmeticError(f"eigenpair residual above gate for sample {m.index}")
    if np.linalg.cond(v) > max_cond:
        raise ArithmeticError(f"eigenvector matrix too ill-conditioned for sample {m.index}")
    vinv = np.linalg.inv(v)
    out = []
    for i in np.flatnonzero(w.imag == 0.0):
        o = np.vdot(vinv[i], vinv[i]).real * np.vdot(v[:, i], v[:, i]).real
        out.append(RealEigObservation(float(w[i].real), float(o - 1.0), 0.0, (m.seed, m.index)))
    out.sort(key=lambda ob: ob.lam)
    return out
