"""Monte Carlo experiments: sampling, binning, persistence and model comparison.

An experiment draws ``num_matrices`` matrices keyed by ``(seed, index)``,
measures every real eigenvalue with its overlap, maps ``(z, t)`` to the
configured coordinates and bins them.  Histograms hold integer counts only,
so merging partial histograms from any partition of the index range gives
bit-identical results.

Scalings (``s = sqrt(1 - tau^2)``):

========  ==========================================  =====================
name      first coordinate                            second coordinate
========  ==========================================  =====================
raw       ``z``                                       ``t``
bulk      ``z / sqrt(N)``                             ``t / N``
edge      ``(z - sqrt(N)(1+tau)) / s``                ``q / (sqrt(N) s)``
weak      ``z / sqrt(N)``                             ``t``
========  ==========================================  =====================

with ``q = t / (1 - tau)``.  The edge coordinates follow the right edge only.
"""
from __future__ import annotations

import concurrent.futures as cf
import csv
import functools
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, stats

from .jdf import JdfSlice, fn_density, marginal_density
from .limits import BulkPoint, EdgePoint, WeakPoint, bulk_jdf, edge_jdf, weak_density, weak_jdf
from .prt import EnsembleParams
from .sampler import count_real_eigenvalues, measure_arrays, sample_matrix

__all__ = [
    "FORMAT_VERSION",
    "WORKERS_ENV",
    "ExperimentConfig",
    "JointHistogram",
    "ExperimentError",
    "Model",
    "ComparisonReport",
    "run_experiment",
    "merge",
    "save_histogram",
    "load_histogram",
    "compare_to_model",
    "tail_slope",
    "finite_model",
    "marginal_model",
    "fn_model",
    "limit_model",
    "weak_conditional_model",
    "count_law",
    "default_workers",
]

FORMAT_VERSION = 1
WORKERS_ENV = "ELLIPTIC_CONDNUM_WORKERS"
SCALINGS = ("raw", "bulk", "edge", "weak")


class ExperimentError(RuntimeError):
    """A worker failed or a run was not reproducible; ``partial`` holds what finished."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def _edges(spec, name) -> np.ndarray:
    """Bin edges from a list or from ``{"linspace"|"geomspace": [a, b, n], "prepend": [...], "append": [...]}``."""
    if isinstance(spec, dict):
        kinds = [k for k in ("linspace", "geomspace") if k in spec]
        if len(kinds) != 1:
            raise ValueError(f"{name}: give exactly one of linspace/geomspace")
        a, b, n = spec[kinds[0]]
        core = list(getattr(np, kinds[0])(float(a), float(b), int(n)))
        spec = list(spec.get("prepend", [])) + core + list(spec.get("append", []))
    arr = np.array([float(v) for v in spec], dtype=float)
    if arr.ndim != 1 or len(arr) < 2:
        raise ValueError(f"{name} needs at least two edges")
    if np.any(np.isnan(arr)) or not np.all(np.diff(arr) > 0):
        raise ValueError(f"{name} must be strictly increasing")
    return arr


def _num(v):
    # JSON-safe float: infinities as strings
    v = float(v)
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """What to sample and how to bin it.

    Exactly one of ``tau`` and ``a`` is given; ``a`` selects the weak regime
    ``tau = 1 - a^2 / (2n)``.
    """

    n: int
    num_matrices: int
    seed: int
    z_bins: np.ndarray
    t_bins: np.ndarray
    scaling: str = "raw"
    tau: Optional[float] = None
    a: Optional[float] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if int(self.num_matrices) != self.num_matrices or self.num_matrices < 1:
            raise ValueError(f"num_matrices must be >= 1, got {self.num_matrices}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if (self.tau is None) == (self.a is None):
            raise ValueError("give exactly one of tau and a")
        if self.scaling not in SCALINGS:
            raise ValueError(f"scaling must be one of {SCALINGS}, got {self.scaling!r}")
        object.__setattr__(self, "z_bins", _edges(self.z_bins, "z_bins"))
        object.__setattr__(self, "t_bins", _edges(self.t_bins, "t_bins"))
        if self.t_bins[0] < 0:
            raise ValueError("t_bins must be nonnegative")
        EnsembleParams(self.n, self.tau_value)  # range check
        if self.scaling == "edge" and self.tau_value >= 1.0:
            raise ValueError("edge scaling needs tau < 1")

    def __eq__(self, other):
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(json.dumps(self.to_dict(), sort_keys=True))

    @property
    def tau_value(self) -> float:
        if self.tau is not None:
            return float(self.tau)
        return EnsembleParams.weak(self.n, float(self.a)).tau

    @property
    def params(self) -> EnsembleParams:
        return EnsembleParams(self.n, self.tau_value)

    def to_dict(self) -> dict:
        d = {"n": int(self.n), "num_matrices": int(self.num_matrices), "seed": int(self.seed),
             "scaling": self.scaling,
             "z_bins": [_num(v) for v in self.z_bins], "t_bins": [_num(v) for v in self.t_bins]}
        if self.tau is not None:
            d["tau"] = float(self.tau)
        else:
            d["a"] = float(self.a)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        keys = {"n", "num_matrices", "seed", "z_bins", "t_bins", "scaling", "tau", "a"}
        return cls(**{k: v for k, v in d.items() if k in keys})

    def transform(self, z: np.ndarray, t: np.ndarray):
        """Map raw ``(z, t)`` to the binning coordinates."""
        n, tau = self.n, self.tau_value
        rn = math.sqrt(n)
        if self.scaling == "raw":
            return z, t
        if self.scaling == "bulk":
            return z / rn, t / n
        if self.scaling == "weak":
            return z / rn, t
        s = math.sqrt(1.0 - tau * tau)
        return (z - rn * (1.0 + tau)) / s, t / ((1.0 - tau) * rn * s)


@dataclass
class JointHistogram:
    """Counts over ``z_bins x t_bins`` plus the bookkeeping needed to normalize.

    ``z_totals[i]`` counts every observation in z-bin ``i`` whatever its
    ``t``; ``z_out`` counts observations outside the z range.  Hence
    ``total_observations == z_totals.sum() + z_out`` and
    ``t_out == z_totals.sum() - counts.sum()``.
    """

    config: ExperimentConfig
    counts: np.ndarray
    z_totals: np.ndarray
    z_out: int = 0
    discards: int = 0
    total_matrices: int = 0
    total_observations: int = 0

    @classmethod
    def empty(cls, config: ExperimentConfig) -> "JointHistogram":
        nz, nt = len(config.z_bins) - 1, len(config.t_bins) - 1
        return cls(config, np.zeros((nz, nt), dtype=np.int64), np.zeros(nz, dtype=np.int64))

    @property
    def t_out(self) -> int:
        return int(self.z_totals.sum() - self.counts.sum())

    def check(self):
        """Raise if the accounting does not close."""
        if self.total_observations != int(self.z_totals.sum()) + self.z_out:
            raise ExperimentError("observation accounting does not close")
        if self.t_out < 0 or np.any(self.counts < 0):
            raise ExperimentError("negative counts")
        if np.any(self.counts.sum(axis=1) > self.z_totals):
            raise ExperimentError("2-D counts exceed z totals")

    def add(self, z: np.ndarray, t: np.ndarray):
        """Bin raw observations (coordinates are transformed here)."""
        x, y = self.config.transform(np.asarray(z, float), np.asarray(t, float))
        zb, tb = self.config.z_bins, self.config.t_bins
        i = np.searchsorted(zb, x, side="right") - 1
        j = np.searchsorted(tb, y, side="right") - 1
        zin = (i >= 0) & (i < len(zb) - 1)
        tin = zin & (j >= 0) & (j < len(tb) - 1)
        self.total_observations += len(x)
        self.z_out += int(len(x) - zin.sum())
        np.add.at(self.z_totals, i[zin], 1)
        np.add.at(self.counts, (i[tin], j[tin]), 1)

    def digest(self) -> str:
        """SHA-256 of the config and all integer fields."""
        h = hashlib.sha256()
        h.update(json.dumps(self.config.to_dict(), sort_keys=True).encode())
        h.update(np.ascontiguousarray(self.counts, dtype="<i8").tobytes())
        h.update(np.ascontiguousarray(self.z_totals, dtype="<i8").tobytes())
        for v in (self.z_out, self.discards, self.total_matrices, self.total_observations):
            h.update(int(v).to_bytes(8, "little"))
        return h.hexdigest()

    def t_counts(self, z_lo: Optional[float] = None, z_hi: Optional[float] = None):
        """t-histogram summed over the z-bins lying inside ``[z_lo, z_hi]``, and the slice total."""
        rows = _slice_rows(self.config.z_bins, z_lo, z_hi)
        return self.counts[rows].sum(axis=0), int(self.z_totals[rows].sum())


def _slice_rows(edges, lo, hi):
    lo = edges[0] if lo is None else lo
    hi = edges[-1] if hi is None else hi
    tol = 1e-12 * max(1.0, float(np.max(np.abs(edges[np.isfinite(edges)]))))
    rows = np.flatnonzero((edges[:-1] >= lo - tol) & (edges[1:] <= hi + tol))
    if len(rows) == 0:
        raise ValueError(f"no z-bin lies inside [{lo}, {hi}]")
    return rows


def merge(h1: JointHistogram, h2: JointHistogram) -> JointHistogram:
    """Sum of two histograms over the same config (commutative and associative)."""
    if h1.config.to_dict() != h2.config.to_dict():
        raise ValueError("cannot merge histograms with different configs")
    return JointHistogram(h1.config, h1.counts + h2.counts, h1.z_totals + h2.z_totals,
                          h1.z_out + h2.z_out, h1.discards + h2.discards,
                          h1.total_matrices + h2.total_matrices,
                          h1.total_observations + h2.total_observations)


def _run_chunk(config: ExperimentConfig, start: int, stop: int) -> JointHistogram:
    h = JointHistogram.empty(config)
    n, tau, seed = config.n, config.tau_value, config.seed
    zs, ts = [], []
    for idx in range(start, stop):
        m = sample_matrix(n, tau, seed, idx)
        lam, t, _, keep = measure_arrays(m.entries)
        h.discards += int(len(keep) - keep.sum())
        zs.append(lam[keep])
        ts.append(t[keep])
    if zs:
        h.add(np.concatenate(zs), np.concatenate(ts))
    h.total_matrices = stop - start
    h.check()
    return h


def default_workers() -> int:
    """Worker count from the environment, else 1."""
    v = os.environ.get(WORKERS_ENV)
    if v is None:
        return 1
    w = int(v)
    if w < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1, got {v}")
    return w


def _chunks(total, pieces):
    step = max(1, -(-total // pieces))
    return [(s, min(s + step, total)) for s in range(0, total, step)]


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None,
                   verify: bool = False) -> JointHistogram:
    """Sample, measure and bin ``config.num_matrices`` matrices.

    Parameters
    ----------
    workers
        Process count; ``None`` reads :data:`WORKERS_ENV`.  The result does
        not depend on it.
    verify
        Run a second time in a single process and require an identical
        digest (self-test mode).

    Raises
    ------
    ExperimentError
        A worker failed; ``partial`` holds the merged finished chunks.
    """
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    chunks = _chunks(config.num_matrices, 4 * workers if workers > 1 else 1)
    acc = JointHistogram.empty(config)
    if workers == 1:
        for s, e in chunks:
            acc = merge(acc, _run_chunk(config, s, e))
    else:
        failures = []
        with cf.ProcessPoolExecutor(max_workers=workers) as ex:
            futs = {ex.submit(_run_chunk, config, s, e): (s, e) for s, e in chunks}
            for f in cf.as_completed(futs):
                try:
                    acc = merge(acc, f.result())
                except Exception as exc:  # collect, then abort with what finished
                    failures.append((futs[f], repr(exc)))
        if failures:
            raise ExperimentError(f"{len(failures)} chunk(s) failed, first: {failures[0]}", acc)
    if acc.total_matrices != config.num_matrices:
        raise ExperimentError("matrix count mismatch after merge", acc)
    acc.check()
    if verify:
        again = run_experiment(config, workers=1)
        if again.digest() != acc.digest():
            raise ExperimentError("nondeterminism: repeated run gave a different histogram", acc)
    return acc


def save_histogram(h: JointHistogram, path) -> Path:
    """Write ``<path>`` (JSON header) and ``<path>`` with suffix ``.csv`` (nonzero bins)."""
    path = Path(path)
    body = path.with_suffix(".csv")
    header = {
        "format": "elliptic-condnum-histogram",
        "version": FORMAT_VERSION,
        "config": h.config.to_dict(),
        "z_totals": [int(v) for v in h.z_totals],
        "z_out": int(h.z_out),
        "discards": int(h.discards),
        "total_matrices": int(h.total_matrices),
        "total_observations": int(h.total_observations),
        "body": body.name,
        "sha256": h.digest(),
    }
    path.write_text(json.dumps(header, indent=1) + "\n")
    with body.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_i", "bin_j", "count"])
        for i, j in zip(*np.nonzero(h.counts)):
            w.writerow([int(i), int(j), int(h.counts[i, j])])
    return path


def load_histogram(path) -> JointHistogram:
    path = Path(path)
    header = json.loads(path.read_text())
    if header.get("format") != "elliptic-condnum-histogram":
        raise ValueError(f"{path} is not a histogram header")
    if header["version"] != FORMAT_VERSION:
        raise ValueError(f"unsupported histogram version {header['version']}")
    h = JointHistogram.empty(ExperimentConfig.from_dict(header["config"]))
    h.z_totals[:] = header["z_totals"]
    h.z_out = header["z_out"]
    h.discards = header["discards"]
    h.total_matrices = header["total_matrices"]
    h.total_observations = header["total_observations"]
    with (path.parent / header["body"]).open(newline="") as fh:
        for row in csv.DictReader(fh):
            h.counts[int(row["bin_i"]), int(row["bin_j"])] = int(row["count"])
    try:
        h.check()
    except ExperimentError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if h.digest() != header["sha256"]:
        raise ValueError(f"{path}: checksum mismatch")
    return h


# ---------------------------------------------------------------- models


@dataclass
class Model:
    """A density in the histogram's coordinates.

    ``kind`` is ``"z"`` (``fn(z) -> float``, mean count per matrix per unit z),
    ``"zt"`` (``fn(z, t_array) -> array``, per matrix) or ``"t"`` (normalized
    conditional density ``fn(t_array) -> array``).
    """

    kind: str
    fn: Callable
    name: str = "model"

    def __post_init__(self):
        if self.kind not in ("z", "zt", "t"):
            raise ValueError(f"unknown model kind {self.kind!r}")


def _jacobian(config: ExperimentConfig):
    """``(to_raw, wz, wt)``: raw ``(z, t)`` from scaled coordinates and the two Jacobian factors."""
    n, tau = config.n, config.tau_value
    rn = math.sqrt(n)
    if config.scaling == "raw":
        return (lambda x, y: (x, y)), 1.0, 1.0
    if config.scaling == "bulk":
        return (lambda x, y: (x * rn, y * n)), rn, float(n)
    if config.scaling == "weak":
        return (lambda x, y: (x * rn, y)), rn, 1.0
    s = math.sqrt(1.0 - tau * tau)
    c = (1.0 - tau) * rn * s
    return (lambda x, y: (rn * (1.0 + tau) + x * s, y * c)), s, c


def finite_model(config: ExperimentConfig) -> Model:
    """Exact finite-N joint density in the configured coordinates."""
    params = config.params
    to_raw, wz, wt = _jacobian(config)

    @functools.lru_cache(maxsize=64)
    def slice_at(z):
        return JdfSlice(params, z)

    def fn(x, y):
        z, t = to_raw(x, np.asarray(y, float))
        q = t / (1.0 - params.tau)
        return slice_at(float(z))(q) / (1.0 - params.tau) * wz * wt

    return Model("zt", fn, f"finite jdf (n={params.n}, tau={params.tau:g})")


def marginal_model(config: ExperimentConfig) -> Model:
    params = config.params
    to_raw, wz, _ = _jacobian(config)
    return Model("z", lambda x: marginal_density(params, to_raw(x, 0.0)[0]) * wz,
                 f"marginal of the joint density (n={params.n})")


def fn_model(config: ExperimentConfig) -> Model:
    params = config.params
    to_raw, wz, _ = _jacobian(config)
    return Model("z", lambda x: fn_density(params, to_raw(x, 0.0)[0]) * wz,
                 f"closed-form real density (n={params.n})")


def limit_model(config: ExperimentConfig) -> Model:
    """Large-N law for the configured scaling, times the mean-count factor."""
    n, tau = config.n, config.tau_value
    if config.scaling == "bulk":
        w = math.sqrt(n)

        def fn(x, y):
            if not abs(x) < 1.0 + tau:
                return np.zeros_like(np.asarray(y, float))
            return w * np.array([bulk_jdf(BulkPoint(tau, x, v)) for v in np.atleast_1d(y)])
    elif config.scaling == "edge":
        w = 1.0 - tau * tau

        def fn(x, y):
            return w * np.array([edge_jdf(EdgePoint(tau, x, v)) for v in np.atleast_1d(y)])
    elif config.scaling == "weak":
        if config.a is None:
            raise ValueError("weak limit model needs the config to specify a")
        a = float(config.a)

        def fn(x, y):
            if not abs(x) < 2.0:
                return np.zeros_like(np.asarray(y, float))
            return n * np.array([weak_jdf(WeakPoint(a, x, v), check=False) for v in np.atleast_1d(y)])
    else:
        raise ValueError("raw scaling has no limit law")
    return Model("zt", fn, f"{config.scaling} limit")


def weak_conditional_model(a: float, z: float) -> Model:
    """``weak_jdf(a, z, t) / weak_density(a, z)`` as a density in ``t``."""
    rho = weak_density(a, z)

    def fn(y):
        return np.array([weak_jdf(WeakPoint(a, z, v), check=False) for v in np.atleast_1d(y)]) / rho

    return Model("t", fn, f"weak conditional (a={a:g}, z={z:g})")


# ---------------------------------------------------------------- comparison


def _bin_integrals(f, edges, epsrel=1e-7):
    """``[int f over each bin]`` for vectorized ``f``; infinite last edge allowed."""
    lo = edges[:-1]
    hi = edges[1:]
    fin = np.isfinite(hi)
    width = np.where(fin, hi - lo, 0.0)

    at0 = lo == 0.0

    def g(u):
        # finite bins: affine map, or t = w u^2 from 0 (square-root endpoint
        # behaviour of the density becomes smooth); infinite bin: t = lo + u/(1-u)
        t = np.where(fin, np.where(at0, width * u * u, lo + u * width), lo + u / (1.0 - u))
        jac = np.where(fin, np.where(at0, 2.0 * width * u, width), 1.0 / (1.0 - u) ** 2)
        return f(t) * jac

    val, err = integrate.quad_vec(g, 0.0, 1.0, epsrel=epsrel, epsabs=1e-14, limit=400)
    return np.asarray(val)


def _expected(h: JointHistogram, model: Model, mode: str, z_lo, z_hi, epsrel):
    cfg = h.config
    zb, tb = cfg.z_bins, cfg.t_bins
    if mode == "z":
        if model.kind != "z":
            raise ValueError("mode 'z' needs a z model")
        obs = h.z_totals.astype(float)
        exp = np.empty(len(zb) - 1)
        for i in range(len(zb) - 1):
            v, err = integrate.quad(model.fn, zb[i], zb[i + 1], epsabs=1e-13, epsrel=epsrel, limit=200)
            exp[i] = v
        return obs, exp * h.total_matrices
    if mode == "t":
        if model.kind != "t":
            raise ValueError("mode 't' needs a conditional t model")
        obs, total = h.t_counts(z_lo, z_hi)
        return obs.astype(float), total * _bin_integrals(model.fn, tb, epsrel)
    if mode == "zt":
        if model.kind != "zt":
            raise ValueError("mode 'zt' needs a joint model")
        rows = _slice_rows(zb, z_lo, z_hi)
        exp = np.empty((len(rows), len(tb) - 1))
        for k, i in enumerate(rows):
            def inner(x):
                return _bin_integrals(lambda y: model.fn(float(x), y), tb, epsrel)
            exp[k], _ = integrate.quad_vec(inner, zb[i], zb[i + 1], epsrel=epsrel, epsabs=1e-14, limit=200)
        return h.counts[rows].astype(float).ravel(), exp.ravel() * h.total_matrices
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class ComparisonReport:
    model: str
    mode: str
    chi2: float
    dof: int
    p_value: float
    max_abs_z: float
    bins_used: int
    bins_total: int
    alpha: float
    z_limit: float
    passed: bool
    observed: list = field(default_factory=list)
    expected: list = field(default_factory=list)

    def to_json(self) -> str:
        d = dict(self.__dict__)
        return json.dumps(d, indent=1)


def compare_to_model(h: JointHistogram, model: Model, mode: Optional[str] = None,
                     z_lo: Optional[float] = None, z_hi: Optional[float] = None,
                     min_expected: float = 20.0, alpha: float = 1e-3,
                     z_limit: float = 3.0, epsrel: float = 1e-7) -> ComparisonReport:
    """Poisson chi-square and per-bin z-scores of ``h`` against ``model``.

    Bins with expected count below ``min_expected`` are left out.  The report
    passes when the chi-square p-value exceeds ``alpha`` and every used bin is
    within ``z_limit`` standard deviations.  ``epsrel`` is the relative
    accuracy of the expected counts.

    Raises
    ------
    ValueError
        Empty histogram or no usable bin.
    """
    if h.total_observations == 0:
        raise ValueError("empty histogram")
    mode = mode or model.kind
    obs, exp = _expected(h, model, mode, z_lo, z_hi, epsrel)
    use = exp >= min_expected
    if not np.any(use):
        raise ValueError(f"no bin has expected count >= {min_expected}")
    o, e = obs[use], exp[use]
    zscore = (o - e) / np.sqrt(e)
    chi2 = float(np.sum(zscore ** 2))
    dof = int(use.sum())
    p = float(stats.chi2.sf(chi2, dof))
    mz = float(np.max(np.abs(zscore)))
    return ComparisonReport(model.name, mode, chi2, dof, p, mz, dof, len(exp), alpha, z_limit,
                            bool(p > alpha and mz <= z_limit), obs.tolist(), exp.tolist())


def tail_slope(h: JointHistogram, t_lo: float, t_hi: float, z_lo: Optional[float] = None,
               z_hi: Optional[float] = None) -> float:
    """Least-squares slope of log(count density) against log(t) over ``[t_lo, t_hi]``.

    Uses the t-bins lying inside the window with nonzero counts, summed over
    the z-bins in ``[z_lo, z_hi]``; bin centres are geometric means.

    Raises
    ------
    ValueError
        Fewer than 4 populated bins in the window.
    """
    counts, _ = h.t_counts(z_lo, z_hi)
    tb = h.config.t_bins
    lo, hi = tb[:-1], tb[1:]
    sel = (lo >= t_lo * (1 - 1e-12)) & (hi <= t_hi * (1 + 1e-12)) & (lo > 0) & (counts > 0)
    if sel.sum() < 4:
        raise ValueError(f"need at least 4 populated t-bins in [{t_lo}, {t_hi}], found {int(sel.sum())}")
    x = np.log(np.sqrt(lo[sel] * hi[sel]))
    y = np.log(counts[sel] / (hi[sel] - lo[sel]))
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------- count law


@dataclass
class CountLaw:
    ns: list
    means: list
    stderrs: list
    exponent: float


def _count_chunk(n, tau, seed, start, stop):
    return [count_real_eigenvalues(sample_matrix(n, tau, seed, i).entries) for i in range(start, stop)]


def count_law(ns: Sequence[int], tau: float, num_matrices: int, seed: int,
              workers: Optional[int] = None) -> CountLaw:
    """Mean number of real eigenvalues for each ``n`` and the fitted log-log growth exponent."""
    workers = default_workers() if workers is None else int(workers)
    means, errs = [], []
    for n in ns:
        chunks = _chunks(num_matrices, 4 * workers if workers > 1 else 1)
        if workers == 1:
            counts = sum((_count_chunk(n, tau, seed, s, e) for s, e in chunks), [])
        else:
            with cf.ProcessPoolExecutor(max_workers=workers) as ex:
                parts = ex.map(_count_chunk, *zip(*[(n, tau, seed, s, e) for s, e in chunks]))
                counts = sum(parts, [])
        c = np.array(counts, dtype=float)
        means.append(float(c.mean()))
        errs.append(float(c.std(ddof=1) / math.sqrt(len(c))) if len(c) > 1 else math.nan)
    slope = float(np.polyfit(np.log(np.asarray(ns, float)), np.log(means), 1)[0])
    return CountLaw(list(ns), means, errs, slope)
