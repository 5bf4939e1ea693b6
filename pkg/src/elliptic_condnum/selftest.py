"""Built-in consistency suites used by ``elliptic-condnum selftest``.

Each suite returns a :class:`SuiteResult`; none of them depends on pytest.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .jdf import fn_density, marginal_density
from .prt import EnsembleParams, identity_residual, prt_eval
from .sampler import overlaps_via_eigvecs, real_eig_overlaps, sample_matrix
from .specfun import upper_incomplete_gamma

__all__ = ["SuiteResult", "n2_marginal", "run_suites", "QUICK", "FULL"]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: worst={self.worst:.3g} tol={self.tolerance:.3g} ({self.seconds:.2f}s)"


def n2_marginal(tau: float, z: float) -> float:
    """Density of real eigenvalues for ``n = 2`` in closed form (error function)."""
    g = 1.0 + tau
    tail = math.sqrt(math.pi * g / 2.0) * math.erf(z / math.sqrt(2.0 * g))
    return (math.exp(-z * z / g) + math.exp(-z * z / (2.0 * g)) * z / g * tail) / math.sqrt(2.0 * math.pi)


def _timed(name, tol, fn):
    t0 = time.perf_counter()
    worst = fn()
    ok = bool(np.isfinite(worst) and worst <= tol)
    return SuiteResult(name, ok, float(worst), tol, time.perf_counter() - t0)


def identity_suite(ns=range(3, 41), taus=(0.1, 0.5, 0.9), tol=1e-10):
    def run():
        worst = 0.0
        for n in ns:
            for tau in taus:
                for z in np.linspace(-2.0 * math.sqrt(n), 2.0 * math.sqrt(n), 21):
                    worst = max(worst, identity_residual(EnsembleParams(n, tau), float(z)))
        return worst
    return _timed("kernel identity", tol, run)


def tau0_suite(tol=1e-4):
    def run():
        worst = 0.0
        for n in range(1, 31):
            for z in np.linspace(-5.0, 5.0, 11):
                z = float(z)
                b = prt_eval(EnsembleParams(n, 1e-6), z, [n, n - 1])
                p = upper_incomplete_gamma(n, z * z).log_abs + z * z
                pm = upper_incomplete_gamma(n - 1, z * z).log_abs + z * z
                ref = (math.exp(p), z * math.exp(p), n * z * z * math.exp(pm))
                got = (float(b.P(n)), float(b.R(n)), float(b.T(n)))
                for g, r in zip(got, ref):
                    # where the closed form vanishes (z = 0) measure against P
                    worst = max(worst, abs(g - r) / (abs(r) if r != 0.0 else ref[0]))
        return worst
    return _timed("tau -> 0 reduction", tol, run)


def marginal_suite(tol=1e-6):
    def run():
        worst = 0.0
        for n in (2, 4, 10):
            params = EnsembleParams(n, 0.9)
            edge = 0.9 * 1.9 * math.sqrt(n)
            for z in np.linspace(-edge, edge, 21):
                ref = fn_density(params, float(z))
                worst = max(worst, abs(marginal_density(params, float(z)) - ref) / ref)
        for z in np.linspace(-3.0, 3.0, 13):
            ref = n2_marginal(0.9, float(z))
            worst = max(worst, abs(fn_density(EnsembleParams(2, 0.9), float(z)) - ref) / ref)
            worst = max(worst, abs(marginal_density(EnsembleParams(2, 0.9), float(z)) - ref) / ref)
        return worst
    return _timed("marginal vs real density", tol, run)


def routes_suite(tol=1e-8, num=200, seed=11):
    def run():
        worst = 0.0
        for i in range(num):
            n = 2 + i % 29
            m = sample_matrix(n, 0.5, seed, i)
            ts = {}
            for method in ("direct", "reorder"):
                ts[method] = np.array([o.t for o in real_eig_overlaps(m, method=method)])
            ev = np.array([o.t for o in overlaps_via_eigvecs(m)])
            order = np.argsort([o.lam for o in real_eig_overlaps(m)])
            a = ts["direct"][order]
            for b in (ts["reorder"][order], ev):
                if len(a) != len(b):
                    return math.inf
                if len(a):
                    worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-6))))
        return worst
    return _timed("overlap route agreement", tol, run)


def determinism_suite():
    from .harness import ExperimentConfig, run_experiment

    def run():
        cfg = ExperimentConfig(n=6, tau=0.3, num_matrices=200, seed=5,
                               z_bins={"linspace": [-4, 4, 9]}, t_bins=[0, 1, 10, "inf"])
        run_experiment(cfg, workers=1, verify=True)
        return 0.0
    return _timed("repeat-run digest", 0.0, run)


QUICK: List[Callable[[], SuiteResult]] = [identity_suite, tau0_suite]
FULL: List[Callable[[], SuiteResult]] = QUICK + [marginal_suite, routes_suite, determinism_suite]


def run_suites(quick: bool = False) -> List[SuiteResult]:
    out = []
    for suite in (QUICK if quick else FULL):
        try:
            out.append(suite())
        except Exception as exc:  # a crashing suite is a failing suite
            out.append(SuiteResult(f"{suite.__name__} ({exc!r})", False, math.inf, 0.0, 0.0))
    return out
