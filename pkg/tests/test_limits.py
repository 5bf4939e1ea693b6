import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from elliptic_condnum.limits import (
    BulkPoint,
    EdgePoint,
    WeakPoint,
    bulk_convergence_error,
    bulk_density,
    bulk_jdf,
    edge_convergence_error,
    edge_finite,
    edge_jdf,
    semicircle,
    weak_convergence_error,
    weak_density,
    weak_jdf,
    weak_jdf_by_parts,
)
from elliptic_condnum.prt import EnsembleParams


def test_bulk_example():
    v = bulk_jdf(BulkPoint(0.0, 0.0, 1.0))
    assert v == pytest.approx(math.exp(-0.5) / (2 * math.sqrt(2 * math.pi)), rel=1e-15)
    assert v == pytest.approx(0.120985, abs=5e-7)
    s = math.sqrt(0.75)
    assert bulk_jdf(BulkPoint(0.5, 0.0, 1.0)) == pytest.approx(s / (2 * math.sqrt(2 * math.pi)) * math.exp(-0.375))


@pytest.mark.parametrize("tau,z", [(0.0, 0.0), (0.5, 0.3), (0.9, -1.2)])
def test_bulk_integrates_to_density(tau, z):
    f = lambda t: bulk_jdf(BulkPoint(tau, z, t))
    mass, _ = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-11, limit=400)
    # the t-law is inverse gamma with shape 1; its mass is c-independent
    c = 1 - z * z / (1 + tau) ** 2
    assert mass == pytest.approx(math.sqrt(1 - tau * tau) / (2 * math.sqrt(2 * math.pi)) * 2 / (1 - tau * tau),
                                 rel=1e-9)
    assert mass == pytest.approx(bulk_density(tau), rel=1e-9)
    # inverse-gamma CDF with scale (1-tau^2) c / 2
    scale = (1 - tau * tau) * c / 2
    part, _ = integrate.quad(f, 0, 0.7, epsabs=0, epsrel=1e-11)
    assert part / mass == pytest.approx(stats.invgamma(1, scale=scale).cdf(0.7), rel=1e-9)


def test_bulk_validation():
    for args in [(1.0, 0.0, 1.0), (0.5, 1.5, 1.0), (0.5, 0.0, 0.0), (-0.1, 0.0, 1.0)]:
        with pytest.raises(ValueError):
            BulkPoint(*args)


def test_edge_example():
    v = edge_jdf(EdgePoint(0.0, 0.0, 1.0))
    ref = (1 + math.sqrt(math.pi / 2)) * math.exp(-0.25) / (4 * math.pi)
    assert v == pytest.approx(ref, rel=1e-14)
    assert v == pytest.approx(0.139649, abs=5e-7)


def test_edge_vanishing_limits():
    assert edge_jdf(EdgePoint(0.3, 0.0, 1e-3)) < 1e-100
    assert edge_jdf(EdgePoint(0.3, 40.0, 1.0)) < 1e-100
    with pytest.raises(ValueError):
        EdgePoint(0.3, 0.0, 0.0)
    with pytest.raises(ValueError):
        EdgePoint(1.0, 0.0, 1.0)


@given(st.floats(0, 0.95), st.floats(-5, 5), st.floats(1e-2, 1e2))
def test_edge_nonnegative(tau, d, s):
    assert edge_jdf(EdgePoint(tau, d, s)) >= 0.0


def test_edge_convergence():
    p = [EnsembleParams(n, 0.0) for n in (50, 200, 800)]
    errs = [edge_convergence_error(x, 0.0, 1.0) for x in p]
    assert errs[0] > errs[1] > errs[2]
    assert edge_finite(p[2], 0.0, 1.0) == pytest.approx(edge_jdf(EdgePoint(0.0, 0.0, 1.0)), rel=0.1)


@pytest.mark.parametrize("a,z,t", [(1.0, 0.0, 0.5), (2.0, 1.0, 3.0), (0.3, -1.9, 0.1), (5.0, 0.2, 40.0)])
def test_weak_forms_agree(a, z, t):
    p = WeakPoint(a, z, t)
    assert weak_jdf(p, check=False) == pytest.approx(weak_jdf_by_parts(p), rel=1e-12)


def test_weak_density_examples():
    assert weak_density(1.0, 0.0) == pytest.approx(0.8556243918921488 / math.pi, rel=1e-14)
    assert weak_density(1.0, 2.0) == 0.0
    assert weak_density(1.0, -2.0) == 0.0
    for z in (0.0, 1.0, 1.7):
        assert weak_density(1e-8, z) == pytest.approx(semicircle(z), rel=1e-12)
    with pytest.raises(ValueError):
        weak_density(1.0, 2.1)


def test_weak_density_strong_coupling():
    # large A: the Gaussian integral approaches sqrt(pi / (2 A))
    a = math.sqrt(1e3)  # pi * semicircle(0) = 1, so A = 1e3
    A = (math.pi * semicircle(0.0) * a) ** 2
    assert A == pytest.approx(1e3)
    assert weak_density(a, 0.0) == pytest.approx(semicircle(0.0) * math.sqrt(math.pi / (2 * A)), rel=1e-12)


@pytest.mark.parametrize("a,z", [(1.0, 0.0), (3.0, 1.2), (0.5, -1.8)])
def test_weak_jdf_integrates_to_density(a, z):
    f = lambda t: weak_jdf(WeakPoint(a, z, t))
    mass, _ = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-12, limit=400)
    assert mass == pytest.approx(weak_density(a, z), rel=1e-9)


def test_weak_tail():
    p = lambda t: t * t * weak_jdf(WeakPoint(1.0, 0.0, t))
    assert p(1e6) == pytest.approx(p(1e7), rel=1e-5)
    q = lambda t: t * t * bulk_jdf(BulkPoint(0.5, 0.6, t))
    assert q(1e8) == pytest.approx(math.sqrt(0.75) / (2 * math.sqrt(2 * math.pi)) * (1 - 0.36 / 2.25), rel=1e-7)


def test_weak_range_guard():
    with pytest.raises(ValueError):
        weak_jdf(WeakPoint(200.0, 0.0, 1.0))
    for args in [(0.0, 0.0, 1.0), (1.0, 2.0, 1.0), (1.0, 0.0, -1.0)]:
        with pytest.raises(ValueError):
            WeakPoint(*args)


def test_weak_convergence():
    errs = [weak_convergence_error(n, 1.0, 0.0, 0.5) for n in (50, 100, 200)]
    assert errs[0] > errs[1] > errs[2]


def test_bulk_convergence_pointwise():
    errs = [bulk_convergence_error(EnsembleParams(n, 0.5), 0.3, 1.0) for n in (50, 100, 200, 400)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] / errs[-2] == pytest.approx(0.5, abs=0.1)
