import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from elliptic_condnum import _kernels_py
from elliptic_condnum.jdf import mean_real_count
from elliptic_condnum.prt import EnsembleParams
from elliptic_condnum.sampler import (
    MatrixSample,
    MeasureStats,
    count_real_eigenvalues,
    measure_arrays,
    overlaps_via_eigvecs,
    real_block_positions,
    real_eig_overlaps,
    real_schur,
    rng_for,
    sample_matrix,
)


def _wrap(x, index=0):
    x = np.asarray(x, dtype=float)
    return MatrixSample(x.shape[0], 0.0, x, 0, index)


def _brute_overlaps(x):
    # kappa from left/right eigenvectors, one eigenvalue at a time
    w, vl, vr = linalg.eig(x, left=True, right=True)
    out = []
    for i in np.flatnonzero(np.abs(w.imag) == 0):
        l, r = vl[:, i].real, vr[:, i].real
        k2 = (l @ l) * (r @ r) / (l @ r) ** 2
        out.append((w[i].real, k2 - 1.0))
    return sorted(out)


def test_two_by_two_example():
    obs = real_eig_overlaps(_wrap([[1.0, 2.0], [0.0, 0.0]]))
    assert [o.lam for o in sorted(obs, key=lambda o: o.lam)] == [0.0, 1.0]
    for o in obs:
        assert o.t == pytest.approx(4.0, rel=1e-14)
        assert o.kappa == pytest.approx(math.sqrt(5.0), rel=1e-14)
    for method in ("reorder",):
        assert [o.t for o in real_eig_overlaps(_wrap([[1.0, 2.0], [0.0, 0.0]]), method=method)] == pytest.approx([4, 4])


def test_normal_matrix_has_zero_overlap():
    q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((6, 6)))
    x = q @ np.diag([3.0, -1.0, 0.5, 2.0, -2.5, 1.5]) @ q.T
    assert max(o.t for o in real_eig_overlaps(_wrap(x))) < 1e-20


@pytest.mark.parametrize("n", [3, 9, 25])
def test_matches_brute_force_eigenvectors(n):
    m = sample_matrix(n, 0.3, seed=4, index=n)
    got = sorted((o.lam, o.t) for o in real_eig_overlaps(m))
    ref = _brute_overlaps(m.entries)
    assert len(got) == len(ref)
    for (lg, tg), (lr, tr) in zip(got, ref):
        assert lg == pytest.approx(lr, abs=1e-10)
        assert tg == pytest.approx(tr, rel=1e-7)


def test_symmetric_limit():
    m = sample_matrix(12, 1.0, seed=1, index=0)
    assert np.array_equal(m.entries, m.entries.T)
    obs = real_eig_overlaps(m)
    assert len(obs) == 12
    assert max(o.t for o in obs) <= 1e-20


def test_entry_law_tau0():
    x = np.stack([sample_matrix(6, 0.0, seed=3, index=i).entries for i in range(4000)])
    off = x[:, 0, 1]
    assert abs(np.mean(x[:, 0, 1] * x[:, 1, 0])) < 5 / math.sqrt(4000)
    assert np.var(off) == pytest.approx(1.0, abs=0.1)
    assert np.var(x[:, 2, 2]) == pytest.approx(1.0, abs=0.1)


def test_blocks_and_counts():
    t = real_schur(sample_matrix(30, 0.2, seed=2, index=7).entries)
    pos = real_block_positions(t)
    w = np.linalg.eigvals(t)
    assert len(pos) == count_real_eigenvalues(t) == int(np.sum(w.imag == 0))
    assert np.array_equal(real_block_positions(np.array([[2.0]])), [0])
    # odd dimension always has a real eigenvalue
    for i in range(20):
        assert count_real_eigenvalues(sample_matrix(7, 0.0, seed=9, index=i).entries) % 2 == 1


@given(st.integers(2, 30), st.floats(0.0, 0.95), st.integers(0, 10 ** 6))
@settings(max_examples=40)
def test_orthogonal_invariance(n, tau, idx):
    m = sample_matrix(n, tau, seed=8, index=idx)
    q, _ = np.linalg.qr(rng_for(99, idx).standard_normal((n, n)))
    a = sorted((o.lam, o.t) for o in real_eig_overlaps(m))
    b = sorted((o.lam, o.t) for o in real_eig_overlaps(_wrap(q @ m.entries @ q.T)))
    if len(a) != len(b):  # a pair may cross the real axis under rounding
        return
    for (la, ta), (lb, tb) in zip(a, b):
        assert ta == pytest.approx(tb, rel=1e-6, abs=1e-10)


@given(st.integers(2, 40), st.floats(0.0, 0.99), st.integers(0, 10 ** 6))
@settings(max_examples=40)
def test_routes_agree(n, tau, idx):
    m = sample_matrix(n, tau, seed=6, index=idx)
    d = sorted((o.lam, o.t) for o in real_eig_overlaps(m))
    r = sorted((o.lam, o.t) for o in real_eig_overlaps(m, method="reorder"))
    e = [(o.lam, o.t) for o in overlaps_via_eigvecs(m)]
    assert len(d) == len(r) == len(e)
    for (_, a), (_, b), (_, c) in zip(d, r, e):
        assert a == pytest.approx(b, rel=1e-10, abs=1e-14)
        assert a == pytest.approx(c, rel=1e-8, abs=1e-12)
        assert a >= 0.0


@given(st.integers(2, 20), st.floats(0.0, 0.99), st.integers(0, 10 ** 6))
@settings(max_examples=30)
def test_count_independent_of_tolerance(n, tau, idx):
    m = sample_matrix(n, tau, seed=1, index=idx)
    counts = {len(measure_arrays(m.entries, tol=tol)[0]) for tol in (1e-15, 1e-12, 1e-8)}
    assert counts == {count_real_eigenvalues(m.entries)}


def test_kappa_at_least_one():
    for i in range(200):
        for o in real_eig_overlaps(sample_matrix(15, 0.7, seed=12, index=i)):
            assert o.kappa >= 1.0


def test_determinism_and_independence():
    a = sample_matrix(5, 0.4, seed=7, index=3).entries
    assert np.array_equal(a, sample_matrix(5, 0.4, seed=7, index=3).entries)
    assert not np.array_equal(a, sample_matrix(5, 0.4, seed=7, index=4).entries)
    assert not np.array_equal(a, sample_matrix(5, 0.4, seed=8, index=3).entries)
    with pytest.raises(ValueError):
        rng_for(-1, 0)


def test_deterministic_across_processes():
    code = "from elliptic_condnum.sampler import sample_matrix; print(sample_matrix(4, 0.5, 2020, 17).entries.tobytes().hex())"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout.strip()
    assert out == sample_matrix(4, 0.5, 2020, 17).entries.tobytes().hex()


def test_mean_count_matches_density():
    n, tau, num = 10, 0.9, 3000
    c = np.array([count_real_eigenvalues(sample_matrix(n, tau, seed=2020, index=i).entries) for i in range(num)])
    expected = mean_real_count(EnsembleParams(n, tau))
    assert abs(c.mean() - expected) < 4 * c.std(ddof=1) / math.sqrt(num)


def test_validation():
    with pytest.raises(ValueError):
        sample_matrix(0, 0.5)
    with pytest.raises(ValueError):
        sample_matrix(3, 1.5)
    with pytest.raises(ValueError):
        measure_arrays(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        measure_arrays(np.eye(2), method="nope")


def test_eigvec_route_rejects_defective():
    with pytest.raises(ArithmeticError):
        overlaps_via_eigvecs(_wrap([[1.0, 1.0], [0.0, 1.0]]))


def test_quality_gate_discards_are_counted():
    stats = MeasureStats()
    m = sample_matrix(20, 0.5, seed=1, index=0)
    kept = real_eig_overlaps(m, quality_gate=-1.0, stats=stats)
    assert kept == [] and stats.discarded == count_real_eigenvalues(m.entries)
    assert len(stats.reasons) == stats.discarded


def test_pure_python_backend_matches():
    t = real_schur(sample_matrix(40, 0.5, seed=3, index=1).entries)
    pos = real_block_positions(t)
    tol = 64 * np.finfo(float).eps * np.linalg.norm(t)
    a = _kernels_py.schur_overlaps(t, pos, tol)
    from elliptic_condnum._backend import kernels
    b = kernels.schur_overlaps(t, pos, tol)
    np.testing.assert_allclose(np.asarray(a[0]), np.asarray(b[0]), rtol=1e-13)
    assert np.array_equal(np.asarray(a[2]), np.asarray(b[2]))


def test_backend_selection_env():
    env = dict(os.environ, ELLIPTIC_CONDNUM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import elliptic_condnum as e; print(e.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True).stdout.strip()
    assert out == "python"
