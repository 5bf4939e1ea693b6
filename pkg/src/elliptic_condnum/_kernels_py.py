"""Pure-Python versions of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is not built or when ``ELLIPTIC_CONDNUM_PURE_PYTHON`` is set.

Scaled sequences are returned as ``(mantissa, exp2)`` array pairs meaning
``mantissa * 2**exp2``.  Rescaling is by powers of two only, so it never
perturbs the recurrence.
"""
import math

import numpy as np

_BIG = 2.0 ** 300
_SMALL = 2.0 ** -300


def _three_term_scaled(x, tau, n_max, phi):
    mant = np.zeros(n_max + 1)
    exp2 = np.zeros(n_max + 1, dtype=np.int64)
    mant[0] = 1.0
    if n_max == 0:
        return mant, exp2
    a = 1.0
    b = x
    s = 0
    mant[1] = b
    for k in range(1, n_max):
        if phi:
            c = x * b / math.sqrt(k + 1.0) - tau * math.sqrt(k / (k + 1.0)) * a
        else:
            c = x * b - k * a
        # scale on the larger of the pair: a lone small value near a root
        # must not blow up its partner
        ac = max(abs(b), abs(c))
        if ac > _BIG or (0.0 < ac < _SMALL):
            _, e = math.frexp(ac)
            s += e
            b = math.ldexp(b, -e)
            c = math.ldexp(c, -e)
        a, b = b, c
        mant[k + 1] = b
        exp2[k + 1] = s
    return mant, exp2


def hermite_scaled(x, n_max):
    return _three_term_scaled(float(x), 0.0, int(n_max), False)


def phi_scaled(z, tau, n_max):
    return _three_term_scaled(float(z), float(tau), int(n_max), True)


def _acc(sm, se, tm, te):
    # (sm * 2**se) + (tm * 2**te), renormalized
    if tm == 0.0:
        return sm, se
    if sm == 0.0:
        f, e = math.frexp(tm)
        return f, te + e
    if te > se:
        sm, se, tm, te = tm, te, sm, se
    v = sm + math.ldexp(tm, te - se)
    if v == 0.0:
        return 0.0, 0
    f, e = math.frexp(v)
    return f, se + e


def prt_reduced(z, tau, m_max):
    """Reduced kernels ``P_m/m!, R_m/m!, T_m/m!`` for ``m = 0..m_max``.

    Returns six arrays: mantissa/exponent pairs for P, R and T.
    """
    m_max = int(m_max)
    pm, pe = phi_scaled(z, tau, m_max + 2)
    out = np.zeros((3, m_max + 1))
    oute = np.zeros((3, m_max + 1), dtype=np.int64)
    sp = sr = st = 0.0
    ep = er = et = 0
    for k in range(m_max + 1):
        ref = 2 * int(pe[k])
        fk = pm[k]
        fk1 = pm[k + 1]
        fk2 = pm[k + 2]
        ek1 = int(pe[k + 1]) + int(pe[k]) - ref
        if k > 0:
            fkm = pm[k - 1]
            ekm = int(pe[k - 1])
            cross_p = math.ldexp(fkm * fk1, ekm + int(pe[k + 1]) - ref)
            cross_r = math.ldexp(fkm * fk2, ekm + int(pe[k + 2]) - ref)
        else:
            cross_p = cross_r = 0.0
        pterm = (k + 1.0) * fk * fk - math.sqrt(k * (k + 1.0)) * cross_p
        rterm = 0.5 * (
            (k + 2.0) * math.sqrt(k + 1.0) * math.ldexp(fk * fk1, ek1)
            - math.sqrt(k * (k + 1.0) * (k + 2.0)) * cross_r
        )
        sp, ep = _acc(sp, ep, pterm, ref)
        sr, er = _acc(sr, er, rterm, ref)
        st, et = _acc(st, et, k * pterm, ref)
        out[0, k], oute[0, k] = sp, ep
        out[1, k], oute[1, k] = sr, er
        out[2, k], oute[2, k] = st, et
    return out[0], oute[0], out[1], oute[1], out[2], oute[2]


def _right_solve(T, i, lam, tol):
    # (T[:i,:i] - lam) x = -T[:i, i], upper quasi-triangular back substitution
    x = np.zeros(i)
    j = i - 1
    while j >= 0:
        if j > 0 and T[j, j - 1] != 0.0:
            r0 = -T[j - 1, i] - T[j - 1, j + 1:i] @ x[j + 1:i]
            r1 = -T[j, i] - T[j, j + 1:i] @ x[j + 1:i]
            a = T[j - 1, j - 1] - lam
            b = T[j - 1, j]
            c = T[j, j - 1]
            d = T[j, j] - lam
            det = a * d - b * c
            if abs(det) <= tol * tol:
                return None
            x[j - 1] = (d * r0 - b * r1) / det
            x[j] = (a * r1 - c * r0) / det
            j -= 2
        else:
            piv = T[j, j] - lam
            if abs(piv) <= tol:
                return None
            x[j] = (-T[j, i] - T[j, j + 1:i] @ x[j + 1:i]) / piv
            j -= 1
    return x


def _left_solve(T, i, lam, tol):
    # y^T (T[i+1:, i+1:] - lam) = -T[i, i+1:], forward substitution over columns
    n = T.shape[0]
    m = n - i - 1
    y = np.zeros(m)
    j = 0
    while j < m:
        c0 = i + 1 + j
        if j + 1 < m and T[c0 + 1, c0] != 0.0:
            r0 = -T[i, c0] - y[:j] @ T[i + 1:c0, c0]
            r1 = -T[i, c0 + 1] - y[:j] @ T[i + 1:c0, c0 + 1]
            a = T[c0, c0] - lam
            b = T[c0 + 1, c0]
            c = T[c0, c0 + 1]
            d = T[c0 + 1, c0 + 1] - lam
            det = a * d - b * c
            if abs(det) <= tol * tol:
                return None
            y[j] = (d * r0 - b * r1) / det
            y[j + 1] = (a * r1 - c * r0) / det
            j += 2
        else:
            piv = T[c0, c0] - lam
            if abs(piv) <= tol:
                return None
            y[j] = (-T[i, c0] - y[:j] @ T[i + 1:c0, c0]) / piv
            j += 1
    return y


def _rel_residual(res, rhs):
    nr = math.sqrt(float(res @ res))
    nb = math.sqrt(float(rhs @ rhs))
    if nb == 0.0:
        return nr
    return nr / nb


def schur_overlaps(T, positions, tol):
    """Shifted overlaps ``t = O_ii - 1`` of real eigenvalues of a real Schur form.

    For the 1x1 block at each position ``i`` the right eigenvector of ``T`` is
    ``(x, 1, 0)`` and the left one ``(0, 1, y)``; their inner product is 1, so
    ``t = |x|^2 + |y|^2 + |x|^2 |y|^2``.  Pivots with magnitude ``<= tol``
    mark the solve as broken down (``ok = 0``).

    Returns ``(t, residual, ok)`` arrays aligned with ``positions``.
    """
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    positions = np.asarray(positions, dtype=np.int64)
    t_out = np.zeros(len(positions))
    res_out = np.zeros(len(positions))
    ok = np.ones(len(positions), dtype=np.int8)
    for idx, i in enumerate(positions):
        i = int(i)
        lam = T[i, i]
        x = _right_solve(T, i, lam, tol)
        y = None if x is None else _left_solve(T, i, lam, tol)
        if x is None or y is None:
            ok[idx] = 0
            t_out[idx] = math.inf
            res_out[idx] = math.inf
            continue
        xx = float(x @ x)
        yy = float(y @ y)
        t_out[idx] = xx + yy + xx * yy
        if not math.isfinite(t_out[idx]):
            ok[idx] = 0
        rr = 0.0
        if i > 0:
            A = T[:i, :i] - lam * np.eye(i)
            rr = _rel_residual(A @ x + T[:i, i], T[:i, i])
        if i < n - 1:
            B = T[i + 1:, i + 1:] - lam * np.eye(n - i - 1)
            rr = max(rr, _rel_residual(y @ B + T[i, i + 1:], T[i, i + 1:]))
        res_out[idx] = rr
    return t_out, res_out, ok
