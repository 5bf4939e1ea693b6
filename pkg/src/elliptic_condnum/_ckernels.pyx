# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; mirrors ``_kernels_py`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, frexp, ldexp, INFINITY, isfinite

cnp.import_array()

cdef double _BIG = ldexp(1.0, 300)
cdef double _SMALL = ldexp(1.0, -300)


cdef void _three_term(double x, double tau, Py_ssize_t n_max, bint phi,
                      double[::1] mant, long long[::1] exp2) noexcept nogil:
    cdef double a, b, c, ac
    cdef long long s = 0
    cdef int e
    cdef Py_ssize_t k
    mant[0] = 1.0
    exp2[0] = 0
    if n_max == 0:
        return
    a = 1.0
    b = x
    mant[1] = b
    exp2[1] = 0
    for k in range(1, n_max):
        if phi:
            c = x * b / sqrt(k + 1.0) - tau * sqrt(k / (k + 1.0)) * a
        else:
            c = x * b - k * a
        # scale on the larger of the pair: a lone small value near a root
        # must not blow up its partner
        ac = fabs(c) if fabs(c) > fabs(b) else fabs(b)
        if ac > _BIG or (0.0 < ac < _SMALL):
            frexp(ac, &e)
            s += e
            b = ldexp(b, -e)
            c = ldexp(c, -e)
        a = b
        b = c
        mant[k + 1] = b
        exp2[k + 1] = s


def hermite_scaled(double x, Py_ssize_t n_max):
    mant = np.zeros(n_max + 1)
    exp2 = np.zeros(n_max + 1, dtype=np.int64)
    _three_term(x, 0.0, n_max, False, mant, exp2)
    return mant, exp2


def phi_scaled(double z, double tau, Py_ssize_t n_max):
    mant = np.zeros(n_max + 1)
    exp2 = np.zeros(n_max + 1, dtype=np.int64)
    _three_term(z, tau, n_max, True, mant, exp2)
    return mant, exp2


cdef inline void _acc(double* sm, long long* se, double tm, long long te) noexcept nogil:
    cdef double v, f
    cdef int e
    cdef double m0
    cdef long long e0
    if tm == 0.0:
        return
    if sm[0] == 0.0:
        f = frexp(tm, &e)
        sm[0] = f
        se[0] = te + e
        return
    m0 = sm[0]
    e0 = se[0]
    if te > e0:
        v = tm + ldexp(m0, <int>(e0 - te))
        e0 = te
    else:
        v = m0 + ldexp(tm, <int>(te - e0))
    if v == 0.0:
        sm[0] = 0.0
        se[0] = 0
        return
    f = frexp(v, &e)
    sm[0] = f
    se[0] = e0 + e


def prt_reduced(double z, double tau, Py_ssize_t m_max):
    pm_arr, pe_arr = phi_scaled(z, tau, m_max + 2)
    cdef double[::1] pm = pm_arr
    cdef long long[::1] pe = pe_arr
    out = np.zeros((3, m_max + 1))
    oute = np.zeros((3, m_max + 1), dtype=np.int64)
    cdef double[:, ::1] o = out
    cdef long long[:, ::1] oe = oute
    cdef double sp = 0.0, sr = 0.0, st = 0.0
    cdef long long ep = 0, er = 0, et = 0
    cdef Py_ssize_t k
    cdef long long ref, ek1
    cdef double fk, fk1, fk2, cross_p, cross_r, pterm, rterm, kd
    with nogil:
        for k in range(m_max + 1):
            kd = <double>k
            ref = 2 * pe[k]
            fk = pm[k]
            fk1 = pm[k + 1]
            fk2 = pm[k + 2]
            ek1 = pe[k + 1] + pe[k] - ref
            if k > 0:
                cross_p = ldexp(pm[k - 1] * fk1, <int>(pe[k - 1] + pe[k + 1] - ref))
                cross_r = ldexp(pm[k - 1] * fk2, <int>(pe[k - 1] + pe[k + 2] - ref))
            else:
                cross_p = 0.0
                cross_r = 0.0
            pterm = (kd + 1.0) * fk * fk - sqrt(kd * (kd + 1.0)) * cross_p
            rterm = 0.5 * ((kd + 2.0) * sqrt(kd + 1.0) * ldexp(fk * fk1, <int>ek1)
                           - sqrt(kd * (kd + 1.0) * (kd + 2.0)) * cross_r)
            _acc(&sp, &ep, pterm, ref)
            _acc(&sr, &er, rterm, ref)
            _acc(&st, &et, kd * pterm, ref)
            o[0, k] = sp
            oe[0, k] = ep
            o[1, k] = sr
            oe[1, k] = er
            o[2, k] = st
            oe[2, k] = et
    return out[0], oute[0], out[1], oute[1], out[2], oute[2]


cdef bint _right_solve(const double[:, ::1] T, Py_ssize_t i, double lam, double tol,
                       double[::1] x) noexcept nogil:
    cdef Py_ssize_t j, l
    cdef double r0, r1, a, b, c, d, det, piv
    j = i - 1
    while j >= 0:
        if j > 0 and T[j, j - 1] != 0.0:
            r0 = -T[j - 1, i]
            r1 = -T[j, i]
            for l in range(j + 1, i):
                r0 -= T[j - 1, l] * x[l]
                r1 -= T[j, l] * x[l]
            a = T[j - 1, j - 1] - lam
            b = T[j - 1, j]
            c = T[j, j - 1]
            d = T[j, j] - lam
            det = a * d - b * c
            if fabs(det) <= tol * tol:
                return False
            x[j - 1] = (d * r0 - b * r1) / det
            x[j] = (a * r1 - c * r0) / det
            j -= 2
        else:
            piv = T[j, j] - lam
            if fabs(piv) <= tol:
                return False
            r0 = -T[j, i]
            for l in range(j + 1, i):
                r0 -= T[j, l] * x[l]
            x[j] = r0 / piv
            j -= 1
    return True


cdef bint _left_solve(const double[:, ::1] T, Py_ssize_t i, double lam, double tol,
                      double[::1] y) noexcept nogil:
    cdef Py_ssize_t n = T.shape[0]
    cdef Py_ssize_t m = n - i - 1
    cdef Py_ssize_t j, l, c0
    cdef double r0, r1, a, b, c, d, det, piv
    j = 0
    while j < m:
        c0 = i + 1 + j
        if j + 1 < m and T[c0 + 1, c0] != 0.0:
            r0 = -T[i, c0]
            r1 = -T[i, c0 + 1]
            for l in range(j):
                r0 -= y[l] * T[i + 1 + l, c0]
                r1 -= y[l] * T[i + 1 + l, c0 + 1]
            a = T[c0, c0] - lam
            b = T[c0 + 1, c0]
            c = T[c0, c0 + 1]
            d = T[c0 + 1, c0 + 1] - lam
            det = a * d - b * c
            if fabs(det) <= tol * tol:
                return False
            y[j] = (d * r0 - b * r1) / det
            y[j + 1] = (a * r1 - c * r0) / det
            j += 2
        else:
            piv = T[c0, c0] - lam
            if fabs(piv) <= tol:
                return False
            r0 = -T[i, c0]
            for l in range(j):
                r0 -= y[l] * T[i + 1 + l, c0]
            y[j] = r0 / piv
            j += 1
    return True


cdef double _right_residual(const double[:, ::1] T, Py_ssize_t i, double lam,
                            double[::1] x) noexcept nogil:
    cdef Py_ssize_t j, l
    cdef double s, nr = 0.0, nb = 0.0
    for j in range(i):
        s = T[j, i] + (T[j, j] - lam) * x[j]
        for l in range(i):
            if l != j:
                s += T[j, l] * x[l]
        nr += s * s
        nb += T[j, i] * T[j, i]
    if nb == 0.0:
        return sqrt(nr)
    return sqrt(nr / nb)


cdef double _left_residual(const double[:, ::1] T, Py_ssize_t i, double lam,
                           double[::1] y) noexcept nogil:
    cdef Py_ssize_t n = T.shape[0]
    cdef Py_ssize_t m = n - i - 1
    cdef Py_ssize_t j, l
    cdef double s, nr = 0.0, nb = 0.0
    for j in range(m):
        s = T[i, i + 1 + j] + (T[i + 1 + j, i + 1 + j] - lam) * y[j]
        for l in range(m):
            if l != j:
                s += y[l] * T[i + 1 + l, i + 1 + j]
        nr += s * s
        nb += T[i, i + 1 + j] * T[i, i + 1 + j]
    if nb == 0.0:
        return sqrt(nr)
    return sqrt(nr / nb)


def schur_overlaps(T_in, positions, double tol):
    cdef const double[:, ::1] T = np.ascontiguousarray(T_in, dtype=np.float64)
    cdef Py_ssize_t n = T.shape[0]
    cdef long long[::1] pos = np.ascontiguousarray(positions, dtype=np.int64)
    cdef Py_ssize_t npos = pos.shape[0]
    t_arr = np.zeros(npos)
    res_arr = np.zeros(npos)
    ok_arr = np.ones(npos, dtype=np.int8)
    cdef double[::1] t_out = t_arr
    cdef double[::1] res_out = res_arr
    cdef signed char[::1] ok = ok_arr
    cdef double[::1] x = np.zeros(max(n, 1))
    cdef double[::1] y = np.zeros(max(n, 1))
    cdef Py_ssize_t idx, i, j
    cdef double lam, xx, yy, rr, rl
    with nogil:
        for idx in range(npos):
            i = pos[idx]
            lam = T[i, i]
            if not _right_solve(T, i, lam, tol, x) or not _left_solve(T, i, lam, tol, y):
                ok[idx] = 0
                t_out[idx] = INFINITY
                res_out[idx] = INFINITY
                continue
            xx = 0.0
            for j in range(i):
                xx += x[j] * x[j]
            yy = 0.0
            for j in range(n - i - 1):
                yy += y[j] * y[j]
            t_out[idx] = xx + yy + xx * yy
            if not isfinite(t_out[idx]):
                ok[idx] = 0
            rr = 0.0
            if i > 0:
                rr = _right_residual(T, i, lam, x)
            if i < n - 1:
                rl = _left_residual(T, i, lam, y)
                if rl > rr:
                    rr = rl
            res_out[idx] = rr
    return t_arr, res_arr, ok_arr
