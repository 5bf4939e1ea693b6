"""Slow independent reference implementations used only by the tests."""
import mpmath as mp
import sympy as sp


def prt_symbolic(m, z, tau):
    """Exact ``P_m, R_m, T_m`` from the defining sums.

    Uses ``g_j = tau^{j/2} He_j(z/sqrt(tau))``, which satisfies
    ``g_{j+1} = z g_j - j tau g_{j-1}``, so every quantity is a polynomial in
    ``z`` and ``tau`` (``R`` picks up one extra ``sqrt(tau)``, which cancels
    against the half power in its definition).
    """
    if m < 0:
        return [sp.Integer(0)] * 3
    g = [sp.Integer(1), z]
    for n in range(1, m + 3):
        g.append(sp.expand(z * g[n] - n * tau * g[n - 1]))

    def G(n):
        return g[n] if n >= 0 else 0

    P = R = T = 0
    for k in range(m + 1):
        a = ((k + 1) * G(k) ** 2 - k * G(k - 1) * G(k + 1)) / sp.factorial(k)
        P += a
        T += k * a
        R += ((k + 2) * G(k + 1) * G(k) - k * G(k + 2) * G(k - 1)) / sp.factorial(k) / 2
    f = sp.factorial(m)
    return [sp.expand(v * f) for v in (P, R, T)]


def printed_jdf_q(n, tau, z, q, dps=40):
    """The closed-form joint density in ``q`` transcribed term by term, exact kernels."""
    tau, z, q = sp.nsimplify(tau), sp.nsimplify(z), sp.nsimplify(q)
    P2, R2, _ = prt_symbolic(n - 2, z, tau)
    P3, R3, T3 = prt_symbolic(n - 3, z, tau)
    bracket = (((1 + tau - 2 * z ** 2) * P2 + 2 * z * (R2 + tau * (n - 2) * R3)) / (1 + q)
               + P2 * z ** 2 / (1 + q) ** 2
               + tau ** 2 * (1 + tau) ** 2 * n * (n - 2) * P3 / (1 + tau + q) ** 2
               + (1 + tau) * (1 - tau ** 2) * (n - 2) * ((n - 2) * P3 - T3) / (1 + tau + q)
               - 2 * tau * (1 + tau) * (n - 2) * z * R3 / ((1 + q) * (1 + tau + q)))
    bracket = sp.nsimplify(bracket)
    mp.mp.dps = dps
    pre = (mp.e ** (-mp.mpf(sp.N(z ** 2 / (2 * (1 + tau)) * (1 + q / (1 + q)), dps)))
           / mp.sqrt(mp.mpf(sp.N(q * (1 + q), dps)))
           * mp.mpf(sp.N(q / (q + 1 + tau), dps)) ** (mp.mpf(n) / 2 - 1)
           / (2 * mp.mpf(sp.N(1 + tau, dps)) * mp.sqrt(2 * mp.pi) * mp.factorial(n - 2)))
    return pre * mp.mpf(sp.N(bracket, dps))


def n2_jdf_q(tau, z, q):
    """The ``n = 2`` joint density in closed form."""
    return (mp.e ** (-z * z / (2 * (1 + tau)) * (1 + q / (1 + q))) / mp.sqrt(q * (1 + q))
            * (z * z / (1 + q) ** 2 + (1 + tau) / (1 + q)) / (2 * mp.sqrt(2 * mp.pi) * (1 + tau)))


def n2_marginal(tau, z):
    """Integrated ``n = 2`` density with the remaining integral done by mpmath."""
    g = 1 + tau
    inner = mp.quad(lambda u: mp.e ** (-u * u / (2 * g)), [0, z])
    return mp.e ** (-z * z / g) / mp.sqrt(2 * mp.pi) + mp.e ** (-z * z / (2 * g)) / mp.sqrt(2 * mp.pi) * z / g * inner
