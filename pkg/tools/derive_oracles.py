"""Independent reference values frozen into the test-suite.

Nothing here imports the package: every number is recomputed from the
defining expressions with mpmath, adaptive quadrature or brute-force grids.
Run ``python tools/derive_oracles.py`` to regenerate.
"""
import math

import mpmath as mp
import numpy as np
from scipy import integrate, optimize

mp.mp.dps = 30


def h2(m):
    m = mp.mpf(m)
    return -m * mp.log(m) - (1 - m) * mp.log(1 - m)


def mix_pdf(y, p, s2, eta):
    v0, v1 = 1 / eta, s2 + 1 / eta
    return (1 - p) * mp.npdf(y, 0, mp.sqrt(v0)) + p * mp.npdf(y, 0, mp.sqrt(v1))


def mp_mmse(p, s2, eta):
    p, s2, eta = mp.mpf(p), mp.mpf(s2), mp.mpf(eta)
    v1 = s2 + 1 / eta
    gain = s2 / v1

    def integrand(y):
        num = p * mp.npdf(y, 0, mp.sqrt(v1)) * gain * y
        return num ** 2 / mix_pdf(y, p, s2, eta)

    sd = mp.sqrt(v1)
    second = mp.quad(integrand, [-40 * sd, -5 * sd, -sd, 0, sd, 5 * sd, 40 * sd])
    return p * s2 - second


def mp_mi(p, s2, eta):
    p, s2, eta = mp.mpf(p), mp.mpf(s2), mp.mpf(eta)
    sd = mp.sqrt(s2 + 1 / eta)

    def integrand(y):
        f = mix_pdf(y, p, s2, eta)
        return -f * mp.log(f)

    hy = mp.quad(integrand, [-40 * sd, -5 * sd, -sd, 0, sd, 5 * sd, 40 * sd])
    return hy - mp.log(2 * mp.pi * mp.e / eta) / 2


def mp_replica(p, s2, q):
    q = mp.mpf(q)
    # fixed point of eta = q / (1 + mmse(eta)) by bisection on the defect
    g = lambda e: 1 / e - (1 + mp_mmse(p, s2, e)) / q
    lo, hi = mp.mpf("1e-6") * q, q
    for _ in range(80):
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    eta = (lo + hi) / 2
    return eta, mp_mi(p, s2, eta) + (q * mp.log(q / eta) + eta - q) / 2


def aux(x, s2, q):
    x, s2, q = mp.mpf(x), mp.mpf(s2), mp.mpf(q)
    if x == 0:
        b = 1 / (1 + s2 * q)
        return b, mp.mpf(1), mp.log(1 + s2 * q), mp.mpf(0), s2 * b / 2
    a = s2 * x
    c = 1 + s2 * (q - x)
    b = (-c + mp.sqrt(c * c + 4 * a)) / (2 * a)
    g = 1 + s2 * x * b
    ibar = q / x * mp.log(g) - mp.log(b) - s2 * q * b / g
    v = s2 ** 2 * b ** 2 * x ** 2 / (2 * g ** 2)
    l = s2 * b / (2 * g ** 2)
    return b, g, ibar, v, l


def t_value(x, s2, q, coeffs, m_a):
    b, g, ibar, v, l = aux(x, s2, q)
    f = sum(mp.mpf(a) * mp.mpf(x) ** k / k for k, a in enumerate(coeffs, start=1))
    return f - mp.mpf(x) / 2 * ibar + v * (mp.mpf(m_a) * q * s2 + q)


def rigorous_quad(p, s2, q):
    """Saddle system solved with float adaptive quadrature and numerical t'."""
    alpha = math.log(p / (1 - p))
    m_a = p
    py = m_a * q * s2 + q
    v2 = py + q * q * s2

    def l_of(m):
        return float(aux(m, s2, q)[4])

    def t_of(m):
        return float(t_value(m, s2, q, [alpha], m_a))

    def d(fn, m, h=1e-6):
        return (fn(m + h) - fn(m - h)) / (2 * h)

    def expect(fn):
        def dens(y, var):
            return math.exp(-y * y / (2 * var)) / math.sqrt(2 * math.pi * var)
        out = 0.0
        for w, var in ((1 - m_a, py), (m_a, v2)):
            sd = math.sqrt(var)
            out += w * 2 * integrate.quad(lambda y: fn(y * y) * dens(y, var), 0, 40 * sd, limit=400, epsabs=1e-14, epsrel=1e-13)[0]
        return out

    def k_fn(l, gamma):
        return lambda q2: 1 / (1 + math.exp(-(l * q2 - gamma))) if l * q2 - gamma > -700 else 0.0

    def gamma_of(m):
        l, lp, tp = l_of(m), d(l_of, m), d(t_of, m)
        return optimize.brentq(lambda gm: gm + lp * expect(lambda z: k_fn(l, gm)(z) * z) + tp, -200, 200, xtol=1e-13)

    def resid(m):
        return m - expect(k_fn(l_of(m), gamma_of(m)))

    grid = np.linspace(0.02, 0.98, 49)
    r = [resid(m) for m in grid]
    roots = [optimize.brentq(resid, grid[i], grid[i + 1], xtol=1e-12) for i in range(len(grid) - 1) if r[i] * r[i + 1] < 0]
    out = []
    for m in roots:
        gm = gamma_of(m)
        l = l_of(m)

        def hint(z):
            u = l * z - gm
            return 0.5 * l * z + abs(u) / 2 + math.log1p(math.exp(-abs(u)))

        crit = t_of(m) + gm * (m - 0.5) + expect(hint)
        i1 = 0.5 * s2 * m_a * q + float(h2(m_a)) + alpha * m_a - crit
        out.append((m, gm, crit, i1))
    return out


if __name__ == "__main__":
    print("H2(0.2) =", mp.nstr(h2("0.2"), 20))
    print("b(0.2; 10, 0.5) =", mp.nstr((-4 + mp.sqrt(24)) / 4, 20), aux(0.2, 10, 0.5)[0])
    print("F(1,1) =", mp.nstr(6 - 2 * mp.sqrt(5), 20))
    print("t(0.2) memoryless 0.2 =", mp.nstr(t_value(0.2, 10, 0.5, [mp.log(mp.mpf(1) / 4)], 0.2), 20))

    # quadratic law (ln 0.25, 0.3): 1e-6-step grid search of H2 + f
    m = np.arange(1, 1_000_000) * 1e-6
    obj = -m * np.log(m) - (1 - m) * np.log1p(-m) + math.log(0.25) * m + 0.3 * m * m / 2
    print("m_a quadratic =", m[np.argmax(obj)])

    # p = 1 fixed point: 1/eta = 2 (1 + 10 / (1 + 10 eta)) by bisection
    g = lambda e: 1 / e - 2 * (1 + 10 / (1 + 10 * e))
    print("eta p=1 =", mp.nstr(mp.findroot(g, (mp.mpf("1e-6"), mp.mpf("0.5")), solver="bisect"), 20))

    # I-MMSE check at p = 0.2, sigma2 = 10, eta = 0.5
    print("mi(0.2,10,0.5) =", mp.nstr(mp_mi(0.2, 10, 0.5), 20))
    print("0.5 int mmse =", mp.nstr(mp.quad(lambda e: mp_mmse(0.2, 10, e), [0, 0.1, 0.5]) / 2, 20))

    # defect sign-change scan at p = 0.2, sigma2 = 100, q = 0.25 on a 1e-4 grid (float quadrature)
    def mmse_f(eta, p=0.2, s2=100.0):
        v0, v1 = 1 / eta, s2 + 1 / eta
        def integrand(y):
            f0 = (1 - p) * math.exp(-y * y / (2 * v0)) / math.sqrt(2 * math.pi * v0)
            f1 = p * math.exp(-y * y / (2 * v1)) / math.sqrt(2 * math.pi * v1)
            return (f1 * s2 / v1 * y) ** 2 / (f0 + f1) if f0 + f1 > 0 else 0.0
        sd = math.sqrt(v1)
        return p * s2 - 2 * integrate.quad(integrand, 0, 40 * sd, limit=400, epsabs=1e-13)[0]
    q = 0.25
    etas = np.arange(1, 2501) * 1e-4
    dfx = np.array([1 / e - (1 + mmse_f(e)) / q for e in etas])
    sc = np.flatnonzero(np.sign(dfx[:-1]) != np.sign(dfx[1:]))
    print("sign changes (p=0.2,s2=100,q=0.25):", [(etas[i], etas[i + 1]) for i in sc])

    eta, val = mp_replica(0.2, 10, 0.5)
    print("replica (0.2, 10, 0.5): eta =", mp.nstr(eta, 20), "I1 =", mp.nstr(val, 20))
    print("saddle (0.2, 10, 0.5):", rigorous_quad(0.2, 10.0, 0.5))
