"""Regenerate the frozen reference values used by the test suite.

Independent of the package: mpmath at 30 digits for Mittag-Leffler series,
roots of psi(theta) = q and Laplace inversion; numpy eigendecompositions for
matrix functions.  Run ``python3 tests/oracles/generate.py`` and paste the
printed literals into the tests if a value ever needs refreshing.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 30
np.set_printoptions(precision=17)

ALPHA = [-8 / 9, -34 / 9, 17 / 3]
T = np.array([[0.0, -17.0, 17.0], [3.0, 2.0, -6.0], [2.0, 2.0, -5.0]])
t = np.array([0.0, 1.0, 1.0])
l = np.linalg.solve(-T, t)


def ml(a, b, z):
    a, b, z = mp.mpf(a), mp.mpf(b), mp.mpc(z)
    return mp.nsum(lambda n: z**n / mp.gamma(a * n + b), [0, mp.inf])


def stable_w(a, q, x):
    return mp.mpf(x) ** (a - 1) * ml(a, a, mp.mpc(q) * mp.mpf(x) ** a)


def stable_phi(a, q):
    return mp.mpc(q) ** (1 / mp.mpf(a))


def matfun(vals_fn):
    lam, V = np.linalg.eig(-T)
    Vi = np.linalg.inv(V)
    return lambda *args: (V @ np.diag([complex(vals_fn(q, *args)) for q in lam]) @ Vi).real


def cl_psi(c, lam, rate):
    return lambda th: c * th - lam * th / (rate + th)


def cl_phi(c, lam, rate, q):
    psi = cl_psi(c, lam, rate)
    return mp.findroot(lambda th: psi(th) - q, mp.mpc(q) / c + 1)


def cl_w(c, lam, rate, q, x):
    psi = cl_psi(c, lam, rate)
    phi = cl_phi(c, lam, rate, q)
    s0 = float(mp.re(phi)) + 1.0
    return mp.invertlaplace(lambda s: 1 / (psi(s) - q), x, method="dehoog", degree=40) if s0 else None


if __name__ == "__main__":
    print("# Mittag-Leffler")
    for a, b, z in [(1.5, 1.5, 2.0), (1.5, 1.5, -3.0), (0.8, 1.2, 1 + 2j), (1.5, 0.5, -1.5), (1.9, 1.9, 10.0)]:
        v = ml(a, b, z)
        print((a, b, z), complex(v))
    print("# stable W_q(x), alpha = 1.5")
    for q, x in [(1.0, 0.5), (1.0, 2.0), (2 + 1j, 1.0), (5.0, 3.0), (1 + 4j, 1.5)]:
        print((q, x), complex(stable_w(1.5, q, x)))
    print("# stable W'_q(x), alpha = 1.5")
    for q, x in [(1.0, 0.5), (2 + 1j, 1.0)]:
        print((q, x), complex(mp.diff(lambda y: stable_w(1.5, q, y), x)))
    print("# Phi(-T) for Stable(1.5)")
    Phi = matfun(lambda q: stable_phi(1.5, q))()
    print(repr(Phi))
    print("# P(tau_x+ < T) for Stable(1.5)")
    lam, V = np.linalg.eig(-T)
    Vi = np.linalg.inv(V)
    phis = [complex(stable_phi(1.5, q)) for q in lam]
    for x in (0.1, 0.5, 1.0):
        E = (V @ np.diag(np.exp(-np.array(phis) * x)) @ Vi).real
        print(x, float(np.array(ALPHA) @ E @ l))
    print("# P(tau_x+ < tau_-y- and T) for Stable(1.5), y = 1 - x")
    for x in (0.3, 0.7):
        W = lambda z: (V @ np.diag([complex(stable_w(1.5, q, z)) for q in lam]) @ Vi).real
        print(x, float(np.array(ALPHA) @ W(1 - x) @ np.linalg.solve(W(1.0), l)))
    print("# Cramer-Lundberg c=2 lam=1 exp(1) claims: Phi(q), W_q(x)")
    for q in (0.5, 2.0):
        print(q, complex(cl_phi(2, 1, 1, q)))
    for q, x in [(0.5, 1.0), (2.0, 0.7)]:
        print((q, x), complex(cl_w(2, 1, 1, q, x)))
    print("# mean of the cos^2 horizon")
    f = lambda x: mp.mpf(17) / 9 * mp.e**-x * mp.cos(2 * x) ** 2
    print(mp.quad(lambda x: x * f(x), [0, mp.inf]), mp.quad(f, [0, mp.inf]))
    print("# cdf of the cos^2 horizon at 1")
    print(mp.quad(f, [0, 1]))
