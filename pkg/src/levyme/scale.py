"""Scale functions.

Scalar scale functions ``W_q`` are evaluated in closed form for each model
family and lifted to matrix arguments through the functional calculus of
``-T``: ``W_{-T}(x) = sum_j W_{z_j}(x) C_j``.  The second scale function
``Z`` is obtained from its defining integral by adaptive quadrature.

All scalar routines take a 1-D array ``x`` and a 1-D array ``q`` and return a
complex array of shape ``(len(x), len(q))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.signal import fftconvolve

from . import _quad, linalg, models
from .errors import ConfluentRoots, DomainError, MultipleRoots, SingularAtZero
from .medist import MERep
from .models import BrownianDrift, CramerLundbergME, LevyModel, Stable
from .special import mittag_leffler, regularized_lower_gamma

# |q| x^alpha above which the stable scale function is evaluated through its
# branch-cut representation instead of the Taylor series
_TAYLOR_LIMIT = 20.0


def _grid(x, q):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    if np.any(x < 0):
        raise DomainError("scale functions need x >= 0 (use the matrix accessors for x < 0)")
    return x, q


def _sinhc(u):
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 1e-3
    safe = np.where(small, 1.0, u)
    return np.where(small, 1.0 + u * u / 6.0 + u**4 / 120.0, np.sinh(safe) / safe)


class ScalarScale:
    """Family-specific scalar scale functions."""

    def __init__(self, model: LevyModel):
        self.model = model

    def phi(self, q):
        return np.atleast_1d(self.model.phi(np.asarray(q, dtype=complex)))

    def w(self, x, q):
        raise NotImplementedError

    def w_prime(self, x, q):
        raise NotImplementedError

    def w_norm(self, x, q):
        """``exp(-Phi(q) x) W_q(x)``."""
        x, q = _grid(x, q)
        return np.exp(-np.outer(x, self.phi(q))) * self.w(x, q)

    def w_diff(self, x, q):
        """``W_q'(x) - Phi(q) W_q(x)``."""
        x, q = _grid(x, q)
        return self.w_prime(x, q) - self.phi(q)[None, :] * self.w(x, q)

    def z_int(self, theta, x: float, q, tol: float = 1e-12):
        """``int_0^x exp(-theta y) W_q(y) dy`` for each ``q`` (``theta`` broadcasts with ``q``)."""
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        theta = np.broadcast_to(np.asarray(theta, dtype=complex), q.shape)
        if x == 0:
            return np.zeros(q.shape, dtype=complex)

        def f(y):
            return np.exp(-np.outer(y, theta)) * self.w(y, q)

        return _quad.smooth_power(f, 0.0, float(x), tol=tol, power=2)

    def w_int(self, x: float, q):
        return self.z_int(0.0, x, q)

    def w_diff_tail(self, x, q):
        """``int_x^inf (W_q' - Phi(q) W_q)``; the integral over ``[0, inf)`` is ``Phi(q)/q - c``."""
        raise NotImplementedError


class StableScale(ScalarScale):
    """``W_q(x) = x^(a-1) E_{a,a}(q x^a)`` and ``W_q'(x) = x^(a-2) E_{a,a-1}(q x^a)``.

    For large ``|q| x^a`` (and ``Re q > 0``) the inverse Laplace integral is
    deformed around the negative real axis: the poles of ``1/(theta^a - q)``
    give exponentials and the cut gives a rapidly decaying integral.  This
    keeps ``W' - Phi W`` and ``exp(-Phi x) W`` accurate for large ``x``.
    """

    model: Stable

    @property
    def a(self) -> float:
        return self.model.alpha

    def phi(self, q):
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        return np.where(q == 0, 0.0, np.exp(np.log(np.where(q == 0, 1.0, q)) / self.a))

    def _use_cut(self, x, q):
        return (np.outer(x**self.a, np.abs(q)) > _TAYLOR_LIMIT) & (q.real > 0)[None, :] & (self.a < 2)

    def _poles(self, q):
        # roots of theta^a = q on the principal sheet; column 0 is Phi(q)
        r = np.abs(q) ** (1.0 / self.a)
        ang = np.angle(q)
        out = []
        for k in (0, 1, -1):
            arg = (ang + 2 * np.pi * k) / self.a
            valid = np.abs(arg) < np.pi
            out.append(np.where(valid, r * np.exp(1j * arg), np.nan))
        return np.stack(out, axis=-1)

    def _cut(self, x, q, kind: str, shift=None):
        """Branch-cut part of ``W`` (kind ``w``), ``W'`` (``dw``) or ``W' - Phi W`` (``diff``)."""
        a = self.a
        em, ep = np.exp(-1j * np.pi * a), np.exp(1j * np.pi * a)
        U = 50.0
        phi = self.phi(q)

        def f(s):
            u = U * s**2
            r = u[:, None, None] / x[None, :, None]
            ra = r**a
            jump = 1.0 / (ra * em - q[None, None, :]) - 1.0 / (ra * ep - q[None, None, :])
            k = {"w": 1.0, "dw": -r, "diff": -r - phi[None, None, :],
                 "tail": (-r - phi[None, None, :]) / r}[kind]
            jac = (2.0 * U * s * np.exp(-u))[:, None, None] / x[None, :, None]
            return jac * k * jump / (2j * np.pi)

        return _quad.integrate(f, 0.0, 1.0, tol=1e-13)

    def _residues(self, x, q, kind: str, drop_principal: bool = False, normalize: bool = False):
        a = self.a
        poles = self._poles(q)
        phi = poles[:, 0]
        total = np.zeros((len(x), len(q)), dtype=complex)
        for k in range(poles.shape[1]):
            if k == 0 and drop_principal:
                continue
            th = poles[:, k]
            valid = ~np.isnan(th)
            th = np.where(valid, th, 0.0)
            base = 1.0 / (a * np.where(valid, th, 1.0) ** (a - 1))
            fac = {"w": 1.0, "dw": th, "diff": th - phi,
                   "tail": -(th - phi) / np.where(valid, th, 1.0)}[kind]
            expo = np.outer(x, th - phi) if normalize else np.outer(x, th)
            total += np.where(valid[None, :], np.exp(expo) * (base * fac)[None, :], 0.0)
        return total

    def _split(self, x, q, taylor, cut):
        # taylor works on paired (x, q) arrays, cut on a sub-grid
        x, q = _grid(x, q)
        out = np.empty((len(x), len(q)), dtype=complex)
        mask = self._use_cut(x, q)
        if np.any(~mask):
            i, j = np.nonzero(~mask)
            out[i, j] = taylor(x[i], q[j])
        if np.any(mask):
            rows = np.any(mask, axis=1)
            cols = np.any(mask, axis=0)
            sub = np.zeros_like(out)
            sub[np.ix_(rows, cols)] = cut(x[rows], q[cols])
            out[mask] = sub[mask]
        return out

    def _taylor_w(self, x, q):
        a = self.a
        return x ** (a - 1) * mittag_leffler(a, a, q * x**a)

    def _taylor_dw(self, x, q):
        a = self.a
        return x ** (a - 2) * mittag_leffler(a, a - 1, q * x**a)

    def _check_zero(self, x):
        if self.a < 2 and np.any(np.asarray(x) == 0):
            raise SingularAtZero("W'(0+) is infinite for a stable model of unbounded variation")

    def w(self, x, q):
        def cut(x, q):
            return self._residues(x, q, "w") + self._cut(x, q, "w")

        return self._split(x, q, self._taylor_w, cut)

    def w_prime(self, x, q):
        self._check_zero(x)

        def cut(x, q):
            return self._residues(x, q, "dw") + self._cut(x, q, "dw")

        return self._split(x, q, self._taylor_dw, cut)

    def w_norm(self, x, q):
        def taylor(x, q):
            return np.exp(-x * self.phi(q)) * self._taylor_w(x, q)

        def cut(x, q):
            phi = self.phi(q)
            return self._residues(x, q, "w", normalize=True) + np.exp(-np.outer(x, phi)) * self._cut(x, q, "w")

        return self._split(x, q, taylor, cut)

    def w_diff(self, x, q):
        self._check_zero(x)

        def taylor(x, q):
            return self._taylor_dw(x, q) - self.phi(q) * self._taylor_w(x, q)

        def cut(x, q):
            return self._residues(x, q, "diff", drop_principal=True) + self._cut(x, q, "diff")

        return self._split(x, q, taylor, cut)

    def w_diff_tail(self, x, q):
        def taylor(x, q):
            phi = self.phi(q)
            a = self.a
            w_int = x**a * mittag_leffler(a, a + 1, q * x**a)
            return phi / q - self._taylor_w(x, q) + phi * w_int

        def cut(x, q):
            return self._residues(x, q, "tail", drop_principal=True) + self._cut(x, q, "tail")

        return self._split(x, q, taylor, cut)

    def w_int_series(self, x: float, q):
        """``int_0^x W_q = x^a E_{a,a+1}(q x^a)``."""
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        a = self.a
        return x**a * mittag_leffler(a, a + 1, q * x**a)

    def z_int_series(self, theta: float, x: float, q, tol: float = 1e-16):
        """``int_0^x exp(-theta y) W_q(y) dy`` as the incomplete-gamma series
        ``sum_n q^n theta^(-a n - a) P(a n + a, x theta)`` (``theta > 0``)."""
        if not theta > 0:
            raise DomainError("the incomplete-gamma series needs theta > 0")
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        a = self.a
        total = np.zeros(q.shape, dtype=complex)
        term_q = np.ones(q.shape, dtype=complex)
        quiet = 0
        for n in range(5000):
            coef = theta ** (-a * n - a) * regularized_lower_gamma(a * n + a, x * theta)
            term = term_q * coef
            total += term
            if np.max(np.abs(term)) <= tol * max(np.max(np.abs(total)), 1e-300):
                quiet += 1
                if quiet >= 3:
                    return total
            else:
                quiet = 0
            term_q = term_q * q
        raise DomainError("incomplete-gamma series did not converge")


class BrownianScale(ScalarScale):
    """Closed forms for ``psi = s^2 theta^2/2 + g theta``."""

    model: BrownianDrift

    def _parts(self, q):
        s2, g = self.model.sigma**2, self.model.gamma
        delta = np.sqrt(g * g + 2 * s2 * q + 0j) / s2
        return s2, g / s2, delta

    def phi(self, q):
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        if self.model.sigma == 0:
            return q / self.model.gamma
        _, a, d = self._parts(q)
        return d - a

    def w(self, x, q):
        x, q = _grid(x, q)
        if self.model.sigma == 0:
            g = self.model.gamma
            return np.exp(np.outer(x, q / g)) / g
        s2, a, d = self._parts(q)
        return (2.0 / s2) * np.exp(-np.outer(x, np.full(q.shape, a))) * x[:, None] * _sinhc(np.outer(x, d))

    def w_prime(self, x, q):
        x, q = _grid(x, q)
        if self.model.sigma == 0:
            g = self.model.gamma
            return (q / g**2)[None, :] * np.exp(np.outer(x, q / g))
        s2, a, d = self._parts(q)
        xd = np.outer(x, d)
        return (2.0 / s2) * np.exp(-a * x)[:, None] * (np.cosh(xd) - a * x[:, None] * _sinhc(xd))

    def w_norm(self, x, q):
        x, q = _grid(x, q)
        if self.model.sigma == 0:
            return np.full((len(x), len(q)), 1.0 / self.model.gamma, dtype=complex)
        s2, _, d = self._parts(q)
        xd = np.outer(x, d)
        # (1 - exp(-2 d x)) / (s2 d), smooth at d = 0
        return (2.0 / s2) * x[:, None] * np.exp(-xd) * _sinhc(xd)

    def w_diff(self, x, q):
        x, q = _grid(x, q)
        if self.model.sigma == 0:
            return np.zeros((len(x), len(q)), dtype=complex)
        s2, a, d = self._parts(q)
        return (2.0 / s2) * np.exp(-np.outer(x, a + d))

    def w_diff_tail(self, x, q):
        x, q = _grid(x, q)
        if self.model.sigma == 0:
            return np.zeros((len(x), len(q)), dtype=complex)
        s2, a, d = self._parts(q)
        return (2.0 / s2) * np.exp(-np.outer(x, a + d)) / (a + d)


def _drop(z, idx):
    # the root Phi cancels; zero its exponent so exp(Phi x) cannot overflow
    z = z.copy()
    z[np.arange(len(idx)), idx] = 0.0
    return z


class RationalScale(ScalarScale):
    """Partial fractions ``W_q(x) = sum_i exp(z_i x) / psi'(z_i)`` over the
    roots of ``psi(z) = q``; weights are computed as ``D(z_i) / P_q'(z_i)``."""

    model: CramerLundbergME

    def __init__(self, model):
        super().__init__(model)
        self._cache: dict = {}

    def roots(self, q):
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        key = q.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        zs, ws, idx = [], [], []
        phis = self.model.phi(q) if np.all((q.real > 0) | ((q.imag == 0) & (q.real >= 0))) else None
        for j, qj in enumerate(q):
            P, D = self.model.numerator(qj)
            try:
                sp = linalg.roots(P, require_simple=True)
            except MultipleRoots as exc:
                raise ConfluentRoots(f"psi(z) = {qj} has repeated roots") from exc
            z = sp.eigenvalues
            w = np.polyval(D, z) / np.polyval(np.polyder(P), z)
            zs.append(z)
            ws.append(w)
            idx.append(int(np.argmin(np.abs(z - phis[j]))) if phis is not None else int(np.argmax(z.real)))
        out = (np.array(zs), np.array(ws), np.array(idx))
        if len(self._cache) > 64:
            self._cache.clear()
        self._cache[key] = out
        return out

    def phi(self, q):
        z, _, idx = self.roots(q)
        return z[np.arange(len(idx)), idx]

    def w(self, x, q):
        x, q = _grid(x, q)
        z, w, _ = self.roots(q)
        return np.einsum("qi,xqi->xq", w, np.exp(x[:, None, None] * z[None]))

    def w_prime(self, x, q):
        x, q = _grid(x, q)
        z, w, _ = self.roots(q)
        return np.einsum("qi,xqi->xq", w * z, np.exp(x[:, None, None] * z[None]))

    def w_norm(self, x, q):
        x, q = _grid(x, q)
        z, w, idx = self.roots(q)
        phi = z[np.arange(len(idx)), idx]
        return np.einsum("qi,xqi->xq", w, np.exp(x[:, None, None] * (z - phi[:, None])[None]))

    def w_diff(self, x, q):
        x, q = _grid(x, q)
        z, w, idx = self.roots(q)
        phi = z[np.arange(len(idx)), idx]
        coef = w * (z - phi[:, None])
        coef[np.arange(len(idx)), idx] = 0.0
        return np.einsum("qi,xqi->xq", coef, np.exp(x[:, None, None] * _drop(z, idx)[None]))

    def w_diff_tail(self, x, q):
        x, q = _grid(x, q)
        z, w, idx = self.roots(q)
        phi = z[np.arange(len(idx)), idx]
        coef = -w * (z - phi[:, None]) / np.where(z == 0, 1.0, z)
        coef[np.arange(len(idx)), idx] = 0.0
        return np.einsum("qi,xqi->xq", coef, np.exp(x[:, None, None] * _drop(z, idx)[None]))

    def z_int_exact(self, theta, x: float, q):
        """Closed form ``sum_i w_i (exp((z_i - theta) x) - 1) / (z_i - theta)``."""
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        theta = np.broadcast_to(np.asarray(theta, dtype=complex), q.shape)
        z, w, _ = self.roots(q)
        d = z - theta[:, None]
        small = np.abs(d * x) < 1e-8
        safe = np.where(small, 1.0, d)
        val = np.where(small, x + 0.5 * d * x * x, np.expm1(safe * x) / safe)
        return np.sum(w * val, axis=1)


def scalar_scale(model: LevyModel) -> ScalarScale:
    if isinstance(model, Stable):
        return StableScale(model)
    if isinstance(model, BrownianDrift):
        return BrownianScale(model)
    if isinstance(model, CramerLundbergME):
        return RationalScale(model)
    raise DomainError(f"unsupported model {model!r}")


# ---------------------------------------------------------------------------
# Matrix scale functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ZValue:
    theta: complex
    x: float
    value: np.ndarray


class MatrixScale:
    """Scale functions of a matrix argument ``Q`` (``W_Q``, ``Z_Q``)."""

    def __init__(self, model: LevyModel, Q, cal: linalg.Calculus | None = None, domain: str = linalg.ENTIRE):
        self.model = model
        self.Q = np.asarray(Q, dtype=float)
        self.scalar = scalar_scale(model)
        if cal is None:
            sp = linalg.spectrum(self.Q)
            probes = [lambda z: self.scalar.w(np.array([0.7]), z)[0], lambda z: self.scalar.w(np.array([2.0]), z)[0]]
            cal = linalg.calculus_for(self.Q, domain, sp, probes)
        self.cal = cal
        self.points = cal.points
        self.c = model.w0

    @property
    def p(self) -> int:
        return self.Q.shape[0]

    def lift(self, values) -> np.ndarray:
        return self.cal.real(values)

    def w(self, x: float) -> np.ndarray:
        """``W_Q(x)``; the zero matrix for ``x < 0``."""
        if x < 0:
            return np.zeros((self.p, self.p))
        return self.lift(self.scalar.w([x], self.points)[0])

    def w_prime(self, x: float) -> np.ndarray:
        return self.lift(self.scalar.w_prime([x], self.points)[0])

    def w_int(self, x: float) -> np.ndarray:
        return self.lift(self.scalar.w_int(x, self.points))

    def z_int(self, theta, x: float) -> np.ndarray:
        return self.lift(self.scalar.z_int(theta, x, self.points))

    def z(self, theta, x: float) -> ZValue:
        """``Z_Q(theta, x) = exp(theta x) (I - (psi(theta) I - Q) int_0^x exp(-theta y) W_Q(y) dy)``."""
        if x < 0:
            raise DomainError("Z needs x >= 0")
        p = self.p
        if x == 0:
            return ZValue(complex(theta), 0.0, np.eye(p))
        psi = complex(self.model.psi(theta)) if theta != 0 else 0.0
        integral = self.scalar.z_int(theta, x, self.points)
        vals = np.exp(theta * x) * (1.0 - (psi - self.points) * integral)
        return ZValue(complex(theta), float(x), self.lift(vals))


class ScaleEval(MatrixScale):
    """Scale functions of ``-T`` for a model and an ME horizon, with cached ``Phi(-T)``."""

    def __init__(self, model: LevyModel, horizon: MERep):
        self.horizon = horizon
        sp = linalg.Spectrum(-horizon.spectrum.eigenvalues, horizon.spectrum.separation, None)
        scalar = scalar_scale(model)
        probes = [model.phi, lambda z: scalar.w(np.array([1.0]), z)[0]]
        cal = linalg.calculus_for(-horizon.T, linalg.RIGHT_HALF_PLANE, sp, probes)
        super().__init__(model, -horizon.T, cal)
        self.scalar = scalar
        self.phi_points = self.scalar.phi(self.points)
        self.phi = models.phi_matrix(model, horizon, cal)

    @property
    def Phi(self) -> np.ndarray:
        return self.phi.value

    def exp_phi(self, x: float) -> np.ndarray:
        """``exp(-Phi(-T) x)``."""
        return self.lift(np.exp(-self.phi_points * x))

    def w_norm(self, x: float) -> np.ndarray:
        """``exp(-Phi(-T) x) W_{-T}(x)``."""
        return self.lift(self.scalar.w_norm([x], self.points)[0])

    def w_diff(self, x: float) -> np.ndarray:
        """``W'_{-T}(x) - Phi(-T) W_{-T}(x)``."""
        return self.lift(self.scalar.w_diff([x], self.points)[0])

    @cached_property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.horizon.spectrum.eigenvalues)))


def w_scalar(ev: MatrixScale, q, x: float) -> complex:
    return complex(ev.scalar.w([x], [q])[0, 0])


def w_matrix(ev: MatrixScale, x: float) -> np.ndarray:
    return ev.w(x)


def w_prime_matrix(ev: MatrixScale, x: float) -> np.ndarray:
    return ev.w_prime(x)


def z_matrix(ev: MatrixScale, theta, x: float) -> ZValue:
    return ev.z(theta, x)


def w_matrix_series_oracle(ev: MatrixScale, x: float, h: float = 1e-4, tol: float = 1e-12) -> np.ndarray:
    """``sum_k Q^k W_0^{*(k+1)}(x)`` with trapezoid convolutions on ``[0, x]``."""
    if h > 1e-3:
        raise DomainError("grid step must not exceed 1e-3")
    if x == 0:
        return ev.c * np.eye(ev.p)
    n = max(int(math.ceil(x / h)), 2)
    step = x / n
    y = np.linspace(0.0, x, n + 1)
    w0 = ev.scalar.w(y, [0.0])[:, 0].real
    if isinstance(ev.model, Stable):
        w0[0] = 0.0

    def conv(f, g):
        full = fftconvolve(f, g)[: n + 1]
        return step * (full - 0.5 * (f[0] * g + g[0] * f))

    Q = ev.Q
    total = w0[-1] * np.eye(ev.p)
    power = np.eye(ev.p)
    cur = w0
    for k in range(1, 2000):
        cur = conv(cur, w0)
        power = power @ Q
        term = power * cur[-1]
        total = total + term
        if linalg.inf_norm(term) < tol and linalg.inf_norm(power) * np.max(np.abs(cur)) < tol:
            return total
    raise DomainError("convolution series did not converge")
