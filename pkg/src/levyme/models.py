"""Spectrally negative Levy models: Laplace exponent, its inverse, and the
matrix first-passage exponent ``Phi(-T)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import BranchCut, DomainError, LeftHalfPlane, NoConvergence, ResidualTooLarge
from .medist import MERep


def _asc(theta):
    return np.asarray(theta, dtype=complex)


class LevyModel:
    """Common interface of the three families."""

    family: str = ""
    #: domain on which psi is analytic (a linalg domain descriptor)
    psi_domain: str = linalg.RIGHT_HALF_PLANE

    def psi(self, theta):
        raise NotImplementedError

    def psi_prime(self, theta):
        raise NotImplementedError

    @property
    def bounded_variation(self) -> bool:
        raise NotImplementedError

    @property
    def drift(self) -> float:
        """Linear drift of a bounded-variation model (``nan`` otherwise)."""
        raise NotImplementedError

    @property
    def w0(self) -> float:
        """``W_q(0)``: ``1/drift`` for bounded variation and 0 otherwise."""
        return 1.0 / self.drift if self.bounded_variation else 0.0

    # -- inverse of psi -----------------------------------------------------

    def _real_psi(self, theta):
        return self.psi(np.asarray(theta, dtype=float)).real

    @cached_property
    def _argmin(self) -> float:
        # psi is convex on [0, inf); locate its minimiser
        if self.psi_prime(np.array(1e-12)).real >= 0:
            return 0.0
        hi = 1.0
        while self.psi_prime(np.array(hi)).real < 0:
            hi *= 2.0
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.psi_prime(np.array(mid)).real < 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        return 0.5 * (lo + hi)

    def _phi_real(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        lo = np.full(q.shape, self._argmin)
        hi = np.maximum(lo, 1.0)
        for _ in range(2000):
            low = self._real_psi(hi) <= q
            if not np.any(low):
                break
            hi = np.where(low, 2.0 * hi, hi)
        else:
            raise NoConvergence("could not bracket the root of psi = q")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            above = self._real_psi(mid) > q
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
            if np.all(hi - lo <= 1e-15 * np.maximum(hi, 1e-300)):
                break
        theta = 0.5 * (lo + hi)
        for _ in range(3):
            d = self.psi_prime(theta).real
            step = np.where(np.abs(d) > 1e-300, (self._real_psi(theta) - q) / np.where(d != 0, d, 1.0), 0.0)
            cand = theta - step
            theta = np.where((cand >= lo - 1e-12) & (cand <= hi + 1e-12), cand, theta)
        return theta

    def _homotopy(self, q: np.ndarray, steps: int) -> np.ndarray:
        r = np.abs(q)
        theta = self._phi_real(r).astype(complex)
        for k in range(1, steps + 1):
            target = r + (k / steps) * (q - r)
            for _ in range(50):
                step = (self.psi(theta) - target) / self.psi_prime(theta)
                theta = theta - step
                if np.all(np.abs(step) <= 1e-15 * np.maximum(np.abs(theta), 1e-300)):
                    break
            if np.any(theta.real <= 0):
                raise LeftHalfPlane("continuation left the right half-plane")
        return theta

    def phi(self, q):
        """Vectorized right inverse of psi on the closed right half-plane.

        Real ``q >= 0`` gives the right-most real root.  Complex ``q`` with
        ``Re q > 0`` is reached by Newton continuation from ``|q|`` along a
        straight segment.
        """
        q = np.asarray(q, dtype=complex)
        shape = q.shape
        q = q.reshape(-1)
        out = np.empty(q.shape, dtype=complex)
        real = (q.imag == 0) & (q.real >= 0)
        if np.any(~real & (q.real <= 0)):
            raise DomainError("phi needs Re q > 0 or real q >= 0")
        if np.any(real):
            out[real] = self._phi_real(q[real].real)
        if np.any(~real):
            qc = q[~real]
            try:
                out[~real] = self._homotopy(qc, 16)
            except (LeftHalfPlane, ZeroDivisionError, FloatingPointError):
                out[~real] = self._homotopy(qc, 64)
        resid = np.abs(self.psi(out) - q)
        if np.any(resid > 1e-10 * np.maximum(np.abs(q), 1.0)):
            raise NoConvergence(f"psi(Phi(q)) - q residual {resid.max():.3e}")
        out = out.reshape(shape)
        return out if shape else complex(out)

    def phi_scalar(self, q) -> complex:
        return complex(self.phi(q))


@dataclass(frozen=True)
class Stable(LevyModel):
    """Strictly stable model with ``psi(theta) = theta^alpha``, ``1 < alpha <= 2``."""

    alpha: float
    family = "stable"
    psi_domain = linalg.CUT_PLANE

    def __post_init__(self):
        if not (1.0 < self.alpha <= 2.0):
            raise DomainError("stable index must lie in (1, 2]")

    def _power(self, theta, e):
        theta = _asc(theta)
        on_cut = (theta.imag == 0) & (theta.real < 0)
        if np.any(on_cut) and self.alpha != 2.0:
            raise BranchCut("psi is not analytic on the negative real axis")
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.exp(e * np.log(np.where(theta == 0, 1.0, theta)))
        return np.where(theta == 0, 0.0 if e > 0 else np.inf, val)

    def psi(self, theta):
        if self.alpha == 2.0:
            return _asc(theta) ** 2
        return self._power(theta, self.alpha)

    def psi_prime(self, theta):
        if self.alpha == 2.0:
            return 2.0 * _asc(theta)
        return self.alpha * self._power(theta, self.alpha - 1.0)

    @property
    def bounded_variation(self) -> bool:
        return False

    @property
    def drift(self) -> float:
        return math.nan


@dataclass(frozen=True)
class BrownianDrift(LevyModel):
    """``psi(theta) = sigma^2 theta^2 / 2 + gamma theta``."""

    sigma: float
    gamma: float
    family = "brownian"
    psi_domain = linalg.ENTIRE

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError("sigma must be nonnegative")
        if self.sigma == 0 and not self.gamma > 0:
            raise DomainError("a model without volatility needs a positive drift")

    def psi(self, theta):
        theta = _asc(theta)
        return 0.5 * self.sigma**2 * theta**2 + self.gamma * theta

    def psi_prime(self, theta):
        return self.sigma**2 * _asc(theta) + self.gamma

    @property
    def bounded_variation(self) -> bool:
        return self.sigma == 0

    @property
    def drift(self) -> float:
        return self.gamma if self.sigma == 0 else math.nan


@dataclass(frozen=True)
class CramerLundbergME(LevyModel):
    """Premium rate ``c``, Poisson(``lam``) claims with ME law ``jump``,
    optional Brownian perturbation ``sigma``.

    ``psi(theta) = sigma^2 theta^2/2 + c theta - lam (1 - E exp(-theta J))``.
    """

    c: float
    lam: float
    jump: MERep
    sigma: float = 0.0
    family = "cl"
    psi_domain = linalg.RIGHT_HALF_PLANE
    _poly: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.lam < 0 or self.sigma < 0:
            raise DomainError("intensity and volatility must be nonnegative")
        if self.sigma == 0 and not self.c > 0:
            raise DomainError("a model without volatility needs a positive premium rate")
        if self.jump.defect < 1 - 1e-9:
            raise DomainError("jump law must be non-defective")
        S = self.jump.T
        D, adj = linalg.char_poly(S, adjugate=True)
        D = np.real(D)
        # N(z) = alpha adj(zI - S) s, degree p-1
        N = np.array([self.jump.alpha @ B @ self.jump.t for B in adj]).real
        object.__setattr__(self, "_poly", (D, N))

    def jump_laplace(self, theta):
        D, N = self._poly
        theta = _asc(theta)
        return np.polyval(N, theta) / np.polyval(D, theta)

    def psi(self, theta):
        theta = _asc(theta)
        return (0.5 * self.sigma**2 * theta**2 + self.c * theta
                - self.lam * (1.0 - self.jump_laplace(theta)))

    def psi_prime(self, theta):
        D, N = self._poly
        theta = _asc(theta)
        d, dd = np.polyval(D, theta), np.polyval(np.polyder(D), theta)
        n, dn = np.polyval(N, theta), np.polyval(np.polyder(N), theta)
        return self.sigma**2 * theta + self.c + self.lam * (dn * d - n * dd) / d**2

    def numerator(self, q: complex) -> tuple[np.ndarray, np.ndarray]:
        """Polynomials ``(P_q, D)`` with ``psi(z) - q = P_q(z) / D(z)``."""
        D, N = self._poly
        base = np.array([0.5 * self.sigma**2, self.c, -self.lam - q], dtype=complex)
        if self.lam == 0:
            D = np.array([1.0])
            P = base
        else:
            P = np.convolve(base, D)
            P[len(P) - len(N):] += self.lam * N
        if self.sigma == 0:
            P = P[1:]
        return P, D.astype(complex)

    @property
    def bounded_variation(self) -> bool:
        return self.sigma == 0

    @property
    def drift(self) -> float:
        return self.c if self.sigma == 0 else math.nan


# ---------------------------------------------------------------------------
# Matrix exponent
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PhiMatrix:
    value: np.ndarray
    horizon: MERep
    residual: float
    eigenvalues: np.ndarray

    @property
    def generator(self) -> np.ndarray:
        """``-Phi(-T)``, the generator of the phase at first passage."""
        return -self.value

    def sub_intensity_defect(self) -> tuple[float, float]:
        """Most negative off-diagonal of ``-Phi`` and largest row sum."""
        G = self.generator
        off = G - np.diag(np.diag(G))
        p = G.shape[0]
        min_off = float(np.min(off + np.diag(np.full(p, np.inf)))) if p > 1 else 0.0
        return min_off, float(np.max(G.sum(axis=1)))

    def is_sub_intensity(self, tol: float = 1e-9) -> bool:
        min_off, max_row = self.sub_intensity_defect()
        return min_off >= -tol and max_row <= tol


def horizon_calculus(horizon: MERep, probes=()) -> linalg.Calculus:
    """Functional calculus of ``-T`` on the right half-plane."""
    sp = linalg.Spectrum(-horizon.spectrum.eigenvalues, horizon.spectrum.separation, None)
    return linalg.calculus_for(-horizon.T, linalg.RIGHT_HALF_PLANE, sp, probes)


def phi_matrix(model: LevyModel, horizon: MERep, cal: linalg.Calculus | None = None) -> PhiMatrix:
    """``Phi(-T)``: per-eigenvalue inverse of psi assembled by the functional calculus."""
    if cal is None:
        cal = horizon_calculus(horizon, probes=[model.phi])
    vals = model.phi(cal.points)
    Phi = cal.real(vals, tol=1e-8)
    T = horizon.T
    residual = _psi_residual(model, Phi, T)
    if residual > 1e-7 * max(1.0, linalg.inf_norm(T)):
        raise ResidualTooLarge(f"||psi(Phi) + T|| = {residual:.3e}")
    eigs = model.phi(-horizon.spectrum.eigenvalues)
    return PhiMatrix(Phi, horizon, residual, eigs)


def _psi_residual(model: LevyModel, Phi: np.ndarray, T: np.ndarray) -> float:
    sp = linalg.spectrum(Phi)
    cal = linalg.calculus_for(Phi, model.psi_domain, sp, probes=[model.psi])
    return linalg.inf_norm(cal.apply(model.psi) + T)


def psi_matrix(model: LevyModel, M) -> np.ndarray:
    """``psi(M)`` for a matrix whose spectrum lies in psi's domain."""
    M = np.asarray(M, dtype=float)
    cal = linalg.calculus_for(M, model.psi_domain, linalg.spectrum(M), probes=[model.psi])
    return cal.real(model.psi(cal.points))
