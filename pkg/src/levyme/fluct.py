"""Fluctuation identities at a matrix-exponential horizon.

Every identity has the form ``alpha F(-T) v`` where ``F`` is built from
``Phi``, ``W`` and ``Z``.  Since all of these are functions of the same
matrix, products and inverses are formed pointwise on the calculus points of
``-T`` and lifted once, which avoids explicit matrix inversion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _quad, linalg, medist
from .errors import (
    BetaDomain,
    DomainError,
    DomainViolation,
    EigenvalueCollision,
    ProbabilityOutOfRange,
    SingularAtZero,
    SingularScaleMatrix,
)
from .scale import MatrixScale, ScaleEval

CLAMP_SILENT = 1e-9
CLAMP_LIMIT = 1e-6


@dataclass(frozen=True)
class ExitQuery:
    """Barrier parameters; ``validate`` enforces the domain constraints."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0
    a: float | None = None
    b: float | None = None

    def validate(self) -> "ExitQuery":
        if self.x < 0 or self.y < 0 or self.theta < 0:
            raise DomainError("x, y and theta must be nonnegative")
        for v in (self.a, self.b):
            if v is not None and v < 0:
                raise DomainError("barrier levels must be nonnegative")
        return self


def clamp_probability(value: float, what: str = "probability", upper: float = 1.0) -> float:
    """Clamp to ``[0, upper]``: silently within 1e-9, with a warning within
    1e-6, and raise :class:`ProbabilityOutOfRange` beyond that."""
    v = float(value)
    excess = max(-v, v - upper, 0.0)
    if excess > CLAMP_LIMIT:
        raise ProbabilityOutOfRange(f"{what} = {v!r} lies outside [0, {upper}]")
    if excess > CLAMP_SILENT:
        warnings.warn(f"{what} = {v!r} clamped to [0, {upper}]", RuntimeWarning, stacklevel=3)
    return min(max(v, 0.0), upper)


def _row(ev: ScaleEval, values, vec) -> float:
    """``alpha f(-T) vec`` for pointwise values ``f``."""
    return float(ev.horizon.alpha @ ev.lift(values) @ vec)


def _w(ev: MatrixScale, x: float):
    if x < 0:
        return np.zeros(len(ev.points), dtype=complex)
    return ev.scalar.w([x], ev.points)[0]


def _w_norm(ev: ScaleEval, x: float):
    return ev.scalar.w_norm([x], ev.points)[0]


def _z(ev: MatrixScale, theta: float, x: float):
    """Pointwise ``Z_q(theta, x)``."""
    q = ev.points
    if x == 0:
        return np.ones(len(q), dtype=complex)
    psi = complex(ev.model.psi(theta)) if theta != 0 else 0.0
    integral = ev.scalar.z_int(theta, x, q)
    return np.exp(theta * x) * (1.0 - (psi - q) * integral)


def _nonzero(vals, what: str):
    if np.any(np.abs(vals) <= 1e-300) or not np.all(np.isfinite(vals)):
        raise SingularScaleMatrix(f"{what} is singular")
    return vals


# ---------------------------------------------------------------------------
# First passage and exit problems
# ---------------------------------------------------------------------------


def p_up_before_horizon(ev: ScaleEval, x: float) -> float:
    """``P(tau_x^+ < T) = alpha exp(-Phi(-T) x) l``."""
    if x < 0:
        raise DomainError("x must be nonnegative")
    return clamp_probability(_row(ev, np.exp(-ev.phi_points * x), ev.horizon.l), upper=ev.horizon.defect)


def p_two_sided_up(ev: ScaleEval, x: float, y: float) -> float:
    """``P(tau_x^+ < tau_{-y}^- and T) = alpha W(y) W(x+y)^{-1} l``."""
    if x < 0 or y < 0 or x + y <= 0:
        raise DomainError("need x, y >= 0 and x + y > 0")
    if y == 0 and ev.c == 0:
        return 0.0
    # exp(-Phi x) Wn(y) / Wn(x + y) with the normalized scale function
    ratio = np.exp(-ev.phi_points * x) * _w_norm(ev, y) / _nonzero(_w_norm(ev, x + y), "W(x+y)")
    return clamp_probability(_row(ev, ratio, ev.horizon.l), upper=ev.horizon.defect)


def reflected_passage(ev: ScaleEval, x: float, a: float, theta: float = 0.0) -> float:
    """``E_x(exp(-theta R_{eta_a}); eta_a < T) = alpha Z(theta, x) Z(theta, a)^{-1} l``
    for the process reflected at its infimum."""
    if not (0 <= x <= a) or theta < 0 or a <= 0:
        raise DomainError("need 0 <= x <= a, a > 0 and theta >= 0")
    if x == a:
        return clamp_probability(ev.horizon.defect)
    ratio = _z(ev, theta, x) / _nonzero(_z(ev, theta, a), "Z(theta, a)")
    return clamp_probability(_row(ev, ratio, ev.horizon.l))


def down_exit_two_sided(ev: ScaleEval, x: float, a: float, theta: float = 0.0) -> float:
    """``E_x(exp(-theta X_{tau_0^-}) ... ; tau_0^- < tau_a^+ and T)`` as
    ``alpha (Z(theta,x) - W(x) Z(theta,a) W(a)^{-1}) l``."""
    if not (0 <= x <= a) or theta < 0 or a <= 0:
        raise DomainError("need 0 <= x <= a, a > 0 and theta >= 0")
    vals = _z(ev, theta, x) - _w(ev, x) * _z(ev, theta, a) / _nonzero(_w(ev, a), "W(a)")
    return clamp_probability(_row(ev, vals, ev.horizon.l))


def _one_sided_values(ev: ScaleEval, x: float, theta: float):
    q = ev.points
    if theta == 0:
        # Z(0,x) - (q/Phi) W(x) = (q/Phi) int_x^inf (W' - Phi W); the left side
        # cancels catastrophically for large x
        return q * ev.scalar.w_diff_tail([x], q)[0] / ev.phi_points
    psi = complex(ev.model.psi(theta)) if theta != 0 else 0.0
    gap = theta - ev.phi_points
    if np.any(np.abs(gap) <= 1e-8 * max(1.0, theta)):
        raise EigenvalueCollision("theta coincides with an eigenvalue of Phi(-T)")
    return _z(ev, theta, x) - _w(ev, x) * (psi - q) / gap


def down_exit_one_sided(ev: ScaleEval, x: float, theta: float = 0.0, limiting: bool = True) -> float:
    """``alpha (Z(theta,x) - W(x) (psi(theta) I + T)(theta I - Phi)^{-1}) l``.

    When ``theta`` is an eigenvalue of ``Phi(-T)`` the value is taken in the
    limiting sense (symmetric evaluation at ``theta (1 +- 1e-6)``) if
    ``limiting``; otherwise :class:`EigenvalueCollision` is raised.
    """
    if x < 0 or theta < 0:
        raise DomainError("need x >= 0 and theta >= 0")
    try:
        vals = _one_sided_values(ev, x, theta)
    except EigenvalueCollision:
        if not limiting:
            raise
        eps = 1e-6 * max(theta, 1.0)
        vals = 0.5 * (_one_sided_values(ev, x, theta + eps) + _one_sided_values(ev, x, theta - eps))
    return clamp_probability(_row(ev, vals, ev.horizon.l))


def two_barrier_density(ev: ScaleEval, a: float, b: float, x: float) -> float:
    """Density at ``x`` of ``X_T`` on ``{T < tau_{-a}^- and tau_b^+}``:
    ``alpha (W(a) W(a+b)^{-1} W(b-x) - W(-x)) t``."""
    if not (a > 0 and b > 0 and -a < x < b):
        raise DomainError("need a, b > 0 and -a < x < b")
    vals = _w(ev, a) * _w(ev, b - x) / _nonzero(_w(ev, a + b), "W(a+b)") - _w(ev, -x)
    v = _row(ev, vals, ev.horizon.t)
    if v < -CLAMP_SILENT * max(1.0, abs(v)):
        raise ProbabilityOutOfRange(f"negative density {v!r}")
    return max(v, 0.0)


# ---------------------------------------------------------------------------
# Wiener-Hopf factorization
# ---------------------------------------------------------------------------


def wh_sup_factor(ev: ScaleEval, x: float) -> np.ndarray:
    """Row vector ``alpha exp(-Phi(-T) x)``; ``P(sup > x) = wh_sup_factor(x) . l``."""
    if x < 0:
        raise DomainError("x must be nonnegative")
    return ev.horizon.alpha @ ev.exp_phi(x)


def _inf_cdf_points(ev: ScaleEval, y: float):
    # Phi^{-1} W(y) - int_0^y W  =  1/q - Phi^{-1} int_y^inf (W' - Phi W)
    tail = ev.scalar.w_diff_tail([y], ev.points)[0]
    return 1.0 / ev.points - tail / ev.phi_points


def wh_inf_factor_cdf(ev: ScaleEval, y: float) -> np.ndarray:
    """Column vector ``(Phi^{-1} W(y) - int_0^y W) t``.

    ``P(sup > x, sup - X_T <= y) = wh_sup_factor(x) . wh_inf_factor_cdf(y)``.
    """
    if y < 0:
        raise DomainError("y must be nonnegative")
    return ev.lift(_inf_cdf_points(ev, y)) @ ev.horizon.t


def wh_inf_cdf(ev: ScaleEval, y: float) -> float:
    """``P(-inf X_T <= y)`` (equal in law to ``sup - X_T``)."""
    return clamp_probability(float(ev.horizon.alpha @ wh_inf_factor_cdf(ev, y)), upper=ev.horizon.defect)


def wh_inf_density(ev: ScaleEval, y: float) -> float:
    """Density of ``-inf X_T`` on ``y > 0``: ``alpha Phi^{-1} (W'(y) - Phi W(y)) t``."""
    if y <= 0:
        raise DomainError("density is defined for y > 0 (the atom at 0 is reported separately)")
    vals = ev.scalar.w_diff([y], ev.points)[0] / ev.phi_points
    return _row(ev, vals, ev.horizon.t)


def wh_inf_atom(ev: ScaleEval) -> float:
    """``P(inf X_T = 0) = alpha Phi^{-1} c t``."""
    return _row(ev, ev.c / ev.phi_points, ev.horizon.t)


def wh_joint_density(ev: ScaleEval, x: float, y: float) -> tuple[float, float]:
    """Joint law of ``(sup, sup - X_T)`` at ``(x, y)``.

    Returns the density ``alpha exp(-Phi x) (W'(y) - Phi W(y)) t`` and the
    density in ``x`` of the atom at ``y = 0``, ``alpha exp(-Phi x) c t``.
    """
    if x < 0 or y < 0:
        raise DomainError("need x, y >= 0")
    e = np.exp(-ev.phi_points * x)
    atom = _row(ev, e * ev.c, ev.horizon.t)
    if y == 0 and ev.model.family == "stable" and getattr(ev.model, "alpha", 2.0) < 2:
        raise SingularAtZero("the joint density is unbounded at y = 0")
    dens = _row(ev, e * ev.scalar.w_diff([y], ev.points)[0], ev.horizon.t)
    return dens, atom


def wh_joint_cdf_rectangle(ev: ScaleEval, x0: float, x1: float, y0: float, y1: float) -> float:
    """``P(sup in (x0, x1], sup - X_T in [y0, y1])`` from the product of the factors."""
    alpha_e = wh_sup_factor(ev, x0) - wh_sup_factor(ev, x1)
    lo = wh_inf_factor_cdf(ev, y0) if y0 > 0 else np.zeros(ev.p)
    return float(alpha_e @ (wh_inf_factor_cdf(ev, y1) - lo))


def wh_bivariate_transform(ev: ScaleEval, u: float, v: float) -> float:
    """``E exp(-u sup - v (sup - X_T)) = alpha (uI + Phi)^{-1} (vI - Phi) (psi(v) I + T)^{-1} t``."""
    if u < 0 or v < 0:
        raise DomainError("need u, v >= 0")
    psi_v = complex(ev.model.psi(v)) if v != 0 else 0.0
    gap = psi_v - ev.points
    if np.any(np.abs(gap) <= 1e-12 * max(1.0, abs(psi_v))):
        raise EigenvalueCollision("psi(v) is an eigenvalue of -T")
    vals = (v - ev.phi_points) / ((u + ev.phi_points) * gap)
    return _row(ev, vals, ev.horizon.t)


# ---------------------------------------------------------------------------
# Option pricing and observation-based ruin
# ---------------------------------------------------------------------------


def option_price(ev: ScaleEval, u: float, beta: float = 0.0) -> float:
    """``e^u E((e^{-u} - e^{inf X_T})^+ e^{beta (X_T - inf X_T)})``.

    Evaluated as ``alpha (Phi (Phi - beta)^{-1} Z(0,u) + (-T)(Phi - I)
    (Phi - beta)^{-1} (T + psi(1) I)^{-1} Z(1,u)) l``.
    """
    if u < 0:
        raise DomainError("u must be nonnegative")
    model = ev.model
    q = ev.points
    phi0 = complex(model.phi(0.0)).real
    if beta > phi0 and np.any(ev.horizon.spectrum.eigenvalues.real * -1 <= complex(model.psi(beta)).real):
        raise BetaDomain("beta exceeds Phi(0) and some eigenvalue of -T is below psi(beta)")
    psi1 = complex(model.psi(1.0))
    phi = ev.phi_points
    gap = phi - beta
    if np.any(np.abs(gap) <= 1e-12 * max(1.0, abs(beta))):
        raise EigenvalueCollision("beta is an eigenvalue of Phi(-T)")
    # (Phi(q) - 1) / (psi(1) - q) has a removable singularity at q = psi(1)
    # whenever Phi(psi(1)) = 1; its limit there is -1 / psi'(1)
    near = np.abs(psi1 - q) <= 1e-7 * max(1.0, abs(psi1))
    if np.any(near & (np.abs(phi - 1.0) > 1e-6)):
        raise EigenvalueCollision("psi(1) is an eigenvalue of -T")
    ratio = np.where(near, -1.0 / complex(model.psi_prime(1.0)), (phi - 1.0) / np.where(near, 1.0, psi1 - q))
    vals = phi / gap * _z(ev, 0.0, u) + q * ratio / gap * _z(ev, 1.0, u)
    v = _row(ev, vals, ev.horizon.l)
    if v < -CLAMP_LIMIT:
        raise ProbabilityOutOfRange(f"negative option value {v!r}")
    return max(v, 0.0)


def ph_observation_ruin(ev: ScaleEval, x: float) -> float:
    """``P(tau_x^+ < hat tau_0)`` for ruin checked at PH inter-observation epochs:
    ``alpha exp(-Phi x) (I - int_0^x W_{-T-t alpha}(y) t alpha exp(-Phi y) dy)^{-1} 1``."""
    h = ev.horizon
    if x < 0:
        raise DomainError("x must be nonnegative")
    if not medist.is_ph(h) or abs(h.alpha.sum() - 1.0) > 1e-9:
        raise DomainViolation("observation-based ruin needs a PH inter-observation law")
    p = h.p
    ones = np.ones(p)
    if x == 0:
        return clamp_probability(float(h.alpha @ ones))
    aug = _augmented_scale(ev)
    ta = np.outer(h.t, h.alpha)

    def integrand(y):
        Wv = aug.scalar.w(y, aug.points)
        Ev = np.exp(-np.outer(y, ev.phi_points))
        Wm = np.tensordot(Wv, aug.cal.weights, axes=(1, 0))
        Em = np.tensordot(Ev, ev.cal.weights, axes=(1, 0))
        return Wm @ ta @ Em

    J = linalg.realify(_quad.smooth_power(integrand, 0.0, float(x), tol=1e-11), 1e-8, "observation integral")
    rhs = linalg.lu_solve(np.eye(p) - J, ones)
    return clamp_probability(float(h.alpha @ ev.exp_phi(x) @ rhs))


def _augmented_scale(ev: ScaleEval) -> MatrixScale:
    cached = getattr(ev, "_aug_scale", None)
    if cached is None:
        h = ev.horizon
        Q = -(h.T + np.outer(h.t, h.alpha))
        cached = MatrixScale(ev.model, Q, domain=linalg.ENTIRE)
        ev._aug_scale = cached
    return cached
