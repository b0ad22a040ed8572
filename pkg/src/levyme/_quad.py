"""Adaptive Gauss-Legendre quadrature for vector- and matrix-valued integrands."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import QuadratureFailure

_ORDER = 15
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


def _panel(f, a: float, b: float):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x = mid + half * _NODES
    vals = np.asarray(f(x))
    return half * np.tensordot(_WEIGHTS, vals, axes=(0, 0))


def _size(v) -> float:
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def integrate(f: Callable, a: float, b: float, tol: float = 1e-10, max_panels: int = 20_000):
    """Integrate ``f`` over ``[a, b]``.

    ``f`` receives a 1-D array of abscissae and returns an array whose first
    axis runs over them.  Panels are bisected until the difference between
    one 15-point rule and two half-panel rules is below ``tol`` times
    ``max(1, |integral|)``, apportioned by panel length.
    """
    if b == a:
        return _panel(f, a, a + 1.0) * 0.0
    if b < a:
        return -integrate(f, b, a, tol, max_panels)
    length = b - a
    whole = _panel(f, a, b)
    stack = [(a, b, whole)]
    total = None
    accepted = 0
    scale = max(1.0, _size(whole))
    while stack:
        lo, hi, est = stack.pop()
        m = 0.5 * (lo + hi)
        left, right = _panel(f, lo, m), _panel(f, m, hi)
        refined = left + right
        err = _size(refined - est)
        if err <= tol * scale * (hi - lo) / length or (hi - lo) <= 1e-14 * max(1.0, abs(m)):
            total = refined if total is None else total + refined
            accepted += 1
            scale = max(scale, _size(total))
            continue
        if accepted + len(stack) > max_panels:
            raise QuadratureFailure(f"adaptive quadrature exceeded {max_panels} panels on [{a}, {b}]")
        stack.append((m, hi, right))
        stack.append((lo, m, left))
    return total


def integrate_to_infinity(f: Callable, a: float = 0.0, tol: float = 1e-10, first: float = 1.0,
                          max_doublings: int = 60):
    """Integrate over ``[a, inf)`` on geometrically growing panels.

    Stops once two consecutive panels contribute less than ``tol`` times the
    running total.  Suitable for exponential and power-law tails.
    """
    lo, width = a, first
    total = integrate(f, lo, lo + width, tol)
    lo += width
    quiet = 0
    for _ in range(max_doublings):
        part = integrate(f, lo, lo + width, tol)
        total = total + part
        lo += width
        width *= 2.0
        if _size(part) <= tol * max(1.0, _size(total)):
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
    raise QuadratureFailure("tail did not decay within the panel budget")


def smooth_power(f: Callable, a: float, b: float, tol: float = 1e-10, power: int = 2):
    """Integrate over ``[a, b]`` after the substitution ``y = a + (b-a) s^power``,
    which removes algebraic endpoint singularities at ``a``."""
    if b == a:
        return integrate(f, a, a + 1.0) * 0.0

    def g(s):
        y = a + (b - a) * s**power
        jac = (b - a) * power * s ** (power - 1)
        vals = np.asarray(f(y))
        return vals * jac.reshape((-1,) + (1,) * (vals.ndim - 1))

    return integrate(g, 0.0, 1.0, tol)
