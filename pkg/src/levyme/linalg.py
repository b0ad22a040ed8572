"""Dense complex linear algebra for small matrices and functions of matrices.

Everything here is sized for p <= 20.  Eigenvalues come from the
characteristic polynomial (Faddeev-LeVerrier) and simultaneous Aberth-Ehrlich
iteration, which is adequate at that scale and keeps the module free of
LAPACK eigensolvers.

A function of a matrix is represented by a :class:`Calculus`: a list of
points ``z_j`` and coefficient matrices ``C_j`` with ``f(M) = sum_j f(z_j) C_j``.
For a simple spectrum the points are the eigenvalues and the ``C_j`` are the
Lagrange-Sylvester projectors; for the Cauchy-integral evaluator they are
quadrature nodes on a closed contour and weighted resolvents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    ContourLeavesDomain,
    DomainError,
    DomainViolation,
    ImaginaryResidue,
    MultipleRoots,
    NoConvergence,
    SingularMatrix,
)

ENTIRE = "entire"
RIGHT_HALF_PLANE = "right-half-plane"
CUT_PLANE = "cut-plane"
_DOMAINS = (ENTIRE, RIGHT_HALF_PLANE, CUT_PLANE)


def as_cmatrix(M) -> np.ndarray:
    """Validate a square finite matrix and return it as a numpy array."""
    A = np.array(M, dtype=complex if np.iscomplexobj(M) else float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DomainError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    return A


def inf_norm(A) -> float:
    A = np.atleast_2d(A)
    return float(np.max(np.sum(np.abs(A), axis=1)))


def realify(A, tol: float = 1e-9, what: str = "result") -> np.ndarray:
    """Drop the imaginary part of ``A`` after checking that it is negligible."""
    A = np.asarray(A)
    if not np.iscomplexobj(A):
        return A
    scale = max(1.0, float(np.max(np.abs(A.real))) if A.size else 1.0)
    resid = float(np.max(np.abs(A.imag))) if A.size else 0.0
    if resid > tol * scale:
        raise ImaginaryResidue(f"{what} has imaginary part {resid:.3e} (scale {scale:.3e})")
    return A.real.copy()


# ---------------------------------------------------------------------------
# Linear systems
# ---------------------------------------------------------------------------


def lu_solve(A, B) -> np.ndarray:
    """Solve ``A X = B`` by Gaussian elimination with partial pivoting.

    ``B`` may be a vector or a matrix.  Raises :class:`SingularMatrix` when a
    pivot falls below ``1e-13 * ||A||_inf``.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise DomainError("lu_solve needs a square coefficient matrix")
    vector = B.ndim == 1
    dtype = np.result_type(A.dtype, B.dtype, np.float64)
    U = A.astype(dtype, copy=True)
    X = (B.reshape(n, 1) if vector else B).astype(dtype, copy=True)
    if X.shape[0] != n:
        raise DomainError("right-hand side has the wrong number of rows")
    threshold = 1e-13 * inf_norm(A)
    if threshold == 0.0:
        raise SingularMatrix("zero matrix")
    for k in range(n):
        piv = k + int(np.argmax(np.abs(U[k:, k])))
        if abs(U[piv, k]) <= threshold:
            raise SingularMatrix(f"pivot {abs(U[piv, k]):.3e} below {threshold:.3e} at column {k}")
        if piv != k:
            U[[k, piv]] = U[[piv, k]]
            X[[k, piv]] = X[[piv, k]]
        m = U[k + 1 :, k] / U[k, k]
        U[k + 1 :, k:] -= np.outer(m, U[k, k:])
        X[k + 1 :] -= np.outer(m, X[k])
    for k in range(n - 1, -1, -1):
        X[k] = (X[k] - U[k, k + 1 :] @ X[k + 1 :]) / U[k, k]
    return X[:, 0] if vector else X


def inv(A) -> np.ndarray:
    A = np.asarray(A)
    return lu_solve(A, np.eye(A.shape[0], dtype=A.dtype))


# ---------------------------------------------------------------------------
# Characteristic polynomial and roots
# ---------------------------------------------------------------------------


def char_poly(M, adjugate: bool = False):
    """Characteristic polynomial ``det(zI - M)`` by Faddeev-LeVerrier.

    Returns the monic coefficient list, highest degree first.  With
    ``adjugate=True`` also returns matrices ``B_1..B_p`` such that
    ``adj(zI - M) = sum_k B_k z^(p-k)``.
    """
    A = as_cmatrix(M)
    n = A.shape[0]
    dtype = A.dtype
    coeffs = np.zeros(n + 1, dtype=dtype)
    coeffs[0] = 1.0
    I = np.eye(n, dtype=dtype)
    Bk = np.zeros_like(A)
    adj = []
    for k in range(1, n + 1):
        Bk = A @ Bk + coeffs[k - 1] * I
        adj.append(Bk)
        coeffs[k] = -np.trace(A @ Bk) / k
    if adjugate:
        return coeffs, adj
    return coeffs


def polyval_deriv(coeffs, z):
    """Horner evaluation of a polynomial and its derivative."""
    z = np.asarray(z, dtype=complex)
    p = np.full_like(z, coeffs[0], dtype=complex)
    dp = np.zeros_like(z)
    for a in coeffs[1:]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a matrix, counted with multiplicity."""

    eigenvalues: np.ndarray
    separation: float
    source: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def simple(self) -> bool:
        return self.separation > simple_threshold(self.eigenvalues)

    def __len__(self) -> int:
        return len(self.eigenvalues)


CLUSTER_TOL = 1e-4


def well_separated(spec: Spectrum) -> bool:
    """Separation above ``CLUSTER_TOL * max(1, max|lambda|)``."""
    if len(spec) < 2:
        return True
    return spec.separation > CLUSTER_TOL * max(1.0, float(np.max(np.abs(spec.eigenvalues))))


def simple_threshold(eigs) -> float:
    return 1e-7 * max(1.0, float(np.max(np.abs(eigs)))) if len(eigs) else 0.0


def _separation(z: np.ndarray) -> float:
    if len(z) < 2:
        return math.inf
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices(len(z))] = np.inf
    return float(d.min())


def _pair_conjugates(z: np.ndarray) -> np.ndarray:
    # exact conjugate symmetry for real polynomials
    z = z.copy()
    scale = max(1.0, float(np.max(np.abs(z))))
    near_real = np.abs(z.imag) <= 1e-12 * scale
    z[near_real] = z[near_real].real
    upper = [i for i in range(len(z)) if z[i].imag > 0 and not near_real[i]]
    lower = [i for i in range(len(z)) if z[i].imag < 0 and not near_real[i]]
    if len(upper) != len(lower):
        return z
    for i in upper:
        j = min(lower, key=lambda k: abs(z[k] - np.conj(z[i])))
        lower.remove(j)
        m = 0.5 * (z[i] + np.conj(z[j]))
        z[i], z[j] = m, np.conj(m)
    return z


def roots(poly: Sequence[complex], *, require_simple: bool = True, max_iter: int = 200) -> Spectrum:
    """All complex roots of a polynomial by Aberth-Ehrlich iteration.

    Raises :class:`MultipleRoots` when ``require_simple`` and two roots are
    closer than ``1e-7 * max|root|``; :class:`NoConvergence` when the residual
    test fails after ``max_iter`` sweeps.
    """
    a = np.asarray(poly, dtype=complex)
    nz = np.flatnonzero(a)
    if len(nz) == 0:
        raise DomainError("zero polynomial")
    a = a[nz[0] :] / a[nz[0]]
    n = len(a) - 1
    if n < 1:
        raise DomainError("polynomial of degree 0 has no roots")
    real_poly = bool(np.all(np.asarray(poly).imag == 0)) if np.iscomplexobj(poly) else True
    if n == 1:
        z = np.array([-a[1]])
    else:
        center = -a[1] / n
        # shifted-polynomial size gives the typical root distance from the center
        pc, _ = polyval_deriv(a, center)
        radius = abs(complex(pc)) ** (1.0 / n)
        bound = 1.0 + float(np.max(np.abs(a[1:])))
        if not (radius > 0) or not np.isfinite(radius):
            radius = min(1.0, bound)
        angles = 2.0 * np.pi * np.arange(n) / n + 0.4
        z = center + radius * np.exp(1j * angles)
        for _ in range(max_iter):
            p, dp = polyval_deriv(a, z)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(dp != 0, p / dp, p)
                diff = z[:, None] - z[None, :]
                np.fill_diagonal(diff, 1.0)
                s = np.sum(1.0 / diff, axis=1) - 1.0
                w = ratio / (1.0 - ratio * s)
            w = np.where(np.isfinite(w), w, 0.0)
            z = z - w
            if np.all(np.abs(w) <= 4 * np.finfo(float).eps * np.maximum(np.abs(z), 1e-300)):
                break
        if require_simple:
            for _ in range(2):
                p, dp = polyval_deriv(a, z)
                with np.errstate(divide="ignore", invalid="ignore"):
                    step = np.where(dp != 0, p / dp, 0.0)
                z = z - np.where(np.isfinite(step), step, 0.0)
    if real_poly:
        z = _pair_conjugates(z)
    p, _ = polyval_deriv(a, z)
    scale = np.zeros(len(z))
    for k, ak in enumerate(a):
        scale += abs(ak) * np.abs(z) ** (n - k)
    tol = 1e-9 if require_simple else 1e-6
    if np.any(np.abs(p) > tol * np.maximum(scale, 1e-300)):
        raise NoConvergence("Aberth iteration did not converge (near-multiple roots?)")
    z = z[np.lexsort((z.imag, z.real))]
    sep = _separation(z)
    if require_simple and n > 1 and sep <= simple_threshold(z):
        raise MultipleRoots(f"root separation {sep:.3e} is below the simple-root threshold")
    return Spectrum(z, sep)


def spectrum(M, require_simple: bool = False) -> Spectrum:
    A = as_cmatrix(M)
    sp = roots(char_poly(A), require_simple=require_simple)
    return Spectrum(sp.eigenvalues, sp.separation, A)


# ---------------------------------------------------------------------------
# Functions of matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticFn:
    """A scalar function together with the open domain where it is analytic."""

    fn: Callable
    domain: str = ENTIRE

    def __post_init__(self):
        if self.domain not in _DOMAINS:
            raise DomainError(f"unknown domain {self.domain!r}")

    def __call__(self, z):
        return self.fn(z)


def in_domain(z, domain: str) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if domain == ENTIRE:
        return np.ones(z.shape, dtype=bool)
    if domain == RIGHT_HALF_PLANE:
        return z.real > 0
    return ~((z.imag == 0) & (z.real <= 0))


def _as_fn(f) -> AnalyticFn:
    return f if isinstance(f, AnalyticFn) else AnalyticFn(f, ENTIRE)


@dataclass(frozen=True)
class Calculus:
    """Linear functional calculus ``f(M) = sum_j f(points[j]) * weights[j]``."""

    matrix: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    method: str

    def __call__(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=complex)
        return np.tensordot(values, self.weights, axes=(-1, 0))

    def real(self, values, tol: float = 1e-9) -> np.ndarray:
        return realify(self(values), tol)

    def apply(self, f) -> np.ndarray:
        return self(np.asarray(f(self.points), dtype=complex))


def projectors(M, spec: Spectrum) -> np.ndarray:
    """Lagrange-Sylvester projectors ``prod_{j!=k} (M - l_j I)/(l_k - l_j)``."""
    A = as_cmatrix(M).astype(complex)
    lam = spec.eigenvalues
    p = len(lam)
    if p > 1 and spec.separation <= simple_threshold(lam):
        raise MultipleRoots("spectral evaluation needs distinct eigenvalues")
    I = np.eye(A.shape[0], dtype=complex)
    out = np.empty((p, A.shape[0], A.shape[0]), dtype=complex)
    for k in range(p):
        P = I.copy()
        for j in range(p):
            if j != k:
                P = P @ (A - lam[j] * I) / (lam[k] - lam[j])
        out[k] = P
    return out


def spectral_calculus(M, spec: Spectrum | None = None) -> Calculus:
    A = as_cmatrix(M)
    spec = spec if spec is not None else spectrum(A)
    return Calculus(A, spec.eigenvalues.astype(complex), projectors(A, spec), "spectral")


def matfn_spectral(M, spec: Spectrum, f) -> np.ndarray:
    """Evaluate ``f(M)`` by Lagrange-Sylvester interpolation on a simple spectrum."""
    f = _as_fn(f)
    lam = spec.eigenvalues
    bad = ~in_domain(lam, f.domain)
    if np.any(bad):
        raise DomainViolation(f"eigenvalues {lam[bad]} lie outside the {f.domain} domain")
    cal = spectral_calculus(M, spec)
    return cal.apply(f)


def matfn_series(M, coeffs, tol: float = 1e-16, radius: float | None = None, max_terms: int = 10_000) -> np.ndarray:
    """Sum ``sum_k a_k M^k``.

    ``coeffs`` is a finite sequence or a callable ``k -> a_k``.  Summation
    stops once three consecutive terms are below ``tol`` times the running
    sum (in the infinity norm).  ``radius`` is the radius of convergence; the
    series is refused when ``||M||_inf`` reaches it.
    """
    A = as_cmatrix(M)
    if radius is not None and inf_norm(A) >= radius:
        raise DomainViolation("matrix norm exceeds the series radius of convergence")
    coef = coeffs if callable(coeffs) else (lambda k, c=list(coeffs): c[k] if k < len(c) else 0.0)
    n = A.shape[0]
    power = np.eye(n, dtype=complex)
    total = np.zeros((n, n), dtype=complex)
    small = 0
    finite = None if callable(coeffs) else len(coeffs)
    for k in range(max_terms):
        ak = coef(k)
        term = ak * power
        total = total + term
        if finite is not None and k + 1 >= finite:
            return total
        if inf_norm(term) <= tol * max(inf_norm(total), 1e-300):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
        power = power @ A
    raise NoConvergence(f"series did not converge in {max_terms} terms")


@dataclass(frozen=True)
class Contour:
    """Ellipse ``c + a cos t + i b sin t`` enclosing a spectrum."""

    center: complex
    a: float
    b: float

    def nodes(self, n: int, offset: float = 0.0):
        t = 2.0 * np.pi * (np.arange(n) + offset) / n
        z = self.center + self.a * np.cos(t) + 1j * self.b * np.sin(t)
        dz = -self.a * np.sin(t) + 1j * self.b * np.cos(t)
        # (1/2 pi i) * (2 pi / n) * z'(t)
        return z, dz / (1j * n)


def choose_contour(eigs, domain: str) -> Contour:
    """Circle around the spectrum, flattened into an ellipse when the circle
    would leave the function's domain."""
    eigs = np.asarray(eigs, dtype=complex)
    c = complex(np.mean(eigs))
    dist = float(np.max(np.abs(eigs - c)))
    r = max(1.5 * dist, 0.5 * max(abs(c), 1.0) if domain == ENTIRE else 0.5 * abs(c))
    if r == 0.0:
        r = 1.0
    if domain == ENTIRE or c.real - r > 0:
        if domain != ENTIRE and c.real <= 0:
            raise ContourLeavesDomain("spectrum is not inside the domain")
        return Contour(c, r, r)
    if c.real <= 0:
        raise ContourLeavesDomain("spectrum center lies outside the domain")
    a = min(r, 0.5 * c.real)
    dx = np.abs(eigs.real - c.real)
    dy = np.abs(eigs.imag - c.imag)
    if np.any(dx >= 0.9 * a):
        raise ContourLeavesDomain("no ellipse around the spectrum fits inside the domain")
    b = max(a, float(np.max(1.5 * dy / np.sqrt(1.0 - (dx / a) ** 2))), 1.5 * dist)
    return Contour(c, a, b)


def contour_calculus(M, spec: Spectrum, domain: str = RIGHT_HALF_PLANE, nodes: int = 64, offset: float = 0.0) -> Calculus:
    A = as_cmatrix(M).astype(complex)
    contour = choose_contour(spec.eigenvalues, domain)
    if domain != ENTIRE:
        zz, _ = contour.nodes(max(nodes, 256), offset)
        if not np.all(in_domain(zz, domain)):
            raise ContourLeavesDomain("contour leaves the domain")
    z, w = contour.nodes(nodes, offset)
    I = np.eye(A.shape[0], dtype=complex)
    weights = np.empty((nodes,) + A.shape, dtype=complex)
    for k in range(nodes):
        weights[k] = w[k] * lu_solve(z[k] * I - A, I)
    return Calculus(A, z, weights, "contour")


def matfn_contour(M, spec: Spectrum, f, nodes: int = 64, tol: float = 1e-9, max_nodes: int = 1 << 15) -> np.ndarray:
    """Evaluate ``f(M)`` by the trapezoid rule on a closed contour (Cauchy
    integral), doubling the node count until successive results agree."""
    f = _as_fn(f)
    if nodes % 2:
        raise DomainError("node count must be even")
    offset = 0.0
    prev = None
    n = nodes
    while n <= max_nodes:
        try:
            cal = contour_calculus(M, spec, f.domain, n, offset)
        except SingularMatrix:
            if offset:
                raise
            offset = 0.5
            cal = contour_calculus(M, spec, f.domain, n, offset)
        cur = cal.apply(f)
        if prev is not None and np.max(np.abs(cur - prev)) <= tol * max(1.0, float(np.max(np.abs(cur)))):
            return cur
        prev = cur
        n *= 2
    raise NoConvergence("contour quadrature did not converge")


def calculus_for(M, domain: str = RIGHT_HALF_PLANE, spec: Spectrum | None = None,
                 probes: Iterable[Callable] = (), tol: float = 1e-10) -> Calculus:
    """Spectral calculus when the spectrum is well separated, otherwise a
    contour calculus whose node count is doubled until the probe functions
    converge.

    Eigenvalues closer than ``1e-4 * max|lambda|`` count as clustered: a root
    of multiplicity ``m`` splits by about ``eps^(1/m)`` in floating point,
    which passes the simple-root test for ``m >= 3`` while leaving the
    projectors ill-conditioned.
    """
    A = as_cmatrix(M)
    spec = spec if spec is not None else spectrum(A)
    if well_separated(spec):
        return spectral_calculus(A, spec)
    probes = list(probes) or [lambda z: z]
    n, prev = 64, None
    while n <= 1 << 14:
        cal = contour_calculus(A, spec, domain, n)
        cur = [cal.apply(g) for g in probes]
        if prev is not None and all(
            np.max(np.abs(c - p)) <= tol * max(1.0, float(np.max(np.abs(c)))) for c, p in zip(cur, prev)
        ):
            return cal
        prev = cur
        n *= 2
    raise NoConvergence("contour calculus did not converge for the probe functions")


def expm(M) -> np.ndarray:
    """Matrix exponential by scaling and squaring around a Taylor series.

    Works for any spectrum, including confluent ones.
    """
    A = as_cmatrix(M)
    norm = inf_norm(A)
    s = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    B = A / (2.0**s)
    n = A.shape[0]
    E = np.eye(n, dtype=A.dtype)
    term = np.eye(n, dtype=A.dtype)
    for k in range(1, 30):
        term = term @ B / k
        E = E + term
        if inf_norm(term) <= 1e-17 * inf_norm(E):
            break
    for _ in range(s):
        E = E @ E
    return E
