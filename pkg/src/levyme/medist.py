"""Matrix-exponential (ME) distributions.

A representation ``(alpha, T, t)`` has density ``alpha exp(T x) t`` on
``x > 0``.  The vector ``l = (-T)^{-1} t`` and the total mass
``alpha . l`` (the defect) are cached; a defect below one models killing or
discounting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Iterable

import numpy as np

from . import linalg
from .errors import ConjugationViolation, DefectiveSample, DomainError, DomainViolation

GRID = np.linspace(0.0, 20.0, 2001)
_NEG_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MERep:
    """Matrix-exponential representation ``(alpha, T, t)``.

    Use :func:`me_rep` to build one; it validates the invariants.
    """

    alpha: np.ndarray
    T: np.ndarray
    t: np.ndarray
    l: np.ndarray
    defect: float
    canonical: bool
    spectrum: linalg.Spectrum = field(repr=False)

    @property
    def p(self) -> int:
        return self.T.shape[0]

    @cached_property
    def _terms(self):
        # density and tail as sums of exponentials when the spectrum is simple
        sp = self.spectrum
        if not linalg.well_separated(sp):
            return None
        P = linalg.projectors(self.T, sp)
        a = self.alpha.astype(complex)
        dens = np.array([a @ Pk @ self.t for Pk in P])
        tail = np.array([a @ Pk @ self.l for Pk in P])
        return sp.eigenvalues, dens, tail

    @cached_property
    def _table(self):
        return _TaylorTable(self)

    def __repr__(self) -> str:
        return f"MERep(p={self.p}, defect={self.defect:.6g}, canonical={self.canonical})"


def me_rep(alpha, T, t=None, *, check_grid: bool = True) -> MERep:
    """Validate and build an ME representation.

    ``t`` defaults to ``-T 1`` (canonical exit vector).
    """
    T = np.array(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise DomainError("T must be a square matrix")
    p = T.shape[0]
    alpha = np.array(alpha, dtype=float).reshape(-1)
    t = -T.sum(axis=1) if t is None else np.array(t, dtype=float).reshape(-1)
    if alpha.shape != (p,) or t.shape != (p,):
        raise DomainError("alpha and t must have length p")
    if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(T)) and np.all(np.isfinite(t))):
        raise DomainError("representation has non-finite entries")
    sp = linalg.spectrum(T)
    if np.any(sp.eigenvalues.real >= 0):
        raise DomainViolation(f"T has eigenvalues with nonnegative real part: {sp.eigenvalues}")
    l = linalg.lu_solve(-T, t)
    defect = float(alpha @ l)
    if not (defect > 0 and defect <= 1 + 1e-9):
        raise DomainViolation(f"total mass alpha.l = {defect} is outside (0, 1]")
    scale = max(1.0, float(np.max(np.abs(T))))
    canonical = bool(
        np.max(np.abs(t + T.sum(axis=1))) <= 1e-12 * scale and abs(alpha.sum() - 1.0) <= 1e-12
    )
    rep = MERep(alpha, T, t, l, min(defect, 1.0), canonical, sp)
    if check_grid:
        f = grid_density(rep, GRID)
        if np.min(f) < -_NEG_TOL * max(1.0, float(np.max(np.abs(f)))):
            raise DomainViolation("density is negative on the verification grid")
    return rep


# ---------------------------------------------------------------------------
# Density, distribution function, transform
# ---------------------------------------------------------------------------


def grid_density(d: MERep, x: np.ndarray) -> np.ndarray:
    """Density on an equispaced grid starting at 0, by repeated propagation."""
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return np.atleast_1d(density(d, x))
    h = x[1] - x[0]
    E = linalg.expm(d.T * h).real
    v = d.alpha.copy()
    if x[0] != 0:
        v = v @ linalg.expm(d.T * x[0]).real
    out = np.empty(len(x))
    for i in range(len(x)):
        out[i] = v @ d.t
        v = v @ E
    return out


def _eval_terms(d: MERep, x, which: int):
    x = np.asarray(x, dtype=float)
    terms = d._terms
    if terms is not None:
        lam, dens, tail = terms
        coef = dens if which == 0 else tail
        vals = np.exp(np.multiply.outer(x, lam)) @ coef
        return vals.real
    vec = d.t if which == 0 else d.l
    flat = [d.alpha @ linalg.expm(d.T * xi).real @ vec for xi in x.reshape(-1)]
    return np.array(flat).reshape(x.shape)


def density(d: MERep, x):
    """Density ``alpha exp(T x) t``; values within -1e-9 of zero are reported as 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("density needs x >= 0")
    f = _eval_terms(d, x, 0)
    f = np.where((f < 0) & (f >= -_NEG_TOL), 0.0, f)
    return float(f) if f.ndim == 0 else f


def tail(d: MERep, x):
    """Mass above ``x``: ``alpha exp(T x) l``."""
    x = np.asarray(x, dtype=float)
    v = _eval_terms(d, x, 1)
    return float(v) if v.ndim == 0 else v


def cdf(d: MERep, x):
    """Mass below ``x``: ``alpha l - alpha exp(T x) l``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("cdf needs x >= 0")
    v = d.defect - _eval_terms(d, x, 1)
    return float(v) if np.ndim(v) == 0 else v


def laplace(d: MERep, s: complex) -> complex:
    """``E exp(-s T) = alpha (sI - T)^{-1} t`` for ``Re s >= 0``."""
    s = complex(s)
    if s.real < 0:
        raise DomainError("laplace needs Re s >= 0")
    I = np.eye(d.p)
    val = d.alpha @ linalg.lu_solve(s * I - d.T, d.t.astype(complex))
    return complex(val)


def mean(d: MERep) -> float:
    """First moment ``alpha (-T)^{-1} l`` (of the possibly defective law)."""
    return float(d.alpha @ linalg.lu_solve(-d.T, d.l))


# ---------------------------------------------------------------------------
# Transformations
# ---------------------------------------------------------------------------


def kill_min(d: MERep, delta: float) -> MERep:
    """Law of ``min(T, e_delta)``: ``(alpha, T - delta I, t + delta l)``."""
    if not delta > 0:
        raise DomainError("killing rate must be positive")
    return me_rep(d.alpha, d.T - delta * np.eye(d.p), d.t + delta * d.l, check_grid=False)


def kill_discount(d: MERep, delta: float) -> MERep:
    """Discounted (defective) law ``(alpha, T - delta I, t)``."""
    if not delta > 0:
        raise DomainError("discount rate must be positive")
    return me_rep(d.alpha, d.T - delta * np.eye(d.p), d.t, check_grid=False)


def canonicalize(d: MERep) -> MERep:
    """Similarity transform by ``diag(l)`` giving ``t = -T 1``.

    Returns ``d`` unchanged when some entry of ``l`` vanishes.
    """
    if d.canonical:
        return d
    l = d.l
    if np.any(np.abs(l) <= 1e-12 * max(1.0, float(np.max(np.abs(l))))):
        return d
    alpha = d.alpha * l
    T = d.T * l[None, :] / l[:, None]
    t = d.t / l
    # enforce t = -T 1 exactly
    t = -T.sum(axis=1)
    if abs(alpha.sum() - 1.0) <= 1e-9:
        alpha = alpha / alpha.sum()
    return me_rep(alpha, T, t, check_grid=False)


def is_ph(d: MERep, tol: float = 1e-12) -> bool:
    """True when ``alpha`` is a sub-probability vector and ``T`` a sub-intensity matrix."""
    off = d.T - np.diag(np.diag(d.T))
    return bool(
        np.all(d.alpha >= -tol)
        and d.alpha.sum() <= 1 + tol
        and np.all(off >= -tol)
        and np.all(d.T.sum(axis=1) <= tol)
        and np.all(d.t >= -tol)
    )


# ---------------------------------------------------------------------------
# Construction from exponential terms
# ---------------------------------------------------------------------------


def _conj_partners(c: np.ndarray, lam: np.ndarray):
    scale = max(1.0, float(np.max(np.abs(lam))))
    used = np.zeros(len(lam), dtype=bool)
    out = []
    for i in range(len(lam)):
        if used[i]:
            continue
        used[i] = True
        if abs(lam[i].imag) <= 1e-12 * scale:
            if abs(c[i].imag) > 1e-12 * max(1.0, abs(c[i])):
                raise ConjugationViolation(f"real rate {lam[i].real} carries a complex weight")
            out.append((c[i].real, lam[i].real, None))
            continue
        cand = [j for j in range(len(lam)) if not used[j]
                and abs(lam[j] - np.conj(lam[i])) <= 1e-9 * scale
                and abs(c[j] - np.conj(c[i])) <= 1e-9 * max(1.0, abs(c[i]))]
        if not cand:
            raise ConjugationViolation(f"term ({c[i]}, {lam[i]}) has no conjugate partner")
        used[cand[0]] = True
        out.append((c[i], lam[i], cand[0]))
    return out


def from_exp_terms(terms: Iterable[tuple[complex, complex]]) -> MERep:
    """ME representation of ``sum_k c_k exp(-lambda_k x)``.

    Real rates become 1x1 blocks; a conjugate pair ``a +- ib`` becomes the
    block ``[[-a, b], [-b, -a]]``.  The result is canonicalized when possible.
    """
    terms = list(terms)
    if not terms:
        raise DomainError("empty term list")
    c = np.array([complex(tk[0]) for tk in terms])
    lam = np.array([complex(tk[1]) for tk in terms])
    if np.any(lam.real <= 0):
        raise DomainViolation("all rates need positive real part")
    blocks = _conj_partners(c, lam)
    p = sum(1 if j is None else 2 for _, _, j in blocks)
    T = np.zeros((p, p))
    alpha = np.zeros(p)
    t = np.zeros(p)
    k = 0
    for ck, lk, j in blocks:
        if j is None:
            T[k, k] = -lk
            alpha[k] = ck
            t[k] = 1.0
            k += 1
        else:
            a, b = lk.real, lk.imag
            T[k : k + 2, k : k + 2] = [[-a, b], [-b, -a]]
            alpha[k] = 1.0
            t[k], t[k + 1] = 2 * ck.real, 2 * ck.imag
            k += 2
    rep = me_rep(alpha, T, t)
    return canonicalize(rep)


def read_exp_terms(path) -> list[tuple[complex, complex]]:
    """Read a coefficient file with header ``re_c,im_c,re_lambda,im_lambda[,pair]``."""
    terms = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        need = {"re_c", "im_c", "re_lambda", "im_lambda"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise DomainError(f"{path}: header must contain {sorted(need)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                c = complex(float(row["re_c"]), float(row["im_c"]))
                lam = complex(float(row["re_lambda"]), float(row["im_lambda"]))
                pair = (row.get("pair") or "0").strip() == "1"
            except (TypeError, ValueError) as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
            terms.append((c, lam))
            if pair:
                terms.append((c.conjugate(), lam.conjugate()))
    return terms


def load_exp_terms(path) -> MERep:
    return from_exp_terms(read_exp_terms(path))


# ---------------------------------------------------------------------------
# Named representations
# ---------------------------------------------------------------------------


def exponential(q: float) -> MERep:
    return me_rep([1.0], [[-q]], [q])


def erlang(k: int, rate: float) -> MERep:
    T = -rate * np.eye(k) + rate * np.eye(k, k=1)
    alpha = np.zeros(k)
    alpha[0] = 1.0
    return me_rep(alpha, T)


def cos2_horizon() -> MERep:
    """Density ``(17/9) exp(-x) cos^2(2x)`` with eigenvalues ``-1, -1 +- 4i``."""
    alpha = [-8 / 9, -34 / 9, 17 / 3]
    T = [[0.0, -17.0, 17.0], [3.0, 2.0, -6.0], [2.0, 2.0, -5.0]]
    return me_rep(alpha, T, [0.0, 1.0, 1.0])


def cos4_order5() -> MERep:
    """Order-5 coefficient file shipped with the package."""
    ref = resources.files("levyme") / "data" / "cos4_order5.csv"
    with resources.as_file(ref) as path:
        return load_exp_terms(path)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


class _TaylorTable:
    """Distribution function on a grid with local Taylor polynomials.

    ``alpha exp(T (x_j + s)) l = sum_k c_{jk} s^k`` with
    ``c_{jk} = alpha exp(T x_j) T^k l / k!``; valid for any spectrum.
    """

    K = 30

    def __init__(self, d: MERep):
        norm = max(linalg.inf_norm(d.T), 1e-12)
        self.h = h = 0.5 / norm
        E = linalg.expm(d.T * h).real
        rows = [d.alpha.copy()]
        # extend until the remaining mass is negligible
        while True:
            v = rows[-1] @ E
            rows.append(v)
            if abs(v @ d.l) < 1e-15 and len(rows) > 4 and abs(rows[-2] @ d.l) < 1e-15:
                break
            if len(rows) > 2_000_000:
                raise DomainError("horizon tail too long for the sampling table")
        V = np.array(rows)
        self.end = h * (len(rows) - 1)
        coef = np.empty((len(rows), self.K + 1))
        w_l = d.l.copy()
        w_t = d.t.copy()
        coef_t = np.empty_like(coef)
        for k in range(self.K + 1):
            coef[:, k] = V @ w_l
            coef_t[:, k] = V @ w_t
            w_l = d.T @ w_l / (k + 1)
            w_t = d.T @ w_t / (k + 1)
        self.tail_coef = coef
        self.dens_coef = coef_t
        self.defect = d.defect

    def _poly(self, coef, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.end)
        j = np.minimum((x / self.h).astype(np.int64), len(coef) - 1)
        s = x - j * self.h
        acc = coef[j, self.K]
        for k in range(self.K - 1, -1, -1):
            acc = acc * s + coef[j, k]
        return acc

    def cdf(self, x):
        return self.defect - self._poly(self.tail_coef, x)

    def density(self, x):
        return self._poly(self.dens_coef, x)


def quantile(d: MERep, u) -> np.ndarray:
    """Inverse distribution function for ``u`` in ``(0, 1)``.

    Brackets by doubling from ``x = 1``, bisects to ``1e-10`` and polishes
    with one Newton step.
    """
    if d.defect < 1 - 1e-9:
        raise DefectiveSample(f"cannot sample a defective law (mass {d.defect})")
    tab = d._table
    u = np.atleast_1d(np.asarray(u, dtype=float))
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    for _ in range(64):
        low = tab.cdf(hi) < u
        if not np.any(low):
            break
        lo = np.where(low, hi, lo)
        hi = np.where(low, np.minimum(2 * hi, tab.end), hi)
        if np.all(hi[low] >= tab.end):
            break
    while np.max(hi - lo) > 1e-10:
        mid = 0.5 * (lo + hi)
        below = tab.cdf(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    x = 0.5 * (lo + hi)
    f = tab.density(x)
    step = np.where(f > 1e-8, (tab.cdf(x) - u) / np.where(f > 1e-8, f, 1.0), 0.0)
    polished = x - step
    ok = (polished >= lo - 1e-10) & (polished <= hi + 1e-10)
    return np.where(ok, polished, x)


def sample(d: MERep, rng: np.random.Generator, size: int | None = None):
    """Inverse-transform draws from a non-defective representation."""
    u = rng.random(size if size is not None else 1)
    x = quantile(d, u)
    return float(x[0]) if size is None else x
