"""Monte-Carlo simulation of the supported models up to a random horizon.

Stable and Brownian paths are walked on a time grid.  For Brownian motion
the within-step extremes are drawn from the exact bridge law, which removes
most of the grid bias on passage events.  The compound Poisson model without
diffusion is simulated exactly, jump by jump.

Paths are processed in fixed-size blocks.  Every block draws from its own
Philox stream keyed on ``(seed, block index)``, so results depend only on
``(seed, paths, block, h)`` and not on the order in which blocks run.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, logm

from . import medist
from .errors import DomainError, DomainViolation, InsufficientPassages
from .medist import MERep
from .models import BrownianDrift, CramerLundbergME, LevyModel, Stable

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    Parameters
    ----------
    h : float
        Grid step in time units.
    paths : int
        Number of simulated paths.
    seed : int
        64-bit seed; each block of paths gets a Philox key derived from it.
    horizon_cap : float
        Horizons are truncated here; the truncated fraction is reported.
    block : int
        Paths per RNG block.
    """

    h: float = 1e-3
    paths: int = 3000
    seed: int = 20240917
    horizon_cap: float = 50.0
    block: int = 2000

    def __post_init__(self):
        if not self.h > 0 or self.paths < 1 or self.block < 1 or not self.horizon_cap > 0:
            raise DomainError("need h > 0, paths >= 1, block >= 1 and horizon_cap > 0")


@dataclass(frozen=True)
class BarrierSpec:
    """Barriers monitored along each path (the path starts at 0).

    ``up`` levels record the passage time above ``x`` and the running
    infimum at that moment; ``down`` levels record the passage time below
    ``-y`` and the running supremum.  ``reflect`` holds ``(start, a)`` pairs
    for the process reflected at its infimum and started at ``start``.
    """

    up: tuple = ()
    down: tuple = ()
    reflect: tuple = ()


@dataclass(frozen=True)
class PathSummary:
    horizon: float
    terminal: float
    sup: float
    inf: float


@dataclass(eq=False)
class PathSummaries:
    """Per-path records stored column-wise."""

    spec: BarrierSpec
    horizon: np.ndarray
    terminal: np.ndarray
    sup: np.ndarray
    inf: np.ndarray
    up_time: np.ndarray
    up_inf: np.ndarray
    down_time: np.ndarray
    down_sup: np.ndarray
    reflect_time: np.ndarray
    capped: float = 0.0

    def __len__(self) -> int:
        return len(self.terminal)

    def __getitem__(self, i: int) -> PathSummary:
        return PathSummary(float(self.horizon[i]), float(self.terminal[i]), float(self.sup[i]), float(self.inf[i]))

    def _col(self, levels, value) -> int:
        for j, v in enumerate(levels):
            if abs(v - value) <= 1e-12:
                return j
        raise DomainError(f"level {value} was not monitored")

    def up_index(self, x: float) -> int:
        return self._col(self.spec.up, x)

    def down_index(self, y: float) -> int:
        return self._col(self.spec.down, y)

    def reflect_index(self, start: float, a: float) -> int:
        for j, (s, b) in enumerate(self.spec.reflect):
            if abs(s - start) <= 1e-12 and abs(b - a) <= 1e-12:
                return j
        raise DomainError(f"reflected pair ({start}, {a}) was not monitored")


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Generator for one block: Philox keyed on ``(seed, block)``."""
    return np.random.Generator(np.random.Philox(key=((seed & _MASK64) << 64) | (block & _MASK64)))


# ---------------------------------------------------------------------------
# Increments
# ---------------------------------------------------------------------------


def stable_scale(alpha: float) -> float:
    """Scale of the totally negatively skewed stable law with ``E exp(theta X_1) = exp(theta^alpha)``."""
    return abs(math.cos(math.pi * alpha / 2.0)) ** (1.0 / alpha)


def stable_standard(alpha: float, rng: np.random.Generator, size) -> np.ndarray:
    """Chambers-Mallows-Stuck draws of ``X_1`` with skewness -1, normalized to ``psi(theta) = theta^alpha``."""
    V = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    W = rng.exponential(1.0, size)
    if alpha == 2.0:
        return 2.0 * np.sin(V) * np.sqrt(W)
    tan = math.tan(math.pi * alpha / 2.0)
    B = math.atan(-tan) / alpha
    S = (1.0 + tan * tan) ** (0.5 / alpha)
    X = S * np.sin(alpha * (V + B)) / np.cos(V) ** (1.0 / alpha) * (
        np.cos(V - alpha * (V + B)) / W
    ) ** ((1.0 - alpha) / alpha)
    return stable_scale(alpha) * X


def stable_increment(alpha: float, dt, rng: np.random.Generator, size=None):
    """Increment of the stable process over ``dt``: ``dt^(1/alpha) X_1``."""
    if not (1.0 < alpha <= 2.0):
        raise DomainError("stable index must lie in (1, 2]")
    if size is None:
        size = np.shape(dt)
    return np.asarray(dt) ** (1.0 / alpha) * stable_standard(alpha, rng, size)


def _bridge(d, sigma, dt, rng):
    # exact max / min of a Brownian bridge from 0 to d over dt
    s2 = sigma * sigma * dt
    up = 0.5 * (d + np.sqrt(d * d - 2.0 * s2 * np.log(rng.random(d.shape))))
    lo = 0.5 * (d - np.sqrt(d * d - 2.0 * s2 * np.log(rng.random(d.shape))))
    return up, lo


class JumpPool:
    """Buffered jump-size draws, refilled in large batches."""

    def __init__(self, law: MERep, rng: np.random.Generator, batch: int = 4096):
        self.law, self.rng, self.batch = law, rng, batch
        self.buf = np.empty(0)

    def take(self, k: int) -> np.ndarray:
        if k > len(self.buf):
            more = medist.sample(self.law, self.rng, max(self.batch, k))
            self.buf = np.concatenate([self.buf, more])
        out, self.buf = self.buf[:k], self.buf[k:]
        return out


def grid_increment(model: LevyModel, dt: np.ndarray, rng: np.random.Generator, pool: JumpPool | None = None):
    """Increment over ``dt`` with within-step maximum and minimum (relative to the start).

    For Brownian motion the extremes are exact bridge draws; for the stable
    model the grid endpoints are used.  Compound Poisson jumps are placed at
    the end of the step.
    """
    dt = np.asarray(dt, dtype=float)
    if isinstance(model, Stable):
        d = stable_increment(model.alpha, dt, rng)
        return d, np.maximum(d, 0.0), np.minimum(d, 0.0)
    if isinstance(model, BrownianDrift):
        sigma, drift = model.sigma, model.gamma
        jumps = np.zeros_like(dt)
    elif isinstance(model, CramerLundbergME):
        sigma, drift = model.sigma, model.c
        n = rng.poisson(model.lam * dt)
        jumps = np.zeros_like(dt)
        k = int(n.sum())
        if k:
            sizes = pool.take(k) if pool is not None else medist.sample(model.jump, rng, k)
            jumps = np.bincount(np.repeat(np.arange(len(dt)), n), weights=sizes, minlength=len(dt))
    else:
        raise DomainError(f"no simulator for {type(model).__name__}")
    if sigma > 0:
        d = drift * dt + sigma * np.sqrt(dt) * rng.standard_normal(dt.shape)
        up, lo = _bridge(d, sigma, dt, rng)
    else:
        d = drift * dt
        up, lo = np.maximum(d, 0.0), np.minimum(d, 0.0)
    d = d - jumps
    return d, up, np.minimum(lo, d)


def _pool_for(model: LevyModel, rng: np.random.Generator) -> JumpPool | None:
    return JumpPool(model.jump, rng) if isinstance(model, CramerLundbergME) else None


# ---------------------------------------------------------------------------
# Path simulation
# ---------------------------------------------------------------------------


class _Tracker:
    """Running records for a block of paths; live paths form a prefix (grid)
    or an index set (event-driven)."""

    def __init__(self, n: int, spec: BarrierSpec):
        self.spec = spec
        self.up = np.asarray(spec.up, dtype=float)
        self.down = np.asarray(spec.down, dtype=float)
        refl = np.asarray(spec.reflect, dtype=float).reshape(-1, 2)
        self.refl_a = refl[:, 1]
        self.x = np.zeros(n)
        self.sup = np.zeros(n)
        self.inf = np.zeros(n)
        self.up_time = np.full((n, len(self.up)), np.inf)
        self.up_inf = np.full((n, len(self.up)), np.nan)
        self.down_time = np.full((n, len(self.down)), np.inf)
        self.down_sup = np.full((n, len(self.down)), np.nan)
        self.refl_s = refl[:, 0]
        self.reflect_time = np.full((n, len(refl)), np.inf)
        self._initial_hits()

    def _initial_hits(self):
        # levels at distance 0 are crossed at once by the irregular side
        if len(self.up):
            at0 = self.up <= 0
            self.up_time[:, at0] = 0.0
            self.up_inf[:, at0] = 0.0
        if len(self.refl_a):
            self.reflect_time[:, self.refl_s > self.refl_a] = 0.0

    def reflected(self, rows) -> np.ndarray:
        # Skorokhod reflection at the running infimum: R = s + X - min(0, s + inf X)
        s = self.refl_s
        return s + self.x[rows][:, None] + np.maximum(0.0, -s - self.inf[rows][:, None])

    def step(self, m: int, t_end, d, up, lo):
        s = slice(0, m)
        x = self.x[s]
        hi, low = x + up, x + lo
        if len(self.up):
            new = (hi[:, None] > self.up) & np.isinf(self.up_time[s])
            if new.any():
                self.up_time[s][new] = np.broadcast_to(t_end[:, None], new.shape)[new]
                self.up_inf[s][new] = np.broadcast_to(self.inf[s][:, None], new.shape)[new]
        if len(self.down):
            new = (low[:, None] < -self.down) & np.isinf(self.down_time[s])
            if new.any():
                self.down_time[s][new] = np.broadcast_to(t_end[:, None], new.shape)[new]
                self.down_sup[s][new] = np.broadcast_to(self.sup[s][:, None], new.shape)[new]
        if len(self.refl_a):
            new = (self.reflected(s) + up[:, None] > self.refl_a) & np.isinf(self.reflect_time[s])
            if new.any():
                self.reflect_time[s][new] = np.broadcast_to(t_end[:, None], new.shape)[new]
        np.maximum(self.sup[s], hi, out=self.sup[s])
        np.minimum(self.inf[s], low, out=self.inf[s])
        self.x[s] = x + d


def _grid_block(model, T, h, rng, spec, dump_rows=None):
    # paths sorted by decreasing horizon so the live set is a prefix
    order = np.argsort(-T, kind="stable")
    Ts = T[order]
    n_steps = np.maximum(np.ceil(Ts / h - 1e-12).astype(np.int64), 1)
    last = Ts - (n_steps - 1) * h
    tr = _Tracker(len(T), spec)
    pool = _pool_for(model, rng)
    total = int(n_steps[0]) if len(T) else 0
    live = len(T)
    for k in range(total):
        while live and n_steps[live - 1] <= k:
            live -= 1
        ending = n_steps[:live] == k + 1
        dt = np.where(ending, last[:live], h)
        t_end = np.where(ending, Ts[:live], (k + 1) * h)
        d, up, lo = grid_increment(model, dt, rng, pool)
        tr.step(live, t_end, d, up, lo)
        if dump_rows is not None:
            for j in range(min(live, len(dump_rows))):
                dump_rows[j].append((float(t_end[j]), float(tr.x[j])))
    inv = np.empty_like(order)
    inv[order] = np.arange(len(order))
    return tr, inv, order


def _exact_block(model: CramerLundbergME, T, rng, spec):
    # drift c between Poisson jump epochs; passages upward happen during drift
    c, lam = model.c, model.lam
    tr = _Tracker(len(T), spec)
    t = np.zeros(len(T))
    idx = np.arange(len(T))
    while len(idx):
        gap = rng.exponential(1.0 / lam, len(idx)) if lam > 0 else np.full(len(idx), np.inf)
        end = np.minimum(t[idx] + gap, T[idx])
        dt = end - t[idx]
        x0 = tr.x[idx]
        rise = c * dt
        if len(tr.up):
            new = (x0[:, None] + rise[:, None] > tr.up) & np.isinf(tr.up_time[idx])
            when = t[idx][:, None] + (tr.up - x0[:, None]) / c
            for r, j in zip(*np.nonzero(new)):
                tr.up_time[idx[r], j] = when[r, j]
                tr.up_inf[idx[r], j] = tr.inf[idx[r]]
        if len(tr.refl_a):
            R = tr.reflected(idx)
            new = (R + rise[:, None] > tr.refl_a) & np.isinf(tr.reflect_time[idx])
            when = t[idx][:, None] + (tr.refl_a - R) / c
            for r, j in zip(*np.nonzero(new)):
                tr.reflect_time[idx[r], j] = when[r, j]
        tr.x[idx] = x0 + rise
        tr.sup[idx] = np.maximum(tr.sup[idx], tr.x[idx])
        t[idx] = end
        jumping = end < T[idx]
        idx = idx[jumping]
        if not len(idx):
            break
        J = medist.sample(model.jump, rng, len(idx))
        tr.x[idx] -= J
        tr.inf[idx] = np.minimum(tr.inf[idx], tr.x[idx])
        if len(tr.down):
            new = (tr.x[idx][:, None] < -tr.down) & np.isinf(tr.down_time[idx])
            for r, j in zip(*np.nonzero(new)):
                tr.down_time[idx[r], j] = t[idx[r]]
                tr.down_sup[idx[r], j] = tr.sup[idx[r]]
    ident = np.arange(len(T))
    return tr, ident, ident


def _exact_family(model: LevyModel) -> bool:
    return isinstance(model, CramerLundbergME) and model.sigma == 0


def sample_horizon(horizon: MERep, rng: np.random.Generator, n: int, cap: float):
    """Horizon draws truncated at ``cap``; also returns the truncated count."""
    T = medist.sample(horizon, rng, n)
    capped = T > cap
    return np.minimum(T, cap), int(capped.sum())


def simulate_paths(
    model: LevyModel,
    horizon: MERep,
    config: SimConfig = SimConfig(),
    spec: BarrierSpec = BarrierSpec(),
    dump: str | None = None,
    dump_paths: int = 5,
) -> PathSummaries:
    """Simulate ``config.paths`` paths up to independent horizon draws.

    Parameters
    ----------
    model, horizon
        Levy model and a non-defective ME horizon.
    config
        Grid step, path count, seed and block size.
    spec
        Barriers to monitor.
    dump
        Optional CSV path; the first ``dump_paths`` grid paths are written
        as ``path_id,time,value`` rows.
    """
    exact = _exact_family(model)
    cols = {k: [] for k in ("horizon", "terminal", "sup", "inf", "up_time", "up_inf",
                            "down_time", "down_sup", "reflect_time")}
    capped = 0
    dump_rows = [[] for _ in range(dump_paths)] if dump and not exact else None
    n_blocks = -(-config.paths // config.block)
    for b in range(n_blocks):
        n = min(config.block, config.paths - b * config.block)
        rng = block_rng(config.seed, b)
        T, nc = sample_horizon(horizon, rng, n, config.horizon_cap)
        capped += nc
        if exact:
            tr, inv, order = _exact_block(model, T, rng, spec)
        else:
            rows = dump_rows if b == 0 else None
            tr, inv, order = _grid_block(model, T, config.h, rng, spec, rows)
            if rows is not None:
                # dump rows follow the sorted order; relabel by original index
                dump_rows = [(int(order[j]), r) for j, r in enumerate(rows)]
        cols["horizon"].append(T)
        cols["terminal"].append(tr.x[inv])
        cols["sup"].append(tr.sup[inv])
        cols["inf"].append(tr.inf[inv])
        cols["up_time"].append(tr.up_time[inv])
        cols["up_inf"].append(tr.up_inf[inv])
        cols["down_time"].append(tr.down_time[inv])
        cols["down_sup"].append(tr.down_sup[inv])
        cols["reflect_time"].append(tr.reflect_time[inv])
    if dump_rows is not None:
        _write_dump(dump, dump_rows)
    out = {k: np.concatenate(v) for k, v in cols.items()}
    return PathSummaries(spec=spec, capped=capped / config.paths, **out)


def _write_dump(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["path_id", "time", "value"])
        for entry in rows:
            pid, pts = entry if isinstance(entry, tuple) else (None, entry)
            for t, v in pts:
                w.writerow([pid, repr(t), repr(v)])


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def estimate(summaries: PathSummaries, functional) -> tuple[float, float]:
    """Sample mean of ``functional(summaries)`` and its standard error."""
    v = np.asarray(functional(summaries), dtype=float)
    n = len(v)
    se = float(np.std(v, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return float(np.mean(v)), se


def f_up(x: float):
    """Indicator of ``tau_x^+ < T``.

    Levels ``x <= 0`` are passed at time 0, as in the path tracker; a grid
    would miss the immediate passage of 0.
    """
    if x <= 0:
        return lambda s: np.ones(len(s), dtype=bool)
    return lambda s: s.sup > x


def f_two_sided_up(x: float, y: float):
    """Indicator of ``tau_x^+ < tau_{-y}^- and T``; ``x`` must be a monitored up level."""
    def f(s):
        j = s.up_index(x)
        return np.isfinite(s.up_time[:, j]) & (s.up_inf[:, j] > -y)
    return f


def f_two_sided_up_discounted(x: float, y: float, delta: float):
    """``exp(-delta tau_x^+)`` on the two-sided up event."""
    def f(s):
        j = s.up_index(x)
        hit = np.isfinite(s.up_time[:, j]) & (s.up_inf[:, j] > -y)
        return np.where(hit, np.exp(-delta * np.where(hit, s.up_time[:, j], 0.0)), 0.0)
    return f


def f_down_two_sided(x: float, a: float):
    """Started at ``x`` in ``[0, a]``: indicator of ``tau_0^- < tau_a^+ and T``."""
    def f(s):
        j = s.down_index(x)
        return np.isfinite(s.down_time[:, j]) & (s.down_sup[:, j] < a - x)
    return f


def f_down_one_sided(x: float):
    """Started at ``x``: indicator of ``tau_0^- < T``."""
    return lambda s: s.inf < -x


def f_reflected(start: float, a: float):
    """Indicator that the reflected process started at ``start`` exceeds ``a`` before ``T``."""
    def f(s):
        return np.isfinite(s.reflect_time[:, s.reflect_index(start, a)])
    return f


def f_inf_bin(lo: float, hi: float):
    """Histogram height of ``-inf X`` on ``[lo, hi)``."""
    return lambda s: ((-s.inf >= lo) & (-s.inf < hi)) / (hi - lo)


def f_two_barrier_bin(a: float, b: float, lo: float, hi: float):
    """Histogram height of ``X_T`` on ``[lo, hi)`` for paths that stay inside ``(-a, b)``."""
    def f(s):
        inside = (s.sup <= b) & (s.inf >= -a)
        return (inside & (s.terminal >= lo) & (s.terminal < hi)) / (hi - lo)
    return f


def f_option(u: float, beta: float):
    """Payoff ``(1 - exp(u + inf))^+ exp(beta (X_T - inf))``."""
    return lambda s: np.maximum(1.0 - np.exp(u + s.inf), 0.0) * np.exp(beta * (s.terminal - s.inf))


# ---------------------------------------------------------------------------
# Phase tracking and observation-based ruin
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PhaseGenerator:
    """Empirical generator of the phase at first passage, with batch-means errors."""

    value: np.ndarray
    se: np.ndarray
    transitions: np.ndarray = field(repr=False)
    dx: float = 0.1


def _check_ph(horizon: MERep) -> None:
    if not medist.is_ph(horizon) or abs(horizon.alpha.sum() - 1.0) > 1e-9:
        raise DomainViolation("phase tracking needs a PH horizon")


def _phase_step(P_cum: np.ndarray, phase: np.ndarray, rng) -> np.ndarray:
    # next phase from the cumulative rows of exp(T h); index p means killed
    u = rng.random(len(phase))
    return (u[:, None] > P_cum[phase]).sum(axis=1)


def phase_tracked_simulate(
    model: LevyModel,
    horizon: MERep,
    config: SimConfig = SimConfig(),
    dx: float = 0.1,
    levels: int = 40,
    batches: int = 20,
    min_visits: int = 50,
) -> PhaseGenerator:
    """Estimate ``-Phi(-T)`` from simulated phases at passages of ``k dx``.

    Paths start in each phase in turn.  Between consecutive levels the phase
    moves as a killed Markov chain whose transition matrix is
    ``exp(-Phi(-T) dx)``; transition counts give that matrix and a matrix
    logarithm gives the generator.  Errors come from batch means over
    ``batches`` groups of paths.
    """
    _check_ph(horizon)
    p = horizon.p
    h = config.h
    P = expm(horizon.T * h)
    P_cum = np.cumsum(np.hstack([P, 1.0 - P.sum(axis=1, keepdims=True)]), axis=1)[:, :p]
    counts = np.zeros((batches, p, p + 1))
    max_steps = int(math.ceil(config.horizon_cap / h))
    n_blocks = -(-config.paths // config.block)
    for b in range(n_blocks):
        n = min(config.block, config.paths - b * config.block)
        rng = block_rng(config.seed, b)
        ids = b * config.block + np.arange(n)
        phase = ids % p
        gid = (ids // p) % batches
        x = np.zeros(n)
        level = np.zeros(n, dtype=int)
        from_phase = phase.copy()
        pool = _pool_for(model, rng)
        live = np.arange(n)
        for _ in range(max_steps):
            if not len(live):
                break
            d, up, _ = grid_increment(model, np.full(len(live), h), rng, pool)
            hi = x[live] + up
            crossed = np.floor(hi / dx + 1e-12).astype(int) - level[live]
            for r in np.nonzero(crossed > 0)[0]:
                i = live[r]
                k = min(crossed[r], levels - level[i])
                counts[gid[i], from_phase[i], phase[i]] += 1
                counts[gid[i], phase[i], phase[i]] += k - 1
                level[i] += k
                from_phase[i] = phase[i]
            x[live] += d
            new = _phase_step(P_cum, phase[live], rng)
            killed = new == p
            for i in live[killed]:
                counts[gid[i], from_phase[i], p] += 1
            phase[live[~killed]] = new[~killed]
            live = live[~killed & (level[live] < levels)]
    total = counts.sum(axis=0)
    visits = total.sum(axis=1)
    if np.any(visits < min_visits):
        raise InsufficientPassages(f"too few level passages per phase: {visits}")

    def gen(c):
        rows = c.sum(axis=1, keepdims=True)
        M = c[:, :p] / np.where(rows > 0, rows, 1.0)
        return np.real(logm(M)) / dx

    value = gen(total)
    reps = np.array([gen(c) for c in counts])
    se = reps.std(axis=0, ddof=1) / math.sqrt(batches)
    return PhaseGenerator(value, se, total, dx)


def observation_ruin_simulate(
    model: LevyModel, interarrival: MERep, x: float, config: SimConfig = SimConfig()
) -> tuple[float, float, float]:
    """MC estimate of ``P(tau_x^+ < hat tau_0)``: ruin is checked only at the
    epochs of a renewal process with the given inter-arrival law.

    Returns ``(estimate, standard error, capped fraction)``.
    """
    _check_ph(interarrival)
    h = config.h
    wins = []
    capped = 0
    n_blocks = -(-config.paths // config.block)
    for b in range(n_blocks):
        n = min(config.block, config.paths - b * config.block)
        rng = block_rng(config.seed, b)
        X = np.zeros(n)
        t = np.zeros(n)
        nxt = medist.sample(interarrival, rng, n)
        result = np.full(n, -1)
        pool = _pool_for(model, rng)
        if x <= 0:
            result[:] = 1
        live = np.nonzero(result < 0)[0]
        while len(live):
            dt = np.minimum(h, nxt[live] - t[live])
            d, up, _ = grid_increment(model, dt, rng, pool)
            win = X[live] + up > x
            result[live[win]] = 1
            X[live] += d
            t[live] += dt
            obs = ~win & (t[live] >= nxt[live] - 1e-12)
            ruined = obs & (X[live] < 0)
            result[live[ruined]] = 0
            renew = live[obs & ~ruined]
            if len(renew):
                nxt[renew] = t[renew] + medist.sample(interarrival, rng, len(renew))
            over = (result[live] < 0) & (t[live] >= config.horizon_cap)
            result[live[over]] = 0
            capped += int(over.sum())
            live = live[result[live] < 0]
        wins.append(result)
    v = np.concatenate(wins).astype(float)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v))), capped / len(v)
