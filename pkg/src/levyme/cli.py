"""Command-line front end.

Commands::

    levyme phi       --builtin paper-sec7 --model stable:1.5
    levyme curve     --op p-up --builtin paper-sec7 --model stable:1.5 --grid 0:1:0.05 --mc
    levyme validate  [--only golden,spectrum] [--report report.json]

Settings can also come from a JSON file (``--config``); flags override it and
``LEVYME_SEED`` overrides the seed stored in the file.  Exit codes: 0 ok,
2 input or domain error, 3 numerical failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fluct as F
from . import mcsim, medist, scale, validate
from .errors import DomainError, LevyMEError, NumericalError, UnknownOperation
from .models import BrownianDrift, CramerLundbergME, LevyModel, Stable, phi_matrix
from .scale import ScaleEval

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4
BUILTINS = {
    "paper-sec7": medist.cos2_horizon,
    "cos2-example": medist.cos2_horizon,
    "cos4-order5": medist.cos4_order5,
}


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _numbers(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"{what}: cannot parse numbers from {text!r}") from None


def parse_model(spec, where: str = "model") -> LevyModel:
    """``stable:A``, ``bm:SIGMA,GAMMA``, ``cl:C,LAM,RATE[,SIGMA]`` (exponential
    claims) or a JSON object ``{"family": "cl", "c": .., "lam": .., "jump": <horizon>}``."""
    if isinstance(spec, dict):
        fam = spec.get("family")
        try:
            if fam == "stable":
                return Stable(float(spec["alpha"]))
            if fam in ("bm", "brownian"):
                return BrownianDrift(float(spec["sigma"]), float(spec["gamma"]))
            if fam == "cl":
                jump = parse_horizon(spec["jump"], f"{where}.jump")
                return CramerLundbergME(float(spec["c"]), float(spec["lam"]), jump, float(spec.get("sigma", 0.0)))
        except KeyError as exc:
            raise DomainError(f"{where}: missing field {exc.args[0]!r}") from None
        raise DomainError(f"{where}.family: unknown family {fam!r}")
    if not isinstance(spec, str) or ":" not in spec:
        raise DomainError(f"{where}: expected FAMILY:PARAMS, got {spec!r}")
    fam, _, rest = spec.partition(":")
    vals = _numbers(rest, where)
    if fam == "stable" and len(vals) == 1:
        return Stable(vals[0])
    if fam in ("bm", "brownian") and len(vals) == 2:
        return BrownianDrift(*vals)
    if fam == "cl" and len(vals) in (3, 4):
        sigma = vals[3] if len(vals) == 4 else 0.0
        return CramerLundbergME(vals[0], vals[1], medist.exponential(vals[2]), sigma)
    raise DomainError(f"{where}: cannot parse {spec!r}")


def parse_horizon(spec, where: str = "horizon") -> medist.MERep:
    """Named built-in, ``exp:Q``, ``erlang:K,RATE``, ``terms:PATH`` or a JSON
    object ``{"alpha": [...], "T": [[...]], "t": [...]}``."""
    if isinstance(spec, dict):
        if "terms" in spec:
            return medist.load_exp_terms(spec["terms"])
        try:
            return medist.me_rep(spec["alpha"], spec["T"], spec.get("t"))
        except KeyError as exc:
            raise DomainError(f"{where}: missing field {exc.args[0]!r}") from None
    if not isinstance(spec, str):
        raise DomainError(f"{where}: expected a string or an object")
    if spec in BUILTINS:
        return BUILTINS[spec]()
    kind, _, rest = spec.partition(":")
    if kind == "exp":
        (q,) = _numbers(rest, where) or [math.nan]
        return medist.exponential(q)
    if kind == "erlang":
        vals = _numbers(rest, where)
        if len(vals) != 2 or vals[0] != int(vals[0]) or vals[0] < 1:
            raise DomainError(f"{where}: expected erlang:K,RATE")
        return medist.erlang(int(vals[0]), vals[1])
    if kind == "terms":
        return medist.load_exp_terms(rest)
    raise DomainError(f"{where}: unknown horizon {spec!r} (built-ins: {', '.join(BUILTINS)})")


def parse_grid(text: str) -> np.ndarray:
    """``START:STOP:STEP`` (inclusive) or a comma-separated list."""
    if ":" in text:
        parts = _numbers(text.replace(":", ","), "grid")
        if len(parts) != 3 or not parts[2] > 0 or parts[1] < parts[0]:
            raise DomainError("grid: expected START:STOP:STEP with STEP > 0")
        n = int(math.floor((parts[1] - parts[0]) / parts[2] + 1e-9))
        return parts[0] + parts[2] * np.arange(n + 1)
    return np.array(_numbers(text, "grid"))


def parse_params(items) -> dict[str, float]:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise DomainError(f"param: expected KEY=VALUE, got {item!r}")
        out[key.strip()] = _numbers(val, f"param {key}")[0]
    return out


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from None
    if not isinstance(cfg, dict):
        raise DomainError(f"{path}: top level must be an object")
    return cfg


# ---------------------------------------------------------------------------
# Operation registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Operation:
    """A curve-able operation.  ``value(ev, x, params)`` returns a number or
    an array (matrix and vector results become several columns).
    ``mc(params, grid)`` returns ``(barrier spec, functional per grid point)``."""

    name: str
    target: str
    help: str
    value: Callable
    params: tuple = ()
    mc: Callable | None = None
    needs_ph: bool = False


def _bins(grid, make):
    step = float(np.min(np.diff(grid))) if len(grid) > 1 else 0.1
    return [make(x - 0.5 * step, x + 0.5 * step) for x in grid]


def _registry() -> dict[str, Operation]:
    ops = [
        Operation("p-up", "fluct.p_up_before_horizon", "P(tau_x+ < T)",
                  lambda ev, x, p: F.p_up_before_horizon(ev, x),
                  mc=lambda p, g: (mcsim.BarrierSpec(), [mcsim.f_up(x) for x in g])),
        Operation("p-two-sided", "fluct.p_two_sided_up",
                  "P(tau_x+ < tau_-y- and T); y fixed, or y = width - x",
                  lambda ev, x, p: F.p_two_sided_up(ev, x, _y(p, x)), ("y", "width"),
                  mc=lambda p, g: (mcsim.BarrierSpec(up=tuple(g)), [mcsim.f_two_sided_up(x, _y(p, x)) for x in g])),
        Operation("reflected", "fluct.reflected_passage",
                  "E_x(exp(-theta R); eta_a < T) for the reflected process started at x",
                  lambda ev, x, p: F.reflected_passage(ev, x, p["a"], p.get("theta", 0.0)), ("a", "theta"),
                  mc=lambda p, g: (mcsim.BarrierSpec(reflect=tuple((x, p["a"]) for x in g)),
                                   [mcsim.f_reflected(x, p["a"]) for x in g]) if not p.get("theta") else None),
        Operation("down-two-sided", "fluct.down_exit_two_sided",
                  "E_x(exp(-theta tau_0-); tau_0- < tau_a+ and T)",
                  lambda ev, x, p: F.down_exit_two_sided(ev, x, p["a"], p.get("theta", 0.0)), ("a", "theta"),
                  mc=lambda p, g: (mcsim.BarrierSpec(down=tuple(g)), [mcsim.f_down_two_sided(x, p["a"]) for x in g])
                  if not p.get("theta") else None),
        Operation("down-one-sided", "fluct.down_exit_one_sided", "E_x(exp(-theta tau_0-); tau_0- < T)",
                  lambda ev, x, p: F.down_exit_one_sided(ev, x, p.get("theta", 0.0)), ("theta",),
                  mc=lambda p, g: (mcsim.BarrierSpec(), [mcsim.f_down_one_sided(x) for x in g])
                  if not p.get("theta") else None),
        Operation("two-barrier-density", "fluct.two_barrier_density",
                  "density of X_T at x on no exit from (-a, b)",
                  lambda ev, x, p: F.two_barrier_density(ev, p["a"], p["b"], x), ("a", "b"),
                  mc=lambda p, g: (mcsim.BarrierSpec(),
                                   _bins(g, lambda lo, hi: mcsim.f_two_barrier_bin(p["a"], p["b"], lo, hi)))),
        Operation("wh-sup-factor", "fluct.wh_sup_factor", "row vector alpha exp(-Phi x)",
                  lambda ev, x, p: F.wh_sup_factor(ev, x)),
        Operation("wh-inf-factor-cdf", "fluct.wh_inf_factor_cdf", "column vector (Phi^-1 W(y) - int W) t",
                  lambda ev, x, p: F.wh_inf_factor_cdf(ev, x)),
        Operation("wh-inf-cdf", "fluct.wh_inf_cdf", "P(-inf X_T <= y)",
                  lambda ev, x, p: F.wh_inf_cdf(ev, x),
                  mc=lambda p, g: (mcsim.BarrierSpec(), [lambda s, y=y: -s.inf <= y for y in g])),
        Operation("wh-inf-density", "fluct.wh_inf_density", "density of -inf X_T",
                  lambda ev, x, p: F.wh_inf_density(ev, x),
                  mc=lambda p, g: (mcsim.BarrierSpec(), _bins(g, mcsim.f_inf_bin))),
        Operation("wh-inf-atom", "fluct.wh_inf_atom", "P(inf X_T = 0) (constant in x)",
                  lambda ev, x, p: F.wh_inf_atom(ev)),
        Operation("wh-joint-density", "fluct.wh_joint_density", "joint density of (sup, sup - X_T) at (x, y)",
                  lambda ev, x, p: F.wh_joint_density(ev, x, p["y"])[0], ("y",)),
        Operation("wh-joint-cdf-rectangle", "fluct.wh_joint_cdf_rectangle",
                  "P(sup in (x0, x], sup - X_T in [y0, y1])",
                  lambda ev, x, p: F.wh_joint_cdf_rectangle(ev, p.get("x0", 0.0), x, p.get("y0", 0.0), p["y1"]),
                  ("x0", "y0", "y1")),
        Operation("wh-bivariate", "fluct.wh_bivariate_transform", "E exp(-u sup - v (sup - X_T)) at u = x",
                  lambda ev, x, p: F.wh_bivariate_transform(ev, x, p["v"]), ("v",)),
        Operation("option-price", "fluct.option_price",
                  "exp(u) E[(exp(-u) - exp(inf X_T))+ exp(beta (X_T - inf X_T))] at u = x",
                  lambda ev, x, p: F.option_price(ev, x, p.get("beta", 0.0)), ("beta",),
                  mc=lambda p, g: (mcsim.BarrierSpec(), [mcsim.f_option(x, p.get("beta", 0.0)) for x in g])),
        Operation("ph-observation-ruin", "fluct.ph_observation_ruin",
                  "P(tau_x+ before ruin observed at PH epochs)",
                  lambda ev, x, p: F.ph_observation_ruin(ev, x), needs_ph=True),
        Operation("scale-w", "scale.w_matrix", "entries of W_{-T}(x)", lambda ev, x, p: scale.w_matrix(ev, x)),
        Operation("scale-w-prime", "scale.w_prime_matrix", "entries of W'_{-T}(x)",
                  lambda ev, x, p: scale.w_prime_matrix(ev, x)),
        Operation("scale-z", "scale.z_matrix", "entries of Z_{-T}(theta, x)",
                  lambda ev, x, p: scale.z_matrix(ev, p.get("theta", 0.0), x).value, ("theta",)),
        Operation("scale-w-scalar", "scale.w_scalar", "scalar W_q(x); complex q = q_re + i q_im",
                  lambda ev, x, p: scale.w_scalar(ev, complex(p["q_re"], p.get("q_im", 0.0)), x), ("q_re", "q_im")),
        Operation("scale-w-series", "scale.w_matrix_series_oracle", "convolution-series W_{-T}(x)",
                  lambda ev, x, p: scale.w_matrix_series_oracle(ev, x, h=p.get("h", 1e-4)), ("h",)),
    ]
    return {op.name: op for op in ops}


def _y(p: dict, x: float) -> float:
    if "y" in p:
        return p["y"]
    if "width" in p:
        return round(p["width"] - x, 12)
    raise DomainError("p-two-sided needs param y or width")


REGISTRY = _registry()


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def fmt(v) -> str:
    """Full double precision (17 significant digits)."""
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        return repr(v)
    return f"{v:.17g}"


def write_csv(rows: list[list], header: list[str], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in r])


def read_csv(text: str) -> tuple[list[str], np.ndarray]:
    """Parse CSV written by :func:`write_csv` back into a header and a float array."""
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def _columns(name: str, value) -> tuple[list[str], list[float]]:
    arr = np.asarray(value)
    if np.iscomplexobj(arr):
        if np.all(np.abs(arr.imag) <= 1e-12 * max(1.0, float(np.max(np.abs(arr))))):
            arr = arr.real
        else:
            flat = arr.reshape(-1)
            return ([f"{name}_re", f"{name}_im"] if arr.ndim == 0 else
                    [f"{name}_{k}_{part}" for k in range(1, flat.size + 1) for part in ("re", "im")],
                    [v for z in flat for v in (z.real, z.imag)])
    if arr.ndim == 0:
        return [name], [float(arr)]
    if arr.ndim == 1:
        return [f"{name}_{i + 1}" for i in range(arr.size)], [float(v) for v in arr]
    return ([f"{name}_{i + 1}{j + 1}" for i in range(arr.shape[0]) for j in range(arr.shape[1])],
            [float(v) for v in arr.reshape(-1)])


def _emit(text: str, path: str | None) -> None:
    if path and path != "-":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    model: LevyModel
    horizon: medist.MERep
    seed: int = validate.DEFAULT_SEED
    paths: int = 3000
    h: float = 1e-3
    op: str | None = None
    grid: np.ndarray | None = None
    params: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "json"


def resolve(args) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    model = args.model or cfg.get("model") or "stable:1.5"
    horizon = args.builtin or args.horizon or cfg.get("horizon") or "paper-sec7"
    seed = cfg.get("seed", validate.DEFAULT_SEED)
    if os.environ.get("LEVYME_SEED"):
        try:
            seed = int(os.environ["LEVYME_SEED"])
        except ValueError:
            raise DomainError("LEVYME_SEED must be an integer") from None
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    mc = cfg.get("mc", {})
    rc = RunConfig(
        model=parse_model(model),
        horizon=parse_horizon(horizon),
        seed=int(seed),
        paths=int(getattr(args, "paths", None) or mc.get("paths", 3000)),
        h=float(getattr(args, "h", None) or mc.get("h", 1e-3)),
        op=getattr(args, "op", None) or cfg.get("operation"),
        params={**{k: float(v) for k, v in cfg.get("params", {}).items()}, **parse_params(getattr(args, "param", None))},
        output=getattr(args, "out", None) or cfg.get("output"),
        fmt=getattr(args, "format", None) or cfg.get("format", "json"),
    )
    grid = getattr(args, "grid", None) or cfg.get("grid")
    if grid is not None:
        rc.grid = parse_grid(grid) if isinstance(grid, str) else np.asarray(grid, dtype=float)
    return rc


def cmd_phi(args) -> int:
    rc = resolve(args)
    ph = phi_matrix(rc.model, rc.horizon)
    off, row = ph.sub_intensity_defect()
    if rc.fmt == "csv":
        buf = io.StringIO()
        write_csv([list(r) for r in ph.value], [f"c{j + 1}" for j in range(ph.value.shape[1])], buf)
        _emit(buf.getvalue(), rc.output)
        return EXIT_OK
    doc = {
        "model": repr(rc.model),
        "horizon_order": rc.horizon.p,
        "matrix": [[float(v) for v in r] for r in ph.value],
        "residual": ph.residual,
        "eigenvalues": [[float(z.real), float(z.imag)] for z in np.atleast_1d(ph.eigenvalues)],
        "sub_intensity": {"holds": ph.is_sub_intensity(), "min_off_diagonal": off, "max_row_sum": row},
        "horizon_is_ph": medist.is_ph(rc.horizon),
    }
    _emit(json.dumps(doc, indent=2) + "\n", rc.output)
    return EXIT_OK


def cmd_curve(args) -> int:
    rc = resolve(args)
    if rc.op not in REGISTRY:
        raise UnknownOperation(f"unknown operation {rc.op!r}; available: {', '.join(REGISTRY)}")
    op = REGISTRY[rc.op]
    grid = rc.grid if rc.grid is not None else parse_grid("0:1:0.1")
    ev = ScaleEval(rc.model, rc.horizon)
    rows, header = [], None
    for x in grid:
        try:
            value = op.value(ev, float(x), rc.params)
        except KeyError as exc:
            raise DomainError(f"operation {op.name!r} needs --param {exc.args[0]}=VALUE") from None
        cols, vals = _columns("value", value)
        header = header or ["argument", *cols]
        rows.append([float(x), *vals])
    if args.mc:
        if op.needs_ph:
            cfg = mcsim.SimConfig(h=rc.h, paths=rc.paths, seed=rc.seed)
            ests = [mcsim.observation_ruin_simulate(rc.model, rc.horizon, float(x), cfg)[:2] for x in grid]
        else:
            plan = op.mc(rc.params, [round(float(x), 12) for x in grid]) if op.mc else None
            if plan is None:
                raise UnknownOperation(f"operation {op.name!r} has no simulation estimator for these parameters")
            spec, funcs = plan
            s = mcsim.simulate_paths(rc.model, rc.horizon, mcsim.SimConfig(h=rc.h, paths=rc.paths, seed=rc.seed), spec)
            ests = [mcsim.estimate(s, f) for f in funcs]
        header += ["mc_estimate", "mc_se"]
        for r, (e, se) in zip(rows, ests):
            r += [e, se]
    buf = io.StringIO()
    write_csv(rows, header, buf)
    _emit(buf.getvalue(), rc.output)
    return EXIT_OK


def invariant_checks(rc: RunConfig) -> list[validate.Check]:
    """Property checks on the configured model and horizon."""
    out = []
    Check = validate.Check
    ph = phi_matrix(rc.model, rc.horizon)
    out.append(Check("Phi residual", "pass" if ph.residual <= 1e-7 else "fail", ph.residual, 1e-7))
    if medist.is_ph(rc.horizon):
        off, row = ph.sub_intensity_defect()
        out.append(Check("sub-intensity generator", "pass" if ph.is_sub_intensity() else "fail",
                         max(-off, row, 0.0), 1e-9))
    ev = ScaleEval(rc.model, rc.horizon)
    xs = np.linspace(0.0, 2.0, 21)
    ups = np.array([F.p_up_before_horizon(ev, x) for x in xs])
    rise = float(max(np.max(np.diff(ups)), 0.0))
    out.append(Check("P(tau_x+ < T) nonincreasing", "pass" if rise <= 1e-12 else "fail", rise, 1e-12))
    # a far upper barrier changes the downward exit by at most P(tau_{a-x}+ < T)
    slack = max(abs(F.down_exit_two_sided(ev, x, 25.0) - F.down_exit_one_sided(ev, x))
                - F.p_up_before_horizon(ev, 25.0 - x) for x in (0.5, 1.0, 2.0))
    out.append(Check("far-barrier two-sided vs one-sided exit", "pass" if slack <= 1e-8 else "fail", slack, 1e-8))
    excess = max(0.0, max(F.p_two_sided_up(ev, x, 1.0) - F.p_up_before_horizon(ev, x) for x in (0.25, 0.5, 1.0)))
    out.append(Check("two-sided below one-sided", "pass" if excess <= 1e-12 else "fail", excess, 1e-12))
    if rc.horizon.defect >= 1 - 1e-9:
        s = mcsim.simulate_paths(rc.model, rc.horizon, mcsim.SimConfig(h=rc.h, paths=rc.paths, seed=rc.seed))
        est, se = mcsim.estimate(s, mcsim.f_up(0.5))
        z = abs(est - F.p_up_before_horizon(ev, 0.5)) / se
        out.append(Check("MC P(tau_0.5+ < T)", "pass" if z <= 3 else "fail", z, 3.0))
    return out


def cmd_validate(args) -> int:
    rc = resolve(args)
    checks = invariant_checks(rc)
    only = [k.strip() for k in args.only.split(",")] if args.only else None
    if not args.skip_acceptance:
        for key in only or [name for _, name, _ in validate.ACCEPTANCE]:
            try:
                checks.append(validate.run_check(key, rc.seed))
            except KeyError:
                raise UnknownOperation(f"unknown check {key!r}") from None
    if not args.quiet:
        for c in checks:
            print(c.line(), file=sys.stderr)
    doc = validate.report(checks, rc.seed)
    _emit(json.dumps(doc, indent=2) + "\n", args.report)
    return EXIT_OK if doc["passed"] else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration; flags override its fields")
    p.add_argument("--model", help="stable:A | bm:SIGMA,GAMMA | cl:C,LAM,RATE[,SIGMA]")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--builtin", choices=sorted(BUILTINS), help="named horizon")
    g.add_argument("--horizon", help="exp:Q | erlang:K,RATE | terms:PATH | built-in name")
    p.add_argument("--seed", type=int, help="RNG seed (overrides LEVYME_SEED and the config)")


def build_parser() -> argparse.ArgumentParser:
    ops = "\n".join(f"  {op.name:24s} {op.help}" for op in REGISTRY.values())
    parser = argparse.ArgumentParser(
        prog="levyme",
        description="Fluctuation identities of spectrally negative Levy processes at matrix-exponential horizons.",
        epilog=f"operations for 'curve --op':\n{ops}",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phi", help="first-passage matrix Phi(-T)")
    _common(p)
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("curve", help="evaluate an operation over a grid", epilog=f"operations:\n{ops}",
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    p.add_argument("--op", help="operation name (see below)")
    p.add_argument("--grid", help="START:STOP:STEP or comma list (default 0:1:0.1)")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="operation parameter (repeatable)")
    p.add_argument("--mc", action="store_true", help="add mc_estimate and mc_se columns")
    p.add_argument("--paths", type=int, help="MC paths (default 3000)")
    p.add_argument("--h", type=float, help="MC grid step (default 0.001)")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("validate", help="run invariant and acceptance checks")
    _common(p)
    p.add_argument("--only", help="comma-separated acceptance checks: " + ",".join(n for _, n, _ in validate.ACCEPTANCE))
    p.add_argument("--skip-acceptance", action="store_true", help="run only the invariant checks")
    p.add_argument("--paths", type=int, help="MC paths for the invariant checks")
    p.add_argument("--h", type=float, help="MC grid step for the invariant checks")
    p.add_argument("--report", help="JSON report path (default stdout)")
    p.add_argument("--quiet", action="store_true", help="do not print check lines to stderr")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except DomainError as exc:
        print(f"levyme: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"levyme: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except LevyMEError as exc:
        print(f"levyme: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
