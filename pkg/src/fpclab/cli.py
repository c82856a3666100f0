"""Command-line front end: JSON config in, CSV tables (and optional SVG plots) out.

Usage::

    fpclab <command> [--config file.json] [--seed N] [--out dir] [--trials N] [--svg]

Commands: ``analytic``, ``simulate``, ``sweep``, ``optimize``, ``loss-curve``
and ``reproduce``. Exit status is 0 on success, 1 for invalid input and 2
when a numerical routine fails to converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field

from . import analytic, optimize
from ._svg import line_plot
from .analytic import NetworkParams, PowerControlPolicy
from .errors import ConfigError, ConvergenceError, FPCError
from .fading import parse_fading
from .simulate import SimConfig, estimate_outage

__all__ = ["RunConfig", "COMMANDS", "FIGURES", "parse_config", "run", "main"]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
COMMANDS = ("analytic", "simulate", "sweep", "optimize", "loss-curve", "reproduce")
FIGURES = tuple(f"fig{k}" for k in range(1, 11))

_S_AXIS = [round(0.05 * k, 2) for k in range(20)]  # 0 .. 0.95
_DEFAULT_SWEEP_VALUES = {
    "vs_s": _S_AXIS,
    "vs_alpha": [round(2.2 + 0.2 * k, 1) for k in range(15)],
    "vs_snr": [5.0 + 2.5 * k for k in range(15)],
    "vs_beta": [-10.0 + 2.0 * k for k in range(11)],
    "vs_lambda": [10.0 ** (-5 + 0.25 * k) for k in range(9)],
    "loss_curve": [2.1, 3.0, 4.0],
}

# panels of the outage-vs-s figures: (file suffix, parameter overrides)
_PANELS = {
    "fig2": [("", {})],
    "fig3": [("a", {"alpha": 2.2}), ("b", {"alpha": 5.0})],
    "fig4": [("a", {"snr_db": 10.0}), ("b", {"snr_db": 30.0})],
    "fig5": [("a", {"beta_db": -10.0}), ("b", {"beta_db": 10.0})],
    "fig6": [("a", {"lam": 1e-5}), ("b", {"lam": 1e-3})],
}
_OPTIMUM_FIGS = {"fig7": "vs_alpha", "fig8": "vs_snr", "fig9": "vs_beta", "fig10": "vs_lambda"}


@dataclass
class RunConfig:
    """Fully resolved and validated run description."""

    command: str
    seed: int = 0
    params: NetworkParams = field(default_factory=NetworkParams)
    policy: PowerControlPolicy = field(default_factory=PowerControlPolicy)
    sim: dict = field(default_factory=dict)
    epsilon: float = 0.05
    b: float | None = None
    sweep_kind: str = "vs_s"
    sweep_values: list | None = None
    methods: tuple = optimize.METHODS
    deltas: tuple = (1.0, 10.0)
    objective: dict = field(default_factory=dict)
    alphas: tuple = (2.1, 3.0, 4.0)
    s_step: float = 0.01
    targets: tuple = FIGURES
    optimum_methods: tuple = (optimize.LOWER, optimize.JENSEN)
    out_dir: str = "fpclab_out"
    svg: bool = False

    def sim_config(self, policy=None, params=None) -> SimConfig:
        return SimConfig(params or self.params, policy or self.policy,
                         master_seed=self.seed, **self.sim)

    def objective_spec(self, method=optimize.JENSEN) -> optimize.ObjectiveSpec:
        opts = dict(self.objective)
        opts.setdefault("n_trials", self.sim.get("n_trials", 200_000))
        sim_opts = {k: v for k, v in self.sim.items() if k != "n_trials"}
        return optimize.ObjectiveSpec(method=method, master_seed=self.seed,
                                      sim_options=sim_opts, **opts)

    def to_dict(self) -> dict:
        """JSON-ready form recorded in every CSV header (output options left out)."""
        prm = self.params
        return {
            "command": self.command,
            "seed": self.seed,
            "params": {"alpha": prm.alpha, "beta": prm.beta, "d": prm.d, "p": prm.p,
                       "eta": prm.eta, "lam": prm.lam},
            "policy": {"s": self.policy.s, "fading": self.policy.fading.to_config()},
            "sim": dict(sorted(self.sim.items())),
            "analytic": {"epsilon": self.epsilon, "b": self.b},
            "sweep": {"kind": self.sweep_kind, "values": self.sweep_values,
                      "methods": list(self.methods), "deltas": list(self.deltas)},
            "optimize": dict(sorted(self.objective.items())),
            "loss_curve": {"alphas": list(self.alphas), "s_step": self.s_step},
            "reproduce": {"targets": list(self.targets),
                          "optimum_methods": list(self.optimum_methods)},
        }


# ---------------------------------------------------------------- parsing

def _section(obj, name, allowed):
    sec = obj.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"'{name}' must be an object")
    unknown = set(sec) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {sorted(unknown)}")
    return sec


def _number(sec, key, where, default=None):
    v = sec.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {v!r}")
    return float(v)


def _number_list(v, where):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{where} must be a non-empty list of numbers")
    out = []
    for x in v:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigError(f"{where} must contain numbers only, got {x!r}")
        out.append(float(x))
    return out


def _parse_params(sec):
    where = "params"
    kw = {}
    for key in ("alpha", "d", "p"):
        if key in sec:
            kw[key] = _number(sec, key, where)
    if "beta" in sec and "beta_db" in sec:
        raise ConfigError("give only one of params.beta and params.beta_db")
    if "beta" in sec:
        kw["beta"] = _number(sec, "beta", where)
    elif "beta_db" in sec:
        kw["beta"] = 10.0 ** (_number(sec, "beta_db", where) / 10.0)
    if "lam" in sec and "lambda" in sec:
        raise ConfigError("give only one of params.lam and params.lambda")
    if "lam" in sec or "lambda" in sec:
        kw["lam"] = _number(sec, "lam" if "lam" in sec else "lambda", where)
    noise_keys = [k for k in ("eta", "snr", "snr_db") if k in sec]
    if len(noise_keys) > 1:
        raise ConfigError("give only one of params.eta, params.snr and params.snr_db")
    if noise_keys == ["eta"]:
        kw["eta"] = _number(sec, "eta", where)
    base = NetworkParams(**kw)
    if noise_keys == ["snr"]:
        return NetworkParams.from_snr(_number(sec, "snr", where), **kw)
    if noise_keys == ["snr_db"]:
        return NetworkParams.from_snr(10.0 ** (_number(sec, "snr_db", where) / 10.0),
                                      **kw)
    return base


def _choices(v, allowed, where):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{where} must be a non-empty list")
    for x in v:
        if x not in allowed:
            raise ConfigError(f"{where}: unknown entry {x!r}; expected one of {list(allowed)}")
    return tuple(v)


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Parse and validate a JSON config; missing fields take their defaults.

    ``command`` (from the command line) overrides the ``command`` key.
    Raises :class:`ConfigError` (or another validation error) naming the
    offending field.
    """
    try:
        obj = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    top = {"command", "seed", "params", "policy", "sim", "analytic", "sweep",
           "optimize", "loss_curve", "reproduce", "output"}
    unknown = set(obj) - top
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {sorted(unknown)}")

    cmd = command or obj.get("command")
    if cmd is None:
        raise ConfigError("no command given")
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown command {cmd!r}; expected one of {list(COMMANDS)}")
    cfg = RunConfig(command=cmd)

    seed = obj.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed must be a non-negative 64-bit integer")
    cfg.seed = seed

    cfg.params = _parse_params(_section(obj, "params", (
        "alpha", "beta", "beta_db", "d", "p", "eta", "snr", "snr_db", "lam", "lambda")))
    pol = _section(obj, "policy", ("s", "fading"))
    cfg.policy = PowerControlPolicy(_number(pol, "s", "policy", 0.5),
                                    parse_fading(pol.get("fading", "rayleigh")))

    sim = _section(obj, "sim", ("n_trials", "truncation_rel_tol", "min_radius_factor",
                                "exact_count"))
    for key, value in sim.items():
        if key == "n_trials":
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError("sim.n_trials must be a positive integer")
        else:
            _number(sim, key, "sim")
    cfg.sim = dict(sim)

    ana = _section(obj, "analytic", ("epsilon", "b"))
    cfg.epsilon = _number(ana, "epsilon", "analytic", 0.05)
    if not 0 < cfg.epsilon < 1:
        raise ConfigError("analytic.epsilon must lie in (0, 1)")
    cfg.b = _number(ana, "b", "analytic")
    if cfg.b is not None and not cfg.b > 0:
        raise ConfigError("analytic.b must be positive")

    sw = _section(obj, "sweep", ("kind", "values", "methods", "deltas"))
    cfg.sweep_kind = sw.get("kind", "vs_s")
    if cfg.sweep_kind not in optimize.SWEEP_KINDS:
        raise ConfigError(f"sweep.kind must be one of {list(optimize.SWEEP_KINDS)}")
    if "values" in sw:
        cfg.sweep_values = _number_list(sw["values"], "sweep.values")
    if "methods" in sw:
        cfg.methods = _choices(sw["methods"], optimize.METHODS, "sweep.methods")
    if "deltas" in sw:
        cfg.deltas = tuple(_number_list(sw["deltas"], "sweep.deltas"))
        if any(x < 0 for x in cfg.deltas):
            raise ConfigError("sweep.deltas must be non-negative")

    opt = _section(obj, "optimize", ("s_range", "grid_step", "refine_tol", "n_trials"))
    objective = {}
    if "s_range" in opt:
        rng = _number_list(opt["s_range"], "optimize.s_range")
        if len(rng) != 2:
            raise ConfigError("optimize.s_range must have two entries")
        objective["s_range"] = tuple(rng)
    for key in ("grid_step", "refine_tol"):
        if key in opt:
            objective[key] = _number(opt, key, "optimize")
    if "n_trials" in opt:
        n = opt["n_trials"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ConfigError("optimize.n_trials must be a positive integer")
        objective["n_trials"] = n
    cfg.objective = objective

    lc = _section(obj, "loss_curve", ("alphas", "s_step"))
    if "alphas" in lc:
        cfg.alphas = tuple(_number_list(lc["alphas"], "loss_curve.alphas"))
    cfg.s_step = _number(lc, "s_step", "loss_curve", 0.01)
    if not 0 < cfg.s_step <= 1:
        raise ConfigError("loss_curve.s_step must lie in (0, 1]")

    rp = _section(obj, "reproduce", ("targets", "optimum_methods"))
    if "targets" in rp:
        cfg.targets = _choices(rp["targets"], FIGURES, "reproduce.targets")
    if "optimum_methods" in rp:
        cfg.optimum_methods = _choices(rp["optimum_methods"], optimize.METHODS,
                                       "reproduce.optimum_methods")

    out = _section(obj, "output", ("dir", "svg"))
    cfg.out_dir = out.get("dir", cfg.out_dir)
    if not isinstance(cfg.out_dir, str) or not cfg.out_dir:
        raise ConfigError("output.dir must be a non-empty string")
    cfg.svg = out.get("svg", False)
    if not isinstance(cfg.svg, bool):
        raise ConfigError("output.svg must be true or false")

    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    """Checks that depend on the command; run again after flag overrides."""
    if cfg.command == "simulate":
        cfg.sim_config()
    else:
        SimConfig(cfg.params, PowerControlPolicy(0.0, cfg.policy.fading), **cfg.sim)
    cfg.objective_spec()
    if cfg.command == "loss-curve" or "fig1" in cfg.targets:
        for a in cfg.alphas:
            if not a > 2:
                raise ConfigError("loss_curve.alphas must all exceed 2")


# ---------------------------------------------------------------- output

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.12g" % v
    if isinstance(v, int):
        return str(v)
    return "" if v is None else str(v)


def csv_text(columns, rows, config: dict) -> str:
    """CSV with schema-version and config comment lines, values at ``%.12g``."""
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    buf.write("# config: " + json.dumps(config, sort_keys=True, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


class _Writer:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.files = []
        self.warnings = 0
        os.makedirs(cfg.out_dir, exist_ok=True)

    def table(self, name, columns, rows):
        path = os.path.join(self.cfg.out_dir, name + ".csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text(columns, rows, self.cfg.to_dict()))
        self.files.append(path)
        self.warnings += sum(1 for r in rows if r.get("error"))

    def plot(self, name, series, **labels):
        if not self.cfg.svg:
            return
        path = os.path.join(self.cfg.out_dir, name + ".svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(line_plot(series, **labels))
        self.files.append(path)


def _column(rows, key, x="s"):
    return [r[x] for r in rows], [r[key] for r in rows]


# ---------------------------------------------------------------- commands

def _cmd_analytic(cfg, out):
    pol, prm = cfg.policy, cfg.params
    row = {"s": pol.s, "q_lb": math.nan, "quad_err_lb": math.nan, "q_jensen": math.nan,
           "kappa": math.nan, "epsilon": cfg.epsilon, "density": math.nan,
           "capacity": math.nan, "error": ""}
    errors = []
    try:
        lb = analytic.outage_lb_fpc(pol, prm)
        row["q_lb"], row["quad_err_lb"] = lb.value, lb.quadrature_error
        row["q_jensen"] = analytic.outage_jensen_fpc(pol, prm).value
        if pol.s < 1.0:
            row["kappa"] = analytic.kappa(pol, prm)
    except ConvergenceError:
        raise
    except FPCError as exc:
        errors.append(str(exc))
    try:
        row["density"] = analytic.density_fpc(pol, prm, cfg.epsilon)
        row["capacity"] = analytic.transmission_capacity(prm, cfg.epsilon, row["density"], cfg.b)
    except ConvergenceError:
        raise
    except FPCError as exc:
        errors.append(str(exc))
    row["error"] = "; ".join(errors)
    out.table("analytic", list(row), [row])


def _cmd_simulate(cfg, out):
    sim = cfg.sim_config()
    est = estimate_outage(sim)
    row = {"s": cfg.policy.s, "p_hat": est.p_hat, "std_err": est.std_err,
           "ci95_lo": est.ci95[0], "ci95_hi": est.ci95[1], "outages": est.outages,
           "n_trials": est.n_trials, "seed": est.seed}
    out.table("simulate", list(row), [row])


def _plot_vs_s(out, name, res, title):
    series = {}
    for key, label in (("q_sim", "simulated"), ("q_lb", "lower bound"), ("q_jensen", "Jensen")):
        if key in res.columns:
            series[label] = _column(res.rows, key)
    out.plot(name, series, title=title, xlabel="s", ylabel="outage probability", log_y=True)


def _plot_optimum(out, name, res, title):
    x = res.swept_param
    series = {}
    methods = sorted({r["method"] for r in res.rows})
    for m in methods:
        rows = [r for r in res.rows if r["method"] == m]
        series[f"s* ({m})"] = _column(rows, "s_star", x)
        for key in res.columns:
            if key.startswith("s_lo_") or key.startswith("s_hi_"):
                series[f"{key} ({m})"] = _column(rows, key, x)
    out.plot(name, series, title=title, xlabel=f"{x} {res.unit}".strip(), ylabel="s")


def _run_sweep(cfg, kind, values, params=None, methods=None):
    return optimize.sweep(kind, params or cfg.params, cfg.policy, values,
                          methods=methods or cfg.methods, objective=cfg.objective_spec(),
                          deltas=cfg.deltas, s_values=_loss_grid(cfg))


def _loss_grid(cfg):
    return list(optimize.s_grid(0.0, 1.0, cfg.s_step))


def _cmd_sweep(cfg, out):
    values = cfg.sweep_values or _DEFAULT_SWEEP_VALUES[cfg.sweep_kind]
    res = _run_sweep(cfg, cfg.sweep_kind, values)
    name = f"sweep_{cfg.sweep_kind}"
    out.table(name, list(res.columns), res.rows)
    if cfg.sweep_kind == "vs_s":
        _plot_vs_s(out, name, res, "outage vs s")
    elif cfg.sweep_kind == "loss_curve":
        _plot_loss(out, name, res)
    else:
        _plot_optimum(out, name, res, f"optimal s vs {res.swept_param}")


def _plot_loss(out, name, res):
    series = {}
    for a in sorted({r["alpha"] for r in res.rows}):
        rows = [r for r in res.rows if r["alpha"] == a]
        series[f"alpha={a:g}"] = _column(rows, "loss_factor")
    out.plot(name, series, title="loss factor vs s", xlabel="s", ylabel="L")


def _cmd_loss_curve(cfg, out):
    res = optimize.sweep("loss_curve", cfg.params, cfg.policy, cfg.alphas,
                         s_values=_loss_grid(cfg))
    out.table("loss_curve", ["alpha", "s", "loss_factor"], res.rows)
    _plot_loss(out, "loss_curve", res)


def _cmd_optimize(cfg, out):
    rows = []
    columns = ["method", "s_star", "q_star", "flat", "n_clipped"]
    for dlt in cfg.deltas:
        columns += [f"s_lo_{dlt:g}", f"s_hi_{dlt:g}", f"lo_at_edge_{dlt:g}", f"hi_at_edge_{dlt:g}"]
    columns.append("error")
    for m in cfg.methods:
        row = {"method": m, "error": ""}
        try:
            spec = cfg.objective_spec(m)
            opt = optimize.optimal_exponent(spec, cfg.params, cfg.policy.fading)
            row.update(s_star=opt.s_star, q_star=opt.q_star, flat=opt.flat,
                       n_clipped=len(opt.clipped))
            for dlt in cfg.deltas:
                band = optimize.robustness_band(spec, cfg.params, cfg.policy.fading, dlt, opt)
                row.update({f"s_lo_{dlt:g}": band.s_lo, f"s_hi_{dlt:g}": band.s_hi,
                            f"lo_at_edge_{dlt:g}": band.lo_at_edge,
                            f"hi_at_edge_{dlt:g}": band.hi_at_edge})
        except ConvergenceError:
            raise
        except FPCError as exc:
            row["error"] = str(exc)
        rows.append(row)
    out.table("optimize", columns, rows)


def _panel_params(base: NetworkParams, overrides):
    kw = dict(alpha=base.alpha, beta=base.beta, d=base.d, p=base.p, lam=base.lam)
    snr = base.snr
    for key, value in overrides.items():
        if key == "snr_db":
            snr = 10.0 ** (value / 10.0)
        elif key == "beta_db":
            kw["beta"] = 10.0 ** (value / 10.0)
        else:
            kw[key] = value
    return NetworkParams.from_snr(snr, **kw)


def _cmd_reproduce(cfg, out):
    for target in cfg.targets:
        if target == "fig1":
            res = optimize.sweep("loss_curve", cfg.params, cfg.policy, cfg.alphas,
                                 s_values=_loss_grid(cfg))
            out.table("fig1", ["alpha", "s", "loss_factor"], res.rows)
            _plot_loss(out, "fig1", res)
        elif target in _PANELS:
            for suffix, overrides in _PANELS[target]:
                prm = _panel_params(cfg.params, overrides)
                res = _run_sweep(cfg, "vs_s", _S_AXIS, params=prm)
                name = target + suffix
                out.table(name, list(res.columns), res.rows)
                desc = ", ".join(f"{k}={v:g}" for k, v in overrides.items()) or "defaults"
                _plot_vs_s(out, name, res, f"outage vs s ({desc})")
        else:
            kind = _OPTIMUM_FIGS[target]
            res = _run_sweep(cfg, kind, _DEFAULT_SWEEP_VALUES[kind],
                             methods=cfg.optimum_methods)
            out.table(target, list(res.columns), res.rows)
            _plot_optimum(out, target, res, f"optimal s vs {res.swept_param}")


_DISPATCH = {
    "analytic": _cmd_analytic,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "optimize": _cmd_optimize,
    "loss-curve": _cmd_loss_curve,
    "reproduce": _cmd_reproduce,
}


def run(cfg: RunConfig, stream=None) -> int:
    """Execute a parsed config, write its artifacts and return the exit status."""
    stream = stream or sys.stdout
    try:
        out = _Writer(cfg)
        _DISPATCH[cfg.command](cfg, out)
    except ConvergenceError as exc:
        print(f"fpclab {cfg.command}: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (FPCError, ValueError, OSError) as exc:
        print(f"fpclab {cfg.command}: error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"fpclab {cfg.command}: numerical failure: {exc}", file=sys.stderr)
        return 2
    print(f"fpclab {cfg.command}: wrote {len(out.files)} file(s) to {cfg.out_dir}"
          f" ({out.warnings} warning(s))", file=stream)
    return 0


def _build_parser():
    ap = argparse.ArgumentParser(prog="fpclab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--seed", type=int, help="master seed (overrides config)")
    ap.add_argument("--out", help="output directory (overrides config)")
    ap.add_argument("--trials", type=int, help="Monte-Carlo trials (overrides config)")
    ap.add_argument("--svg", action="store_true", help="also write SVG plots")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        cfg = parse_config(text, command=args.command)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be a non-negative 64-bit integer")
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out_dir = args.out
        if args.trials is not None:
            if args.trials < 1:
                raise ConfigError("--trials must be positive")
            cfg.sim = {**cfg.sim, "n_trials": args.trials}
            cfg.objective = {**cfg.objective, "n_trials": args.trials}
        if args.svg:
            cfg.svg = True
        validate(cfg)
    except (FPCError, ValueError, OSError) as exc:
        print(f"fpclab: invalid configuration: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
