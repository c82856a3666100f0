"""Optimal power-control exponent, robustness bands and parameter sweeps."""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .analytic import NetworkParams, PowerControlPolicy
from .errors import ConfigError, DivergenceError, DomainError, FPCError, InfeasibleError
from .fading import FadingModel, parse_fading
from .numerics import minimize_unimodal
from .simulate import SimConfig, estimate_outage, exact_radius

__all__ = [
    "ObjectiveSpec",
    "Optimum",
    "RobustnessBand",
    "ConvexityReport",
    "SweepResult",
    "METHODS",
    "SWEEP_KINDS",
    "optimal_exponent",
    "robustness_band",
    "convexity_witness",
    "sweep",
    "s_grid",
]

log = logging.getLogger(__name__)

SIMULATED, LOWER, JENSEN = "simulated", "lower_bound", "jensen"
METHODS = (SIMULATED, LOWER, JENSEN)
SWEEP_KINDS = ("vs_s", "vs_alpha", "vs_snr", "vs_beta", "vs_lambda", "loss_curve")

_SKIPPABLE = (DivergenceError, InfeasibleError, ConfigError, DomainError)


@dataclass(frozen=True)
class ObjectiveSpec:
    """What to minimise over ``s`` and how.

    ``n_trials``, ``master_seed`` and ``sim_options`` only matter for the
    simulated method; every ``s`` uses the same seed.
    """

    method: str = JENSEN
    s_range: tuple = (-0.25, 0.95)
    grid_step: float = 0.01
    refine_tol: float = 1e-4
    n_trials: int = 200_000
    master_seed: int = 0
    sim_options: dict = field(default_factory=dict)
    workers: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")
        lo, hi = self.s_range
        if not (analytic.S_MIN <= lo <= hi <= analytic.S_MAX):
            raise DomainError(
                f"s_range must lie inside [{analytic.S_MIN}, {analytic.S_MAX}], got {self.s_range!r}"
            )
        if not self.grid_step > 0:
            raise DomainError("grid_step must be positive")
        if not self.refine_tol > 0:
            raise DomainError("refine_tol must be positive")


def s_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive grid from ``lo`` to ``hi``, rounded to kill accumulation drift."""
    n = int(math.floor((hi - lo) / step + 1e-9))
    pts = lo + step * np.arange(n + 1)
    if hi - pts[-1] > 1e-9:
        pts = np.append(pts, hi)
    return np.round(pts, 12)


@dataclass(frozen=True)
class Optimum:
    """Result of :func:`optimal_exponent`.

    ``grid``/``values``/``noise`` hold the scan, ``clipped`` the grid points
    that could not be evaluated (divergent moments, infeasible link).
    ``flat`` flags an objective that does not vary beyond its noise; ``s_star``
    is then the midpoint of the evaluable range.
    """

    s_star: float
    q_star: float
    method: str
    flat: bool
    grid: tuple
    values: tuple
    noise: tuple
    clipped: tuple = ()


@dataclass(frozen=True)
class RobustnessBand:
    s_star: float
    q_star: float
    s_lo: float
    s_hi: float
    delta_pct: float
    lo_at_edge: bool = False
    hi_at_edge: bool = False


class _Objective:
    """Outage as a function of ``s`` for fixed network and fading."""

    def __init__(self, spec: ObjectiveSpec, params: NetworkParams, fading: FadingModel):
        self.spec = spec
        self.params = params
        self.fading = fading
        self._radius = None

    def _sim_config(self, s):
        return SimConfig(self.params, PowerControlPolicy(s, self.fading),
                         n_trials=self.spec.n_trials, master_seed=self.spec.master_seed,
                         **self.spec.sim_options)

    def prepare(self, s_values):
        """Fix one sampling radius for all ``s`` so simulated points share draws."""
        if self.spec.method != SIMULATED or "sample_radius" in self.spec.sim_options:
            return
        radius = 0.0
        for s in s_values:
            try:
                cfg = self._sim_config(float(s))
            except _SKIPPABLE:
                continue
            radius = max(radius, exact_radius(cfg.replace(sample_radius=None)))
        self._radius = radius or None

    def __call__(self, s):
        """Return ``(q, noise)`` at exponent ``s``."""
        s = float(s)
        if self.spec.method == SIMULATED:
            cfg = self._sim_config(s)
            if self._radius is not None:
                cfg = cfg.replace(sample_radius=self._radius)
            est = estimate_outage(cfg, workers=self.spec.workers)
            return est.p_hat, est.std_err
        policy = PowerControlPolicy(s, self.fading)
        fn = analytic.outage_jensen_fpc if self.spec.method == JENSEN else analytic.outage_lb_fpc
        res = fn(policy, self.params)
        return res.value, res.quadrature_error


def _scan(obj: _Objective, grid):
    pts, vals, noise, clipped = [], [], [], []
    for s in grid:
        try:
            q, e = obj(s)
        except _SKIPPABLE as exc:
            log.debug("s=%g skipped: %s", s, exc)
            clipped.append(float(s))
            continue
        pts.append(float(s))
        vals.append(float(q))
        noise.append(float(e))
    return pts, vals, noise, clipped


def optimal_exponent(objective: ObjectiveSpec, params: NetworkParams, fading) -> Optimum:
    """Exponent ``s`` minimising the chosen outage measure.

    A grid scan over ``objective.s_range`` is followed, for the analytic
    methods, by golden-section refinement in the cell around the best grid
    point. The simulated method stays on the grid and uses the same seed for
    every ``s`` (common random numbers).
    """
    fading = parse_fading(fading)
    grid = s_grid(*objective.s_range, objective.grid_step)
    obj = _Objective(objective, params, fading)
    obj.prepare(grid)
    pts, vals, noise, clipped = _scan(obj, grid)
    if not pts:
        raise InfeasibleError("objective could not be evaluated anywhere on s_range")

    arr = np.asarray(vals)
    spread = float(arr.max() - arr.min())
    floor = 2.0 * max(noise) + 1e-15 * float(np.abs(arr).max())
    record = dict(method=objective.method, grid=tuple(pts), values=tuple(vals),
                  noise=tuple(noise), clipped=tuple(clipped))
    if spread <= floor:
        mid = 0.5 * (pts[0] + pts[-1])
        if objective.method == SIMULATED:
            k = int(np.argmin(np.abs(np.asarray(pts) - mid)))
            return Optimum(s_star=pts[k], q_star=vals[k], flat=True, **record)
        return Optimum(s_star=mid, q_star=obj(mid)[0], flat=True, **record)

    k = int(np.argmin(arr))
    s_star, q_star = pts[k], vals[k]
    if objective.method != SIMULATED:
        lo = pts[k - 1] if k > 0 else pts[k]
        hi = pts[k + 1] if k + 1 < len(pts) else pts[k]
        if hi > lo:
            x, fx = minimize_unimodal(lambda s: obj(s)[0], lo, hi, objective.refine_tol)
            if fx <= q_star:
                s_star, q_star = x, fx
    return Optimum(s_star=float(s_star), q_star=float(q_star), flat=False, **record)


def robustness_band(objective: ObjectiveSpec, params: NetworkParams, fading,
                    delta_pct: float, optimum: Optimum | None = None) -> RobustnessBand:
    """Range of ``s`` whose outage stays within ``delta_pct`` percent of the optimum.

    Walks outward from ``s*`` over the scan grid to the first point above
    ``(1 + delta_pct/100) q*`` and locates the crossing by bisection
    (analytic methods) or linear interpolation (simulated). A side that never
    crosses is clipped to the evaluable range and flagged.
    """
    if delta_pct < 0:
        raise DomainError("delta_pct must be non-negative")
    fading = parse_fading(fading)
    if optimum is None:
        optimum = optimal_exponent(objective, params, fading)
    s0, q0 = optimum.s_star, optimum.q_star
    if delta_pct == 0:
        return RobustnessBand(s0, q0, s0, s0, 0.0)
    target = (1.0 + delta_pct / 100.0) * q0
    pts, vals = np.asarray(optimum.grid), np.asarray(optimum.values)
    obj = _Objective(objective, params, fading)
    analytic_method = objective.method != SIMULATED

    def crossing(inside_s, inside_q, outside_s, outside_q):
        if analytic_method:
            a, b = inside_s, outside_s
            while abs(b - a) > objective.refine_tol * 0.1:
                m = 0.5 * (a + b)
                if obj(m)[0] <= target:
                    a = m
                else:
                    b = m
            return 0.5 * (a + b)
        w = (target - inside_q) / (outside_q - inside_q)
        return inside_s + w * (outside_s - inside_s)

    def walk(order):
        prev_s, prev_q = s0, q0
        for i in order:
            if vals[i] > target:
                return crossing(prev_s, prev_q, pts[i], vals[i]), False
            prev_s, prev_q = pts[i], vals[i]
        return prev_s, True

    right = [i for i in range(len(pts)) if pts[i] > s0]
    left = [i for i in reversed(range(len(pts))) if pts[i] < s0]
    s_hi, hi_edge = walk(right)
    s_lo, lo_edge = walk(left)
    return RobustnessBand(s0, q0, float(s_lo), float(s_hi), float(delta_pct), lo_edge, hi_edge)


@dataclass(frozen=True)
class ConvexityReport:
    """Numerical check of ``h(s) = E[X**-s] E[X**(s-1)]`` with ``X = H**delta``.

    ``violations`` lists grid pairs whose midpoint value exceeds the chord;
    ``symmetry_residual`` is ``max |h(s) - h(1 - s)|``; ``derivative_at_half``
    a central difference at ``s = 1/2``.
    """

    grid: tuple
    values: tuple
    violations: tuple
    symmetry_residual: float
    derivative_at_half: float
    argmin: float


def convexity_witness(fading, delta: float, grid, tol: float = 1e-12,
                      step: float = 1e-5) -> ConvexityReport:
    fading = parse_fading(fading)

    def h(s):
        return fading.fractional_moment(-s * delta) * fading.fractional_moment((s - 1.0) * delta)

    grid = [float(s) for s in grid]
    values = [h(s) for s in grid]
    violations = []
    for i in range(len(grid)):
        for j in range(i + 2, len(grid)):
            mid = h(0.5 * (grid[i] + grid[j]))
            chord = 0.5 * (values[i] + values[j])
            if mid > chord + tol * max(1.0, abs(chord)):
                violations.append((grid[i], grid[j]))
    sym = max(abs(h(s) - h(1.0 - s)) for s in grid)
    deriv = (h(0.5 + step) - h(0.5 - step)) / (2.0 * step)
    return ConvexityReport(tuple(grid), tuple(values), tuple(violations), sym, deriv,
                           grid[int(np.argmin(values))])


@dataclass
class SweepResult:
    """Table behind one figure: ``rows`` are dicts keyed by ``columns``."""

    kind: str
    swept_param: str
    unit: str
    columns: tuple
    rows: list = field(default_factory=list)

    @property
    def n_errors(self) -> int:
        return sum(1 for r in self.rows if r.get("error"))


_SWEEP_AXES = {
    "vs_s": ("s", ""),
    "vs_alpha": ("alpha", ""),
    "vs_snr": ("snr_db", "dB"),
    "vs_beta": ("beta_db", "dB"),
    "vs_lambda": ("lambda", "1/m^2"),
    "loss_curve": ("alpha", ""),
}


def _params_at(kind, base: NetworkParams, value):
    if kind == "vs_alpha":
        # keep the SNR fixed while the path loss changes
        if base.eta == 0:
            return base.replace(alpha=value)
        return NetworkParams.from_snr(base.snr, alpha=value, beta=base.beta, d=base.d,
                                      p=base.p, lam=base.lam)
    if kind == "vs_snr":
        return NetworkParams.from_snr(10.0 ** (value / 10.0), alpha=base.alpha, beta=base.beta,
                                      d=base.d, p=base.p, lam=base.lam)
    if kind == "vs_beta":
        return base.replace(beta=10.0 ** (value / 10.0))
    if kind == "vs_lambda":
        return base.replace(lam=value)
    raise DomainError(f"unknown sweep kind {kind!r}")


def _band_key(side, delta):
    return f"s_{side}_{delta:g}"


def sweep(kind: str, params: NetworkParams, policy: PowerControlPolicy, values, *,
          methods=METHODS, objective: ObjectiveSpec | None = None,
          deltas=(1.0, 10.0), s_values=None) -> SweepResult:
    """Fill the table for one figure family.

    Parameters
    ----------
    kind : str
        ``"loss_curve"``: loss factor against ``s`` for each path-loss
        exponent in ``values``. ``"vs_s"``: outage by every method in
        ``methods`` at each exponent in ``values``. ``"vs_alpha"``,
        ``"vs_snr"`` (dB), ``"vs_beta"`` (dB), ``"vs_lambda"``: optimal
        exponent and ``deltas`` robustness bands per method at each value.
    params, policy : base network and power control; ``policy.s`` is unused
        except by nothing, ``policy.fading`` sets the fading model.
    objective : ObjectiveSpec, optional
        Grid, range and Monte-Carlo settings; its ``method`` is overridden
        per method.
    s_values : sequence, optional
        ``s`` grid for ``loss_curve`` (default 0 to 1 in steps of 0.01).

    Cells that raise are kept with an ``error`` message; the sweep goes on.
    """
    if kind not in SWEEP_KINDS:
        raise DomainError(f"kind must be one of {SWEEP_KINDS}, got {kind!r}")
    methods = tuple(methods)
    for m in methods:
        if m not in METHODS:
            raise DomainError(f"unknown method {m!r}")
    objective = objective or ObjectiveSpec()
    name, unit = _SWEEP_AXES[kind]
    values = sorted(float(v) for v in values)
    fading = policy.fading

    if kind == "loss_curve":
        grid = s_grid(0.0, 1.0, 0.01) if s_values is None else [float(s) for s in s_values]
        result = SweepResult(kind, name, unit, ("alpha", "s", "loss_factor", "error"))
        for a in values:
            for s in grid:
                row = {"alpha": a, "s": float(s), "loss_factor": math.nan, "error": ""}
                try:
                    row["loss_factor"] = analytic.loss_factor_fpc(float(s), fading, 2.0 / a)
                except FPCError as exc:
                    row["error"] = str(exc)
                result.rows.append(row)
        return result

    if kind == "vs_s":
        cols = ["s"]
        if SIMULATED in methods:
            cols += ["q_sim", "std_err"]
        if LOWER in methods:
            cols += ["q_lb", "quad_err_lb"]
        if JENSEN in methods:
            cols += ["q_jensen", "quad_err_jensen"]
        result = SweepResult(kind, name, unit, tuple(cols) + ("error",))
        sim_obj = _Objective(dataclasses.replace(objective, method=SIMULATED), params, fading)
        if SIMULATED in methods:
            sim_obj.prepare(values)
        for s in values:
            row = {c: math.nan for c in cols}
            row.update(s=s, error="")
            errors = []
            for m in methods:
                try:
                    if m == SIMULATED:
                        row["q_sim"], row["std_err"] = sim_obj(s)
                    else:
                        obj = _Objective(dataclasses.replace(objective, method=m), params, fading)
                        q, e = obj(s)
                        key = "lb" if m == LOWER else "jensen"
                        row[f"q_{key}"], row[f"quad_err_{key}"] = q, e
                except FPCError as exc:
                    errors.append(f"{m}: {exc}")
            row["error"] = "; ".join(errors)
            result.rows.append(row)
        return result

    cols = [name, "method", "s_star", "q_star", "flat"]
    for dlt in deltas:
        cols += [_band_key("lo", dlt), _band_key("hi", dlt)]
    result = SweepResult(kind, name, unit, tuple(cols) + ("error",))
    for v in values:
        for m in methods:
            row = {c: math.nan for c in cols}
            row.update({name: v, "method": m, "flat": False, "error": ""})
            try:
                prm = _params_at(kind, params, v)
                spec = dataclasses.replace(objective, method=m)
                opt = optimal_exponent(spec, prm, fading)
                row.update(s_star=opt.s_star, q_star=opt.q_star, flat=opt.flat)
                for dlt in deltas:
                    band = robustness_band(spec, prm, fading, dlt, optimum=opt)
                    row[_band_key("lo", dlt)] = band.s_lo
                    row[_band_key("hi", dlt)] = band.s_hi
            except FPCError as exc:
                row["error"] = str(exc)
            log.info("%s=%g method=%s s*=%s", name, v, m, row["s_star"])
            result.rows.append(row)
    return result
