"""Monte-Carlo estimation of the outage probability.

Each trial draws a Poisson field of interferers around the reference
receiver at the origin, i.i.d. fading on every link, fractional-power-control
transmit powers and evaluates the SINR

    SINR = P_0 H_00 d**-alpha / (sum_i P_i H_i0 |X_i|**-alpha + eta).

Interferers are sampled exactly inside a disc of radius ``r_exact``; the
annulus between ``r_exact`` and the truncation radius contributes its mean
interference, and nothing is counted beyond the truncation radius. Trials
are grouped in fixed blocks of :data:`BLOCK_TRIALS`; block ``k`` draws from
``RandomStream(master_seed, k)``, so results depend only on the seed and the
configuration, never on the number of workers.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import NetworkParams, PowerControlPolicy
from .errors import ConfigError, DivergenceError, DomainError
from .fading import FadingModel, parse_fading
from .numerics import RandomStream

__all__ = [
    "SimConfig",
    "OutageEstimate",
    "truncation_radius",
    "exact_radius",
    "run_trial",
    "sinr_of_realization",
    "estimate_outage",
    "shot_noise_tail_mc",
    "BLOCK_TRIALS",
]

BLOCK_TRIALS = 4096
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class SimConfig:
    """Monte-Carlo run description.

    ``exact_count`` sets the disc inside which interferers are drawn one by
    one: its radius holds that many interferers on average (but is never
    smaller than ``min_radius_factor * d`` nor larger than the truncation
    radius). ``sample_radius`` overrides that disc; comparisons across
    exponents use one shared radius so every configuration consumes the
    same random draws.
    """

    params: NetworkParams = dataclasses.field(default_factory=NetworkParams)
    policy: PowerControlPolicy = dataclasses.field(default_factory=PowerControlPolicy)
    n_trials: int = 200_000
    master_seed: int = 0
    truncation_rel_tol: float = 1e-3
    min_radius_factor: float = 10.0
    exact_count: float = 400.0
    sample_radius: float | None = None

    def __post_init__(self):
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ConfigError("n_trials must be a positive integer")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if not 0 < self.truncation_rel_tol <= 0.1:
            raise ConfigError("truncation_rel_tol must lie in (0, 0.1]")
        if not self.min_radius_factor > 0:
            raise ConfigError("min_radius_factor must be positive")
        if not self.exact_count > 0:
            raise ConfigError("exact_count must be positive")
        if self.sample_radius is not None and not self.sample_radius > 0:
            raise ConfigError("sample_radius must be positive")
        try:
            self.policy.normalizer
        except DivergenceError as exc:
            raise ConfigError(
                f"s={self.policy.s:g} needs E[H^-s], which is infinite for "
                f"{type(self.policy.fading).__name__} fading (infinite power "
                "normaliser); use clamped_rayleigh"
            ) from exc

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class OutageEstimate:
    """Frequentist outage estimate with a normal-approximation 95% interval."""

    p_hat: float
    std_err: float
    n_trials: int
    ci95: tuple
    seed: int
    outages: int = 0

    @classmethod
    def from_counts(cls, outages: int, n_trials: int, seed: int) -> "OutageEstimate":
        p = outages / n_trials
        se = math.sqrt(p * (1.0 - p) / n_trials)
        ci = (max(0.0, p - _Z95 * se), min(1.0, p + _Z95 * se))
        return cls(p, se, n_trials, ci, seed, outages)


def _mark_mean(policy):
    # E[P_i H_i0] with independent H_ii, H_i0: p * E[H]
    return policy.fading.fractional_moment(1.0)


def _signal_mean(policy):
    h = policy.fading
    return h.fractional_moment(1.0 - policy.s) / policy.normalizer


def _residual_mean(lam, mark_mean, alpha, r_in, r_out):
    """Mean PPP interference from the annulus ``r_in < |x| < r_out``."""
    if lam == 0 or r_out <= r_in:
        return 0.0
    tail_out = 0.0 if math.isinf(r_out) else r_out ** (2.0 - alpha)
    return 2.0 * math.pi * lam * mark_mean * (r_in ** (2.0 - alpha) - tail_out) / (alpha - 2.0)


def truncation_radius(cfg: SimConfig) -> float:
    """Radius beyond which interference is dropped.

    The smallest ``R >= min_radius_factor * d`` for which the mean
    interference from beyond ``R``, ``2 pi lam E[P H] R**(2 - alpha) / (alpha - 2)``,
    is at most ``truncation_rel_tol`` times the mean received signal power
    ``p d**-alpha E[H**(1 - s)] / E[H**-s]``.
    """
    prm = cfg.params
    floor = cfg.min_radius_factor * prm.d
    if prm.lam == 0:
        return floor
    mark = prm.p * _mark_mean(cfg.policy)
    signal = prm.p * prm.d ** -prm.alpha * _signal_mean(cfg.policy)
    r = (2.0 * math.pi * prm.lam * mark
         / ((prm.alpha - 2.0) * cfg.truncation_rel_tol * signal)) ** (1.0 / (prm.alpha - 2.0))
    return max(floor, r)


def exact_radius(cfg: SimConfig, r_trunc: float | None = None) -> float:
    """Radius of the disc whose interferers are drawn individually."""
    prm = cfg.params
    if cfg.sample_radius is not None:
        return float(cfg.sample_radius)
    if r_trunc is None:
        r_trunc = truncation_radius(cfg)
    floor = cfg.min_radius_factor * prm.d
    if prm.lam == 0:
        return r_trunc
    by_count = math.sqrt(cfg.exact_count / (math.pi * prm.lam))
    return min(r_trunc, max(floor, by_count))


@dataclass(frozen=True)
class _Plan:
    alpha: float
    beta: float
    eta: float
    s: float
    fading: FadingModel
    tx_scale: float         # p / E[H^-s]
    signal_scale: float     # p / E[H^-s] * d^-alpha
    mean_count: float       # lam * pi * r_exact^2
    r_exact: float
    annulus: float          # mean interference between r_exact and r_trunc


def _plan(cfg: SimConfig) -> _Plan:
    prm, pol = cfg.params, cfg.policy
    r_trunc = truncation_radius(cfg)
    r_ex = exact_radius(cfg, r_trunc)
    tx_scale = prm.p / pol.normalizer
    return _Plan(
        alpha=prm.alpha, beta=prm.beta, eta=prm.eta, s=pol.s, fading=pol.fading,
        tx_scale=tx_scale,
        signal_scale=tx_scale * prm.d ** -prm.alpha,
        mean_count=prm.lam * math.pi * r_ex ** 2,
        r_exact=r_ex,
        annulus=_residual_mean(prm.lam, prm.p * _mark_mean(pol), prm.alpha, r_ex, r_trunc),
    )


def _power_factor(h, s):
    """``h**-s``, skipping the pow call for constant power."""
    if s == 0.0:
        return 1.0
    return h ** -s


def _block_sinr(plan: _Plan, stream: RandomStream, n: int) -> np.ndarray:
    h00 = np.asarray(plan.fading.sample(stream, n), dtype=float)
    signal = plan.signal_scale * h00 * _power_factor(h00, plan.s)

    counts = stream.poisson(plan.mean_count, n)
    m = int(counts.sum())
    interference = np.full(n, plan.annulus)
    if m:
        u = stream.uniform(m)
        h_i0 = np.asarray(plan.fading.sample(stream, m), dtype=float)
        h_ii = np.asarray(plan.fading.sample(stream, m), dtype=float)
        # |X|^-alpha with |X| = r_exact * sqrt(u)
        gain = (plan.r_exact ** 2 * u) ** (-0.5 * plan.alpha)
        contrib = plan.tx_scale * _power_factor(h_ii, plan.s) * h_i0 * gain
        owner = np.repeat(np.arange(n), counts)
        interference += np.bincount(owner, weights=contrib, minlength=n)

    denom = interference + plan.eta
    with np.errstate(divide="ignore"):
        return np.where(denom > 0, signal / np.where(denom > 0, denom, 1.0), np.inf)


def sinr_of_realization(params: NetworkParams, policy: PowerControlPolicy, h00: float,
                        distances, h_i0, h_ii) -> float:
    """SINR at the reference receiver for one explicit realisation.

    Returns ``inf`` when there is neither noise nor interference.
    """
    c = policy.normalizer
    signal = params.p / c * h00 ** (1.0 - policy.s) * params.d ** -params.alpha
    distances = np.asarray(distances, dtype=float)
    powers = params.p / c * np.asarray(h_ii, dtype=float) ** -policy.s
    interference = float(np.sum(powers * np.asarray(h_i0, dtype=float) * distances ** -params.alpha))
    denom = interference + params.eta
    if denom == 0:
        return math.inf
    return signal / denom


def run_trial(cfg: SimConfig, stream: RandomStream):
    """One snapshot: returns ``(sinr, outage)`` with outage meaning ``sinr < beta``."""
    sinr = float(_block_sinr(_plan(cfg), stream, 1)[0])
    return sinr, sinr < cfg.params.beta


def _resolve_workers(workers):
    if workers is None:
        workers = int(os.environ.get("FPCLAB_THREADS", "0") or 0)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def _count_blocks(n_trials, worker_fn, workers):
    n_blocks = -(-n_trials // BLOCK_TRIALS)
    sizes = [min(BLOCK_TRIALS, n_trials - k * BLOCK_TRIALS) for k in range(n_blocks)]
    workers = min(_resolve_workers(workers), n_blocks)
    if workers == 1:
        return sum(worker_fn(k, sizes[k]) for k in range(n_blocks))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(worker_fn, range(n_blocks), sizes))


def estimate_outage(cfg: SimConfig, workers: int | None = None) -> OutageEstimate:
    """Estimate ``P(SINR < beta)`` from ``cfg.n_trials`` independent snapshots.

    ``workers`` defaults to ``FPCLAB_THREADS`` (0 or unset: one per CPU).
    The estimate is identical for every worker count.
    """
    plan = _plan(cfg)
    beta = cfg.params.beta

    def block(k, n):
        sinr = _block_sinr(plan, RandomStream(cfg.master_seed, k), n)
        return int(np.count_nonzero(sinr < beta))

    outages = _count_blocks(int(cfg.n_trials), block, workers)
    return OutageEstimate.from_counts(outages, int(cfg.n_trials), int(cfg.master_seed))


def shot_noise_tail_mc(lam: float, fading, y: float, n_trials: int, seed: int,
                       alpha: float = 3.0, truncation_rel_tol: float = 1e-3,
                       exact_count: float = 400.0, workers: int | None = None) -> OutageEstimate:
    """Estimate ``P(sum_i Z_i |X_i|**-alpha > y)`` for a PPP of intensity ``lam``
    with i.i.d. marks ``Z`` drawn from ``fading``.

    Interference beyond the radius where its mean falls to
    ``truncation_rel_tol * y`` is dropped; between ``exact_count``-radius and
    that radius it enters through its mean.
    """
    fading = parse_fading(fading)
    if not y > 0:
        raise DomainError("y must be positive")
    if lam < 0 or not alpha > 2:
        raise DomainError("need lam >= 0 and alpha > 2")
    if math.isinf(y):
        return OutageEstimate.from_counts(0, int(n_trials), int(seed))
    mark = fading.fractional_moment(1.0)
    floor = 10.0 * y ** (-1.0 / alpha)
    if lam == 0:
        r_trunc = r_ex = floor
    else:
        r_trunc = max(floor, (2.0 * math.pi * lam * mark
                              / ((alpha - 2.0) * truncation_rel_tol * y)) ** (1.0 / (alpha - 2.0)))
        r_ex = min(r_trunc, max(floor, math.sqrt(exact_count / (math.pi * lam))))
    annulus = _residual_mean(lam, mark, alpha, r_ex, r_trunc)
    mean_count = lam * math.pi * r_ex ** 2

    def block(k, n):
        stream = RandomStream(seed, k)
        counts = stream.poisson(mean_count, n)
        m = int(counts.sum())
        total = np.full(n, annulus)
        if m:
            u = stream.uniform(m)
            z = np.asarray(fading.sample(stream, m), dtype=float)
            contrib = z * (r_ex ** 2 * u) ** (-0.5 * alpha)
            total += np.bincount(np.repeat(np.arange(n), counts), weights=contrib, minlength=n)
        return int(np.count_nonzero(total > y))

    hits = _count_blocks(int(n_trials), block, workers)
    return OutageEstimate.from_counts(hits, int(n_trials), int(seed))
