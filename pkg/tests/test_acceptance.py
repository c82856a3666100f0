"""Acceptance criteria 1-12, each at its stated tolerance.

Every test records a single PASS/FAIL line; the lines are collected in the
"acceptance criteria" section at the end of the pytest run.
"""

import json
import math

import mpmath
import numpy as np
import pytest

from fpclab import cli
from fpclab.analytic import (
    NetworkParams,
    PowerControlPolicy,
    density_fpc,
    loss_factor_fpc,
    outage_jensen_cp,
    outage_jensen_fpc,
    outage_lb_ci,
    outage_lb_cp,
    outage_lb_fpc,
    shot_noise_tail_lb,
)
from fpclab.fading import Rayleigh, power_normalizer
from fpclab.optimize import ObjectiveSpec, convexity_witness, optimal_exponent, sweep
from fpclab.simulate import SimConfig, estimate_outage, shot_noise_tail_mc

DEFAULTS = NetworkParams()
RAYLEIGH = Rayleigh()


def test_criterion_01_rayleigh_loss_factor(acceptance):
    values = [loss_factor_fpc(s, RAYLEIGH, 2 / 3) for s in (0.0, 1.0)]
    ok = all(abs(v - 0.41) <= 0.005 for v in values)
    acceptance(1, ok, f"L(0)={values[0]:.5f}, L(1)={values[1]:.5f}, target 0.41 +- 0.005")


def test_criterion_02_normalization_cost(acceptance):
    db = 10 * math.log10(power_normalizer(RAYLEIGH, 0.5))
    acceptance(2, abs(db - 2.49) <= 0.05, f"E[H^-1/2] = {db:.4f} dB, target 2.49 +- 0.05")


def test_criterion_03_half_is_optimal_without_noise(acceptance):
    spec = ObjectiveSpec(method="jensen", s_range=(0.0, 1.0))
    parts, ok = [], True
    for alpha in (2.1, 3.0, 4.0):
        opt = optimal_exponent(spec, NetworkParams(alpha=alpha, eta=0.0), RAYLEIGH)
        rep = convexity_witness(RAYLEIGH, 2 / alpha, [k / 10 for k in range(11)])
        ok &= abs(opt.s_star - 0.5) <= 1e-3 and not rep.violations
        ok &= abs(rep.derivative_at_half) < 1e-6
        parts.append(f"alpha={alpha}: s*={opt.s_star:.5f}, violations={len(rep.violations)}, "
                     f"h'(0.5)={rep.derivative_at_half:.1e}")
    acceptance(3, ok, "; ".join(parts))


def test_criterion_04_loss_curve_shape(acceptance):
    alphas = (2.1, 3.0, 4.0)
    res = sweep("loss_curve", DEFAULTS, PowerControlPolicy(), alphas)
    ok, parts, edge = True, [], []
    for a in alphas:
        rows = [r for r in res.rows if r["alpha"] == a]
        by_s = {round(r["s"], 2): r["loss_factor"] for r in rows}
        peak = max(rows, key=lambda r: r["loss_factor"])["s"]
        ok &= abs(peak - 0.5) < 1e-9
        ok &= by_s[0.5] > by_s[0.0] and by_s[0.5] > by_s[1.0]
        ok &= math.isclose(by_s[0.0], by_s[1.0], rel_tol=1e-12)
        edge.append(by_s[0.0])
        parts.append(f"alpha={a}: peak s={peak:.2f}, L(0)={by_s[0.0]:.4f}, L(0.5)={by_s[0.5]:.4f}")
    ok &= edge[0] < edge[1] < edge[2]
    acceptance(4, ok, "; ".join(parts))


def test_criterion_05_simulation_above_lower_bound(acceptance):
    parts, ok = [], True
    for s in (0.0, 0.25, 0.5, 0.75):
        pol = PowerControlPolicy(s)
        est = estimate_outage(SimConfig(DEFAULTS, pol, n_trials=200_000, master_seed=5))
        lb = outage_lb_fpc(pol, DEFAULTS).value
        ok &= est.p_hat >= lb - 4 * est.std_err
        parts.append(f"s={s}: p_hat={est.p_hat:.4f} lb={lb:.4f}")
    acceptance(5, ok, "; ".join(parts))


def test_criterion_06_sparse_regime_tightness(acceptance):
    prm = DEFAULTS.replace(lam=1e-5)
    parts, ok = [], True
    for s in (0.0, 0.5):
        pol = PowerControlPolicy(s)
        est = estimate_outage(SimConfig(prm, pol, n_trials=1_000_000, master_seed=6))
        lb = outage_lb_fpc(pol, prm).value
        rel = abs(est.p_hat - lb) / est.p_hat
        ok &= rel <= 0.15
        parts.append(f"s={s}: p_hat={est.p_hat:.5f} lb={lb:.5f} rel={rel:.3f}")
    acceptance(6, ok, "; ".join(parts) + " (limit 0.15)")


def test_criterion_07_jensen_ordering(acceptance):
    rng = np.random.default_rng(2024)
    worst = -math.inf
    for _ in range(200):
        prm = NetworkParams(alpha=rng.uniform(2.1, 5.0), beta=rng.uniform(0.1, 10.0),
                            lam=10 ** rng.uniform(-5, -3), eta=1e-5 if rng.random() < 0.5 else 0.0)
        pol = PowerControlPolicy(rng.uniform(0.0, 0.9))
        gap = outage_lb_fpc(pol, prm).value - outage_jensen_fpc(pol, prm).value
        worst = max(worst, gap)
    acceptance(7, worst <= 1e-8, f"max(q_lb - q_jensen) over 200 points = {worst:.3e} (limit 1e-8)")


def _cp_forms(prm):
    """Constant-power bound and Jensen value conditioned on H >= beta/snr (Rayleigh)."""
    mp = mpmath
    with mp.workdps(30):
        delta = mp.mpf(2) / prm.alpha
        thr = mp.mpf(prm.beta) / prm.snr
        a = prm.lam * mp.pi * prm.d ** 2 * mp.gamma(1 + delta)
        pts = [thr, thr + 1, mp.inf]
        lb = 1 - mp.quad(lambda h: mp.exp(-a * ((h - thr) / prm.beta) ** -delta - h), pts)
        prob = mp.exp(-thr)
        inner = mp.quad(lambda h: ((h - thr) / prm.beta) ** -delta * mp.exp(-h), pts) / prob
        return float(lb), float(1 - prob * mp.exp(-a * inner))


def _noise_free_forms(prm, s):
    mp = mpmath
    with mp.workdps(30):
        delta = mp.mpf(2) / prm.alpha
        a = (prm.lam * mp.pi * prm.d ** 2 * mp.mpf(prm.beta) ** delta
             * mp.gamma(1 + delta) * mp.gamma(1 - s * delta))
        e = (1 - s) * delta
        lb = 1 - mp.quad(lambda h: mp.exp(-a * h ** -e - h), [0, 1, mp.inf])
        jn = 1 - mp.exp(-a * mp.gamma(1 - e))
        return float(lb), float(jn)


def test_criterion_08_reduction_identities(acceptance):
    worst_cp = worst_nf = 0.0
    for lam in (1e-5, 1e-4, 1e-3):
        for alpha in (3.0, 4.0):
            prm = NetworkParams(alpha=alpha, lam=lam)
            lb, jn = _cp_forms(prm)
            pol = PowerControlPolicy(0.0)
            for got, ref in ((outage_lb_fpc(pol, prm).value, lb),
                             (outage_jensen_fpc(pol, prm).value, jn),
                             (outage_lb_cp(prm, RAYLEIGH).value, lb),
                             (outage_jensen_cp(prm, RAYLEIGH).value, jn)):
                worst_cp = max(worst_cp, abs(got - ref) / ref)
            nf = prm.replace(eta=0.0)
            for s in (0.0, 0.3, 0.5, 0.8):
                lb, jn = _noise_free_forms(nf, s)
                pol = PowerControlPolicy(s)
                worst_nf = max(worst_nf, abs(outage_lb_fpc(pol, nf).value - lb) / lb,
                               abs(outage_jensen_fpc(pol, nf).value - jn) / jn)
    nf = DEFAULTS.replace(eta=0.0)
    ident = abs(outage_jensen_cp(nf, RAYLEIGH).value - outage_lb_ci(nf, RAYLEIGH).value)
    ident /= outage_lb_ci(nf, RAYLEIGH).value
    ok = worst_cp <= 1e-6 and worst_nf <= 1e-6 and ident <= 1e-12
    acceptance(8, ok, f"s=0 vs constant power rel {worst_cp:.1e}, noise-free rel {worst_nf:.1e}, "
                      f"jensen cp vs inversion bound rel {ident:.1e}")


def test_criterion_09_shot_noise_bound(acceptance):
    pairs = [(1e-5, 1e-5), (1e-4, 1e-4), (1e-4, 1e-3), (1e-3, 1e-3), (1e-3, 1e-2)]
    ez = math.gamma(1 + 2 / 3)
    parts, ok = [], True
    for k, (lam, y) in enumerate(pairs):
        est = shot_noise_tail_mc(lam, RAYLEIGH, y, 200_000, seed=90 + k)
        lb = shot_noise_tail_lb(lam, ez, y, 2 / 3)
        ok &= est.p_hat >= lb - 4 * est.std_err
        parts.append(f"(lam={lam:g}, y={y:g}): mc={est.p_hat:.4f} lb={lb:.4f}")
    acceptance(9, ok, "; ".join(parts))


def test_criterion_10_density_round_trip(acceptance):
    worst = 0.0
    for s in [0.05 * k for k in range(20)]:
        pol = PowerControlPolicy(s)
        for eps in (0.01, 0.05, 0.1):
            lam = density_fpc(pol, DEFAULTS, eps)
            worst = max(worst, abs(outage_jensen_fpc(pol, DEFAULTS.replace(lam=lam)).value - eps))
    acceptance(10, worst <= 1e-10, f"max |q(density(eps)) - eps| = {worst:.2e} (limit 1e-10)")


def test_criterion_11_qualitative_findings(acceptance):
    dense = optimal_exponent(
        ObjectiveSpec(method="simulated", grid_step=0.05, n_trials=50_000, master_seed=11),
        DEFAULTS.replace(lam=1e-3), RAYLEIGH)
    sparse = optimal_exponent(
        ObjectiveSpec(method="simulated", grid_step=0.05, n_trials=1_000_000, master_seed=11),
        DEFAULTS.replace(lam=1e-5), RAYLEIGH)
    low_snr = NetworkParams.from_snr(10.0)
    q = {}
    for s in (0.5, 0.95):
        q[s] = estimate_outage(SimConfig(low_snr, PowerControlPolicy(s), n_trials=200_000,
                                         master_seed=11)).p_hat
    ok_a = dense.s_star <= 0.1 and 0.35 <= sparse.s_star <= 0.65
    ok_b = q[0.95] > 1.5 * q[0.5]
    acceptance(11, ok_a and ok_b,
               f"(a) s*(lam=1e-3)={dense.s_star:.2f}, s*(lam=1e-5)={sparse.s_star:.2f}; "
               f"(b) SNR 10 dB: q(0.95)={q[0.95]:.4f}, q(0.5)={q[0.5]:.4f}")


def test_criterion_12_determinism(acceptance, tmp_path, monkeypatch):
    config = {"seed": 42, "sim": {"n_trials": 10_000},
              "sweep": {"kind": "vs_s", "values": [0.0, 0.5, 0.9]}}
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    outputs = []
    for threads, run in (("1", "a"), ("1", "b"), ("4", "c")):
        monkeypatch.setenv("FPCLAB_THREADS", threads)
        out = tmp_path / run
        for command in ("simulate", "sweep", "analytic"):
            assert cli.main([command, "--config", str(path), "--out", str(out)]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
    ok = outputs[0] == outputs[1] == outputs[2] and len(outputs[0]) == 3
    acceptance(12, ok, f"{len(outputs[0])} CSV files byte-identical across 2 repeats "
                       "and 1 vs 4 workers")
