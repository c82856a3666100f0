"""Outage bounds, Jensen approximations, density inversions and loss factors.

Notation used throughout:

* ``delta = 2 / alpha``; ``snr = p * d**-alpha / eta`` (infinite when ``eta == 0``);
* fractional power control with exponent ``s`` transmits
  ``P = p * H**-s / E[H**-s]``, so ``s = 0`` is constant power and ``s = 1``
  channel inversion;
* ``g(h) = h**(1 - s) / beta - E[H**-s] / snr`` is the interference budget
  (normalised by ``p d**-alpha``) left to a link whose channel power is ``h``;
  ``kappa = (beta / snr * E[H**-s])**(1 / (1 - s))`` is its zero.

The dominant-interferer lower bound is

    q_lb = 1 - E[exp(-A g(H)**-delta); H >= kappa]

and its Jensen approximation moves the expectation into the exponent,

    q_jensen = 1 - P(H >= kappa) exp(-A E[g(H)**-delta | H >= kappa]),

with ``A = lam * pi * d**2 * E[H**(-s*delta)] * E[H**delta]``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleError
from .fading import FadingModel, Rayleigh, parse_fading, power_normalizer
from .numerics import QuadratureSpec, integrate_semi_infinite

__all__ = [
    "NetworkParams",
    "PowerControlPolicy",
    "BoundResult",
    "shot_noise_tail_lb",
    "outage_lb_pathloss",
    "density_ub_pathloss",
    "kappa",
    "outage_lb_fpc",
    "outage_jensen_fpc",
    "outage_lb_cp",
    "outage_jensen_cp",
    "outage_lb_ci",
    "density_fpc",
    "loss_factor_fpc",
    "transmission_capacity",
    "LOWER_BOUND",
    "JENSEN",
    "EXACT",
]

LOWER_BOUND = "lower_bound"
JENSEN = "jensen_approx"
EXACT = "exact_formula"

S_MIN, S_MAX = -0.5, 1.0

ANALYTIC_QUAD = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14, max_subdivisions=2000)


@dataclass(frozen=True)
class NetworkParams:
    """Physical parameters of the network.

    Attributes
    ----------
    alpha : float
        Path-loss exponent, must exceed 2.
    beta : float
        SINR threshold (linear).
    d : float
        Transmitter-receiver distance in metres.
    p : float
        Mean transmit power in watts.
    eta : float
        Noise power in watts; 0 gives the interference-limited case.
    lam : float
        Density of transmitters per square metre.
    """

    alpha: float = 3.0
    beta: float = 1.0
    d: float = 10.0
    p: float = 1.0
    eta: float = 1e-5
    lam: float = 1e-4

    def __post_init__(self):
        for name in ("alpha", "beta", "d", "p", "eta", "lam"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if not self.alpha > 2:
            raise DomainError("alpha must exceed 2")
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        if not self.d > 0:
            raise DomainError("d must be positive")
        if not self.p > 0:
            raise DomainError("p must be positive")
        if self.eta < 0:
            raise DomainError("eta must be non-negative")
        if self.lam < 0:
            raise DomainError("lam must be non-negative")

    @classmethod
    def from_snr(cls, snr: float, **kwargs) -> "NetworkParams":
        """Parameters whose noise power gives the requested SNR (``inf`` means no noise)."""
        probe = cls(**{**kwargs, "eta": 0.0})
        if snr == math.inf:
            return probe
        if not snr > 0:
            raise DomainError("snr must be positive")
        return dataclasses.replace(probe, eta=probe.p * probe.d ** -probe.alpha / snr)

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    @property
    def snr(self) -> float:
        if self.eta == 0:
            return math.inf
        return self.p * self.d ** -self.alpha / self.eta

    @property
    def relative_density(self) -> float:
        """``lam * pi * d**2``, the mean number of transmitters within distance ``d``."""
        return self.lam * math.pi * self.d ** 2

    def replace(self, **changes) -> "NetworkParams":
        return dataclasses.replace(self, **changes)

    def feasible(self, policy: "PowerControlPolicy") -> bool:
        """Whether the noise-limited link budget clears the threshold.

        Tests ``snr / E[H**-s] > beta``; channel inversion only makes sense
        when this holds.
        """
        return self.snr / policy.normalizer > self.beta


@dataclass(frozen=True)
class PowerControlPolicy:
    """Fractional power control with exponent ``s`` under fading ``fading``.

    The normaliser ``E[H**-s]`` is evaluated lazily: in the noise-free case it
    cancels, so channel inversion with unclamped Rayleigh fading is still
    usable there. Anything that needs it raises ``DivergenceError`` when it is
    infinite.
    """

    s: float = 0.5
    fading: FadingModel = dataclasses.field(default_factory=Rayleigh)

    def __post_init__(self):
        if not (math.isfinite(self.s) and S_MIN <= self.s <= S_MAX):
            raise DomainError(f"s must lie in [{S_MIN}, {S_MAX}], got {self.s!r}")
        if not isinstance(self.fading, FadingModel):
            object.__setattr__(self, "fading", parse_fading(self.fading))

    @property
    def normalizer(self) -> float:
        return power_normalizer(self.fading, self.s)

    def replace(self, **changes) -> "PowerControlPolicy":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class BoundResult:
    """Value of an analytic outage expression.

    ``method`` says whether the number is a lower bound, a Jensen
    approximation or an exact closed form; ``quadrature_error`` is the
    absolute error estimate of any numerical integration involved.
    """

    value: float
    method: str
    quadrature_error: float = 0.0

    def __float__(self):
        return float(self.value)


def shot_noise_tail_lb(lam: float, ez_delta: float, y: float, delta: float) -> float:
    """Lower bound on ``P(sum_i Z_i |X_i|**-alpha > y)`` for a marked PPP.

    ``1 - exp(-pi * lam * E[Z**delta] * y**-delta)``, counting only the
    interferers that exceed ``y`` on their own.
    """
    if not y > 0:
        raise DomainError("y must be positive")
    if lam < 0 or ez_delta < 0 or not 0 < delta < 1:
        raise DomainError("lam and E[Z^delta] must be non-negative, delta in (0, 1)")
    if math.isinf(y):
        return 0.0
    return -math.expm1(-math.pi * lam * ez_delta * y ** -delta)


def outage_lb_pathloss(params: NetworkParams) -> float:
    """Outage lower bound without fading and with constant power."""
    if params.snr <= params.beta:
        return 1.0
    budget = 1.0 / params.beta - 1.0 / params.snr
    return -math.expm1(-params.relative_density * budget ** -params.delta)


def density_ub_pathloss(params: NetworkParams, epsilon: float) -> float:
    """Largest density keeping the no-fading outage bound at ``epsilon``."""
    _check_epsilon(epsilon)
    if params.snr <= params.beta:
        raise InfeasibleError("snr must exceed beta for any density to be admissible")
    budget = 1.0 / params.beta - 1.0 / params.snr
    return -math.log1p(-epsilon) / (math.pi * params.d ** 2) * budget ** params.delta


def kappa(policy: PowerControlPolicy, params: NetworkParams) -> float:
    """Channel power below which the link is in outage from noise alone."""
    if policy.s >= 1.0:
        raise DomainError("kappa is defined for s < 1; channel inversion has no fade threshold")
    if params.eta == 0:
        return 0.0
    return _safe_pow(params.beta / params.snr * policy.normalizer, 1.0 / (1.0 - policy.s))


def _interference_moments(policy, delta):
    h = policy.fading
    return h.fractional_moment(-policy.s * delta) * h.fractional_moment(delta)


def _check_epsilon(epsilon):
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")


def _budget_expectation(policy, params, weight, singular, spec):
    """``E[weight(g(H)); g(H) > 0]`` and ``P(g(H) > 0)`` for noisy links, s < 1.

    Returns ``(value, abs_error, probability)``. The density part is
    integrated in ``w = H**(1 - s) - u_lo``, where ``u_lo`` is the larger of
    ``kappa**(1 - s)`` and the start of the density's support, so ``g`` is
    linear in ``w`` and the ``g**-delta`` blow-up at ``kappa`` has order
    ``delta`` at ``w = 0``.
    """
    s, beta, fading = policy.s, params.beta, policy.fading
    c_over_snr = policy.normalizer / params.snr
    u0 = beta * c_over_snr
    kap = _safe_pow(u0, 1.0 / (1.0 - s))

    value, err, prob = 0.0, 0.0, 0.0
    for h, mass in fading.atoms:
        g = h ** (1.0 - s) / beta - c_over_snr
        if g > 0:
            value += mass * weight(g)
            prob += mass

    lower = fading.support_lower
    if lower is not None and fading.continuous_survival(max(kap, lower)) > 0.0:
        if lower > kap:
            u_lo = lower ** (1.0 - s)
            gap = (u_lo - u0) / beta
            order = 0.0
        else:
            u_lo, gap = u0, 0.0
            order = params.delta if singular else 0.0
        expo = 1.0 / (1.0 - s)
        jac = s / (1.0 - s)

        def integrand(w):
            u = u_lo + w
            h = _safe_pow(u, expo)
            dens = fading.pdf(h)
            if dens == 0.0:
                return 0.0
            return weight(gap + w / beta) * dens * expo * u ** jac

        v, e = integrate_semi_infinite(integrand, 0.0, spec.with_singularity(order),
                                       return_error=True)
        value += v
        err += e
        prob += fading.continuous_survival(max(kap, lower))
    return value, err, prob


def _noise_free_expectation(fading, weight, spec):
    """``E[weight(H)]`` over the whole distribution."""
    value = sum(mass * weight(h) for h, mass in fading.atoms)
    err = 0.0
    if fading.support_lower is not None:
        v, err = integrate_semi_infinite(lambda h: weight(h) * fading.pdf(h),
                                         fading.support_lower, spec, return_error=True)
        value += v
    return value, err


def outage_lb_ci(params: NetworkParams, fading) -> BoundResult:
    """Dominant-interferer outage bound under channel inversion (``s = 1``).

    Closed form; raises ``InfeasibleError`` when ``snr / E[H**-1] <= beta``.
    """
    fading = parse_fading(fading)
    q = -math.expm1(-params.lam * _ci_terms(params, fading))
    return BoundResult(q, LOWER_BOUND, 0.0)


def outage_lb_fpc(policy: PowerControlPolicy, params: NetworkParams,
                  spec: QuadratureSpec = ANALYTIC_QUAD) -> BoundResult:
    """Dominant-interferer lower bound on outage under fractional power control.

    ``s = 1`` falls back to the channel-inversion closed form; without noise
    the conditioning disappears and only the expectation over the desired
    link's fading remains.
    """
    if policy.s >= 1.0:
        return outage_lb_ci(params, policy.fading)
    delta = params.delta
    a = params.relative_density * _interference_moments(policy, delta)
    if params.eta == 0:
        b = a * params.beta ** delta
        expo = (1.0 - policy.s) * delta
        survive, err = _noise_free_expectation(
            policy.fading, lambda h: math.exp(-b * h ** -expo), spec)
        return BoundResult(_clip01(1.0 - survive), LOWER_BOUND, err)
    survive, err, _ = _budget_expectation(
        policy, params, lambda g: math.exp(-a * g ** -delta), False, spec)
    return BoundResult(_clip01(1.0 - survive), LOWER_BOUND, err)


def _jensen_terms(policy, params, spec):
    """Return ``(P(H >= kappa), K, dK)`` with ``q_jensen = 1 - P exp(-lam K)``."""
    delta = params.delta
    a = math.pi * params.d ** 2 * _interference_moments(policy, delta)
    if params.eta == 0:
        k = a * params.beta ** delta * policy.fading.fractional_moment(-(1.0 - policy.s) * delta)
        return 1.0, k, 0.0
    raw, err, prob = _budget_expectation(policy, params, lambda g: g ** -delta, True, spec)
    if prob == 0.0:
        return 0.0, math.inf, 0.0
    return prob, a * raw / prob, a * err / prob


def _ci_terms(params, fading):
    delta = params.delta
    spread = fading.fractional_moment(delta) * fading.fractional_moment(-delta)
    if params.eta == 0:
        budget = 1.0 / params.beta
    else:
        budget = 1.0 / params.beta - fading.fractional_moment(-1.0) / params.snr
    if budget <= 0:
        raise InfeasibleError(
            "channel inversion is infeasible: snr / E[1/H] does not exceed beta"
        )
    return math.pi * params.d ** 2 * spread * budget ** -delta


def outage_jensen_fpc(policy: PowerControlPolicy, params: NetworkParams,
                      spec: QuadratureSpec = ANALYTIC_QUAD) -> BoundResult:
    """Jensen approximation of the outage under fractional power control."""
    if policy.s >= 1.0:
        # H**(1 - s) is constant, so the approximation equals the bound
        return outage_lb_ci(params, policy.fading)
    prob, k, dk = _jensen_terms(policy, params, spec)
    if prob == 0.0:
        return BoundResult(1.0, JENSEN, 0.0)
    survive = prob * math.exp(-params.lam * k)
    return BoundResult(_clip01(1.0 - survive), JENSEN, survive * params.lam * dk)


def outage_lb_cp(params: NetworkParams, fading) -> BoundResult:
    """Outage lower bound with constant transmit power."""
    return outage_lb_fpc(PowerControlPolicy(0.0, parse_fading(fading)), params)


def outage_jensen_cp(params: NetworkParams, fading) -> BoundResult:
    """Jensen approximation of the outage with constant transmit power."""
    return outage_jensen_fpc(PowerControlPolicy(0.0, parse_fading(fading)), params)


def density_fpc(policy: PowerControlPolicy, params: NetworkParams, epsilon: float,
                spec: QuadratureSpec = ANALYTIC_QUAD) -> float:
    """Density at which the Jensen outage approximation equals ``epsilon``.

    For ``s = 1`` this is the channel-inversion density upper bound. The
    ``lam`` field of ``params`` is ignored.

    Raises
    ------
    InfeasibleError
        If ``epsilon`` does not exceed the outage caused by fading and noise
        alone, ``1 - P(H >= kappa)``.
    """
    _check_epsilon(epsilon)
    if policy.s >= 1.0:
        return -math.log1p(-epsilon) / _ci_terms(params, policy.fading)
    prob, k, _ = _jensen_terms(policy, params, spec)
    if not epsilon > 1.0 - prob:
        raise InfeasibleError(
            f"target outage {epsilon!r} is below the fading floor {1.0 - prob!r}"
        )
    if prob == 1.0:
        return -math.log1p(-epsilon) / k
    return -math.log((1.0 - epsilon) / prob) / k


def loss_factor_fpc(s: float, fading, delta: float) -> float:
    """Capacity loss factor ``1 / (E[H^d] E[H^(-s d)] E[H^(-(1-s) d)])`` with ``d = delta``."""
    fading = parse_fading(fading)
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    return 1.0 / (fading.fractional_moment(delta)
                  * fading.fractional_moment(-s * delta)
                  * fading.fractional_moment(-(1.0 - s) * delta))


def transmission_capacity(params: NetworkParams, epsilon: float, density: float,
                          b: float | None = None) -> float:
    """Density of successful transmissions times spectral efficiency.

    ``b`` defaults to ``log2(1 + beta)``, the rate carried by a link that
    just meets the SINR threshold.
    """
    _check_epsilon(epsilon)
    if density < 0:
        raise DomainError("density must be non-negative")
    if b is None:
        b = math.log2(1.0 + params.beta)
    return density * (1.0 - epsilon) * b


def _safe_pow(x, y):
    try:
        return x ** y
    except OverflowError:
        return math.inf


def _clip01(x):
    return min(1.0, max(0.0, x))
