"""Channel-power (fading) models.

A model describes the distribution of the channel power ``H`` through

* ``fractional_moment(t)`` returning ``E[H**t]``,
* ``sample(stream, size)`` for i.i.d. draws,
* a split into point masses (``atoms``) and a density on ``(support_lower, inf)``,
  which the quadrature-based bounds integrate against.

Three models are provided: no fading (``Deterministic``), ``Rayleigh``
(``H ~ Exp(1)``) and ``ClampedRayleigh``, where draws are clamped from below
at ``h_min`` so that negative moments of any order stay finite.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DivergenceError, DomainError
from .numerics import (
    QuadratureSpec,
    RandomStream,
    gamma_fn,
    integrate_semi_infinite,
)

__all__ = [
    "FadingModel",
    "Deterministic",
    "Rayleigh",
    "ClampedRayleigh",
    "fractional_moment",
    "sample",
    "power_normalizer",
    "parse_fading",
]

DEFAULT_H_MIN = 1e-4
_MOMENT_QUAD = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15)


class FadingModel:
    """Interface shared by the fading models."""

    #: point masses ``(value, probability)``
    atoms: tuple = ()
    #: lower end of the density part; ``None`` when there is no density
    support_lower: float | None = None

    def fractional_moment(self, t: float) -> float:
        raise NotImplementedError

    def pdf(self, h: float) -> float:
        """Density of the continuous part (zero for purely atomic models)."""
        return 0.0

    def survival(self, x: float) -> float:
        """``P(H >= x)``."""
        raise NotImplementedError

    def continuous_survival(self, x: float) -> float:
        """Mass of the density part on ``[x, inf)``."""
        return 0.0

    def sample(self, stream: RandomStream, size=None):
        raise NotImplementedError

    def to_config(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Deterministic(FadingModel):
    """No fading: ``H`` equals ``value`` (1 by default)."""

    value: float = 1.0

    def __post_init__(self):
        if not self.value > 0:
            raise DomainError("deterministic channel power must be positive")

    @property
    def atoms(self):
        return ((self.value, 1.0),)

    def fractional_moment(self, t):
        if t == 0:
            return 1.0
        return self.value ** t

    def survival(self, x):
        return 1.0 if x <= self.value else 0.0

    def sample(self, stream, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def to_config(self):
        return "none" if self.value == 1.0 else {"deterministic": {"value": self.value}}


@dataclass(frozen=True)
class Rayleigh(FadingModel):
    """Rayleigh fading, channel power ``H ~ Exp(1)`` and ``E[H**t] = Gamma(1 + t)``."""

    support_lower = 0.0

    def fractional_moment(self, t):
        if t == 0:
            return 1.0
        if t <= -1.0:
            raise DivergenceError(
                f"E[H^{t:g}] is infinite under Rayleigh fading; use ClampedRayleigh"
            )
        return gamma_fn(1.0 + t)

    def pdf(self, h):
        return math.exp(-h)

    def survival(self, x):
        return 1.0 if x <= 0.0 else math.exp(-x)

    def continuous_survival(self, x):
        return self.survival(x)

    def sample(self, stream, size=None):
        return stream.exponential(size)

    def to_config(self):
        return "rayleigh"


@dataclass(frozen=True)
class ClampedRayleigh(FadingModel):
    """Rayleigh fading clamped from below: ``H = max(X, h_min)``, ``X ~ Exp(1)``."""

    h_min: float = DEFAULT_H_MIN

    def __post_init__(self):
        if not (math.isfinite(self.h_min) and self.h_min > 0):
            raise DomainError("h_min must be a finite positive number")

    @property
    def atoms(self):
        return ((self.h_min, -math.expm1(-self.h_min)),)

    @property
    def support_lower(self):
        return self.h_min

    def fractional_moment(self, t):
        if t == 0:
            return 1.0
        return _clamped_moment(self.h_min, float(t))

    def pdf(self, h):
        return math.exp(-h) if h > self.h_min else 0.0

    def survival(self, x):
        return 1.0 if x <= self.h_min else math.exp(-x)

    def continuous_survival(self, x):
        return math.exp(-max(x, self.h_min))

    def sample(self, stream, size=None):
        return np.maximum(stream.exponential(size), self.h_min)

    def to_config(self):
        return {"clamped_rayleigh": {"h_min": self.h_min}}


@functools.lru_cache(maxsize=4096)
def _clamped_moment(h_min, t):
    return h_min ** t * -math.expm1(-h_min) + _upper_gamma_tail(t, h_min)


def _upper_gamma_tail(t, a):
    """``int_a^inf h**t exp(-h) dh`` for any real ``t`` and ``a > 0``."""
    if a < 1.0:
        # log substitution on (a, 1) keeps the integrand smooth for t << 0
        lo = math.log(a)
        near, _ = integrate.quad(lambda v: math.exp((t + 1.0) * v - math.exp(v)),
                                 lo, 0.0, epsabs=1e-15, epsrel=1e-12, limit=200)
        return near + integrate_semi_infinite(lambda h: h ** t * math.exp(-h), 1.0, _MOMENT_QUAD)
    return integrate_semi_infinite(lambda h: h ** t * math.exp(-h), a, _MOMENT_QUAD)


def fractional_moment(model: FadingModel, t: float) -> float:
    """``E[H**t]`` for the given model."""
    return model.fractional_moment(float(t))


def sample(model: FadingModel, stream: RandomStream):
    """One draw of ``H``."""
    return float(model.sample(stream))


def power_normalizer(model: FadingModel, s: float) -> float:
    """``E[H**(-s)]``, the factor that keeps the mean transmit power at ``p``."""
    return model.fractional_moment(-float(s))


def parse_fading(spec) -> FadingModel:
    """Build a model from its config form.

    Accepts ``"rayleigh"``, ``"none"`` or ``{"clamped_rayleigh": {"h_min": x}}``
    (``{"deterministic": {"value": x}}`` is also understood).
    """
    if isinstance(spec, FadingModel):
        return spec
    if isinstance(spec, str):
        key = spec.strip().lower()
        if key == "rayleigh":
            return Rayleigh()
        if key in ("none", "deterministic"):
            return Deterministic()
        if key == "clamped_rayleigh":
            return ClampedRayleigh()
        raise DomainError(f"unknown fading model {spec!r}")
    if isinstance(spec, dict) and len(spec) == 1:
        (key, opts), = spec.items()
        opts = opts or {}
        if not isinstance(opts, dict):
            raise DomainError(f"options for fading model {key!r} must be an object")
        if key == "clamped_rayleigh":
            unknown = set(opts) - {"h_min"}
            if unknown:
                raise DomainError(f"unknown clamped_rayleigh option(s): {sorted(unknown)}")
            return ClampedRayleigh(float(opts.get("h_min", DEFAULT_H_MIN)))
        if key == "deterministic":
            unknown = set(opts) - {"value"}
            if unknown:
                raise DomainError(f"unknown deterministic option(s): {sorted(unknown)}")
            return Deterministic(float(opts.get("value", 1.0)))
        raise DomainError(f"unknown fading model {key!r}")
    raise DomainError(f"cannot interpret fading model {spec!r}")
