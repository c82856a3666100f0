import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fpclab.errors import DivergenceError, DomainError
from fpclab.fading import (
    ClampedRayleigh,
    Deterministic,
    Rayleigh,
    fractional_moment,
    parse_fading,
    power_normalizer,
    sample,
)
from fpclab.numerics import RandomStream


def clamped_moment_oracle(h_min, t):
    """E[max(X, h_min)^t] for X ~ Exp(1), by mpmath quadrature."""
    h_min = mpmath.mpf(h_min)
    tail = mpmath.quad(lambda h: h ** t * mpmath.exp(-h), [h_min, 1, mpmath.inf])
    return float(h_min ** t * (1 - mpmath.exp(-h_min)) + tail)


class TestRayleigh:
    @given(st.floats(min_value=-0.99, max_value=5.0))
    def test_moment_is_gamma(self, t):
        assert fractional_moment(Rayleigh(), t) == pytest.approx(math.gamma(1.0 + t), rel=1e-12)

    @pytest.mark.parametrize("t", [-1.0, -1.5, -3.0])
    def test_moment_diverges(self, t):
        with pytest.raises(DivergenceError):
            Rayleigh().fractional_moment(t)

    def test_normalizer_cost_in_db(self):
        # E[H^-1/2] = Gamma(1/2) = sqrt(pi)
        value = power_normalizer(Rayleigh(), 0.5)
        assert value == pytest.approx(math.sqrt(math.pi), rel=1e-13)
        assert 10 * math.log10(value) == pytest.approx(2.49, abs=0.05)

    def test_sample_moments(self):
        x = Rayleigh().sample(RandomStream(5), 400_000)
        for t in (-0.5, 0.5, 2.0):
            assert np.mean(x ** t) == pytest.approx(math.gamma(1 + t), rel=0.02)

    def test_survival_and_pdf(self):
        r = Rayleigh()
        assert r.survival(-1.0) == 1.0
        assert r.survival(2.0) == pytest.approx(math.exp(-2.0))
        assert r.pdf(1.0) == pytest.approx(math.exp(-1.0))
        assert r.atoms == ()


class TestClampedRayleigh:
    @pytest.mark.parametrize("h_min", [1e-4, 1e-2, 0.5, 2.0])
    @pytest.mark.parametrize("t", [-3.0, -1.0, -0.5, 0.7, 2.0])
    def test_moment_against_mpmath(self, h_min, t):
        assert ClampedRayleigh(h_min).fractional_moment(t) == pytest.approx(
            clamped_moment_oracle(h_min, t), rel=1e-9)

    def test_close_to_rayleigh_for_mild_moments(self):
        a = 1e-8
        c = ClampedRayleigh(a)
        for t in (0.5, 1.0):
            assert c.fractional_moment(t) == pytest.approx(math.gamma(1 + t), rel=1e-10)
        # for t = -1/2 clamping removes about sqrt(a) from Gamma(1/2)
        gap = math.gamma(0.5) - c.fractional_moment(-0.5)
        assert gap == pytest.approx(math.sqrt(a), rel=1e-4)

    def test_channel_inversion_normalizer_finite(self):
        assert math.isfinite(power_normalizer(ClampedRayleigh(1e-4), 1.0))

    def test_samples_are_clamped(self):
        c = ClampedRayleigh(0.3)
        x = c.sample(RandomStream(9), 100_000)
        assert x.min() == 0.3
        assert np.mean(x == 0.3) == pytest.approx(1 - math.exp(-0.3), abs=0.01)
        assert np.mean(x ** -1.0) == pytest.approx(c.fractional_moment(-1.0), rel=0.02)

    def test_mass_split(self):
        c = ClampedRayleigh(0.2)
        (value, prob), = c.atoms
        assert value == 0.2
        assert prob + c.continuous_survival(0.0) == pytest.approx(1.0, rel=1e-14)
        assert c.survival(0.2) == 1.0
        assert c.survival(1.0) == pytest.approx(math.exp(-1.0))

    @pytest.mark.parametrize("h_min", [0.0, -1.0, math.inf])
    def test_rejects_bad_h_min(self, h_min):
        with pytest.raises(DomainError):
            ClampedRayleigh(h_min)


class TestDeterministic:
    @given(st.floats(min_value=-5, max_value=5))
    def test_unit_moments(self, t):
        assert Deterministic().fractional_moment(t) == 1.0

    def test_scaled_value(self):
        d = Deterministic(4.0)
        assert d.fractional_moment(0.5) == pytest.approx(2.0)
        assert sample(d, RandomStream(0)) == 4.0
        assert d.survival(4.0) == 1.0 and d.survival(4.1) == 0.0


class TestParse:
    def test_names(self):
        assert parse_fading("rayleigh") == Rayleigh()
        assert parse_fading("none") == Deterministic()
        assert parse_fading({"clamped_rayleigh": {"h_min": 0.01}}) == ClampedRayleigh(0.01)
        assert parse_fading({"clamped_rayleigh": {}}) == ClampedRayleigh()

    @pytest.mark.parametrize("model", [Rayleigh(), Deterministic(), ClampedRayleigh(0.05),
                                       Deterministic(2.0)])
    def test_round_trip(self, model):
        assert parse_fading(model.to_config()) == model

    @pytest.mark.parametrize("bad", ["nakagami", {"clamped_rayleigh": {"h": 1}},
                                     {"a": {}, "b": {}}, 3, {"rayleigh": {}}])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            parse_fading(bad)
