import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpclab.errors import BracketError, ConvergenceError, DomainError
from fpclab.numerics import (
    QuadratureSpec,
    RandomStream,
    find_root_increasing,
    gamma_fn,
    integrate_semi_infinite,
    minimize_unimodal,
    sample_exponential,
    sample_poisson,
    sample_uniform,
)


class TestGamma:
    @pytest.mark.parametrize("x", [0.01, 0.1, 0.5, 1.0, 1.5, 2.0, 3.3, 10.0, 29.5])
    def test_matches_mpmath(self, x):
        ref = float(mpmath.gamma(x))
        assert gamma_fn(x) == pytest.approx(ref, rel=1e-13)

    @given(st.floats(min_value=0.01, max_value=30.0))
    def test_matches_stdlib(self, x):
        assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-13)

    def test_integers_are_factorials(self):
        for n in range(1, 15):
            assert gamma_fn(n) == pytest.approx(math.factorial(n - 1), rel=1e-14)

    def test_half(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    @given(st.floats(min_value=0.05, max_value=20.0))
    def test_recurrence(self, x):
        assert gamma_fn(x + 1) == pytest.approx(x * gamma_fn(x), rel=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.inf, math.nan])
    def test_rejects_bad_arguments(self, x):
        with pytest.raises(DomainError):
            gamma_fn(x)


class TestQuadrature:
    @pytest.mark.parametrize("t", [-0.9, -0.5, 0.0, 0.5, 2.0])
    def test_gamma_integral(self, t):
        """int_0^inf x^t e^-x dx against Gamma(1+t), singular endpoint for t < 0."""
        spec = QuadratureSpec().with_singularity(max(0.0, -t))
        value = integrate_semi_infinite(lambda x: x ** t * math.exp(-x), 0.0, spec)
        assert value == pytest.approx(gamma_fn(1.0 + t), rel=1e-7)

    def test_shifted_lower_limit(self):
        value, err = integrate_semi_infinite(lambda x: math.exp(-x), 2.0, return_error=True)
        assert value == pytest.approx(math.exp(-2.0), rel=1e-10)
        assert 0.0 <= err < 1e-8

    def test_power_tail(self):
        # int_1^inf x^-3 dx = 1/2
        assert integrate_semi_infinite(lambda x: x ** -3.0, 1.0) == pytest.approx(0.5, rel=1e-9)

    def test_divergent_integral_raises(self):
        with pytest.raises(ConvergenceError) as info:
            integrate_semi_infinite(lambda x: 1.0 / x, 1.0, QuadratureSpec(max_subdivisions=50))
        assert info.value.estimate is not None

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            QuadratureSpec(rel_tol=0.0)
        with pytest.raises(DomainError):
            QuadratureSpec(endpoint_singularity_order=1.0)
        with pytest.raises(DomainError):
            QuadratureSpec(max_subdivisions=0)


class TestRootAndMinimum:
    def test_root_of_cubic(self):
        root = find_root_increasing(lambda x: x ** 3 - 2.0, 0.0, 2.0)
        assert root == pytest.approx(2.0 ** (1 / 3), abs=1e-11)

    def test_root_at_endpoint(self):
        assert find_root_increasing(lambda x: x, 0.0, 1.0) == 0.0

    def test_bracket_error(self):
        with pytest.raises(BracketError):
            find_root_increasing(lambda x: x + 5.0, 0.0, 1.0)

    def test_golden_section_quadratic(self):
        x, fx = minimize_unimodal(lambda x: (x - 0.3) ** 2 + 1.0, -1.0, 2.0, tol=1e-9)
        assert x == pytest.approx(0.3, abs=1e-6)
        assert fx == pytest.approx(1.0, abs=1e-12)

    def test_golden_section_monotone_returns_endpoint(self):
        x, fx = minimize_unimodal(lambda x: x, 0.0, 1.0)
        assert (x, fx) == (0.0, 0.0)
        x, _ = minimize_unimodal(lambda x: -x, 0.0, 1.0)
        assert x == 1.0

    @given(st.floats(min_value=-0.9, max_value=0.9))
    def test_golden_section_finds_vertex(self, c):
        x, _ = minimize_unimodal(lambda x: abs(x - c), -1.0, 1.0, tol=1e-8)
        assert x == pytest.approx(c, abs=1e-7)


class TestRandomStream:
    def test_reproducible(self):
        a = RandomStream(7, 3).uniform(100)
        b = RandomStream(7, 3).uniform(100)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = RandomStream(7, 3).uniform(100)
        b = RandomStream(7, 4).uniform(100)
        c = RandomStream(8, 3).uniform(100)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_uniform_open_interval(self):
        u = RandomStream(1).uniform(200_000)
        assert u.min() > 0.0 and u.max() < 1.0
        assert u.mean() == pytest.approx(0.5, abs=0.005)

    def test_exponential_moments(self):
        x = RandomStream(2).exponential(200_000)
        assert x.min() > 0.0
        assert x.mean() == pytest.approx(1.0, abs=0.01)
        assert x.var() == pytest.approx(1.0, abs=0.03)

    @pytest.mark.parametrize("mean", [0.0, 0.3, 4.0, 25.0, 400.0])
    def test_poisson_mean_and_variance(self, mean):
        k = RandomStream(3).poisson(mean, 100_000)
        tol = 5 * math.sqrt(mean / 100_000) + 1e-12
        assert k.mean() == pytest.approx(mean, abs=tol)
        if mean > 0:
            assert k.var() == pytest.approx(mean, rel=0.05)

    def test_poisson_rejects_bad_mean(self):
        with pytest.raises(DomainError):
            RandomStream(0).poisson(-1.0)
        with pytest.raises(DomainError):
            RandomStream(0).poisson(math.inf)

    def test_seed_validation(self):
        with pytest.raises(DomainError):
            RandomStream(-1)
        with pytest.raises(DomainError):
            RandomStream(0, -2)

    def test_scalar_helpers(self):
        s = RandomStream(11)
        assert 0.0 < sample_uniform(s) < 1.0
        assert sample_exponential(s) > 0.0
        assert isinstance(sample_poisson(s, 3.0), int)

    @settings(max_examples=20)
    @given(st.integers(min_value=0, max_value=2**63), st.integers(min_value=0, max_value=10**6))
    def test_any_seed_pair_recreates(self, seed, sid):
        assert RandomStream(seed, sid).uniform() == RandomStream(seed, sid).uniform()


class TestDocumentedExamples:
    def test_gamma_values(self):
        assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-14)
        assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_recurrence_grid(self):
        for x in np.arange(1, 201) * 0.05:
            assert gamma_fn(x + 1) == pytest.approx(x * gamma_fn(x), rel=1e-9)

    def test_integrals(self):
        assert integrate_semi_infinite(lambda x: math.exp(-x), 0.0) == pytest.approx(1.0, rel=1e-10)
        assert integrate_semi_infinite(lambda x: math.exp(-x), math.log(2)) == pytest.approx(0.5, rel=1e-10)
        half = QuadratureSpec().with_singularity(0.5)
        assert integrate_semi_infinite(lambda x: x ** -0.5 * math.exp(-x), 0.0, half) == pytest.approx(
            math.sqrt(math.pi), rel=1e-9)

    def test_roots(self):
        assert find_root_increasing(lambda x: x - 2, 0, 10) == pytest.approx(2.0, abs=1e-11)
        assert find_root_increasing(lambda x: -math.expm1(-x) - 0.05, 0, 10) == pytest.approx(
            -math.log(0.95), abs=1e-11)
        assert find_root_increasing(lambda x: x ** 3 - 8, 0, 4) == pytest.approx(2.0, abs=1e-11)
        f = lambda x: math.log1p(x) - 0.3
        assert abs(f(find_root_increasing(f, 0.0, 5.0, tol=1e-10))) < 1e-10

    def test_minima(self):
        assert minimize_unimodal(lambda x: (x - 0.5) ** 2, 0, 1, 1e-6)[0] == pytest.approx(0.5, abs=1e-6)
        assert minimize_unimodal(lambda x: math.cosh(x - 1), 0, 3, 1e-6)[0] == pytest.approx(1.0, abs=1e-6)

    def test_large_sample_moments(self):
        s = RandomStream(2024)
        assert np.all(s.poisson(0.0, 1000) == 0)
        assert abs(s.poisson(3.0, 10**6).mean() - 3.0) <= 0.006
        assert abs(s.poisson(50.0, 10**6).var() - 50.0) <= 1.0
        x = s.exponential(10**6)
        assert abs(x.mean() - 1.0) <= 0.003 and x.min() > 0
