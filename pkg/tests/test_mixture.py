import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from pwlab.curves import CurveSpec, g
from pwlab.errors import UsageError
from pwlab.mixture import (
    MixingLaw, MixtureParams, Sample, abs_moment_exp_mixing, bin_probabilities,
    emp_fourier_deriv, mixture_cdf, mixture_density, psi, read_sample, sample_mixture,
    write_sample, xi,
)

EXP1 = MixingLaw.exponential(1.0)


class TestParams:
    def test_sigma_must_be_positive(self):
        with pytest.raises(ValueError):
            MixtureParams(0.1, 0.0)

    def test_reduction(self):
        assert MixtureParams(0.6, 2.0).reduced() == MixtureParams(0.3, 1.0)


class TestMixingLaw:
    @pytest.mark.parametrize("text, law", [
        ("exp:1", MixingLaw.exponential(1.0)),
        ("exp:2.5", MixingLaw.exponential(2.5)),
        ("gamma:2:3", MixingLaw.gamma(2.0, 3.0)),
    ])
    def test_parse(self, text, law):
        assert MixingLaw.parse(text) == law

    @pytest.mark.parametrize("text", ["exp:x", "gamma:1", "beta:1:2", "exp:1:2"])
    def test_parse_errors(self, text):
        with pytest.raises(UsageError):
            MixingLaw.parse(text)

    def test_density(self):
        assert EXP1.density(0.0) == 1.0
        assert EXP1.density(2.0) == pytest.approx(math.exp(-2))
        assert MixingLaw.gamma(2.0, 1.0).density(1.5) == pytest.approx(1.5 * math.exp(-1.5))


class TestSampling:
    def test_determinism(self):
        p = MixtureParams(0.1, 1.0)
        a = sample_mixture(p, EXP1, 1000, seed=42)
        b = sample_mixture(p, EXP1, 1000, seed=42)
        assert np.array_equal(a.values, b.values)

    def test_replicate_streams_differ(self):
        p = MixtureParams(0.1, 1.0)
        a = sample_mixture(p, EXP1, 100, seed=42, index=0)
        b = sample_mixture(p, EXP1, 100, seed=42, index=1)
        assert not np.array_equal(a.values, b.values)

    @pytest.mark.parametrize("mu", [0.0, 1.0])
    def test_mean(self, mu):
        # E X = mu E xi = mu;  Var X = E xi + mu^2 Var xi = 1 + mu^2
        n = 100_000
        s = sample_mixture(MixtureParams(mu, 1.0), EXP1, n, seed=5)
        se = math.sqrt((1 + mu**2) / n)
        assert abs(s.values.mean() - mu) <= 3 * se

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sample_mixture(MixtureParams(0.0), EXP1, 0, seed=1)

    def test_sample_validation(self):
        with pytest.raises(ValueError):
            Sample([1.0, math.nan])
        with pytest.raises(ValueError):
            Sample([])


class TestPsiXi:
    def test_psi_values(self):
        assert psi(MixtureParams(0.0), 2.0) == 2.0
        assert psi(MixtureParams(0.1), 1.0) == pytest.approx(0.5 - 0.1j)
        assert psi(MixtureParams(0.3), 0.0) == 0

    def test_xi_values(self):
        assert xi(MixtureParams(0.0), 2.0) == pytest.approx(2.0)
        assert xi(MixtureParams(1.0), 0.5 - 1j) == pytest.approx(1.0, abs=1e-15)

    def test_xi_on_curve_is_sqrt(self):
        z = g(CurveSpec.mixture(0.1, 1.0), 20.0)
        assert xi(MixtureParams(0.1), z) == pytest.approx(math.sqrt(40), abs=1e-12)

    def test_branch_cut_reported(self):
        with pytest.raises(ValueError):
            xi(MixtureParams(1.0), 0.25)

    @pytest.mark.parametrize("mu", [0.0, 0.1, 1.0])
    @pytest.mark.parametrize("y", [0.5, 1.0, 10.0, 100.0])
    def test_inverse_identity_and_realness(self, mu, y):
        p = MixtureParams(mu)
        z = g(CurveSpec.mixture(mu, 1.0), y)
        w = xi(p, z)
        assert abs(psi(p, w.real) - z) <= 1e-12 * max(1.0, abs(z))
        assert abs(w.imag) <= 1e-12
        assert w.real == pytest.approx(math.sqrt(2 * y), abs=1e-12)

    @pytest.mark.parametrize("u", [0.3, 2.0])
    def test_general_sigma(self, u):
        p = MixtureParams(0.4, 1.7)
        assert xi(p, psi(p, u)) == pytest.approx(u, abs=1e-13)


class TestEmpiricalFourier:
    def test_normalisation(self):
        assert emp_fourier_deriv(Sample([0.3, -2.0, 5.0]), 0, 0.0) == 1

    def test_odd_derivative_cancels(self):
        assert emp_fourier_deriv(Sample([1.0, -1.0]), 1, 0.0) == 0

    def test_second_derivative(self):
        assert emp_fourier_deriv(Sample([1.0, -1.0]), 2, 0.0) == pytest.approx(-1)

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=20), st.floats(-30, 30))
    def test_bounded(self, xs, u):
        assert abs(emp_fourier_deriv(Sample(xs), 0, u)) <= 1 + 1e-12


class TestDensity:
    def test_value_at_origin(self):
        assert mixture_density(MixtureParams(0.0), EXP1.density, 0.0) == pytest.approx(1 / math.sqrt(2), abs=1e-9)

    @pytest.mark.parametrize("x", [0.2, 1.0, 3.7])
    def test_symmetric_without_drift(self, x):
        p = MixtureParams(0.0, 1.3)
        assert abs(mixture_density(p, EXP1.density, x) - mixture_density(p, EXP1.density, -x)) <= 1e-9

    def test_closed_form_laplace(self):
        # mu = 0, Exp(1) mixing: q(x) = exp(-sqrt(2)|x|) / sqrt(2)
        for x in (0.5, 2.0):
            assert mixture_density(MixtureParams(0.0), EXP1.density, x) == pytest.approx(
                math.exp(-math.sqrt(2) * x) / math.sqrt(2), abs=1e-9)

    def test_total_mass(self):
        p = MixtureParams(0.1, 1.0)
        mass, _ = integrate.quad(lambda x: mixture_density(p, EXP1.density, x), -np.inf, np.inf, epsabs=1e-10)
        assert mass == pytest.approx(1.0, abs=1e-6)

    def test_cdf_consistent_with_density(self):
        p = MixtureParams(0.1, 1.0)
        a, b = -0.4, 1.1
        direct, _ = integrate.quad(lambda x: mixture_density(p, EXP1.density, x), a, b, epsabs=1e-11)
        via_cdf = mixture_cdf(p, EXP1.density, b) - mixture_cdf(p, EXP1.density, a)
        assert via_cdf == pytest.approx(direct, abs=1e-9)

    def test_bins_sum_to_one(self):
        edges = [-60.0, -1.0, 0.0, 2.0, 60.0]
        assert bin_probabilities(MixtureParams(0.1), EXP1.density, edges).sum() == pytest.approx(1, abs=1e-9)


class TestAbsMoments:
    @pytest.mark.parametrize("k, expected", [(1, 1.0), (2, 6.0), (3, 90.0)])
    def test_values(self, k, expected):
        assert abs_moment_exp_mixing(k) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("k", [4, 10, 40])
    def test_double_factorial_identity(self, k):
        assert abs_moment_exp_mixing(k, log=True) == pytest.approx(
            math.log(math.factorial(2 * k)) - k * math.log(2), rel=1e-13)

    def test_monte_carlo(self):
        s = sample_mixture(MixtureParams(0.0), EXP1, 200_000, seed=11)
        assert np.mean(s.values**4) == pytest.approx(6.0, rel=0.05)

    def test_overflow(self):
        with pytest.raises(OverflowError):
            abs_moment_exp_mixing(500)
        assert math.isfinite(abs_moment_exp_mixing(500, log=True))


class TestSampleFile:
    def test_round_trip(self, tmp_path):
        s = sample_mixture(MixtureParams(0.1), EXP1, 50, seed=9)
        path = tmp_path / "s.txt"
        write_sample(s, path)
        header = json.loads(path.read_text().splitlines()[0][1:])
        assert header["seed"] == 9 and header["mu"] == 0.1
        back = read_sample(path)
        assert np.array_equal(back.values, s.values)
        assert back.seed == 9

    def test_plain_file(self, tmp_path):
        path = tmp_path / "plain.txt"
        path.write_text("1.5\n-2\n\n3e-1\n")
        assert list(read_sample(path).values) == [1.5, -2.0, 0.3]

    def test_bad_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1.0\nabc\n")
        with pytest.raises(UsageError, match=":2:"):
            read_sample(path)

    def test_missing(self, tmp_path):
        with pytest.raises(UsageError):
            read_sample(tmp_path / "nope.txt")
