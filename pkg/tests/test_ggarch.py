import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garma_wnn.errors import DataError
from garma_wnn.ggarch import (
    TAU_GAUSSIAN,
    GGarchModel,
    ggarch_filter,
    ggarch_fit,
    ggarch_forecast,
    ggarch_simulate,
)

NU24 = math.cos(2 * math.pi / 24)


def _log_garch_oracle(eps, gamma, beta, alpha, tau=TAU_GAUSSIAN):
    """ln s2_t = gamma + beta ln s2_{t-1} + alpha u_{t-1}, started at the stationary level."""
    ls = np.empty(eps.size)
    prev_ls, prev_u = gamma / (1 - beta), 0.0
    for t, e in enumerate(eps):
        ls[t] = gamma + beta * prev_ls + alpha * prev_u
        prev_ls, prev_u = ls[t], math.log(e * e) - tau
    return ls


class TestBracket:
    def test_no_lag_zero_term(self):
        m = GGarchModel(gamma=0.0, beta=0.3, psi=0.6, factors=[(NU24, 0.2)], truncation=20)
        assert m.bracket()[0] == 0.0

    def test_without_factors(self):
        b = GGarchModel(gamma=0.0, beta=0.3, psi=0.8, truncation=5).bracket()
        np.testing.assert_allclose(b, [0.0, 0.5, 0, 0, 0, 0], atol=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            GGarchModel(gamma=0.0, beta=1.0)
        with pytest.raises(ValueError):
            GGarchModel(gamma=0.0, factors=[(0.2, 0.6)])


class TestFilter:
    def test_degenerate_constant(self):
        eps = np.random.default_rng(0).standard_normal(30)
        ls = ggarch_filter(eps, GGarchModel(gamma=-2.0, factors=[(0.5, 0.0)]))
        np.testing.assert_allclose(ls, -2.0, atol=1e-12)

    @pytest.mark.parametrize("beta", [0.0, 0.5, -0.4, 0.95])
    def test_log_garch_oracle(self, beta):
        eps = np.random.default_rng(1).normal(0, 0.1, 400)
        m = GGarchModel(gamma=-0.4, beta=beta, psi=1.0, factors=[(NU24, 0.0)], truncation=50)
        np.testing.assert_allclose(ggarch_filter(eps, m), _log_garch_oracle(eps, -0.4, beta, 1 - beta), atol=1e-10)

    def test_predictable(self):
        eps = np.random.default_rng(2).standard_normal(100)
        m = GGarchModel(gamma=0.1, beta=0.4, psi=0.7, factors=[(NU24, 0.3)], truncation=100)
        bumped = eps.copy()
        bumped[60] = 50.0
        a, b = ggarch_filter(eps, m), ggarch_filter(bumped, m)
        np.testing.assert_array_equal(a[:61], b[:61])
        assert a[61] != b[61]

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(-5, 5),
        st.floats(-0.95, 0.95),
        st.floats(-1, 1),
        st.floats(-0.49, 0.49),
        st.floats(-0.99, 0.99),
        st.integers(0, 2 ** 31),
    )
    def test_variance_positive(self, gamma, beta, psi, d, nu, seed):
        m = GGarchModel(gamma=gamma, beta=beta, psi=psi, factors=[(nu, d)], truncation=200)
        eps = np.random.default_rng(seed).standard_normal(300) * 0.01
        assert np.all(np.exp(ggarch_filter(eps, m)) > 0)
        assert np.all(ggarch_forecast(m, eps, 5) > 0)

    def test_empty(self):
        with pytest.raises(ValueError):
            ggarch_filter([], GGarchModel(gamma=0.0))


class TestForecast:
    def test_flat_bracket_stays_at_level(self):
        m = GGarchModel(gamma=-1.0, beta=0.5, psi=0.5)
        eps = np.random.default_rng(3).standard_normal(50)
        np.testing.assert_allclose(ggarch_forecast(m, eps, 10), math.exp(-2.0), rtol=1e-12)

    def test_one_step_equals_filter(self):
        m = GGarchModel(gamma=-0.2, beta=0.3, psi=0.6, factors=[(NU24, 0.2)], truncation=100)
        eps = np.random.default_rng(4).standard_normal(80)
        full = ggarch_filter(np.append(eps, 1.0), m)
        assert ggarch_forecast(m, eps, 1)[0] == pytest.approx(math.exp(full[-1]), rel=1e-12)

    def test_reverts_to_level(self):
        m = GGarchModel(gamma=-0.5, beta=0.6, psi=0.9)
        eps = np.full(20, 30.0)
        f = ggarch_forecast(m, eps, 60)
        assert f[0] > f[-1]
        assert math.log(f[-1]) == pytest.approx(-0.5 / 0.4, abs=1e-6)

    def test_bad_horizon(self):
        with pytest.raises(ValueError):
            ggarch_forecast(GGarchModel(gamma=0.0), [1.0], 0)


class TestFit:
    def test_white_noise_identified_quantities(self):
        for seed in range(20):
            e = np.random.default_rng(seed).normal(0, 0.02, 2000)
            f = ggarch_fit(e, k_v=0, seed=seed, n_starts=4)
            assert abs(f.psi - f.beta) < 0.1
            assert np.exp(ggarch_filter(e, f)).mean() / e.var() == pytest.approx(1.0, abs=0.05)

    def test_recovers_arch_effect(self):
        true = GGarchModel(gamma=-0.8, beta=0.6, psi=0.9, truncation=200)
        e = ggarch_simulate(true, 4000, seed=5)
        f = ggarch_fit(e, k_v=0, n_starts=4, truncation=200)
        assert f.psi - f.beta == pytest.approx(0.3, abs=0.06)
        assert f.beta == pytest.approx(0.6, abs=0.15)

    def test_fixed_frequency_factor(self):
        true = GGarchModel(gamma=-0.5, beta=0.2, psi=0.1, factors=[(NU24, 0.25)], truncation=300)
        e = ggarch_simulate(true, 4096, seed=6)
        f = ggarch_fit(e, k_v=1, frequencies=[1 / 24], n_starts=4, truncation=300)
        assert f.factors[0].nu == pytest.approx(NU24)
        assert f.factors[0].d > 0.1
        assert set(f.fit.std_errors) == {"gamma", "beta", "psi", "d1"}

    def test_degenerate_residuals(self):
        with pytest.raises(DataError, match="degenerate"):
            ggarch_fit(np.zeros(100), k_v=0)
        with pytest.raises(DataError):
            ggarch_fit(np.ones(10), k_v=0)

    def test_json_roundtrip(self, tmp_path):
        e = np.random.default_rng(7).standard_normal(300)
        f = ggarch_fit(e, k_v=1, frequencies=[0.1], n_starts=2, truncation=50)
        f.save(tmp_path / "g.json")
        back = GGarchModel.load(tmp_path / "g.json")
        assert back.to_dict() == f.to_dict()
        np.testing.assert_array_equal(ggarch_filter(e, back), ggarch_filter(e, f))


class TestSimulate:
    def test_seeded(self):
        m = GGarchModel(gamma=-1.0, beta=0.3, psi=0.5, truncation=30)
        np.testing.assert_array_equal(ggarch_simulate(m, 40, seed=1), ggarch_simulate(m, 40, seed=1))

    def test_constant_variance_scale(self):
        e = ggarch_simulate(GGarchModel(gamma=math.log(4.0)), 20000, seed=2)
        assert e.var() == pytest.approx(4.0, rel=0.05)
