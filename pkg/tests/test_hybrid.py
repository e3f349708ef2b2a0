import math

import numpy as np
import pytest

from garma_wnn.data_io import SplitSpec, minmax_denormalize
from garma_wnn.errors import ConfigError, DataError
from garma_wnn.garma import GarmaModel, garma_forecast, garma_simulate
from garma_wnn.ggarch import GGarchModel
from garma_wnn.hybrid import (
    GGarchSpec,
    HybridModel,
    HybridSpec,
    MeanSpec,
    NetworkResidual,
    NetworkSpec,
    default_models,
    fit_hybrid,
    forecast_hybrid,
    horizon_backtest,
    in_sample_residual_rmse,
    metrics,
)
from garma_wnn.llwnn import BPConfig, InputPipeline, PSOConfig, TrainConfig, init_model, prepare_inputs

NU24 = math.cos(2 * math.pi / 24)
SMALL_MEAN = MeanSpec(k=1, p=1, q=0, frequencies=(1 / 24,), truncation=100, n_starts=1)
SMALL_NET = NetworkSpec(InputPipeline(4, "la8", 2), TrainConfig("BP", BPConfig(0.05, 5)), n_units=4)


def _series(n, seed):
    return garma_simulate(GarmaModel(ar=(0.4,), factors=[(NU24, 0.3)], truncation=100), n, seed=seed)


class _Fixed:
    """Backtest stand-in whose forecast is a fixed function of the history."""

    def __init__(self, rule):
        self.rule = rule

    def fit(self, history, n_init, seed):
        rule, hist = self.rule, np.asarray(history)

        class _Fitted:
            def forecast(self, h):
                return rule(hist, h)

        return _Fitted()


class TestMetrics:
    def test_examples(self):
        m = metrics([1.0, 2.0], [1.0, 2.0])
        assert (m.mae, m.mse, m.rmse) == (0.0, 0.0, 0.0)
        m = metrics([0.0, 0.0], [1.0, 1.0])
        assert (m.mae, m.mse, m.rmse) == (1.0, 1.0, 1.0)
        m = metrics([0.0, 2.0], [1.0, 1.0])
        assert (m.mae, m.mse, m.rmse) == (1.0, 1.0, 1.0)

    def test_absolute_error(self):
        assert metrics([0.0, 0.0], [1.0, -1.0]).mae == 1.0

    def test_errors(self):
        with pytest.raises(ValueError):
            metrics([1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            metrics([], [])


class TestFitHybrid:
    def test_no_residual_model_is_bare_garma(self):
        x = _series(600, 0)
        hyb = fit_hybrid(x, SMALL_MEAN, None)
        assert hyb.residual_model is None
        fc = forecast_hybrid(hyb, x, 12)
        np.testing.assert_array_equal(fc.point, garma_forecast(hyb.mean_model, x, 12))
        assert fc.variance is None

    def test_zero_weight_network_adds_constant(self):
        x = _series(400, 1)
        mean = GarmaModel(ar=(0.4,), factors=[(NU24, 0.3)], truncation=100)
        pipe = InputPipeline(3, "la8", 2)
        eps = HybridModel(mean).residuals(x)
        _, state = prepare_inputs(eps, pipe)
        net = init_model(pipe.n_features, 5, seed=0)
        net.w[:] = 0.0
        hyb = HybridModel(mean, NetworkResidual(net, pipe, state.norm, np.zeros(0)))
        fc = forecast_hybrid(hyb, x, 8)
        const = minmax_denormalize([0.0], state.norm)[0]
        np.testing.assert_allclose(fc.point, garma_forecast(mean, x, 8) + const, atol=1e-12)

    def test_ggarch_contributes_variance_only(self):
        x = _series(600, 2)
        hyb = fit_hybrid(x, SMALL_MEAN, GGarchSpec(k_v=1, frequencies=(0.1,), truncation=100, n_starts=2))
        assert isinstance(hyb.residual_model, GGarchModel)
        fc = forecast_hybrid(hyb, x, 6)
        np.testing.assert_array_equal(fc.point, garma_forecast(hyb.mean_model, x, 6))
        assert fc.variance.shape == (6,) and np.all(fc.variance > 0)

    def test_standalone_network(self):
        x = np.random.default_rng(3).standard_normal(300)
        hyb = fit_hybrid(x, None, SMALL_NET)
        assert hyb.mean_model is None and hyb.residual_model.kind == "wllwnn"
        fc = forecast_hybrid(hyb, x, 5)
        np.testing.assert_array_equal(fc.mean, 0.0)
        np.testing.assert_array_equal(fc.point, fc.residual)

    def test_white_noise_in_sample_rmse(self):
        # constant-step SGD hovers around the optimum, so allow a few percent of jitter
        spec = NetworkSpec(InputPipeline(4, "la8", 2), TrainConfig("BP", BPConfig(0.05, 30)), 4)
        for seed in range(5):
            x = np.random.default_rng(seed).standard_normal(1200)
            hyb = fit_hybrid(x, SMALL_MEAN, spec, seed=seed, n_init=200)
            eps = hyb.residuals(x)[200:]
            assert in_sample_residual_rmse(hyb, x, 200) <= 1.05 * eps.std()

    def test_normalization_ignores_init_segment(self):
        x = _series(500, 4)
        x[:100] += 1000.0
        hyb = fit_hybrid(x, None, SMALL_NET, n_init=100)
        assert hyb.residual_model.norm.y_max < 100

    def test_stage_errors_are_labelled(self):
        with pytest.raises(DataError, match="mean stage"):
            fit_hybrid(np.random.default_rng(0).standard_normal(30), MeanSpec(k=3, p=1, q=1), None)
        with pytest.raises(DataError, match="residual stage"):
            fit_hybrid(np.random.default_rng(0).standard_normal(30), None, SMALL_NET)
        with pytest.raises(ConfigError):
            fit_hybrid(np.ones(10), None, None)

    def test_bad_horizon(self):
        x = _series(300, 5)
        with pytest.raises(ValueError):
            forecast_hybrid(fit_hybrid(x, SMALL_MEAN), x, 0)

    def test_deterministic(self):
        x = _series(500, 6)
        a = forecast_hybrid(fit_hybrid(x, SMALL_MEAN, SMALL_NET, seed=3), x, 10).point
        b = forecast_hybrid(fit_hybrid(x, SMALL_MEAN, SMALL_NET, seed=3), x, 10).point
        np.testing.assert_array_equal(a, b)


class TestBacktest:
    def test_perfect_foresight_scores_zero(self):
        x = np.random.default_rng(0).standard_normal(130)
        future = x[58:]
        rep = horizon_backtest({"oracle": _Fixed(lambda hist, h: future[:h])}, x, SplitSpec(8, 50, 72))
        assert len(rep.rows) == 5
        assert all(r.mae == r.mse == r.rmse == 0.0 for r in rep.rows)

    def test_naive_last_value_walk_vs_noise(self):
        naive = {"naive": _Fixed(lambda hist, h: np.full(h, hist[-1]))}
        spec = SplitSpec(10, 90, 1)
        walk, noise = [], []
        for seed in range(300):
            e = np.random.default_rng(seed).standard_normal(101)
            walk.append(horizon_backtest(naive, np.cumsum(e), spec, horizons=(1,)).rows[0].mse)
            noise.append(horizon_backtest(naive, e, spec, horizons=(1,)).rows[0].mse)
        assert np.sqrt(np.mean(walk)) < np.sqrt(np.mean(noise))

    def test_failures_are_recorded(self):
        def broken(hist, h):
            raise ArithmeticError("boom")

        x = np.arange(100.0)
        rep = horizon_backtest({"bad": _Fixed(broken), "ok": _Fixed(lambda hist, h: np.zeros(h))}, x,
                               SplitSpec(10, 60, 24), horizons=(6, 24))
        assert "boom" in rep.failures["bad"]
        assert [r.model for r in rep.rows] == ["ok", "ok"]

    def test_horizon_beyond_test(self):
        with pytest.raises(ConfigError, match="exceeds"):
            horizon_backtest({}, np.arange(100.0), SplitSpec(10, 60, 30), horizons=(6, 72))

    def test_series_too_short(self):
        with pytest.raises(DataError):
            horizon_backtest({}, np.arange(50.0), SplitSpec(10, 60, 30), horizons=(6,))

    def test_nine_models_and_poisoning(self, tmp_path):
        models = default_models(
            mean=SMALL_MEAN,
            wavelet_pipeline=InputPipeline(4, "la8", 2),
            bp=TrainConfig("BP", BPConfig(0.05, 3)),
            pso=TrainConfig("PSO", pso=PSOConfig(population=4, generations=3)),
            ggarch=GGarchSpec(k_v=1, frequencies=(0.1,), truncation=100, n_starts=1),
            n_units=3,
        )
        x = _series(600, 7)
        spec = SplitSpec(100, 428, 72)
        rep = horizon_backtest(models, x, spec, seed=1)
        assert not rep.failures
        assert len(rep.rows) == 45
        assert [(r.model, r.horizon) for r in rep.rows] == sorted((r.model, r.horizon) for r in rep.rows)
        for r in rep.rows:
            assert r.rmse ** 2 == pytest.approx(r.mse, rel=1e-12, abs=1e-300)
            assert r.mae <= r.rmse + 1e-15
        assert set(rep.volatility_mse) == {"garma_ggarch"}

        poisoned = x.copy()
        poisoned[528:] = 1e3 * np.random.default_rng(9).standard_normal(72)
        rep2 = horizon_backtest(models, poisoned, spec, seed=1)
        for name in models:
            m1, m2 = rep.fitted[name].model, rep2.fitted[name].model
            if m1.mean_model is not None:
                assert m1.mean_model.to_dict() == m2.mean_model.to_dict()
            r1, r2 = m1.residual_model, m2.residual_model
            if isinstance(r1, NetworkResidual):
                np.testing.assert_array_equal(r1.model.to_vector(), r2.model.to_vector())
                assert r1.norm == r2.norm
            else:
                assert r1.to_dict() == r2.to_dict()
            assert rep.paths[name]["predicted"] == rep2.paths[name]["predicted"]

        rep.write_csv(tmp_path / "r.csv")
        lines = (tmp_path / "r.csv").read_text().splitlines()
        assert lines[0] == "model,horizon,mae,mse,rmse" and len(lines) == 46
        rep.write_json(tmp_path / "r.json")
        assert (tmp_path / "r.json").stat().st_size > 0

    def test_report_lookup(self):
        x = np.arange(100.0)
        rep = horizon_backtest({"z": _Fixed(lambda hist, h: np.zeros(h))}, x, SplitSpec(10, 60, 30), horizons=(6,))
        assert rep.row("z", 6).horizon == 6
        with pytest.raises(KeyError):
            rep.row("z", 12)

    def test_hybrid_spec_fit_forecast(self):
        x = _series(400, 8)
        fm = HybridSpec(SMALL_MEAN, None).fit(x, 50, 0)
        np.testing.assert_array_equal(fm.forecast(4).point, garma_forecast(fm.model.mean_model, x, 4))
