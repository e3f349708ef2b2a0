"""Two-stage hybrid models and the fixed-origin multi-horizon backtest.

Stage one fits a k-factor GARMA conditional mean; stage two models its
residuals with a (W)LLWNN or a G-GARCH. Point forecasts add the mean
forecast and the residual-model forecast. Standalone network models skip
stage one and treat the series itself as the residual sequence.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .data_io import NormParams, SplitSpec, TimeSeries, minmax_normalize, split
from .errors import ConfigError, DataError, NumericalError
from .garma import DEFAULT_TRUNCATION, GarmaModel, garma_apply_filter, garma_fit, garma_forecast
from .ggarch import GGarchModel, ggarch_fit, ggarch_forecast
from .llwnn import (
    InputPipeline,
    LlwnnModel,
    TrainConfig,
    init_model,
    make_state,
    predict,
    predict_recursive,
    prepare_inputs,
    train,
)

DEFAULT_HORIZONS = (6, 12, 24, 48, 72)


@dataclass(frozen=True)
class MeanSpec:
    k: int = 3
    p: int = 1
    q: int = 0
    frequencies: Optional[tuple] = None
    free: bool = False
    truncation: int = DEFAULT_TRUNCATION
    include_mean: bool = False
    n_starts: int = 8


@dataclass(frozen=True)
class NetworkSpec:
    pipeline: InputPipeline = field(default_factory=InputPipeline)
    train: TrainConfig = field(default_factory=TrainConfig)
    n_units: int = 10
    wavelet_kind: str = "gaussian"


@dataclass(frozen=True)
class GGarchSpec:
    k_v: int = 3
    frequencies: Optional[tuple] = None
    free: bool = False
    truncation: int = DEFAULT_TRUNCATION
    n_starts: int = 8


ResidualSpec = Union[NetworkSpec, GGarchSpec, None]


@dataclass
class NetworkResidual:
    model: LlwnnModel
    pipeline: InputPipeline
    norm: NormParams
    loss_trace: np.ndarray

    @property
    def kind(self) -> str:
        return "llwnn" if self.pipeline.wavelet is None else "wllwnn"


@dataclass
class HybridModel:
    """``mean_model=None`` is a standalone residual model on the raw series."""

    mean_model: Optional[GarmaModel]
    residual_model: Union[NetworkResidual, GGarchModel, None] = None

    def residuals(self, history) -> np.ndarray:
        x = np.asarray(history, dtype=float)
        if self.mean_model is None:
            return x.copy()
        return garma_apply_filter(x, self.mean_model)


@dataclass
class HybridForecast:
    point: np.ndarray
    mean: np.ndarray
    residual: np.ndarray
    variance: Optional[np.ndarray] = None


def _values(series) -> np.ndarray:
    return series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (DataError, NumericalError, ConfigError) as exc:
        raise type(exc)(f"{name} stage: {exc}") from exc


def fit_hybrid(train_series, mean_spec: Optional[MeanSpec], residual_spec: ResidualSpec = None,
               seed: int = 0, n_init: int = 0) -> HybridModel:
    """Fit both stages on ``train_series``.

    The first ``n_init`` observations are context only: they are filtered
    but excluded from every objective and from normalization statistics.
    """
    x = _values(train_series)
    if not 0 <= n_init < x.size:
        raise DataError(f"n_init={n_init} leaves no training data out of {x.size} observations")
    if mean_spec is None and residual_spec is None:
        raise ConfigError("a hybrid needs a mean model, a residual model, or both")

    mean_model = None
    if mean_spec is not None:
        mean_model = _stage(
            "mean", garma_fit, x, k=mean_spec.k, p=mean_spec.p, q=mean_spec.q,
            frequencies=mean_spec.frequencies, free=mean_spec.free, truncation=mean_spec.truncation,
            include_mean=mean_spec.include_mean, n_starts=mean_spec.n_starts, seed=seed, burn=n_init,
        )
    hybrid = HybridModel(mean_model)
    eps = hybrid.residuals(x)

    if isinstance(residual_spec, NetworkSpec):
        hybrid.residual_model = _stage("residual", fit_residual_network, eps, residual_spec, seed, n_init)
    elif isinstance(residual_spec, GGarchSpec):
        hybrid.residual_model = _stage(
            "residual", ggarch_fit, eps[n_init:], k_v=residual_spec.k_v,
            frequencies=residual_spec.frequencies, free=residual_spec.free,
            truncation=residual_spec.truncation, n_starts=residual_spec.n_starts, seed=seed,
        )
    elif residual_spec is not None:
        raise ConfigError(f"unsupported residual spec {type(residual_spec).__name__}")
    return hybrid


def fit_residual_network(eps, spec: NetworkSpec, seed: int, n_init: int) -> NetworkResidual:
    _, norm = minmax_normalize(eps[n_init:])
    data, _ = prepare_inputs(eps, spec.pipeline, norm)
    # drop targets that fall inside the context-only segment
    skip = max(0, n_init - spec.pipeline.context)
    if skip >= len(data):
        raise DataError("no training targets left after the initialization segment")
    data = type(data)(data.inputs[skip:], data.targets[skip:])
    config = TrainConfig(spec.train.algorithm, spec.train.bp, spec.train.pso, seed)
    template = init_model(spec.pipeline.n_features, spec.n_units, seed, spec.wavelet_kind)
    model, trace = train(template, data, config)
    return NetworkResidual(model, spec.pipeline, norm, trace)


def forecast_hybrid(model: HybridModel, history, h: int) -> HybridForecast:
    if h < 1:
        raise ValueError("forecast horizon must be >= 1")
    x = _values(history)
    if model.mean_model is None:
        mean = np.zeros(h)
    else:
        mean = garma_forecast(model.mean_model, x, h)
    residual = np.zeros(h)
    variance = None
    rm = model.residual_model
    if rm is not None:
        eps = model.residuals(x)
        if isinstance(rm, NetworkResidual):
            residual = predict_recursive(rm.model, make_state(eps, rm.pipeline, rm.norm), h)
        else:
            variance = ggarch_forecast(rm, eps, h)
    return HybridForecast(mean + residual, mean, residual, variance)


def in_sample_residual_rmse(model: HybridModel, history, n_init: int = 0) -> float:
    """One-step RMSE of the network residual model over its training targets."""
    rm = model.residual_model
    if not isinstance(rm, NetworkResidual):
        raise ValueError("in-sample residual RMSE needs a network residual model")
    eps = model.residuals(history)
    data, _ = prepare_inputs(eps, rm.pipeline, rm.norm)
    skip = max(0, n_init - rm.pipeline.context)
    pred = predict(rm.model, data.inputs[skip:])
    scale = rm.norm.y_max - rm.norm.y_min
    err = (pred - data.targets[skip:]) * scale
    return float(np.sqrt(np.mean(err * err)))


@dataclass(frozen=True)
class Metrics:
    mae: float
    mse: float
    rmse: float


def metrics(actual, predicted) -> Metrics:
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {p.shape}")
    if a.size == 0:
        raise ValueError("metrics need at least one value")
    e = a - p
    mse = float(np.mean(e * e))
    return Metrics(float(np.mean(np.abs(e))), mse, math.sqrt(mse))


# --- backtest -----------------------------------------------------------------


@dataclass(frozen=True)
class HybridSpec:
    """A named backtest configuration: mean stage, residual stage, or both."""

    mean: Optional[MeanSpec]
    residual: ResidualSpec = None

    def fit(self, history, n_init: int, seed: int) -> "FittedHybrid":
        return FittedHybrid(fit_hybrid(history, self.mean, self.residual, seed, n_init), _values(history))


@dataclass
class FittedHybrid:
    model: HybridModel
    history: np.ndarray

    def forecast(self, h: int) -> HybridForecast:
        return forecast_hybrid(self.model, self.history, h)


@dataclass(frozen=True)
class ReportRow:
    model: str
    horizon: int
    mae: float
    mse: float
    rmse: float


@dataclass
class ForecastReport:
    rows: list
    paths: dict
    failures: dict
    fitted: dict = field(default_factory=dict, repr=False)
    volatility_mse: dict = field(default_factory=dict)

    def row(self, model: str, horizon: int) -> ReportRow:
        for r in self.rows:
            if r.model == model and r.horizon == horizon:
                return r
        raise KeyError((model, horizon))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["model", "horizon", "mae", "mse", "rmse"])
            for r in self.rows:
                w.writerow([r.model, r.horizon, repr(r.mae), repr(r.mse), repr(r.rmse)])

    def to_dict(self) -> dict:
        return {
            "rows": [vars(r) for r in self.rows],
            "paths": self.paths,
            "failures": self.failures,
            "volatility_proxy_mse": {
                name: {str(h): v for h, v in per_h.items()} for name, per_h in self.volatility_mse.items()
            },
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)


def _forecast_values(fc) -> tuple:
    if isinstance(fc, HybridForecast):
        return np.asarray(fc.point, dtype=float), fc.variance
    return np.asarray(fc, dtype=float), None


def horizon_backtest(models: dict, series, split_spec: SplitSpec,
                     horizons: Sequence[int] = DEFAULT_HORIZONS, seed: int = 0) -> ForecastReport:
    """Fit every model on init + train, forecast once from the end of train.

    Each horizon h scores the first h points of the same recursive path.
    ``models`` maps names to objects with ``fit(history, n_init, seed)``
    returning something with ``forecast(h)``. A model that fails to fit or
    forecast is recorded in ``failures`` and contributes no rows.
    """
    horizons = sorted(set(int(h) for h in horizons))
    if not horizons or horizons[0] < 1:
        raise ConfigError("horizons must be positive")
    if horizons[-1] > split_spec.test_len:
        raise ConfigError(f"horizon {horizons[-1]} exceeds the test segment ({split_spec.test_len})")
    ts = series if isinstance(series, TimeSeries) else None
    if ts is not None:
        init, tr, test = split(ts, split_spec)
        history = np.concatenate((init.values, tr.values))
        actual = test.values
    else:
        x = np.asarray(series, dtype=float)
        if x.size < split_spec.total:
            raise DataError(f"series has {x.size} points, split needs {split_spec.total}")
        n_hist = split_spec.init_len + split_spec.train_len
        history, actual = x[:n_hist], x[n_hist : split_spec.total]

    H = horizons[-1]
    rows, paths, failures, fitted, volatility = [], {}, {}, {}, {}
    for name in sorted(models):
        try:
            fm = models[name].fit(history, split_spec.init_len, seed)
            pred, variance = _forecast_values(fm.forecast(H))
        except (ValueError, RuntimeError, ArithmeticError) as exc:
            failures[name] = f"{type(exc).__name__}: {exc}"
            continue
        if pred.shape != (H,) or not np.all(np.isfinite(pred)):
            failures[name] = "forecast path is not finite or has the wrong length"
            continue
        fitted[name] = fm
        paths[name] = {"predicted": pred.tolist(), "actual": actual[:H].tolist()}
        if variance is not None:
            variance = np.asarray(variance, dtype=float)
            paths[name]["variance"] = variance.tolist()
            model = getattr(fm, "model", None)
            if isinstance(model, HybridModel):
                # volatility proxy: squared realized residuals of the test segment
                realized = model.residuals(np.concatenate((history, actual[:H])))[history.size :] ** 2
                paths[name]["realized_sq_residual"] = realized.tolist()
                volatility[name] = {
                    h: float(np.mean((variance[:h] - realized[:h]) ** 2)) for h in horizons
                }
        for h in horizons:
            m = metrics(actual[:h], pred[:h])
            rows.append(ReportRow(name, h, m.mae, m.mse, m.rmse))
    return ForecastReport(rows, paths, failures, fitted, volatility)


def default_models(
    mean: MeanSpec = MeanSpec(),
    wavelet_pipeline: InputPipeline = InputPipeline(),
    raw_lags: Optional[int] = None,
    bp: Optional[TrainConfig] = None,
    pso: Optional[TrainConfig] = None,
    ggarch: GGarchSpec = GGarchSpec(),
    n_units: int = 10,
) -> dict:
    """The nine-model comparison matrix, keyed by name."""
    bp = bp or TrainConfig("BP")
    pso = pso or TrainConfig("PSO")
    raw = InputPipeline(raw_lags or wavelet_pipeline.n_lags, None)
    out = {}
    for tag, cfg in (("bp", bp), ("pso", pso)):
        out[f"llwnn_{tag}"] = HybridSpec(None, NetworkSpec(raw, cfg, n_units))
        out[f"garma_llwnn_{tag}"] = HybridSpec(mean, NetworkSpec(raw, cfg, n_units))
        out[f"wllwnn_{tag}"] = HybridSpec(None, NetworkSpec(wavelet_pipeline, cfg, n_units))
        out[f"garma_wllwnn_{tag}"] = HybridSpec(mean, NetworkSpec(wavelet_pipeline, cfg, n_units))
    out["garma_ggarch"] = HybridSpec(mean, ggarch)
    return out
