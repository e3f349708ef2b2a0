"""Command-line front end.

Every option has a default, may be set in an INI file (``--config``) under
the section named in ``OPTIONS``, and is overridden by its command-line
flag. Each run writes its artifacts plus ``manifest.json`` into an output
directory that must be empty unless ``--force`` is given.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 numerical
or fitting failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import os
import platform
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Any, Callable, Optional

import numpy as np
import scipy

from . import __version__
from .data_io import NormParams, SplitSpec, TimeSeries, load_series, log_returns, write_series_csv
from .errors import ConfigError, DataError, NumericalError
from .garma import GarmaModel, GegenbauerFactor, frequency_report, garma_apply_filter, garma_fit, garma_simulate
from .ggarch import GGarchModel, ggarch_filter, ggarch_fit
from .hybrid import (
    GGarchSpec,
    HybridModel,
    MeanSpec,
    NetworkResidual,
    NetworkSpec,
    default_models,
    fit_residual_network,
    forecast_hybrid,
    horizon_backtest,
)
from .llwnn import BPConfig, InputPipeline, LlwnnModel, PSOConfig, TrainConfig
from .spectral import BANDWIDTH_EXPONENTS, long_memory_table, periodogram
from .wavelet import make_filter, max_level, mra


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text) -> tuple:
    if isinstance(text, tuple):
        return text
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def _ints(text) -> tuple:
    if isinstance(text, tuple):
        return text
    return tuple(int(v) for v in str(text).split(",") if v.strip())


def _freqs(text):
    """``auto`` or a comma list of frequencies in cycles/sample."""
    if text is None or str(text).strip().lower() == "auto":
        return None
    return _floats(text)


@dataclass(frozen=True)
class Option:
    section: str
    key: str
    convert: Callable
    default: Any
    help: str

    @property
    def flag(self) -> str:
        return "--" + self.key.replace("_", "-")

    @property
    def dest(self) -> str:
        return f"{self.section}__{self.key}"


OPTIONS = [
    Option("run", "seed", int, 0, "master random seed"),
    Option("data", "input", str, None, "input CSV path"),
    Option("data", "timestamp_col", str, "timestamp", "timestamp column name"),
    Option("data", "value_col", str, "price", "value column name"),
    Option("data", "fill", str, "none", "gap policy: none|interpolate"),
    Option("data", "transform", str, "logret", "logret (log returns of prices) or none"),
    Option("wavelet", "filter", str, "la8", "wavelet filter: la8|d8|d4|haar"),
    Option("wavelet", "levels", int, 10, "MODWT decomposition level J"),
    Option("spectral", "exponents", _floats, BANDWIDTH_EXPONENTS, "bandwidth exponents e, m = N^e"),
    Option("garma", "k", int, 3, "number of Gegenbauer factors"),
    Option("garma", "p", int, 1, "AR order"),
    Option("garma", "q", int, 0, "MA order"),
    Option("garma", "freqs", _freqs, None, "auto or comma list of G-frequencies (cycles/sample)"),
    Option("garma", "free", _bool, False, "re-estimate G-frequencies"),
    Option("garma", "include_mean", _bool, False, "estimate the mean mu"),
    Option("garma", "truncation", int, 1000, "Gegenbauer expansion truncation"),
    Option("garma", "n_starts", int, 8, "optimizer start points"),
    Option("garma", "burn", int, 0, "leading residuals excluded from the fit objective"),
    Option("garma", "model", str, None, "fitted GARMA model JSON (input)"),
    Option("ggarch", "k_v", int, 3, "number of variance Gegenbauer factors"),
    Option("ggarch", "v_freqs", _freqs, None, "auto or comma list of variance G-frequencies"),
    Option("ggarch", "v_truncation", int, 1000, "variance filter truncation"),
    Option("ggarch", "v_starts", int, 8, "optimizer start points"),
    Option("ggarch", "ggarch_model", str, None, "fitted G-GARCH model JSON (input)"),
    Option("llwnn", "algo", str, "bp", "trainer: bp|pso"),
    Option("llwnn", "lags", int, 24, "number of lagged residuals per component"),
    Option("llwnn", "inputs", str, "wavelet", "wavelet (WLLWNN inputs) or raw (LLWNN inputs)"),
    Option("llwnn", "components", str, "all", "all or comma list of MRA components, e.g. D10,S10"),
    Option("llwnn", "units", int, 10, "hidden units"),
    Option("llwnn", "wavelet_kind", str, "gaussian", "hidden unit wavelet: gaussian|mexican_hat"),
    Option("llwnn", "lr", float, 0.5, "BP learning rate"),
    Option("llwnn", "epochs", int, 100, "BP epochs"),
    Option("llwnn", "bp_weights_only", _bool, False, "BP updates only the linear weights"),
    Option("llwnn", "population", int, 20, "PSO population"),
    Option("llwnn", "generations", int, 200, "PSO generations"),
    Option("llwnn", "c1", float, 1.05, "PSO cognitive factor"),
    Option("llwnn", "c2", float, 1.05, "PSO social factor"),
    Option("llwnn", "v_max", float, 1.0, "PSO velocity clamp"),
    Option("llwnn", "v_min", float, 0.3, "PSO initial velocity range"),
    Option("llwnn", "w_start", float, 0.9, "PSO inertia at the first generation"),
    Option("llwnn", "w_end", float, 0.4, "PSO inertia at the last generation"),
    Option("llwnn", "network", str, None, "trained network JSON (input)"),
    Option("hybrid", "init_len", int, 2000, "initialization segment length"),
    Option("hybrid", "train_len", int, 11056, "training segment length"),
    Option("hybrid", "test_len", int, 72, "test segment length"),
    Option("hybrid", "horizons", _ints, (6, 12, 24, 48, 72), "forecast horizons"),
    Option("hybrid", "horizon", int, 72, "forecast length for the forecast command"),
    Option("hybrid", "models", str, "all", "all or comma list of backtest model names"),
    Option("simulate", "garma", str, "nu=0.966,d=0.3", "factors as 'nu=..,d=..;nu=..,d=..'"),
    Option("simulate", "ar", _floats, (), "AR coefficients"),
    Option("simulate", "ma", _floats, (), "MA coefficients"),
    Option("simulate", "mu", float, 0.0, "process mean"),
    Option("simulate", "sigma2", float, 1.0, "innovation variance"),
    Option("simulate", "n", int, 8192, "number of observations"),
    Option("simulate", "start", str, "2016-01-01T00:00:00+00:00", "first timestamp"),
    Option("simulate", "step_minutes", int, 60, "sampling interval in minutes"),
]
_BY_KEY = {(o.section, o.key): o for o in OPTIONS}

COMMON = [("run", "seed")]
DATA = [("data", k) for k in ("input", "timestamp_col", "value_col", "fill", "transform")]
GARMA = [("garma", k) for k in ("k", "p", "q", "freqs", "free", "include_mean", "truncation", "n_starts")]
GGARCH = [("ggarch", k) for k in ("k_v", "v_freqs", "v_truncation", "v_starts")]
NETWORK = [("llwnn", k) for k in ("algo", "lags", "inputs", "components", "units", "wavelet_kind", "lr",
                                  "epochs", "bp_weights_only", "population", "generations", "c1", "c2",
                                  "v_max", "v_min", "w_start", "w_end")]
WAVELET = [("wavelet", "filter"), ("wavelet", "levels")]

COMMANDS = {
    "decompose": ("Write the MODWT multiresolution components of a series.", COMMON + DATA + WAVELET),
    "diagnose": ("Periodogram and GPH / local Whittle long-memory table.", COMMON + DATA + [("spectral", "exponents")]),
    "fit-garma": ("Fit a k-factor GARMA model by CSS.", COMMON + DATA + GARMA + [("garma", "burn")]),
    "fit-ggarch": ("Fit a log-G-GARCH model to residuals.", COMMON + DATA + GGARCH + [("garma", "model")]),
    "train": ("Train an (W)LLWNN on residuals.", COMMON + DATA + NETWORK + WAVELET + [("garma", "model")]),
    "forecast": ("Forecast from fitted models.", COMMON + DATA + [("garma", "model"), ("llwnn", "network"),
                                                                 ("ggarch", "ggarch_model"), ("hybrid", "horizon")]),
    "backtest": ("Fixed-origin multi-horizon backtest of the model matrix.",
                 COMMON + DATA + GARMA + GGARCH + NETWORK + WAVELET
                 + [("hybrid", k) for k in ("init_len", "train_len", "test_len", "horizons", "models")]),
    "simulate": ("Simulate a GARMA series to CSV.", COMMON + [("simulate", k) for k in
                 ("garma", "ar", "ma", "mu", "sigma2", "n", "start", "step_minutes")] + [("garma", "truncation")]),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="garma-wnn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (help_text, keys) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--output", required=True, help="output directory")
        p.add_argument("--force", action="store_true", help="allow a non-empty output directory")
        p.add_argument("--config", help="INI configuration file")
        for key in keys:
            opt = _BY_KEY[key]
            if opt.convert is _bool:
                p.add_argument(opt.flag, dest=opt.dest, nargs="?", const="true", default=None,
                               help=f"{opt.help} (default {opt.default})")
            else:
                p.add_argument(opt.flag, dest=opt.dest, default=None, help=f"{opt.help} (default {opt.default})")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Effective configuration: defaults, then the INI file, then flags."""
    keys = COMMANDS[args.command][1]
    raw = {k: _BY_KEY[k].default for k in keys}
    if args.config:
        if not os.path.isfile(args.config):
            raise ConfigError(f"config file not found: {args.config}")
        ini = configparser.ConfigParser()
        ini.read(args.config)
        for section in ini.sections():
            for key, value in ini.items(section):
                if (section, key) not in _BY_KEY:
                    raise ConfigError(f"unknown config key [{section}] {key}")
                if (section, key) in raw:
                    raw[(section, key)] = value
    for k in keys:
        value = getattr(args, _BY_KEY[k].dest)
        if value is not None:
            raw[k] = value
    cfg = {}
    for (section, key), value in raw.items():
        opt = _BY_KEY[(section, key)]
        try:
            cfg.setdefault(section, {})[key] = value if value is None or value == opt.default else opt.convert(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {opt.flag}: {value!r} ({exc})") from None
    return cfg


def _prepare_output(path: str, force: bool) -> None:
    if os.path.exists(path):
        if not os.path.isdir(path):
            raise ConfigError(f"output path is not a directory: {path}")
        if os.listdir(path) and not force:
            raise ConfigError(f"output directory {path} is not empty (use --force)")
    else:
        os.makedirs(path)


def _jsonable(value):
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _write_json(path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


# --- data and model helpers ----------------------------------------------------


def _load(cfg) -> TimeSeries:
    d = cfg["data"]
    if not d["input"]:
        raise ConfigError("--input is required")
    transform = d["transform"]
    if transform not in ("logret", "none"):
        raise ConfigError(f"unknown transform {transform!r}")
    series = load_series(d["input"], d["timestamp_col"], d["value_col"], d["fill"],
                         require_positive=transform == "logret")
    return log_returns(series) if transform == "logret" else series


def _mean_spec(cfg) -> MeanSpec:
    g = cfg["garma"]
    return MeanSpec(g["k"], g["p"], g["q"], g["freqs"], g["free"], g["truncation"], g["include_mean"], g["n_starts"])


def _ggarch_spec(cfg) -> GGarchSpec:
    g = cfg["ggarch"]
    return GGarchSpec(g["k_v"], g["v_freqs"], False, g["v_truncation"], g["v_starts"])


def _pipeline(cfg, raw: Optional[bool] = None) -> InputPipeline:
    n = cfg["llwnn"]
    if raw is None:
        if n["inputs"] not in ("wavelet", "raw"):
            raise ConfigError(f"--inputs must be wavelet or raw, got {n['inputs']!r}")
        raw = n["inputs"] == "raw"
    if raw:
        return InputPipeline(n["lags"], None)
    comps = None if n["components"] == "all" else tuple(c.strip() for c in n["components"].split(","))
    return InputPipeline(n["lags"], cfg["wavelet"]["filter"], cfg["wavelet"]["levels"], comps)


def _train_config(cfg, algo: Optional[str] = None) -> TrainConfig:
    n = cfg["llwnn"]
    algo = (algo or n["algo"]).upper()
    return TrainConfig(
        algo,
        BPConfig(n["lr"], n["epochs"], n["bp_weights_only"]),
        PSOConfig(n["population"], n["generations"], n["c1"], n["c2"], n["v_max"], n["v_min"],
                  n["w_start"], n["w_end"]),
        cfg["run"]["seed"],
    )


def _network_spec(cfg, pipeline, algo=None) -> NetworkSpec:
    n = cfg["llwnn"]
    return NetworkSpec(pipeline, _train_config(cfg, algo), n["units"], n["wavelet_kind"])


def _parse_factors(text: str) -> tuple:
    factors = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        fields = {}
        for part in chunk.split(","):
            if "=" not in part:
                raise ConfigError(f"bad factor spec {chunk!r}; expected nu=..,d=..")
            k, v = part.split("=", 1)
            fields[k.strip()] = float(v)
        if set(fields) != {"nu", "d"}:
            raise ConfigError(f"factor spec {chunk!r} needs exactly nu and d")
        factors.append(GegenbauerFactor(fields["nu"], fields["d"]))
    return tuple(factors)


def _load_garma(path) -> Optional[GarmaModel]:
    if not path:
        return None
    if not os.path.isfile(path):
        raise DataError(f"model file not found: {path}")
    return GarmaModel.load(path)


def _save_network(path, res: NetworkResidual) -> None:
    doc = res.model.to_dict()
    doc["pipeline"] = res.pipeline.to_dict()
    doc["norm"] = {"y_min": res.norm.y_min, "y_max": res.norm.y_max}
    _write_json(path, doc)


def _load_network(path) -> NetworkResidual:
    if not os.path.isfile(path):
        raise DataError(f"network file not found: {path}")
    with open(path) as fh:
        doc = json.load(fh)
    return NetworkResidual(LlwnnModel.from_dict(doc), InputPipeline.from_dict(doc["pipeline"]),
                           NormParams(**doc["norm"]), np.zeros(0))


# --- commands -------------------------------------------------------------------


def cmd_decompose(cfg, out) -> list:
    series = _load(cfg)
    filt = make_filter(cfg["wavelet"]["filter"])
    J = cfg["wavelet"]["levels"]
    if J < 1 or J > max_level(len(series), filt.L):
        raise ConfigError(f"levels must be in 1..{max_level(len(series), filt.L)} for {len(series)} observations")
    stamps = [t.isoformat() for t in series.timestamps()]
    written = []
    for name, values in mra(series.values, filt, J).components().items():
        fname = f"{name}.csv"
        _write_rows(os.path.join(out, fname), ["t", "value"], zip(stamps, values))
        written.append(fname)
    return written


def cmd_diagnose(cfg, out) -> list:
    x = _load(cfg).values
    pg = periodogram(x)
    _write_rows(os.path.join(out, "periodogram.csv"), ["freq", "power"], zip(pg.freqs, pg.power))
    rows = [(e.method, e.bandwidth, e.d_hat, e.std_error, e.p_value)
            for e in long_memory_table(x, cfg["spectral"]["exponents"])]
    _write_rows(os.path.join(out, "longmem.csv"), ["method", "bandwidth", "d_hat", "std_error", "p_value"], rows)
    return ["periodogram.csv", "longmem.csv"]


def cmd_fit_garma(cfg, out) -> list:
    x = _load(cfg).values
    g = cfg["garma"]
    model = garma_fit(x, k=g["k"], p=g["p"], q=g["q"], frequencies=g["freqs"], free=g["free"],
                      truncation=g["truncation"], include_mean=g["include_mean"], n_starts=g["n_starts"],
                      seed=cfg["run"]["seed"], burn=g["burn"])
    model.save(os.path.join(out, "garma.json"))
    rows = []
    for f in model.factors:
        r = frequency_report(f)
        rows.append((r["nu"], r["lambda_radians"], r["f_cycles"], r["period"], f.d))
    _write_rows(os.path.join(out, "frequencies.csv"), ["nu", "lambda_radians", "f_cycles", "period", "d"], rows)
    _write_rows(os.path.join(out, "residuals.csv"), ["t", "residual"], enumerate(garma_apply_filter(x, model)))
    return ["garma.json", "frequencies.csv", "residuals.csv"]


def _residuals(cfg, x) -> np.ndarray:
    mean = _load_garma(cfg["garma"]["model"])
    return x if mean is None else garma_apply_filter(x, mean)


def cmd_fit_ggarch(cfg, out) -> list:
    eps = _residuals(cfg, _load(cfg).values)
    g = cfg["ggarch"]
    model = ggarch_fit(eps, k_v=g["k_v"], frequencies=g["v_freqs"], truncation=g["v_truncation"],
                       n_starts=g["v_starts"], seed=cfg["run"]["seed"])
    model.save(os.path.join(out, "ggarch.json"))
    var = np.exp(ggarch_filter(eps, model))
    _write_rows(os.path.join(out, "variance.csv"), ["t", "variance"], enumerate(var))
    return ["ggarch.json", "variance.csv"]


def cmd_train(cfg, out) -> list:
    eps = _residuals(cfg, _load(cfg).values)
    spec = _network_spec(cfg, _pipeline(cfg))
    res = fit_residual_network(eps, spec, cfg["run"]["seed"], 0)
    _save_network(os.path.join(out, "network.json"), res)
    _write_rows(os.path.join(out, "loss_trace.csv"), ["step", "loss"], enumerate(res.loss_trace))
    return ["network.json", "loss_trace.csv"]


def cmd_forecast(cfg, out) -> list:
    series = _load(cfg)
    mean = _load_garma(cfg["garma"]["model"])
    net_path, gg_path = cfg["llwnn"]["network"], cfg["ggarch"]["ggarch_model"]
    if net_path and gg_path:
        raise ConfigError("give at most one residual model (--network or --ggarch-model)")
    residual = None
    if net_path:
        residual = _load_network(net_path)
    elif gg_path:
        if not os.path.isfile(gg_path):
            raise DataError(f"model file not found: {gg_path}")
        residual = GGarchModel.load(gg_path)
    if mean is None and residual is None:
        raise ConfigError("forecast needs --model, --network or --ggarch-model")
    h = cfg["hybrid"]["horizon"]
    fc = forecast_hybrid(HybridModel(mean, residual), series.values, h)
    stamps = [(series.start + (len(series) + i) * series.step).isoformat() for i in range(h)]
    header = ["timestamp", "point", "mean", "residual"]
    cols = [stamps, fc.point, fc.mean, fc.residual]
    if fc.variance is not None:
        header.append("variance")
        cols.append(fc.variance)
    _write_rows(os.path.join(out, "forecast.csv"), header, zip(*cols))
    return ["forecast.csv"]


def cmd_backtest(cfg, out):
    series = _load(cfg)
    hy = cfg["hybrid"]
    split_spec = SplitSpec(hy["init_len"], hy["train_len"], hy["test_len"])
    if split_spec.total > len(series):
        raise DataError(f"split needs {split_spec.total} observations, series has {len(series)}")
    series = series.slice(len(series) - split_spec.total, len(series))
    models = default_models(
        _mean_spec(cfg), _pipeline(cfg, raw=False), cfg["llwnn"]["lags"],
        _train_config(cfg, "BP"), _train_config(cfg, "PSO"), _ggarch_spec(cfg), cfg["llwnn"]["units"],
    )
    if hy["models"] != "all":
        wanted = [m.strip() for m in hy["models"].split(",")]
        unknown = sorted(set(wanted) - set(models))
        if unknown:
            raise ConfigError(f"unknown models {unknown}; choose from {sorted(models)}")
        models = {k: models[k] for k in wanted}
    report = horizon_backtest(models, series, split_spec, hy["horizons"], cfg["run"]["seed"])
    report.write_csv(os.path.join(out, "report.csv"))
    report.write_json(os.path.join(out, "report.json"))
    written = ["report.csv", "report.json"]
    if report.failures:
        for name, msg in sorted(report.failures.items()):
            print(f"model {name} failed: {msg}", file=sys.stderr)
        return written, 3
    return written


def cmd_simulate(cfg, out) -> list:
    s = cfg["simulate"]
    try:
        start = datetime.fromisoformat(s["start"].replace("Z", "+00:00"))
    except ValueError as exc:
        raise ConfigError(f"bad --start: {exc}") from None
    if start.tzinfo is None:
        start = start.replace(tzinfo=timezone.utc)
    if s["n"] < 1 or s["step_minutes"] < 1:
        raise ConfigError("--n and --step-minutes must be positive")
    model = GarmaModel(mu=s["mu"], ar=s["ar"], ma=s["ma"], factors=_parse_factors(s["garma"]),
                       sigma2=s["sigma2"], truncation=cfg["garma"]["truncation"])
    x = garma_simulate(model, s["n"], seed=cfg["run"]["seed"])
    write_series_csv(os.path.join(out, "simulated.csv"),
                     TimeSeries(start, timedelta(minutes=s["step_minutes"]), x), value_col="price")
    return ["simulated.csv"]


HANDLERS = {
    "decompose": cmd_decompose,
    "diagnose": cmd_diagnose,
    "fit-garma": cmd_fit_garma,
    "fit-ggarch": cmd_fit_ggarch,
    "train": cmd_train,
    "forecast": cmd_forecast,
    "backtest": cmd_backtest,
    "simulate": cmd_simulate,
}


def _run(argv) -> int:
    args = build_parser().parse_args(argv)
    cfg = resolve_config(args)
    _prepare_output(args.output, args.force)
    t0 = time.perf_counter()
    started = datetime.now(timezone.utc).isoformat()
    result = HANDLERS[args.command](cfg, args.output)
    written, code = result if isinstance(result, tuple) else (result, 0)
    inputs = {}
    for section, key in (("data", "input"), ("garma", "model"), ("llwnn", "network"), ("ggarch", "ggarch_model")):
        path = cfg.get(section, {}).get(key)
        if path:
            inputs[path] = _sha256(path)
    manifest = {
        "command": args.command,
        "config": {sec: {k: _jsonable(v) for k, v in vals.items()} for sec, vals in cfg.items()},
        "seed": cfg["run"]["seed"],
        "inputs_sha256": inputs,
        "outputs": written,
        "versions": {
            "garma_wnn": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "started_utc": started,
        "wall_clock_seconds": time.perf_counter() - t0,
        "exit_code": code,
    }
    _write_json(os.path.join(args.output, "manifest.json"), manifest)
    return code


def main(argv=None) -> int:
    try:
        return _run(argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
