"""Local linear wavelet neural network (LLWNN) and its wavelet-input variant.

Each hidden unit i gates a local linear model with a dilated, translated
radial wavelet::

    psi_i(x) = prod_j a_ij^{-1/2} * phi(||(x - b_i) / a_i||^2)
    Y(x)     = sum_i (w_i0 + w_i . x) psi_i(x)

``phi(s) = exp(-s)`` for the default Gaussian unit and
``(1 - s) exp(-s/2)`` for the Mexican hat.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import signal

from .data_io import NormParams, minmax_denormalize, minmax_normalize
from .errors import ConfigError, DataError, NumericalError
from .wavelet import make_filter, mra

A_FLOOR = 1e-6
WAVELET_KINDS = ("gaussian", "mexican_hat")


@dataclass
class LlwnnModel:
    """Parameters stored unit-major: ``a``/``b`` are (M, n), ``w`` is (M, n+1)."""

    a: np.ndarray
    b: np.ndarray
    w: np.ndarray
    wavelet_kind: str = "gaussian"

    def __post_init__(self):
        self.a = np.array(self.a, dtype=float, ndmin=2)
        self.b = np.array(self.b, dtype=float, ndmin=2)
        self.w = np.array(self.w, dtype=float, ndmin=2)
        M, n = self.a.shape
        if M < 1 or self.b.shape != (M, n) or self.w.shape != (M, n + 1):
            raise ValueError(f"inconsistent shapes a{self.a.shape} b{self.b.shape} w{self.w.shape}")
        if self.wavelet_kind not in WAVELET_KINDS:
            raise ValueError(f"unknown wavelet kind {self.wavelet_kind!r}")
        np.maximum(self.a, A_FLOOR, out=self.a)

    @property
    def n_inputs(self) -> int:
        return self.a.shape[1]

    @property
    def n_units(self) -> int:
        return self.a.shape[0]

    @property
    def n_params(self) -> int:
        return self.a.size + self.b.size + self.w.size

    def copy(self) -> "LlwnnModel":
        return LlwnnModel(self.a.copy(), self.b.copy(), self.w.copy(), self.wavelet_kind)

    def to_vector(self) -> np.ndarray:
        return np.concatenate((self.a.ravel(), self.b.ravel(), self.w.ravel()))

    def from_vector(self, theta) -> "LlwnnModel":
        M, n = self.a.shape
        k = M * n
        theta = np.asarray(theta, dtype=float)
        return LlwnnModel(
            theta[:k].reshape(M, n), theta[k : 2 * k].reshape(M, n), theta[2 * k :].reshape(M, n + 1),
            self.wavelet_kind,
        )

    def to_dict(self) -> dict:
        return {
            "n_inputs": self.n_inputs,
            "wavelet_kind": self.wavelet_kind,
            "units": [
                {"a": self.a[i].tolist(), "b": self.b[i].tolist(), "w": self.w[i].tolist()}
                for i in range(self.n_units)
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LlwnnModel":
        units = doc["units"]
        model = cls(
            [u["a"] for u in units], [u["b"] for u in units], [u["w"] for u in units],
            doc.get("wavelet_kind", "gaussian"),
        )
        if model.n_inputs != doc["n_inputs"]:
            raise ValueError("n_inputs does not match unit dimensions")
        return model


def init_model(
    n_inputs: int,
    n_units: int = 10,
    seed=None,
    wavelet_kind: str = "gaussian",
    a_range=(0.2, 1.0),
    w_scale: float = 0.1,
) -> LlwnnModel:
    """Random model for inputs scaled to [0, 1]^n."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shape = (n_units, n_inputs)
    a = rng.uniform(*a_range, size=shape)
    b = rng.uniform(0.0, 1.0, size=shape)
    w = rng.uniform(-w_scale, w_scale, size=(n_units, n_inputs + 1))
    return LlwnnModel(a, b, w, wavelet_kind)


def _phi(s, log_norm, kind):
    """``norm * phi(s)`` and ``norm * phi'(s)``, combined in the log domain."""
    if kind == "gaussian":
        v = np.exp(np.minimum(log_norm - s, 700.0))
        return v, -v
    e = np.exp(np.minimum(log_norm - 0.5 * s, 700.0))
    return (1 - s) * e, -0.5 * (3 - s) * e


def _units(model: LlwnnModel, X):
    """Hidden activations for a batch X (S, n)."""
    inv2 = model.a ** -2.0
    # ||(x - b)/a||^2 expanded into matrix products
    s = (X * X) @ inv2.T - 2.0 * X @ (model.b * inv2).T + np.sum(model.b * model.b * inv2, axis=1)[None]
    np.maximum(s, 0.0, out=s)
    log_norm = -0.5 * np.sum(np.log(model.a), axis=1)
    psi, _ = _phi(s, log_norm[None], model.wavelet_kind)
    return psi


def predict(model: LlwnnModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise ValueError(f"expected inputs of shape (S, {model.n_inputs}), got {X.shape}")
    psi = _units(model, X)
    v = model.w[:, 0][None] + X @ model.w[:, 1:].T
    return np.sum(v * psi, axis=1)


def forward(model: LlwnnModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n_inputs,):
        raise ValueError(f"expected {model.n_inputs} inputs, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite network input")
    return float(predict(model, x[None])[0])


def gradient(model: LlwnnModel, x, y: float):
    """Per-sample loss ``E = (y - Y)^2 / 2`` and its gradient w.r.t. (a, b, w)."""
    x = np.asarray(x, dtype=float)
    a, b, w = model.a, model.b, model.w
    z = (x[None] - b) / a
    s = np.sum(z * z, axis=1)
    psi, dpsi = _phi(s, -0.5 * np.sum(np.log(a), axis=1), model.wavelet_kind)
    v = w[:, 0] + w[:, 1:] @ x
    Y = float(np.dot(v, psi))
    e = Y - y
    g_w = np.empty_like(w)
    g_w[:, 0] = e * psi
    g_w[:, 1:] = (e * psi)[:, None] * x[None]
    common = (e * v * dpsi)[:, None]
    g_b = common * (-2.0 * z / a)
    g_a = (e * v * psi)[:, None] * (-0.5 / a) + common * (-2.0 * z * z / a)
    return 0.5 * e * e, g_a, g_b, g_w


@dataclass(frozen=True)
class BPConfig:
    learning_rate: float = 0.5
    epochs: int = 100
    weights_only: bool = False


@dataclass(frozen=True)
class PSOConfig:
    population: int = 20
    generations: int = 200
    c1: float = 1.05
    c2: float = 1.05
    v_max: float = 1.0
    v_min: float = 0.3
    w_start: float = 0.9
    w_end: float = 0.4


@dataclass(frozen=True)
class TrainConfig:
    algorithm: str = "BP"
    bp: BPConfig = field(default_factory=BPConfig)
    pso: PSOConfig = field(default_factory=PSOConfig)
    seed: int = 0

    def __post_init__(self):
        algo = self.algorithm.upper()
        if algo not in ("BP", "PSO"):
            raise ConfigError(f"unknown training algorithm {self.algorithm!r}")
        object.__setattr__(self, "algorithm", algo)
        if self.bp.learning_rate < 0:
            raise ConfigError("learning rate must be non-negative")
        if self.pso.population < 2:
            raise ConfigError("PSO population must be >= 2")


@dataclass(frozen=True)
class SupervisedSet:
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.inputs, dtype=float)
        y = np.asarray(self.targets, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
            raise ValueError(f"inputs {X.shape} and targets {y.shape} do not line up")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("supervised set contains non-finite values")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "targets", y)

    def __len__(self):
        return self.targets.size


def mse(model: LlwnnModel, data: SupervisedSet) -> float:
    r = predict(model, data.inputs) - data.targets
    return float(np.mean(r * r))


def bp_train(model: LlwnnModel, data: SupervisedSet, config: TrainConfig):
    """Per-sample gradient descent on ``E = (y - Y)^2 / 2``.

    Returns the trained copy and the mean E over the data after each epoch.
    """
    if config.algorithm != "BP":
        raise ConfigError("bp_train needs algorithm='BP'")
    if data.inputs.shape[1] != model.n_inputs:
        raise ValueError("data width does not match the model")
    cfg = config.bp
    rng = np.random.default_rng(config.seed)
    m = model.copy()
    r = cfg.learning_rate
    trace = []
    X, y = data.inputs, data.targets
    for epoch in range(cfg.epochs):
        for i in rng.permutation(len(data)):
            _, g_a, g_b, g_w = gradient(m, X[i], y[i])
            m.w -= r * g_w
            if not cfg.weights_only:
                m.b -= r * g_b
                m.a -= r * g_a
                np.maximum(m.a, A_FLOOR, out=m.a)
        loss = 0.5 * mse(m, data)
        trace.append(loss)
        if not np.isfinite(loss) or loss > 1e6:
            raise NumericalError(f"BP diverged at epoch {epoch + 1}: mean loss {loss:g}; lower the learning rate")
    return m, np.array(trace)


@dataclass
class PsoResult:
    position: np.ndarray
    fitness: float
    gbest_trace: np.ndarray
    pbest_trace: np.ndarray


def particle_swarm(
    fitness: Callable[[np.ndarray], float],
    positions: np.ndarray,
    config: PSOConfig,
    seed=None,
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> PsoResult:
    """Global-best PSO with linearly decreasing inertia and velocity clamping.

    ``positions`` (P, D) are the initial searching points; initial
    velocities are uniform in ``[-v_min, v_min]``. ``project`` maps a
    position back into the admissible set after each move.
    """
    s = np.array(positions, dtype=float)
    P, D = s.shape
    if P < 2:
        raise ConfigError("PSO population must be >= 2")
    seeds = np.random.SeedSequence(seed).spawn(P + 1)
    streams = [np.random.default_rng(sq) for sq in seeds[:P]]
    init_rng = np.random.default_rng(seeds[P])
    v = init_rng.uniform(-config.v_min, config.v_min, size=(P, D))
    if project is not None:
        s = np.array([project(p) for p in s])

    f = np.array([fitness(p) for p in s], dtype=float)
    f[~np.isfinite(f)] = np.inf
    pbest, pbest_f = s.copy(), f.copy()
    g = int(np.argmin(pbest_f))
    gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
    gtrace = [gbest_f]
    ptrace = [pbest_f.copy()]

    G = config.generations
    for gen in range(G):
        inertia = config.w_start + (config.w_end - config.w_start) * (gen / max(G - 1, 1))
        for i in range(P):
            r1 = streams[i].random(D)
            r2 = streams[i].random(D)
            v[i] = inertia * v[i] + config.c1 * r1 * (pbest[i] - s[i]) + config.c2 * r2 * (gbest - s[i])
        np.clip(v, -config.v_max, config.v_max, out=v)
        s += v
        if project is not None:
            s = np.array([project(p) for p in s])
        f = np.array([fitness(p) for p in s], dtype=float)
        f[~np.isfinite(f)] = np.inf
        better = f < pbest_f
        pbest[better] = s[better]
        pbest_f[better] = f[better]
        g = int(np.argmin(pbest_f))
        if pbest_f[g] < gbest_f:
            gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
        gtrace.append(gbest_f)
        ptrace.append(pbest_f.copy())
    return PsoResult(gbest, gbest_f, np.array(gtrace), np.array(ptrace))


def pso_train(template: LlwnnModel, data: SupervisedSet, config: TrainConfig):
    """Search all network parameters with PSO; fitness is the MSE over ``data``.

    The template only fixes the shape and wavelet kind; each particle starts
    from an independent random initialization.
    """
    if config.algorithm != "PSO":
        raise ConfigError("pso_train needs algorithm='PSO'")
    if data.inputs.shape[1] != template.n_inputs:
        raise ValueError("data width does not match the model")
    rng = np.random.default_rng(config.seed)
    n_a = template.a.size
    starts = np.array([
        init_model(template.n_inputs, template.n_units, rng, template.wavelet_kind).to_vector()
        for _ in range(config.pso.population)
    ])

    def project(p):
        p = p.copy()
        np.maximum(p[:n_a], A_FLOOR, out=p[:n_a])
        return p

    def fitness(p):
        return mse(template.from_vector(p), data)

    res = particle_swarm(fitness, starts, config.pso, seed=config.seed, project=project)
    return template.from_vector(res.position), res.gbest_trace


def train(model: LlwnnModel, data: SupervisedSet, config: TrainConfig):
    if config.algorithm == "BP":
        return bp_train(model, data, config)
    return pso_train(model, data, config)


# --- input pipeline ---------------------------------------------------------


@dataclass(frozen=True)
class InputPipeline:
    """How lagged residuals become network inputs.

    With ``wavelet=None`` the inputs are the raw normalized lags (plain
    LLWNN). Otherwise the trailing ``window`` normalized residuals are
    decomposed by MODWT-MRA and each selected component contributes its
    last ``n_lags`` values (WLLWNN).
    """

    n_lags: int = 24
    wavelet: Optional[str] = "la8"
    levels: int = 10
    components: Optional[tuple] = None
    window: Optional[int] = None

    def __post_init__(self):
        if self.n_lags < 1:
            raise ConfigError("n_lags must be >= 1")
        if self.wavelet is not None:
            make_filter(self.wavelet)
            if self.levels < 1:
                raise ConfigError("levels must be >= 1")
            allowed = set(self._all_components())
            for c in self.component_names:
                if c not in allowed:
                    raise ConfigError(f"unknown MRA component {c!r}; choose from {sorted(allowed)}")

    def _all_components(self):
        return [f"D{j}" for j in range(1, self.levels + 1)] + [f"S{self.levels}"]

    @property
    def component_names(self) -> list[str]:
        if self.wavelet is None:
            return ["raw"]
        if self.components is None:
            return self._all_components()
        return [f"S{self.levels}" if c == "S" else c for c in self.components]

    @property
    def n_features(self) -> int:
        return self.n_lags * len(self.component_names)

    @property
    def context(self) -> int:
        """Number of trailing residuals needed to build one feature vector."""
        if self.wavelet is None:
            return self.n_lags
        default = make_filter(self.wavelet).L * 2 ** self.levels
        return max(self.window or default, self.n_lags)

    def features(self, window) -> np.ndarray:
        """Feature vector for the step right after ``window`` (normalized values)."""
        window = np.asarray(window, dtype=float)[-self.context :]
        if window.size < self.context:
            raise DataError(f"need {self.context} residuals of context, got {window.size}")
        if self.wavelet is None:
            return window[::-1][: self.n_lags].copy()
        comps = mra(window, make_filter(self.wavelet), self.levels).components()
        return np.concatenate([comps[c][::-1][: self.n_lags] for c in self.component_names])

    def kernels(self) -> np.ndarray:
        """Linear map from a context window to its feature vector, shape (F, W).

        The circular MRA of a window is a circulant operator, so every
        feature is a fixed weighted sum of the window values.
        """
        W = self.context
        if self.wavelet is None:
            K = np.zeros((self.n_lags, W))
            for k in range(1, self.n_lags + 1):
                K[k - 1, W - k] = 1.0
            return K
        impulse = np.zeros(W)
        impulse[0] = 1.0
        comps = mra(impulse, make_filter(self.wavelet), self.levels).components()
        s = np.arange(W)
        rows = []
        for c in self.component_names:
            col = comps[c]
            for k in range(1, self.n_lags + 1):
                rows.append(col[(W - k - s) % W])
        return np.array(rows)

    def to_dict(self) -> dict:
        return {
            "n_lags": self.n_lags,
            "wavelet": self.wavelet,
            "levels": self.levels,
            "components": None if self.components is None else list(self.components),
            "window": self.window,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "InputPipeline":
        comps = doc.get("components")
        return cls(doc["n_lags"], doc.get("wavelet"), doc.get("levels", 1),
                   None if comps is None else tuple(comps), doc.get("window"))


@dataclass
class PrepState:
    """Everything ``predict_recursive`` needs: raw residual tail and scaling."""

    window: np.ndarray
    norm: NormParams
    pipeline: InputPipeline


def prepare_inputs(residuals, pipeline: InputPipeline, norm: Optional[NormParams] = None):
    """Supervised set of (features at t, normalized residual at t).

    Normalization statistics come from ``residuals`` unless ``norm`` is given.
    Targets start once a full context window is available.
    """
    r = np.asarray(residuals, dtype=float)
    if not np.all(np.isfinite(r)):
        raise DataError("residuals must be finite")
    W = pipeline.context
    if r.size <= W + pipeline.n_lags:
        raise DataError(f"need more than {W + pipeline.n_lags} residuals for this pipeline, got {r.size}")
    x, norm = minmax_normalize(r, norm)
    K = pipeline.kernels()
    # row i of X is K @ x[i : i + W]
    X = signal.fftconvolve(x[None, :-1], K[:, ::-1], mode="valid", axes=1).T
    data = SupervisedSet(X, x[W:])
    state = PrepState(r[-W:].copy(), norm, pipeline)
    return data, state


def wllwnn_prepare(residuals, n_lags: int, filter: str = "la8", J: int = 10, *,
                   components=None, window=None, norm=None):
    pipeline = InputPipeline(n_lags, filter, J, None if components is None else tuple(components), window)
    return prepare_inputs(residuals, pipeline, norm)


def make_state(residuals, pipeline: InputPipeline, norm: NormParams) -> PrepState:
    r = np.asarray(residuals, dtype=float)
    if r.size < pipeline.context:
        raise DataError(f"need {pipeline.context} residuals of context, got {r.size}")
    return PrepState(r[-pipeline.context :].copy(), norm, pipeline)


def predict_recursive(model: LlwnnModel, state: PrepState, h: int) -> np.ndarray:
    """Iterated multi-step residual forecasts on the original scale.

    Each prediction is appended to the raw window and the decomposition is
    recomputed before the next step.
    """
    if h < 1:
        raise ValueError("forecast horizon must be >= 1")
    window = list(np.asarray(state.window, dtype=float))
    W = state.pipeline.context
    out = np.empty(h)
    for i in range(h):
        z, _ = minmax_normalize(window[-W:], state.norm)
        y_norm = forward(model, state.pipeline.features(z))
        out[i] = minmax_denormalize([y_norm], state.norm)[0]
        window.append(out[i])
    return out
