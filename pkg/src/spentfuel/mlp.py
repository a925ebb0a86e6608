"""From-scratch fully connected network with ADAM training.

ReLU hidden layers, linear output, MSE loss, exact reverse-mode gradients,
bias-corrected ADAM, seeded mini-batch shuffling, and early stopping that
restores the best-validation weights. Everything runs in float64 so the
finite-difference gradient checks have headroom.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (
    Dataset,
    NormStats,
    Splits,
    denormalize_outputs,
    fit_norm,
    normalize_inputs,
    normalize_outputs,
)
from .errors import MetricError, ModelIOError, SpentFuelError, TrainingDiverged
from .history import AssemblyInput
from .oracle import N_CONCENTRATIONS, N_DECAY_HEAT, SnfOutput

MODEL_FORMAT = "spentfuel-model"
MODEL_FORMAT_VERSION = "1"

# Tuner objective window: validation MSE averaged over this many trailing
# weight updates (an epoch's validation MSE stands for each of its updates).
TRAILING_WINDOW = 1000


@dataclass(frozen=True)
class MlpArchitecture:
    hidden_layers: int
    hidden_dim: int
    input_dim: int = 5
    output_dim: int = 53

    def __post_init__(self):
        if self.hidden_layers < 1:
            raise ValueError("need at least one hidden layer")
        if min(self.hidden_dim, self.input_dim, self.output_dim) < 1:
            raise ValueError("layer dimensions must be positive")

    def layer_dims(self) -> list[tuple[int, int]]:
        dims = [self.input_dim] + [self.hidden_dim] * self.hidden_layers + [self.output_dim]
        return list(zip(dims[:-1], dims[1:]))


@dataclass
class MlpModel:
    arch: MlpArchitecture
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    norm_stats: NormStats | None = None
    init_seed: int = 0
    train_seed: int | None = None
    train_seconds: float | None = None

    def copy_params(self) -> tuple[list[np.ndarray], list[np.ndarray]]:
        return [w.copy() for w in self.weights], [b.copy() for b in self.biases]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 16
    max_epochs: int = 1000
    patience: int = 50
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    max_seconds: float | None = None  # optional wall-clock stop, off by default

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ValueError("learning rate must be > 0")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("batch size, epochs, and patience must be >= 1")


@dataclass
class TrainReport:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    iters_per_epoch: list[int] = field(default_factory=list)
    stopped_epoch: int = 0
    best_epoch: int = 0
    best_val_mse: float = float("nan")
    trailing_val_mse: float = float("nan")
    n_iterations: int = 0
    diverged: bool = False

    def compute_trailing(self) -> float:
        """Mean validation MSE over the trailing window of weight updates."""
        if not self.val_loss:
            return float("nan")
        per_iter = np.repeat(np.asarray(self.val_loss), np.asarray(self.iters_per_epoch))
        return float(per_iter[-TRAILING_WINDOW:].mean())


def init(arch: MlpArchitecture, seed: int = 0) -> MlpModel:
    """Kaiming-uniform fan-in weights with the matching uniform bias init;
    deterministic per seed.

    Biases draw from U(-1/sqrt(fan_in), 1/sqrt(fan_in)) rather than zero so
    that a fully inactive layer cannot park downstream preactivations exactly
    on the ReLU kink.
    """
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in arch.layer_dims():
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        b_bound = 1.0 / np.sqrt(fan_in)
        biases.append(rng.uniform(-b_bound, b_bound, size=fan_out))
    return MlpModel(arch=arch, weights=weights, biases=biases, init_seed=seed)


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Normalized-space forward pass for a 5-vector or an N x 5 batch."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise SpentFuelError("forward pass received non-finite inputs")
    single = x.ndim == 1
    z = x[None, :] if single else x
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = z @ w + b
        if i < last:
            np.maximum(z, 0.0, out=z)
    return z[0] if single else z


def _forward_cached(model, x):
    """Forward pass keeping layer activations for backprop."""
    acts = [x]
    pres = []
    z = x
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        pre = z @ w + b
        pres.append(pre)
        z = np.maximum(pre, 0.0) if i < last else pre
        acts.append(z)
    return acts, pres


def mse(pred: np.ndarray, target: np.ndarray) -> float:
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise MetricError(f"shape mismatch: {pred.shape} vs {target.shape}")
    return float(np.mean((pred - target) ** 2))


def gradients(model: MlpModel, x: np.ndarray, y: np.ndarray):
    """Exact MSE gradients for one batch.

    Returns (weight grads, bias grads, batch loss). The loss is the mean over
    all N x output_dim elements, so gradients scale accordingly.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape[0] == 0:
        raise SpentFuelError("gradient batch is empty")
    acts, pres = _forward_cached(model, x)
    pred = acts[-1]
    residual = pred - y
    loss = float(np.mean(residual**2))
    delta = 2.0 * residual / residual.size
    grads_w = [np.empty(0)] * len(model.weights)
    grads_b = [np.empty(0)] * len(model.biases)
    for layer in range(len(model.weights) - 1, -1, -1):
        grads_w[layer] = acts[layer].T @ delta
        grads_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ model.weights[layer].T) * (pres[layer - 1] > 0.0)
    return grads_w, grads_b, loss


@dataclass
class AdamState:
    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]
    step: int = 0

    @classmethod
    def for_model(cls, model: MlpModel) -> "AdamState":
        return cls(
            m_w=[np.zeros_like(w) for w in model.weights],
            v_w=[np.zeros_like(w) for w in model.weights],
            m_b=[np.zeros_like(b) for b in model.biases],
            v_b=[np.zeros_like(b) for b in model.biases],
        )


def adam_step(
    model: MlpModel,
    grads_w: list[np.ndarray],
    grads_b: list[np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """One bias-corrected ADAM update, in place."""
    state.step += 1
    t = state.step
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for params, grads, ms, vs in (
        (model.weights, grads_w, state.m_w, state.v_w),
        (model.biases, grads_b, state.m_b, state.v_b),
    ):
        for p, g, m, v in zip(params, grads, ms, vs):
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * g**2
            p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


def train(
    ds: Dataset,
    splits: Splits,
    arch: MlpArchitecture,
    config: TrainConfig,
) -> tuple[MlpModel, TrainReport]:
    """Train on the normalized training rows with early stopping.

    Normalization stats come from the training rows only and are attached to
    the returned model, which carries the weights of the best-validation
    epoch. Raises TrainingDiverged (with the partial report) if any loss goes
    non-finite.
    """
    t_start = time.perf_counter()
    stats = fit_norm(ds, splits.train)
    x_train = normalize_inputs(ds.inputs[splits.train], stats)
    y_train = normalize_outputs(ds.outputs[splits.train], stats)
    x_val = normalize_inputs(ds.inputs[splits.val], stats)
    y_val = normalize_outputs(ds.outputs[splits.val], stats)

    model = init(arch, seed=config.seed)
    model.norm_stats = stats
    model.train_seed = config.seed
    adam = AdamState.for_model(model)
    rng = np.random.default_rng(config.seed)
    report = TrainReport()
    n_train = x_train.shape[0]
    best_val = np.inf
    best_params = model.copy_params()

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(n_train)
        batch_losses = []
        for start in range(0, n_train, config.batch_size):
            idx = order[start : start + config.batch_size]
            gw, gb, loss = gradients(model, x_train[idx], y_train[idx])
            if not np.isfinite(loss):
                report.diverged = True
                report.stopped_epoch = epoch
                raise TrainingDiverged(
                    f"non-finite training loss at epoch {epoch}", report=report
                )
            adam_step(
                model, gw, gb, adam, config.learning_rate,
                config.beta1, config.beta2, config.eps,
            )
            batch_losses.append(loss)
        val_mse = mse(forward(model, x_val), y_val)
        if not np.isfinite(val_mse):
            report.diverged = True
            report.stopped_epoch = epoch
            raise TrainingDiverged(
                f"non-finite validation loss at epoch {epoch}", report=report
            )
        report.train_loss.append(float(np.mean(batch_losses)))
        report.val_loss.append(val_mse)
        report.iters_per_epoch.append(len(batch_losses))
        report.n_iterations += len(batch_losses)
        if val_mse < best_val:
            best_val = val_mse
            report.best_epoch = epoch
            best_params = model.copy_params()
        report.stopped_epoch = epoch
        if epoch - report.best_epoch >= config.patience:
            break
        if config.max_seconds is not None and time.perf_counter() - t_start > config.max_seconds:
            break

    model.weights, model.biases = best_params
    report.best_val_mse = best_val
    report.trailing_val_mse = report.compute_trailing()
    model.train_seconds = time.perf_counter() - t_start
    return model, report


def predict(model: MlpModel, x):
    """Raw-space prediction: normalize, forward, denormalize.

    Accepts an AssemblyInput (returns SnfOutput), a 5-vector (returns a
    53-vector), or an N x 5 matrix (returns N x 53).
    """
    if model.norm_stats is None:
        raise SpentFuelError("model is untrained: no normalization stats attached")
    if isinstance(x, AssemblyInput):
        vec = predict(model, x.as_vector())
        return SnfOutput(
            decay_heat=vec[:N_DECAY_HEAT],
            concentrations=vec[N_DECAY_HEAT : N_DECAY_HEAT + N_CONCENTRATIONS],
        )
    xn = normalize_inputs(x, model.norm_stats)
    yn = forward(model, xn)
    return denormalize_outputs(yn, model.norm_stats)


def r2(pred: np.ndarray, target: np.ndarray) -> float:
    """Coefficient of determination pooled over all outputs: 1 - SSE/SST."""
    pred = np.atleast_2d(np.asarray(pred, dtype=float))
    target = np.atleast_2d(np.asarray(target, dtype=float))
    if pred.shape != target.shape:
        raise MetricError(f"shape mismatch: {pred.shape} vs {target.shape}")
    sse = float(np.sum((pred - target) ** 2))
    sst = float(np.sum((target - target.mean(axis=0)) ** 2))
    if sst == 0.0:
        raise MetricError("R^2 undefined: target has zero variance")
    return 1.0 - sse / sst


def per_output_mse(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    pred = np.atleast_2d(np.asarray(pred, dtype=float))
    target = np.atleast_2d(np.asarray(target, dtype=float))
    if pred.shape != target.shape:
        raise MetricError(f"shape mismatch: {pred.shape} vs {target.shape}")
    return np.mean((pred - target) ** 2, axis=0)


# -- persistence ------------------------------------------------------------


def save_model(model: MlpModel, path: str | Path) -> None:
    stats = model.norm_stats
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "tool_version": __version__,
        "architecture": {
            "input_dim": model.arch.input_dim,
            "output_dim": model.arch.output_dim,
            "hidden_layers": model.arch.hidden_layers,
            "hidden_dim": model.arch.hidden_dim,
        },
        "norm_stats": None
        if stats is None
        else {
            "input_mean": stats.input_mean.tolist(),
            "input_std": stats.input_std.tolist(),
            "output_mean": stats.output_mean.tolist(),
            "output_std": stats.output_std.tolist(),
        },
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "init_seed": model.init_seed,
        "train_seed": model.train_seed,
        "train_seconds": model.train_seconds,
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_model(path: str | Path) -> MlpModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ModelIOError(f"cannot read model {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelIOError(f"{path}: invalid JSON: {exc}") from exc
    if doc.get("format") != MODEL_FORMAT:
        raise ModelIOError(f"{path}: not a {MODEL_FORMAT} file")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ModelIOError(
            f"{path}: unsupported format version {doc.get('version')!r}"
        )
    try:
        arch = MlpArchitecture(**doc["architecture"])
        weights = [np.array(w, dtype=float) for w in doc["weights"]]
        biases = [np.array(b, dtype=float) for b in doc["biases"]]
        raw_stats = doc["norm_stats"]
        stats = (
            None
            if raw_stats is None
            else NormStats(**{k: np.array(v, dtype=float) for k, v in raw_stats.items()})
        )
        model = MlpModel(
            arch=arch,
            weights=weights,
            biases=biases,
            norm_stats=stats,
            init_seed=int(doc["init_seed"]),
            train_seed=None if doc["train_seed"] is None else int(doc["train_seed"]),
            train_seconds=None
            if doc["train_seconds"] is None
            else float(doc["train_seconds"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelIOError(f"{path}: malformed model file: {exc}") from exc
    for (fan_in, fan_out), w, b in zip(arch.layer_dims(), weights, biases):
        if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
            raise ModelIOError(f"{path}: weight shapes do not match architecture")
    return model
