"""Seeded random search over the hyperparameter space.

The default space matches the surrogate's training domain: 1-5 hidden layers,
50-1000 neurons, log-uniform learning rate in [1e-4, 5e-3], batch size in
{8, 16, 32, 64, 128}, 1000 epochs. The objective is the trailing-window
validation MSE reported by train(). Trials run sequentially with per-trial
seeds derived from the search seed, so a search is reproducible end to end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset, Splits
from .errors import SearchFailure, TrainingDiverged
from .mlp import MlpArchitecture, MlpModel, TrainConfig, TrainReport, train


@dataclass(frozen=True)
class SearchSpace:
    hidden_layers: tuple[int, int] = (1, 5)
    hidden_dim: tuple[int, int] = (50, 1000)
    learning_rate: tuple[float, float] = (1e-4, 5e-3)
    batch_sizes: tuple[int, ...] = (8, 16, 32, 64, 128)
    max_epochs: int = 1000

    def __post_init__(self):
        if self.hidden_layers[0] < 1 or self.hidden_layers[0] > self.hidden_layers[1]:
            raise ValueError("bad hidden_layers bounds")
        if self.hidden_dim[0] < 1 or self.hidden_dim[0] > self.hidden_dim[1]:
            raise ValueError("bad hidden_dim bounds")
        if not 0.0 < self.learning_rate[0] <= self.learning_rate[1]:
            raise ValueError("bad learning_rate bounds")
        if not self.batch_sizes or min(self.batch_sizes) < 1:
            raise ValueError("bad batch sizes")


@dataclass
class Trial:
    index: int
    seed: int
    arch: MlpArchitecture
    config: TrainConfig
    objective: float
    stopped_epoch: int
    diverged: bool = False
    report: TrainReport | None = field(default=None, repr=False)

    def record(self) -> dict:
        return {
            "trial": self.index,
            "seed": self.seed,
            "hidden_layers": self.arch.hidden_layers,
            "hidden_dim": self.arch.hidden_dim,
            "learning_rate": self.config.learning_rate,
            "batch_size": self.config.batch_size,
            "objective": None if self.diverged else self.objective,
            "stopped_epoch": self.stopped_epoch,
            "diverged": self.diverged,
        }


def trial_seed(search_seed: int, index: int) -> int:
    """Stable per-trial seed derived from the search seed."""
    return int(np.random.SeedSequence([search_seed, index]).generate_state(1)[0])


def sample_config(
    space: SearchSpace, seed: int, patience: int = 50, max_seconds: float | None = None
) -> tuple[MlpArchitecture, TrainConfig]:
    """Uniform draws over the discrete sets, log-uniform learning rate."""
    rng = np.random.default_rng(seed)
    layers = int(rng.integers(space.hidden_layers[0], space.hidden_layers[1] + 1))
    dim = int(rng.integers(space.hidden_dim[0], space.hidden_dim[1] + 1))
    log_lo, log_hi = np.log10(space.learning_rate[0]), np.log10(space.learning_rate[1])
    lr = float(10.0 ** rng.uniform(log_lo, log_hi))
    batch = int(rng.choice(np.asarray(space.batch_sizes)))
    arch = MlpArchitecture(hidden_layers=layers, hidden_dim=dim)
    config = TrainConfig(
        learning_rate=lr,
        batch_size=batch,
        max_epochs=space.max_epochs,
        patience=patience,
        seed=seed,
        max_seconds=max_seconds,
    )
    return arch, config


def search(
    ds: Dataset,
    splits: Splits,
    space: SearchSpace = SearchSpace(),
    budget: int = 50,
    seed: int = 0,
    patience: int = 50,
    max_seconds_per_trial: float | None = None,
    log_path: str | Path | None = None,
) -> tuple[Trial, list[Trial], MlpModel]:
    """Train one model per trial and return the argmin-objective trial.

    Diverged trials stay in the log with a null objective. If every trial
    diverges the search fails. The winning trial's trained model is returned
    alongside the trial list so callers do not need to retrain.
    """
    if budget < 1:
        raise SearchFailure(f"search budget must be >= 1, got {budget}")
    trials: list[Trial] = []
    best: Trial | None = None
    best_model: MlpModel | None = None
    for i in range(budget):
        t_seed = trial_seed(seed, i)
        arch, config = sample_config(
            space, t_seed, patience=patience, max_seconds=max_seconds_per_trial
        )
        try:
            model, report = train(ds, splits, arch, config)
            trial = Trial(
                index=i,
                seed=t_seed,
                arch=arch,
                config=config,
                objective=report.trailing_val_mse,
                stopped_epoch=report.stopped_epoch,
                report=report,
            )
        except TrainingDiverged as exc:
            model = None
            trial = Trial(
                index=i,
                seed=t_seed,
                arch=arch,
                config=config,
                objective=float("inf"),
                stopped_epoch=exc.report.stopped_epoch if exc.report else 0,
                diverged=True,
            )
        trials.append(trial)
        if not trial.diverged and (best is None or trial.objective < best.objective):
            best = trial
            best_model = model
    if log_path is not None:
        write_trial_log(trials, log_path, seed=seed)
    if best is None or best_model is None:
        raise SearchFailure(f"all {budget} trials diverged")
    return best, trials, best_model


def write_trial_log(trials: list[Trial], path: str | Path, seed: int = 0) -> None:
    """One JSON record per trial, after a '#' header naming version and seed."""
    from . import __version__

    lines = [f"# spentfuel {__version__} seed={seed}"]
    lines += [json.dumps(t.record()) for t in trials]
    Path(path).write_text("\n".join(lines) + "\n")
