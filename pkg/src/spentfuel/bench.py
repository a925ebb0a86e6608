"""Timing harness, the amortized-speedup model, and calculated-vs-measured
decay-heat comparison.

The speedup model charges the surrogate for its own training time and for the
oracle runs needed to build its training set:

    speedup(n) = n * t_oracle / (t_train + n * t_eval + n_train * t_oracle)

so it rises with n and approaches n / n_train from below.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .chain import NuclideChain
from .dataset import sample_inputs
from .errors import BenchError
from .history import AssemblyInput
from .mlp import MlpModel, predict
from .oracle import simulate

WARMUP_CALLS = 3


@dataclass(frozen=True)
class TimeConstants:
    t_oracle: float  # seconds per oracle run
    t_train: float  # seconds to train the surrogate
    t_eval: float  # seconds per surrogate prediction
    n_train: int  # oracle runs needed for the training set
    t_oracle_std: float = 0.0
    t_eval_std: float = 0.0

    def __post_init__(self):
        if min(self.t_oracle, self.t_train, self.t_eval) <= 0.0 or self.n_train <= 0:
            raise BenchError("time constants must all be positive")


def speedup(n: int, c: TimeConstants) -> float:
    """Amortized speedup of the surrogate over the oracle for n evaluations."""
    if n < 1:
        raise BenchError(f"evaluation count must be >= 1, got {n}")
    return n * c.t_oracle / (c.t_train + n * c.t_eval + c.n_train * c.t_oracle)


def break_even(c: TimeConstants) -> float:
    """Evaluation count where the surrogate route starts paying off."""
    if c.t_eval >= c.t_oracle:
        raise BenchError("no break-even: surrogate is not faster than the oracle")
    return (c.t_train + c.n_train * c.t_oracle) / (c.t_oracle - c.t_eval)


def _time_calls(fn, args_list) -> tuple[float, float]:
    """Mean and std of wall time per call, discarding warm-up calls."""
    times = []
    for i, args in enumerate(args_list):
        t0 = time.perf_counter()
        fn(*args)
        dt = time.perf_counter() - t0
        if i >= WARMUP_CALLS:
            times.append(dt)
    times = np.asarray(times)
    return float(times.mean()), float(times.std())


def measure_times(
    model: MlpModel,
    n_probe: int = 10,
    chain: NuclideChain | None = None,
    n_train: int = 500,
    seed: int = 0,
) -> TimeConstants:
    """Measure oracle and surrogate wall times on n_probe varied inputs.

    The first WARMUP_CALLS calls of each kind are discarded. Training time is
    taken from the duration recorded when the model was trained; time spent
    searching hyperparameters is excluded by construction.
    """
    if n_probe < 1:
        raise BenchError("n_probe must be >= 1")
    if model.train_seconds is None or model.train_seconds <= 0.0:
        raise BenchError("model carries no training time; retrain and save it")
    probe = sample_inputs(n_probe + WARMUP_CALLS, seed=seed)
    oracle_args = [(AssemblyInput.from_vector(row),) for row in probe]
    t_oracle, t_oracle_std = _time_calls(lambda a: simulate(a, chain=chain), oracle_args)
    eval_args = [(row,) for row in probe]
    t_eval, t_eval_std = _time_calls(lambda row: predict(model, row), eval_args)
    return TimeConstants(
        t_oracle=t_oracle,
        t_train=float(model.train_seconds),
        t_eval=t_eval,
        n_train=n_train,
        t_oracle_std=t_oracle_std,
        t_eval_std=t_eval_std,
    )


# -- calculated vs measured ---------------------------------------------------


@dataclass(frozen=True)
class MeasurementRecord:
    assembly_id: str
    group: str
    cooling_years: float
    decay_heat: float  # W/tU

    def __post_init__(self):
        if self.cooling_years <= 0.0 or self.decay_heat <= 0.0:
            raise BenchError(
                f"measurement {self.assembly_id}: cooling time and heat must be > 0"
            )


@dataclass
class CeReport:
    records: list[tuple[MeasurementRecord, float, float]]  # (record, predicted, ratio)
    group_bias_pct: dict[str, float]
    overall_bias_pct: float


def ce_compare(predictions: dict[str, float], measurements: list[MeasurementRecord]) -> CeReport:
    """Per-record calculated/measured ratios and mean bias per reactor group.

    Every measurement id must have a prediction; missing ids are reported
    together in one error. Results do not depend on record order.
    """
    if not measurements:
        raise BenchError("no measurement records given")
    missing = sorted({m.assembly_id for m in measurements} - set(predictions))
    if missing:
        raise BenchError(f"missing predictions for: {', '.join(missing)}")
    rows = []
    for m in measurements:
        pred = float(predictions[m.assembly_id])
        if pred <= 0.0:
            raise BenchError(f"prediction for {m.assembly_id} must be > 0")
        rows.append((m, pred, pred / m.decay_heat))
    ratios_by_group: dict[str, list[float]] = {}
    for m, _pred, ratio in rows:
        ratios_by_group.setdefault(m.group, []).append(ratio)
    group_bias = {
        g: float((np.mean(r) - 1.0) * 100.0) for g, r in sorted(ratios_by_group.items())
    }
    overall = float((np.mean([ratio for _m, _p, ratio in rows]) - 1.0) * 100.0)
    return CeReport(records=rows, group_bias_pct=group_bias, overall_bias_pct=overall)


# -- file formats ---------------------------------------------------------------

MEASUREMENT_COLUMNS = ("assembly_id", "group", "cooling_years", "decay_heat_W_per_tU")
PREDICTION_COLUMNS = ("assembly_id", "decay_heat_W_per_tU")


def _read_csv(path: Path, columns: tuple[str, ...]) -> list[list[str]]:
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise BenchError(f"cannot read {path}: {exc}") from exc
    rows = []
    header_seen = False
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if not header_seen:
            if [f.lower() for f in fields] != [c.lower() for c in columns]:
                raise BenchError(
                    f"{path}: expected header {','.join(columns)} (line {lineno})"
                )
            header_seen = True
            continue
        if len(fields) != len(columns):
            raise BenchError(f"{path}: expected {len(columns)} fields (line {lineno})")
        rows.append(fields)
    if not header_seen or not rows:
        raise BenchError(f"{path}: no data rows")
    return rows


def load_measurements(path: str | Path) -> list[MeasurementRecord]:
    records = []
    for fields in _read_csv(Path(path), MEASUREMENT_COLUMNS):
        try:
            records.append(
                MeasurementRecord(
                    assembly_id=fields[0],
                    group=fields[1],
                    cooling_years=float(fields[2]),
                    decay_heat=float(fields[3]),
                )
            )
        except ValueError as exc:
            raise BenchError(f"{path}: bad number in record {fields[0]}: {exc}") from exc
    return records


def load_predictions(path: str | Path) -> dict[str, float]:
    preds = {}
    for fields in _read_csv(Path(path), PREDICTION_COLUMNS):
        try:
            preds[fields[0]] = float(fields[1])
        except ValueError as exc:
            raise BenchError(f"{path}: bad number for {fields[0]}: {exc}") from exc
    return preds


def write_ce_report(report: CeReport, out_prefix: str | Path) -> list[Path]:
    """Two delimited files: per-record ratios and per-group bias."""
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    header = f"# spentfuel {__version__} seed=none"
    rec_lines = [
        header,
        "assembly_id,group,cooling_years,measured_W_per_tU,calculated_W_per_tU,ce_ratio",
    ]
    for m, pred, ratio in report.records:
        rec_lines.append(
            f"{m.assembly_id},{m.group},{m.cooling_years!r},"
            f"{m.decay_heat!r},{pred!r},{ratio!r}"
        )
    records_path = Path(f"{prefix}_records.csv")
    records_path.write_text("\n".join(rec_lines) + "\n")
    bias_lines = [header, "group,bias_pct"]
    for group, bias in report.group_bias_pct.items():
        bias_lines.append(f"{group},{bias!r}")
    bias_lines.append(f"all,{report.overall_bias_pct!r}")
    bias_path = Path(f"{prefix}_bias.csv")
    bias_path.write_text("\n".join(bias_lines) + "\n")
    return [records_path, bias_path]
