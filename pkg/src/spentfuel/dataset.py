"""Dataset generation, splitting, normalization, and persistence.

Datasets are matrices of sampled inputs and simulated outputs with a fixed
column order. Files are CSV with a tool-version comment line, a header row,
and repr-formatted floats (lossless round trip); seed/ranges/oracle version
live in a JSON sidecar next to the CSV.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .chain import NuclideChain, default_chain, load_chain
from .errors import DatasetError
from .history import INPUT_NAMES, AssemblyInput
from .oracle import N_OUTPUTS, output_labels, simulate

# Sampling ranges for the five inputs (lo, hi), in input-vector order.
DEFAULT_RANGES: tuple[tuple[float, float], ...] = (
    (1.5, 5.5),  # enrichment, %
    (5.0, 70.0),  # burnup, MWd/kgU
    (750.0, 950.0),  # fuel temperature, K
    (100.0, 1000.0),  # boron, ppm
    (50.0, 3200.0),  # cooling time between cycles, days
)

WORKERS_ENV = "SPENTFUEL_WORKERS"


@dataclass
class Dataset:
    """Paired input (N x 5) and output (N x 53) matrices."""

    inputs: np.ndarray
    outputs: np.ndarray
    seed: int
    ranges: tuple[tuple[float, float], ...] = DEFAULT_RANGES

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.outputs = np.asarray(self.outputs, dtype=float)
        if self.inputs.ndim != 2 or self.inputs.shape[1] != len(INPUT_NAMES):
            raise DatasetError(f"inputs must be N x {len(INPUT_NAMES)}")
        if self.outputs.ndim != 2 or self.outputs.shape[1] != N_OUTPUTS:
            raise DatasetError(f"outputs must be N x {N_OUTPUTS}")
        if self.inputs.shape[0] != self.outputs.shape[0]:
            raise DatasetError("inputs and outputs row counts differ")
        self.ranges = tuple((float(lo), float(hi)) for lo, hi in self.ranges)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class SplitSpec:
    """Fixed-size test set first, then a seeded train/val shuffle."""

    test_count: int = 200
    val_fraction: float = 0.2
    seed: int = 0


@dataclass(frozen=True)
class Splits:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


@dataclass(frozen=True)
class NormStats:
    """Per-column mean and population std, fitted on training rows only."""

    input_mean: np.ndarray
    input_std: np.ndarray
    output_mean: np.ndarray
    output_std: np.ndarray


def sample_inputs(
    n: int,
    ranges: tuple[tuple[float, float], ...] = DEFAULT_RANGES,
    seed: int = 0,
) -> np.ndarray:
    """n i.i.d. uniform rows over the per-column ranges, reproducible per seed."""
    if n <= 0:
        raise DatasetError(f"sample count must be > 0, got {n}")
    bounds = np.asarray(ranges, dtype=float)
    if bounds.shape != (len(INPUT_NAMES), 2):
        raise DatasetError(f"expected {len(INPUT_NAMES)} (lo, hi) ranges")
    if np.any(bounds[:, 0] >= bounds[:, 1]):
        raise DatasetError("each sampling range needs lo < hi")
    rng = np.random.default_rng(seed)
    u = rng.random((n, bounds.shape[0]))
    return bounds[:, 0] + u * (bounds[:, 1] - bounds[:, 0])


def _simulate_block(chain: NuclideChain, rows: np.ndarray, offset: int) -> np.ndarray:
    out = np.empty((rows.shape[0], N_OUTPUTS))
    for i, row in enumerate(rows):
        try:
            out[i] = simulate(AssemblyInput.from_vector(row), chain=chain).as_vector()
        except Exception as exc:
            raise DatasetError(f"oracle failed on row {offset + i}: {exc}") from exc
    return out


def generate(
    n: int,
    seed: int = 0,
    chain: NuclideChain | None = None,
    ranges: tuple[tuple[float, float], ...] = DEFAULT_RANGES,
    workers: int | None = None,
) -> Dataset:
    """Sample n inputs and label them with the depletion model.

    Rows may be computed across worker processes (SPENTFUEL_WORKERS or the
    `workers` argument) but the row order is always deterministic. Any oracle
    failure aborts the run and names the offending row.
    """
    chain = chain or default_chain()
    inputs = sample_inputs(n, ranges=ranges, seed=seed)
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1 and n >= 4 * workers:
        blocks = np.array_split(np.arange(n), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    _simulate_block,
                    [chain] * len(blocks),
                    [inputs[b] for b in blocks],
                    [int(b[0]) for b in blocks],
                )
            )
        outputs = np.vstack(parts)
    else:
        outputs = _simulate_block(chain, inputs, 0)
    return Dataset(inputs=inputs, outputs=outputs, seed=seed, ranges=ranges)


def split(ds: Dataset, spec: SplitSpec) -> Splits:
    """Partition rows: first `test_count` rows are the test set, the rest is
    shuffled by seed and cut val_fraction/rest into validation and training."""
    if ds.n <= spec.test_count + 50:
        raise DatasetError(
            f"dataset too small to split: {ds.n} rows, need > {spec.test_count + 50}"
        )
    test = np.arange(spec.test_count)
    rest = np.arange(spec.test_count, ds.n)
    rng = np.random.default_rng(spec.seed)
    rest = rng.permutation(rest)
    n_val = int(round(len(rest) * spec.val_fraction))
    n_val = min(max(n_val, 1), len(rest) - 1)
    val = np.sort(rest[:n_val])
    train = np.sort(rest[n_val:])
    return Splits(train=train, val=val, test=test)


def fit_norm(ds: Dataset, train_indices: np.ndarray) -> NormStats:
    """Column means and population stds over the training rows only.

    Constant columns get std 1 so that normalization stays defined.
    """
    train_indices = np.asarray(train_indices, dtype=int)
    if train_indices.size == 0:
        raise DatasetError("cannot fit normalization on an empty training set")

    def stats(mat):
        mean = mat.mean(axis=0)
        std = mat.std(axis=0)  # population (divide by N)
        std = np.where(std > 0.0, std, 1.0)
        return mean, std

    im, istd = stats(ds.inputs[train_indices])
    om, ostd = stats(ds.outputs[train_indices])
    return NormStats(input_mean=im, input_std=istd, output_mean=om, output_std=ostd)


def _apply(x: np.ndarray, mean: np.ndarray, std: np.ndarray, inverse: bool) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != mean.shape[0]:
        raise DatasetError(
            f"dimension mismatch: data has {x.shape[-1]} columns, stats have {mean.shape[0]}"
        )
    return x * std + mean if inverse else (x - mean) / std


def normalize_inputs(x, stats: NormStats):
    return _apply(x, stats.input_mean, stats.input_std, inverse=False)


def denormalize_inputs(x, stats: NormStats):
    return _apply(x, stats.input_mean, stats.input_std, inverse=True)


def normalize_outputs(y, stats: NormStats):
    return _apply(y, stats.output_mean, stats.output_std, inverse=False)


def denormalize_outputs(y, stats: NormStats):
    return _apply(y, stats.output_mean, stats.output_std, inverse=True)


# -- persistence ------------------------------------------------------------


def _fmt(v: float) -> str:
    return repr(float(v))


def dataset_columns(chain: NuclideChain | None = None) -> tuple[str, ...]:
    return INPUT_NAMES + output_labels(chain)


def meta_path_for(path: str | Path) -> Path:
    return Path(str(path) + ".meta.json")


def save(ds: Dataset, path: str | Path, chain: NuclideChain | None = None) -> Path:
    """Write the CSV plus its JSON metadata sidecar; returns the sidecar path."""
    chain = chain or default_chain()
    path = Path(path)
    cols = dataset_columns(chain)
    lines = [f"# spentfuel {__version__} seed={ds.seed}", ",".join(cols)]
    data = np.hstack([ds.inputs, ds.outputs])
    for row in data:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    meta = {
        "tool_version": __version__,
        "seed": ds.seed,
        "ranges": {name: list(r) for name, r in zip(INPUT_NAMES, ds.ranges)},
        "oracle_version": chain.version,
        "rows": ds.n,
    }
    mpath = meta_path_for(path)
    mpath.write_text(json.dumps(meta, indent=1) + "\n")
    return mpath


def load(path: str | Path) -> Dataset:
    """Read a dataset written by save(); bit-exact round trip."""
    path = Path(path)
    try:
        raw_lines = path.read_text().splitlines()
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc
    header = None
    rows: list[list[float]] = []
    n_cols = len(INPUT_NAMES) + N_OUTPUTS
    for lineno, line in enumerate(raw_lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            if len(header) != n_cols or header[: len(INPUT_NAMES)] != list(INPUT_NAMES):
                raise DatasetError("unexpected dataset header", line=lineno)
            continue
        fields = line.split(",")
        if len(fields) != n_cols:
            raise DatasetError(
                f"expected {n_cols} fields, got {len(fields)}", line=lineno
            )
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise DatasetError(f"bad number: {exc}", line=lineno) from exc
    if header is None or not rows:
        raise DatasetError(f"{path} carries no data rows")
    data = np.array(rows)
    mpath = meta_path_for(path)
    try:
        meta = json.loads(mpath.read_text())
        seed = int(meta["seed"])
        ranges = tuple(tuple(meta["ranges"][name]) for name in INPUT_NAMES)
    except OSError as exc:
        raise DatasetError(f"missing dataset sidecar {mpath}: {exc}") from exc
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise DatasetError(f"malformed dataset sidecar {mpath}: {exc}") from exc
    return Dataset(
        inputs=data[:, : len(INPUT_NAMES)],
        outputs=data[:, len(INPUT_NAMES) :],
        seed=seed,
        ranges=ranges,
    )


def resolve_chain(chain_path: str | Path | None) -> NuclideChain:
    """CLI/service helper: load an override chain or fall back to the default."""
    if chain_path is None:
        return default_chain()
    return load_chain(chain_path)
