"""Monte-Carlo uncertainty quantification and Sobol' sensitivity analysis.

Both run against any evaluator mapping an N x 5 input matrix to N x 53
outputs, so the surrogate and the depletion model can be compared on exactly
the same samples. Sobol' indices come from a Saltelli cross-sampling scheme
(blocks A, B, AB_i, BA_i: n_base * (2d+2) rows): the Saltelli estimator for
first-order, the Jansen estimator for total-order, both with bootstrap
standard errors over resampled base rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import ndtri

from . import __version__
from .chain import NuclideChain
from .errors import AnalysisError
from .history import INPUT_NAMES, AssemblyInput
from .mlp import MlpModel, predict
from .oracle import simulate

Evaluator = Callable[[np.ndarray], np.ndarray]

HIST_MAX_BINS = 200
_U_EPS = 1e-12


@dataclass(frozen=True)
class UqSpec:
    """Independent normal perturbations around a center input."""

    center: AssemblyInput
    rel_std: float = 0.05
    n_samples: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.rel_std <= 0.0:
            raise ValueError("rel_std must be > 0")
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")


@dataclass
class UqResult:
    evaluator: str
    n_samples: int
    mean: np.ndarray  # per output
    std: np.ndarray
    rel_std: np.ndarray  # sigma / mu
    hist_edges: list[np.ndarray]
    hist_counts: list[np.ndarray]
    boot_mean_std: np.ndarray
    boot_var_std: np.ndarray


@dataclass(frozen=True)
class SaltelliPlan:
    """Row layout of the cross-sampling scheme."""

    n_base: int
    d: int

    @property
    def n_total(self) -> int:
        return self.n_base * (2 * self.d + 2)

    def block_a(self) -> slice:
        return slice(0, self.n_base)

    def block_b(self) -> slice:
        return slice(self.n_base, 2 * self.n_base)

    def block_ab(self, i: int) -> slice:
        start = (2 + i) * self.n_base
        return slice(start, start + self.n_base)

    def block_ba(self, i: int) -> slice:
        start = (2 + self.d + i) * self.n_base
        return slice(start, start + self.n_base)


@dataclass
class SobolResult:
    s1: np.ndarray  # (d, n_outputs)
    st: np.ndarray
    s1_se: np.ndarray
    st_se: np.ndarray
    undefined: np.ndarray  # (n_outputs,) bool: zero output variance
    n_base: int
    evaluator: str = ""


# -- evaluators --------------------------------------------------------------


def oracle_evaluator(chain: NuclideChain | None = None) -> Evaluator:
    """Row-wise depletion model evaluator; names the failing sample."""

    def run(x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty((x.shape[0], 53))
        for i, row in enumerate(x):
            try:
                out[i] = simulate(AssemblyInput.from_vector(row), chain=chain).as_vector()
            except Exception as exc:
                raise AnalysisError(f"oracle evaluator failed: {exc}", sample_index=i) from exc
        return out

    return run


def model_evaluator(model: MlpModel) -> Evaluator:
    """Batch surrogate evaluator."""

    def run(x: np.ndarray) -> np.ndarray:
        return np.atleast_2d(predict(model, np.atleast_2d(np.asarray(x, dtype=float))))

    return run


def evaluate_rows(evaluator: Evaluator, x: np.ndarray) -> np.ndarray:
    y = np.atleast_2d(np.asarray(evaluator(x), dtype=float))
    if y.shape[0] != x.shape[0]:
        raise AnalysisError(
            f"evaluator returned {y.shape[0]} rows for {x.shape[0]} samples"
        )
    bad = ~np.all(np.isfinite(y), axis=1)
    if np.any(bad):
        raise AnalysisError(
            "evaluator produced non-finite output", sample_index=int(np.flatnonzero(bad)[0])
        )
    return y


# -- Monte-Carlo UQ -----------------------------------------------------------


def sample_normal(spec: UqSpec) -> np.ndarray:
    """N x 5 independent normals, mean = center, std = rel_std * center.

    Non-positive draws are rejected and resampled so every row is a valid
    assembly input (with a 5% spread this is effectively never exercised).
    """
    rng = np.random.default_rng(spec.seed)
    center = spec.center.as_vector()
    scale = spec.rel_std * center
    x = rng.normal(center, scale, size=(spec.n_samples, center.size))
    bad = x <= 0.0
    while np.any(bad):
        x[bad] = rng.normal(
            np.broadcast_to(center, x.shape)[bad], np.broadcast_to(scale, x.shape)[bad]
        )
        bad = x <= 0.0
    return x


def freedman_diaconis_edges(values: np.ndarray) -> np.ndarray:
    """Shared-bin histogram edges for one output over pooled samples."""
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        pad = max(abs(lo), 1.0) * 1e-9
        return np.array([lo - pad, hi + pad])
    q25, q75 = np.percentile(values, [25.0, 75.0])
    width = 2.0 * (q75 - q25) / len(values) ** (1.0 / 3.0)
    if width <= 0.0:
        n_bins = 1
    else:
        n_bins = int(np.clip(np.ceil((hi - lo) / width), 1, HIST_MAX_BINS))
    return np.linspace(lo, hi, n_bins + 1)


def bootstrap_std(samples: np.ndarray, resamples: int, seed: int = 0) -> tuple[float, float]:
    """Mean and variance of the std estimator under resampling with replacement."""
    samples = np.asarray(samples, dtype=float).reshape(-1)
    if samples.size < 2:
        raise AnalysisError("bootstrap needs at least 2 samples")
    if resamples < 1:
        raise AnalysisError("resamples must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, samples.size, size=(resamples, samples.size))
    stds = samples[idx].std(axis=1)
    return float(stds.mean()), float(stds.var())


def run_uq(
    evaluator: Evaluator,
    spec: UqSpec,
    samples: np.ndarray | None = None,
    hist_edges: list[np.ndarray] | None = None,
    bootstrap_resamples: int = 1000,
    evaluator_tag: str = "",
) -> UqResult:
    """Evaluate perturbed inputs and summarize every output column.

    Pass `samples` to reuse one draw across evaluators (paired comparison)
    and `hist_edges` to force shared histogram bins.
    """
    if samples is None:
        samples = sample_normal(spec)
    y = evaluate_rows(evaluator, samples)
    mean = y.mean(axis=0)
    std = y.std(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(mean != 0.0, std / np.abs(mean), 0.0)
    edges = hist_edges or [freedman_diaconis_edges(y[:, k]) for k in range(y.shape[1])]
    counts = []
    for k in range(y.shape[1]):
        e = edges[k]
        col = np.clip(y[:, k], e[0], e[-1])
        counts.append(np.histogram(col, bins=e)[0])
    boot_seed = np.random.SeedSequence([spec.seed, 45839]).generate_state(1)[0]
    idx_rng = np.random.default_rng(boot_seed)
    idx = idx_rng.integers(0, y.shape[0], size=(bootstrap_resamples, y.shape[0]))
    boot_mean = np.empty(y.shape[1])
    boot_var = np.empty(y.shape[1])
    for k in range(y.shape[1]):
        stds = y[idx, k].std(axis=1)
        boot_mean[k] = stds.mean()
        boot_var[k] = stds.var()
    return UqResult(
        evaluator=evaluator_tag,
        n_samples=y.shape[0],
        mean=mean,
        std=std,
        rel_std=rel,
        hist_edges=edges,
        hist_counts=counts,
        boot_mean_std=boot_mean,
        boot_var_std=boot_var,
    )


def paired_uq(
    evaluators: dict[str, Evaluator],
    spec: UqSpec,
    bootstrap_resamples: int = 1000,
) -> dict[str, UqResult]:
    """Run several evaluators on one draw with shared histogram bins."""
    samples = sample_normal(spec)
    raw = {tag: evaluate_rows(fn, samples) for tag, fn in evaluators.items()}
    pooled = np.vstack(list(raw.values()))
    edges = [freedman_diaconis_edges(pooled[:, k]) for k in range(pooled.shape[1])]
    return {
        tag: run_uq(
            lambda _x, _y=y: _y,  # outputs already computed for these samples
            spec,
            samples=samples,
            hist_edges=edges,
            bootstrap_resamples=bootstrap_resamples,
            evaluator_tag=tag,
        )
        for tag, y in raw.items()
    }


# -- Sobol' / Saltelli ---------------------------------------------------------


def saltelli_base(n_base: int, d: int, seed: int = 0) -> tuple[np.ndarray, SaltelliPlan]:
    """Cross-sampling matrix on (0,1) with blocks A, B, AB_i, BA_i.

    The base rows come from a seeded scrambled Sobol' sequence of dimension
    2d (first d columns -> A, last d -> B), which cuts estimator noise by an
    order of magnitude versus plain uniform draws at the same n_base.
    """
    if n_base < 2 or n_base & (n_base - 1) != 0:
        raise AnalysisError(f"n_base must be a power of two >= 2, got {n_base}")
    from scipy.stats import qmc

    base = qmc.Sobol(d=2 * d, scramble=True, seed=seed).random(n_base)
    a = base[:, :d].copy()
    b = base[:, d:].copy()
    plan = SaltelliPlan(n_base=n_base, d=d)
    u = np.empty((plan.n_total, d))
    u[plan.block_a()] = a
    u[plan.block_b()] = b
    for i in range(d):
        ab = a.copy()
        ab[:, i] = b[:, i]
        u[plan.block_ab(i)] = ab
        ba = b.copy()
        ba[:, i] = a[:, i]
        u[plan.block_ba(i)] = ba
    return u, plan


def transform_normal(u: np.ndarray, spec: UqSpec) -> np.ndarray:
    """Inverse-CDF map from uniform base rows to the UqSpec normal marginals."""
    center = spec.center.as_vector()
    z = ndtri(np.clip(u, _U_EPS, 1.0 - _U_EPS))
    x = center + spec.rel_std * center * z
    return np.maximum(x, 1e-9 * center)


def saltelli_sample(n_base: int, spec: UqSpec) -> tuple[np.ndarray, SaltelliPlan]:
    """Saltelli scheme with the spec's normal marginals; 12 * n_base rows for d=5."""
    u, plan = saltelli_base(n_base, d=5, seed=spec.seed)
    return transform_normal(u, spec), plan


def _estimators(f_a, f_b, f_ab, f_ba, variance):
    """First-order via the Saltelli estimator, total-order via Jansen.

    Both are averaged over the (A, B, AB) and (B, A, BA) halves of the
    scheme. The Saltelli form mean(f_B * (f_AB_i - f_A)) / V is exactly zero
    for inert inputs, which the difference-based form is not.
    """
    s1_fwd = np.mean(f_b[None, :, :] * (f_ab - f_a[None, :, :]), axis=1)
    s1_rev = np.mean(f_a[None, :, :] * (f_ba - f_b[None, :, :]), axis=1)
    st_fwd = 0.5 * np.mean((f_a[None, :, :] - f_ab) ** 2, axis=1)
    st_rev = 0.5 * np.mean((f_b[None, :, :] - f_ba) ** 2, axis=1)
    s1 = 0.5 * (s1_fwd + s1_rev) / variance
    st = 0.5 * (st_fwd + st_rev) / variance
    return s1, st


def sobol_indices(
    evaluations: np.ndarray,
    plan: SaltelliPlan,
    bootstrap_resamples: int = 200,
    seed: int = 0,
    evaluator_tag: str = "",
) -> SobolResult:
    """First- and total-order indices from evaluations aligned to the plan.

    Outputs with zero variance are flagged in `undefined` and carry zero
    indices rather than NaN.
    """
    y = np.asarray(evaluations, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if y.shape[0] != plan.n_total:
        raise AnalysisError(
            f"expected {plan.n_total} evaluations for the plan, got {y.shape[0]}"
        )
    if not np.all(np.isfinite(y)):
        raise AnalysisError("evaluations contain non-finite values")
    d, n = plan.d, plan.n_base
    f_a = y[plan.block_a()]
    f_b = y[plan.block_b()]
    f_ab = np.stack([y[plan.block_ab(i)] for i in range(d)])
    f_ba = np.stack([y[plan.block_ba(i)] for i in range(d)])

    pooled = np.vstack([f_a, f_b])
    variance = pooled.var(axis=0)
    scale = np.mean(np.abs(pooled), axis=0)
    undefined = variance <= (1e-12 * np.maximum(scale, 1e-300)) ** 2
    safe_var = np.where(undefined, 1.0, variance)

    s1, st = _estimators(f_a, f_b, f_ab, f_ba, safe_var)

    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x50B01]).generate_state(1)[0])
    s1_draws = np.empty((bootstrap_resamples,) + s1.shape)
    st_draws = np.empty_like(s1_draws)
    for r in range(bootstrap_resamples):
        idx = rng.integers(0, n, size=n)
        rb_a, rb_b = f_a[idx], f_b[idx]
        rb_var = np.vstack([rb_a, rb_b]).var(axis=0)
        rb_var = np.where(rb_var > 0.0, rb_var, 1.0)
        s1_draws[r], st_draws[r] = _estimators(
            rb_a, rb_b, f_ab[:, idx, :], f_ba[:, idx, :], rb_var
        )
    s1_se = s1_draws.std(axis=0)
    st_se = st_draws.std(axis=0)

    mask = undefined[None, :]
    return SobolResult(
        s1=np.where(mask, 0.0, s1),
        st=np.where(mask, 0.0, st),
        s1_se=np.where(mask, 0.0, s1_se),
        st_se=np.where(mask, 0.0, st_se),
        undefined=undefined,
        n_base=n,
        evaluator=evaluator_tag,
    )


def run_sobol(
    evaluator: Evaluator,
    spec: UqSpec,
    n_base: int = 128,
    bootstrap_resamples: int = 200,
    evaluator_tag: str = "",
) -> SobolResult:
    """saltelli_sample + evaluate + sobol_indices in one call."""
    x, plan = saltelli_sample(n_base, spec)
    y = evaluate_rows(evaluator, x)
    return sobol_indices(
        y, plan, bootstrap_resamples=bootstrap_resamples, seed=spec.seed,
        evaluator_tag=evaluator_tag,
    )


# -- delimited-text emission ---------------------------------------------------


def _fmt(v: float) -> str:
    return repr(float(v))


def _header_line(seed) -> str:
    return f"# spentfuel {__version__} seed={seed}"


def write_uq_tables(
    results: dict[str, UqResult],
    labels: tuple[str, ...],
    out_dir: str | Path,
    seed: int,
) -> list[Path]:
    """Summary table (one row per output) plus per-output histogram files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tags = list(results)
    written = []

    cols = ["output"]
    for tag in tags:
        cols += [f"mean_{tag}", f"std_{tag}", f"rel_std_{tag}",
                 f"boot_mean_std_{tag}", f"boot_var_std_{tag}"]
    lines = [_header_line(seed), ",".join(cols)]
    for k, label in enumerate(labels):
        row = [label]
        for tag in tags:
            r = results[tag]
            row += [_fmt(r.mean[k]), _fmt(r.std[k]), _fmt(r.rel_std[k]),
                    _fmt(r.boot_mean_std[k]), _fmt(r.boot_var_std[k])]
        lines.append(",".join(row))
    summary = out_dir / "uq_summary.csv"
    summary.write_text("\n".join(lines) + "\n")
    written.append(summary)

    for k, label in enumerate(labels):
        edges = results[tags[0]].hist_edges[k]
        lines = [
            _header_line(seed),
            ",".join(["bin_lo", "bin_hi"] + [f"count_{tag}" for tag in tags]),
        ]
        for j in range(len(edges) - 1):
            row = [_fmt(edges[j]), _fmt(edges[j + 1])]
            row += [str(int(results[tag].hist_counts[k][j])) for tag in tags]
            lines.append(",".join(row))
        path = out_dir / f"hist_{label}.csv"
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    return written


def write_sa_tables(
    results: dict[str, SobolResult],
    labels: tuple[str, ...],
    out_dir: str | Path,
    seed: int,
) -> list[Path]:
    """One row per output, one column per input, one file per index kind."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for tag, res in results.items():
        for name, matrix in (
            ("s1", res.s1), ("st", res.st), ("s1_se", res.s1_se), ("st_se", res.st_se),
        ):
            lines = [
                _header_line(seed),
                ",".join(["output"] + list(INPUT_NAMES) + ["undefined"]),
            ]
            for k, label in enumerate(labels):
                row = [label] + [_fmt(matrix[i, k]) for i in range(matrix.shape[0])]
                row.append(str(int(res.undefined[k])))
                lines.append(",".join(row))
            path = out_dir / f"sa_{name}_{tag}.csv"
            path.write_text("\n".join(lines) + "\n")
            written.append(path)
    return written
