"""Service operations: every endpoint body lives here as a plain function.

The CLI calls these directly (in-process) and the FastAPI app exposes them
over HTTP, so both fronts share one implementation and one contract.
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from .. import __version__, analysis, bench, dataset, mlp, tuner
from ..history import INPUT_NAMES, AssemblyInput
from ..oracle import DECAY_HEAT_LABELS, output_labels
from . import schemas as s


def health() -> s.HealthResponse:
    return s.HealthResponse(
        status="ok",
        tool_version=__version__,
        chain_version=dataset.default_chain().version,
    )


def generate(req: s.GenerateRequest) -> s.GenerateResponse:
    chain = dataset.resolve_chain(req.chain_path)
    ds = dataset.generate(req.n, seed=req.seed, chain=chain, workers=req.workers)
    meta_path = dataset.save(ds, req.out_path, chain=chain)
    return s.GenerateResponse(
        rows=ds.n, out_path=str(req.out_path), meta_path=str(meta_path), seed=req.seed
    )


def _make_space(overrides: s.SpaceOverrides | None) -> tuner.SearchSpace:
    if overrides is None:
        return tuner.SearchSpace()
    base = tuner.SearchSpace()
    return tuner.SearchSpace(
        hidden_layers=overrides.hidden_layers or base.hidden_layers,
        hidden_dim=overrides.hidden_dim or base.hidden_dim,
        learning_rate=overrides.learning_rate or base.learning_rate,
        batch_sizes=tuple(overrides.batch_sizes) if overrides.batch_sizes else base.batch_sizes,
        max_epochs=overrides.max_epochs or base.max_epochs,
    )


def _split(ds: dataset.Dataset, cfg: s.SplitSettings) -> dataset.Splits:
    spec = dataset.SplitSpec(
        test_count=cfg.test_count, val_fraction=cfg.val_fraction, seed=cfg.seed
    )
    return dataset.split(ds, spec)


def _trial_info(t: tuner.Trial) -> s.TrialInfo:
    rec = t.record()
    return s.TrialInfo(
        index=rec["trial"],
        seed=rec["seed"],
        hidden_layers=rec["hidden_layers"],
        hidden_dim=rec["hidden_dim"],
        learning_rate=rec["learning_rate"],
        batch_size=rec["batch_size"],
        objective=rec["objective"],
        stopped_epoch=rec["stopped_epoch"],
        diverged=rec["diverged"],
    )


def tune(req: s.TuneRequest) -> s.TuneResponse:
    ds = dataset.load(req.data_path)
    splits = _split(ds, req.split)
    best, trials, _model = tuner.search(
        ds,
        splits,
        space=_make_space(req.space),
        budget=req.budget,
        seed=req.seed,
        patience=req.patience,
        max_seconds_per_trial=req.max_seconds_per_trial,
        log_path=req.log_path,
    )
    return s.TuneResponse(
        best=_trial_info(best),
        trials=[_trial_info(t) for t in trials],
        log_path=req.log_path,
    )


def train(req: s.TrainRequest) -> s.TrainResponse:
    ds = dataset.load(req.data_path)
    splits = _split(ds, req.split)
    cfg = req.settings
    arch = mlp.MlpArchitecture(hidden_layers=cfg.hidden_layers, hidden_dim=cfg.hidden_dim)
    config = mlp.TrainConfig(
        learning_rate=cfg.learning_rate,
        batch_size=cfg.batch_size,
        max_epochs=cfg.max_epochs,
        patience=cfg.patience,
        seed=cfg.seed,
        max_seconds=cfg.max_seconds,
    )
    model, report = mlp.train(ds, splits, arch, config)
    stats = model.norm_stats
    pred_n = mlp.forward(model, dataset.normalize_inputs(ds.inputs[splits.test], stats))
    target_n = dataset.normalize_outputs(ds.outputs[splits.test], stats)
    test_mse = mlp.mse(pred_n, target_n)
    test_r2 = mlp.r2(pred_n, target_n)
    mlp.save_model(model, req.out_path)
    return s.TrainResponse(
        model_path=str(req.out_path),
        stopped_epoch=report.stopped_epoch,
        best_epoch=report.best_epoch,
        val_mse=report.best_val_mse,
        trailing_val_mse=report.trailing_val_mse,
        test_mse=test_mse,
        test_r2=test_r2,
        train_seconds=float(model.train_seconds or 0.0),
    )


def predict(req: s.PredictRequest) -> s.PredictResponse:
    model = mlp.load_model(req.model_path)
    x = np.asarray(req.inputs, dtype=float)
    for row in x:  # reject rows no oracle input would accept
        AssemblyInput.from_vector(row)
    t0 = time.perf_counter()
    y = mlp.predict(model, x)
    per_call = (time.perf_counter() - t0) / x.shape[0]
    return s.PredictResponse(
        labels=list(output_labels()),
        predictions=[[float(v) for v in row] for row in np.atleast_2d(y)],
        seconds_per_prediction=per_call,
    )


def _evaluators(model_path, use_oracle, chain_path):
    evaluators: dict[str, analysis.Evaluator] = {}
    if use_oracle:
        chain = dataset.resolve_chain(chain_path)
        evaluators["oracle"] = analysis.oracle_evaluator(chain)
    if model_path is not None:
        model = mlp.load_model(model_path)
        evaluators["surrogate"] = analysis.model_evaluator(model)
    if not evaluators:
        raise ValueError("choose a model path, the oracle, or both")
    return evaluators


def uq(req: s.UqRequest) -> s.UqResponse:
    evaluators = _evaluators(req.model_path, req.use_oracle, req.chain_path)
    spec = analysis.UqSpec(
        center=AssemblyInput.from_vector(req.center),
        rel_std=req.rel_std,
        n_samples=req.n_samples,
        seed=req.seed,
    )
    results = analysis.paired_uq(evaluators, spec, bootstrap_resamples=req.bootstrap_resamples)
    labels = output_labels()
    files = analysis.write_uq_tables(results, labels, req.out_dir, seed=req.seed)
    summary = [
        s.UqRow(
            output=labels[k],
            evaluator=tag,
            mean=float(r.mean[k]),
            std=float(r.std[k]),
            rel_std=float(r.rel_std[k]),
            boot_mean_std=float(r.boot_mean_std[k]),
            boot_var_std=float(r.boot_var_std[k]),
        )
        for tag, r in results.items()
        for k in range(len(labels))
    ]
    return s.UqResponse(
        evaluators=list(results),
        n_samples=spec.n_samples,
        summary=summary,
        files=[str(p) for p in files],
    )


def sa(req: s.SaRequest) -> s.SaResponse:
    evaluators = _evaluators(req.model_path, req.use_oracle, req.chain_path)
    spec = analysis.UqSpec(
        center=AssemblyInput.from_vector(req.center),
        rel_std=req.rel_std,
        n_samples=2,  # unused by the Saltelli path
        seed=req.seed,
    )
    x, plan = analysis.saltelli_sample(req.n_base, spec)
    labels = output_labels()
    i_burnup = INPUT_NAMES.index("burnup_MWdkgU")
    dh_cols = [labels.index(lab) for lab in DECAY_HEAT_LABELS]
    results: dict[str, analysis.SobolResult] = {}
    tables = []
    for tag, fn in evaluators.items():
        res = analysis.sobol_indices(
            analysis.evaluate_rows(fn, x),
            plan,
            bootstrap_resamples=req.bootstrap_resamples,
            seed=req.seed,
            evaluator_tag=tag,
        )
        results[tag] = res
        st_dh = res.st[:, dh_cols]
        burnup_top = bool(np.all(st_dh.argmax(axis=0) == i_burnup))
        tables.append(
            s.SaIndexTable(
                evaluator=tag,
                s1=res.s1.tolist(),
                st=res.st.tolist(),
                s1_se=res.s1_se.tolist(),
                st_se=res.st_se.tolist(),
                undefined_outputs=[labels[k] for k in np.flatnonzero(res.undefined)],
                burnup_has_largest_total_order_for_decay_heat=burnup_top,
            )
        )
    files = analysis.write_sa_tables(results, labels, req.out_dir, seed=req.seed)
    return s.SaResponse(
        evaluators=list(results),
        n_base=req.n_base,
        n_evaluations=plan.n_total,
        input_names=list(INPUT_NAMES),
        output_labels=list(labels),
        tables=tables,
        files=[str(p) for p in files],
    )


def run_bench(req: s.BenchRequest) -> s.BenchResponse:
    model = mlp.load_model(req.model_path)
    chain = dataset.resolve_chain(req.chain_path)
    constants = bench.measure_times(
        model, n_probe=req.probes, chain=chain, n_train=req.n_train, seed=req.seed
    )
    return s.BenchResponse(
        t_oracle=constants.t_oracle,
        t_oracle_std=constants.t_oracle_std,
        t_train=constants.t_train,
        t_eval=constants.t_eval,
        t_eval_std=constants.t_eval_std,
        n_train=constants.n_train,
        speedup_at_n=bench.speedup(req.n, constants),
        n=req.n,
        break_even_n=bench.break_even(constants),
    )


def compare(req: s.CompareRequest) -> s.CompareResponse:
    predictions = bench.load_predictions(req.pred_path)
    measurements = bench.load_measurements(req.meas_path)
    report = bench.ce_compare(predictions, measurements)
    files: list[Path] = []
    if req.out_prefix:
        files = bench.write_ce_report(report, req.out_prefix)
    return s.CompareResponse(
        n_records=len(report.records),
        records=[
            s.CeRecordRow(
                assembly_id=m.assembly_id,
                group=m.group,
                cooling_years=m.cooling_years,
                measured=m.decay_heat,
                calculated=pred,
                ratio=ratio,
            )
            for m, pred, ratio in report.records
        ],
        group_bias_pct=report.group_bias_pct,
        overall_bias_pct=report.overall_bias_pct,
        files=[str(p) for p in files],
    )
