"""Command-line client for the toolkit.

Each subcommand builds a service request and executes it either in-process
(default) or against a running server (--server URL), then prints a short
summary. All heavy lifting lives behind the service layer, so the CLI and the
HTTP API expose exactly the same behavior.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import SpentFuelError
from .service import ops
from .service import schemas as s

_ENDPOINTS = {
    "/generate": (ops.generate, s.GenerateResponse),
    "/tune": (ops.tune, s.TuneResponse),
    "/train": (ops.train, s.TrainResponse),
    "/predict": (ops.predict, s.PredictResponse),
    "/uq": (ops.uq, s.UqResponse),
    "/sa": (ops.sa, s.SaResponse),
    "/bench": (ops.run_bench, s.BenchResponse),
    "/compare": (ops.compare, s.CompareResponse),
}


def _call(server: str | None, path: str, request):
    fn, resp_model = _ENDPOINTS[path]
    if server is None:
        return fn(request)
    import httpx

    reply = httpx.post(
        server.rstrip("/") + path, json=request.model_dump(), timeout=None
    )
    if reply.status_code != 200:
        try:
            detail = reply.json().get("detail", reply.text)
        except ValueError:
            detail = reply.text
        raise SpentFuelError(f"server returned {reply.status_code}: {detail}")
    return resp_model.model_validate(reply.json())


def _require_file(parser: argparse.ArgumentParser, path: str, what: str) -> None:
    if not Path(path).is_file():
        parser.error(f"{what} not found: {path}")


def _parse_center(parser: argparse.ArgumentParser, text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        parser.error(f"--center must be 5 comma-separated numbers, got {text!r}")
    if len(values) != 5:
        parser.error(f"--center must carry 5 values, got {len(values)}")
    return values


def _load_config(parser: argparse.ArgumentParser, path: str | None) -> dict:
    if path is None:
        return {}
    _require_file(parser, path, "config file")
    try:
        cfg = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        parser.error(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        parser.error(f"config file {path} must hold a JSON object")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spentfuel",
        description="Surrogate-based spent-fuel characterization pipeline.",
    )
    parser.add_argument("--version", action="version", version=f"spentfuel {__version__}")
    parser.add_argument(
        "--server", default=None, metavar="URL",
        help="send the request to a running service instead of running in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample inputs and label them with the depletion model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--chain", default=None, help="override the nuclide-chain data file")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("tune", help="random search over the hyperparameter space")
    p.add_argument("--data", required=True)
    p.add_argument("--budget", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="trial log path (one JSON record per trial)")
    p.add_argument("--config", default=None, help="JSON file with space/split overrides")
    p.add_argument("--max-seconds", type=float, default=None, help="wall-clock cap per trial")

    p = sub.add_parser("train", help="train one surrogate and save it")
    p.add_argument("--data", required=True)
    p.add_argument("--config", default=None, help="JSON file with training settings")
    p.add_argument("--out", required=True, help="model output path")

    p = sub.add_parser("predict", help="evaluate a trained surrogate")
    p.add_argument("--model", required=True)
    p.add_argument("--input", default=None, help="enrichment,burnup,fuel_temp,boron,cooling_days")
    p.add_argument("--input-csv", default=None, help="CSV whose first five columns are inputs")

    p = sub.add_parser("uq", help="Monte-Carlo uncertainty quantification")
    p.add_argument("--model", default=None)
    p.add_argument("--oracle", action="store_true", help="also (or only) run the depletion model")
    p.add_argument("--center", default=None, help="five comma-separated input values")
    p.add_argument("--rel-std", type=float, default=0.05)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory for tables and histograms")
    p.add_argument("--chain", default=None)
    p.add_argument("--resamples", type=int, default=1000)

    p = sub.add_parser("sa", help="Sobol' sensitivity analysis")
    p.add_argument("--model", default=None)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--center", default=None)
    p.add_argument("--rel-std", type=float, default=0.05)
    p.add_argument("--n-base", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--chain", default=None)
    p.add_argument("--resamples", type=int, default=200)

    p = sub.add_parser("bench", help="measure time constants and the amortized speedup")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=5072, help="evaluation count for the speedup")
    p.add_argument("--probes", type=int, default=10)
    p.add_argument("--n-train", type=int, default=500)
    p.add_argument("--chain", default=None)

    p = sub.add_parser("compare", help="calculated-vs-measured decay heat (C/E)")
    p.add_argument("--pred", required=True, help="CSV: assembly_id,decay_heat_W_per_tU")
    p.add_argument("--meas", required=True,
                   help="CSV: assembly_id,group,cooling_years,decay_heat_W_per_tU")
    p.add_argument("--out", default=None, help="prefix for the report files")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_gen(parser, args):
    if args.chain:
        _require_file(parser, args.chain, "chain file")
    if args.n <= 0:
        parser.error(f"--n must be positive, got {args.n}")
    req = s.GenerateRequest(
        n=args.n, seed=args.seed, out_path=args.out, chain_path=args.chain,
        workers=args.workers,
    )
    resp = _call(args.server, "/generate", req)
    print(f"wrote {resp.rows} rows to {resp.out_path} (sidecar {resp.meta_path})")


def _cmd_tune(parser, args):
    _require_file(parser, args.data, "dataset")
    if args.budget < 1:
        parser.error(f"--budget must be >= 1, got {args.budget}")
    cfg = _load_config(parser, args.config)
    space = s.SpaceOverrides(**cfg.get("space", {})) if "space" in cfg else None
    split = s.SplitSettings(**cfg.get("split", {})) if "split" in cfg else s.SplitSettings()
    req = s.TuneRequest(
        data_path=args.data, budget=args.budget, seed=args.seed, log_path=args.out,
        space=space, split=split, patience=int(cfg.get("patience", 50)),
        max_seconds_per_trial=args.max_seconds,
    )
    resp = _call(args.server, "/tune", req)
    b = resp.best
    print(
        f"best trial {b.index}: layers={b.hidden_layers} dim={b.hidden_dim} "
        f"lr={b.learning_rate:.3g} batch={b.batch_size} objective={b.objective:.6g}"
    )
    print(f"trial log: {resp.log_path}")


def _cmd_train(parser, args):
    _require_file(parser, args.data, "dataset")
    cfg = _load_config(parser, args.config)
    split = s.SplitSettings(**cfg.pop("split", {}))
    try:
        settings = s.TrainSettings(**cfg)
    except Exception as exc:
        parser.error(f"bad training config: {exc}")
    req = s.TrainRequest(
        data_path=args.data, out_path=args.out, settings=settings, split=split
    )
    resp = _call(args.server, "/train", req)
    print(
        f"trained to epoch {resp.stopped_epoch} (best {resp.best_epoch}); "
        f"val mse {resp.val_mse:.6g}, test mse {resp.test_mse:.6g}, "
        f"test R^2 {resp.test_r2:.5f}"
    )
    print(f"model: {resp.model_path}")


def _cmd_predict(parser, args):
    _require_file(parser, args.model, "model")
    if (args.input is None) == (args.input_csv is None):
        parser.error("predict needs exactly one of --input or --input-csv")
    if args.input is not None:
        rows = [_parse_center(parser, args.input)]
    else:
        _require_file(parser, args.input_csv, "input CSV")
        rows = []
        for lineno, line in enumerate(Path(args.input_csv).read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            try:
                rows.append([float(v) for v in fields[:5]])
            except ValueError:
                if lineno == 1 or (rows == [] and lineno <= 2):
                    continue  # header row
                parser.error(f"{args.input_csv}: bad numbers on line {lineno}")
        if not rows:
            parser.error(f"{args.input_csv}: no input rows")
    req = s.PredictRequest(model_path=args.model, inputs=rows)
    resp = _call(args.server, "/predict", req)
    for r, row in enumerate(resp.predictions):
        if len(resp.predictions) > 1:
            print(f"# row {r}")
        for label, value in zip(resp.labels, row):
            print(f"{label},{value!r}")
    print(f"# seconds_per_prediction={resp.seconds_per_prediction:.3g}", file=sys.stderr)


def _uq_sa_common(parser, args):
    if args.model is None and not args.oracle:
        parser.error("choose --model PATH, --oracle, or both")
    if args.model:
        _require_file(parser, args.model, "model")
    if args.chain:
        _require_file(parser, args.chain, "chain file")
    center = (
        list(s.DEFAULT_CENTER) if args.center is None else _parse_center(parser, args.center)
    )
    return center


def _cmd_uq(parser, args):
    center = _uq_sa_common(parser, args)
    req = s.UqRequest(
        model_path=args.model, use_oracle=args.oracle, center=center,
        rel_std=args.rel_std, n_samples=args.n, seed=args.seed, out_dir=args.out,
        chain_path=args.chain, bootstrap_resamples=args.resamples,
    )
    resp = _call(args.server, "/uq", req)
    print(f"evaluators: {', '.join(resp.evaluators)}; samples: {resp.n_samples}")
    print(f"wrote {len(resp.files)} files under {args.out}")


def _cmd_sa(parser, args):
    center = _uq_sa_common(parser, args)
    req = s.SaRequest(
        model_path=args.model, use_oracle=args.oracle, center=center,
        rel_std=args.rel_std, n_base=args.n_base, seed=args.seed, out_dir=args.out,
        chain_path=args.chain, bootstrap_resamples=args.resamples,
    )
    resp = _call(args.server, "/sa", req)
    print(
        f"evaluators: {', '.join(resp.evaluators)}; "
        f"{resp.n_evaluations} evaluations (n_base {resp.n_base})"
    )
    for table in resp.tables:
        flag = "yes" if table.burnup_has_largest_total_order_for_decay_heat else "no"
        print(f"{table.evaluator}: burnup dominates decay-heat total-order indices: {flag}")
    print(f"wrote {len(resp.files)} files under {args.out}")


def _cmd_bench(parser, args):
    _require_file(parser, args.model, "model")
    if args.chain:
        _require_file(parser, args.chain, "chain file")
    req = s.BenchRequest(
        model_path=args.model, n=args.n, probes=args.probes, n_train=args.n_train,
        chain_path=args.chain,
    )
    resp = _call(args.server, "/bench", req)
    print(f"t_oracle = {resp.t_oracle:.4g} s (std {resp.t_oracle_std:.2g})")
    print(f"t_eval   = {resp.t_eval:.4g} s (std {resp.t_eval_std:.2g})")
    print(f"t_train  = {resp.t_train:.4g} s, n_train = {resp.n_train}")
    print(f"speedup({resp.n}) = {resp.speedup_at_n:.3f}, break-even n = {resp.break_even_n:.1f}")


def _cmd_compare(parser, args):
    _require_file(parser, args.pred, "prediction file")
    _require_file(parser, args.meas, "measurement file")
    req = s.CompareRequest(pred_path=args.pred, meas_path=args.meas, out_prefix=args.out)
    resp = _call(args.server, "/compare", req)
    print(f"{resp.n_records} records")
    for group, bias in resp.group_bias_pct.items():
        print(f"bias[{group}] = {bias:+.3f}%")
    print(f"bias[all] = {resp.overall_bias_pct:+.3f}%")
    for f in resp.files:
        print(f"wrote {f}")


def _cmd_serve(_parser, args):
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)


_HANDLERS = {
    "gen": _cmd_gen,
    "tune": _cmd_tune,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "uq": _cmd_uq,
    "sa": _cmd_sa,
    "bench": _cmd_bench,
    "compare": _cmd_compare,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _HANDLERS[args.command](parser, args)
    except SpentFuelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
