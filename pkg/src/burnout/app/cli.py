"""Command-line entry points.

Subcommands: synth, eda, train, compare, predict, serve.  Exit codes:
0 success, 1 validation problem (bad flags, bad data, bad request),
2 I/O failure (missing or unwritable files).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from ..dataset import (
    IMPUTE_MEDIAN,
    STRATEGIES,
    apply_preprocess,
    encode_supervised,
    fit_preprocess,
    generate_synthetic,
    load_csv,
    write_csv,
)
from ..evaluation import (
    MODEL_KINDS,
    ModelSpec,
    compare_models,
    cross_validate,
    fit_model,
    make_folds,
)
from ..models import SvrModel
from ..modelstore import Bundle, load_bundle, save_bundle
from ..stats import eda_report
from .pipeline import predict_pipeline, validate_request
from .service import create_app

DEFAULT_PORT = 8600
BUNDLE_ENV = "BURNOUT_BUNDLE"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="burnout",
        description="Employee burnout regression workbench.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="emit a synthetic CSV dataset")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eda", help="emit an exploratory statistics report")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", help="report path (default: stdout)")

    p = sub.add_parser("train", help="fit one model and write a bundle")
    p.add_argument("--csv", required=True)
    p.add_argument("--model", choices=MODEL_KINDS, required=True)
    p.add_argument("--out", default="model.bnl.json")
    p.add_argument("--strategy", choices=STRATEGIES, default=IMPUTE_MEDIAN)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cv-folds", type=int, default=5,
                   help="folds for the recorded mean CV score; 0 skips")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--gamma", type=float, help="RBF width (default: 1/(d*mean var))")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--n-trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=16, help="0 means unlimited")
    p.add_argument("--min-samples-leaf", type=int, default=2)
    p.add_argument("--max-features", type=int, help="default: d // 3")

    p = sub.add_parser("compare", help="cross-validate all models and test pairs")
    p.add_argument("--csv", required=True)
    p.add_argument("--folds", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", default="comparison.json")
    p.add_argument("--models", default="knn,forest,svr",
                   help="comma-separated subset of knn,forest,svr")
    p.add_argument("--strategy", choices=STRATEGIES, default=IMPUTE_MEDIAN)
    p.add_argument("--global-scaler", action="store_true",
                   help="standardize once before splitting instead of per fold")

    p = sub.add_parser("predict", help="one-shot prediction from flags")
    p.add_argument("--bundle", help=f"bundle path (default: ${BUNDLE_ENV})")
    p.add_argument("--designation", type=int, required=True)
    p.add_argument("--resource", type=int, required=True)
    p.add_argument("--fatigue", type=float, required=True)
    p.add_argument("--gender", required=True)
    p.add_argument("--company", required=True)
    p.add_argument("--wfh", required=True)

    p = sub.add_parser("serve", help="start the HTTP prediction service")
    p.add_argument("--bundle", help=f"bundle path (default: ${BUNDLE_ENV})")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory of built UI assets to serve at /")
    return parser


def _bundle_path(args: argparse.Namespace) -> str:
    path = args.bundle or os.environ.get(BUNDLE_ENV)
    if not path:
        raise ValueError(f"no bundle given: pass --bundle or set {BUNDLE_ENV}")
    return path


def _model_params(args: argparse.Namespace) -> dict:
    if args.model == "svr":
        params: dict = {"c": args.c, "epsilon": args.epsilon, "seed": args.seed}
        if args.gamma is not None:
            params["gamma"] = args.gamma
        return params
    if args.model == "forest":
        return {
            "n_trees": args.n_trees,
            "max_depth": None if args.max_depth == 0 else args.max_depth,
            "min_samples_leaf": args.min_samples_leaf,
            "max_features": args.max_features,
            "seed": args.seed,
        }
    return {"k": args.k}


def _cmd_synth(args: argparse.Namespace) -> int:
    table = generate_synthetic(args.rows, args.seed)
    write_csv(table, args.out)
    print(f"wrote {len(table.records)} rows to {args.out}")
    return 0


def _cmd_eda(args: argparse.Namespace) -> int:
    report = eda_report(load_csv(args.csv))
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=False)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote report to {args.out}")
    else:
        print(text)
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    table = load_csv(args.csv)
    params = fit_preprocess(table, strategy=args.strategy)
    spec = ModelSpec(name=args.model, kind=args.model, params=_model_params(args))
    mean_cv = None
    if args.cv_folds:
        raw_features, targets = encode_supervised(table, params)
        plan = make_folds(len(targets), args.cv_folds, args.seed)
        mean_cv = cross_validate(spec, raw_features, targets, plan).mean_r2
    scaled, targets = apply_preprocess(table, params)
    model = fit_model(spec, scaled, targets)
    meta = {
        "n_rows": int(targets.size),
        "mean_cv_r2": mean_cv,
        "c": model.c if isinstance(model, SvrModel) else None,
        "epsilon": model.epsilon if isinstance(model, SvrModel) else None,
        "gamma": model.kernel.gamma if isinstance(model, SvrModel) else None,
        "seed": args.seed,
    }
    save_bundle(Bundle(model=model, preprocess=params, training_meta=meta), args.out)
    print(f"wrote {args.model} bundle to {args.out}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    kinds = [k.strip() for k in args.models.split(",") if k.strip()]
    unknown = [k for k in kinds if k not in MODEL_KINDS]
    if unknown:
        raise ValueError(f"unknown models: {', '.join(unknown)}")
    table = load_csv(args.csv)
    params = fit_preprocess(table, strategy=args.strategy)
    features, targets = encode_supervised(table, params)
    plan = make_folds(len(targets), args.folds, args.seed)
    report = compare_models(
        [ModelSpec(name=k, kind=k) for k in kinds],
        features,
        targets,
        plan,
        alpha=args.alpha,
        refit_scaler=not args.global_scaler,
    )
    Path(args.out).write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for cv in report.cv_reports:
        flags = f" ({len(cv.flagged_folds)} folds flagged)" if cv.flagged_folds else ""
        print(f"{cv.model_name}: mean R^2 = {cv.mean_r2:.4f} (sd {cv.std_r2:.4f}){flags}")
    for pair in report.pairwise:
        if pair.indistinguishable:
            print(f"{pair.model_a} vs {pair.model_b}: indistinguishable")
        else:
            mark = "significant" if pair.significant else "not significant"
            print(
                f"{pair.model_a} vs {pair.model_b}: "
                f"t = {pair.t:.3f}, p = {pair.p_value:.4f} ({mark})"
            )
    print(f"wrote report to {args.out}")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    bundle = load_bundle(_bundle_path(args))
    request = validate_request(
        {
            "designation": args.designation,
            "resource_allocation": args.resource,
            "mental_fatigue_score": args.fatigue,
            "gender": args.gender,
            "company_type": args.company,
            "wfh_setup": args.wfh,
        }
    )
    response = predict_pipeline(bundle, request)
    print(json.dumps(response.to_dict(), sort_keys=True))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    path = args.bundle or os.environ.get(BUNDLE_ENV)
    static = args.static
    if static is None:
        candidate = Path(__file__).resolve().parents[3] / "frontend" / "dist"
        static = candidate if candidate.is_dir() else None
    app = create_app(bundle_path=path, static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_HANDLERS = {
    "synth": _cmd_synth,
    "eda": _cmd_eda,
    "train": _cmd_train,
    "compare": _cmd_compare,
    "predict": _cmd_predict,
    "serve": _cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help; anything else is a usage error.
        return 0 if exc.code == 0 else 1
    try:
        return _HANDLERS[args.command](args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
