"""Command-line interface.

Subcommands: ``fit`` (estimate a model and write the archive plus
reports), ``predict`` (apply a saved model to new predictors), ``cv``
(grid-search cross-validation and refit at the best point), ``simulate``
(Monte-Carlo batches over a scenario grid), and ``compare`` (cross-validate
four methods on a training set and score them on a test set).

All inputs are headed CSV files with purely numeric cells; blank cells are
rejected. Every subcommand is deterministic given its flags, input files,
and seed. An optional JSON config file supplies flag defaults; explicit
flags win over config values.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
import pandas as pd

from .cross_validation import (
    ESTIMATOR_KINDS,
    SCORE_KINDS,
    CvConfig,
    build_estimator,
    grid_search,
)
from .exceptions import NonFiniteInput, TwoblockError
from .linalg import CENTER, SCALING_MODES
from .model_io import load_model, save_model
from .simulation import METRICS, SimScenario, plot_frames, run_batch
from .sparse import SparseTwoblockPLS, selection_report


def _read_block(path, label: str) -> pd.DataFrame:
    """Read a CSV data block, localizing the first offending cell on error."""
    try:
        # round-trip parsing keeps written-then-reread floats bitwise equal
        frame = pd.read_csv(path, float_precision="round_trip")
    except OSError as exc:
        raise TwoblockError(f"{label}: cannot read {path}: {exc}") from exc
    except Exception as exc:
        raise TwoblockError(f"{label}: {path} is not parseable CSV: {exc}") from exc
    if frame.shape[0] < 1 or frame.shape[1] < 1:
        raise TwoblockError(f"{label}: {path} has no data rows or columns")
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna()
    if bad.to_numpy().any():
        row = int(bad.any(axis=1).idxmax())
        col = bad.columns[int(bad.loc[row].to_numpy().argmax())]
        cell = frame.loc[row, col]
        what = "blank cell" if pd.isna(cell) else f"non-numeric cell {cell!r}"
        raise NonFiniteInput(
            f"{label}: {path} has a {what} at data row {row + 1}, column {col!r}"
        )
    return numeric.astype(np.float64)


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in str(text).split(",") if tok != ""]


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in str(text).split(",") if tok != ""]


def _method_slug(kind: str) -> str:
    return kind.replace("-", "_")


def _params_text(kind: str, params: dict) -> str:
    if kind == "pls1":
        h = params["h"]
        return "h=" + ",".join(str(v) for v in (h if isinstance(h, list) else [h]))
    if kind == "pls2":
        return f"h={params['h']}"
    return (
        f"g={params['g']}, h={params['h']}, "
        f"eta={params['eta']:g}, kappa={params['kappa']:g}"
    )


def _r_squared(actual: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    """Per-response 1 - SSE/SST with SST centered on ``actual`` means."""
    sse = ((actual - predicted) ** 2).sum(axis=0)
    sst = ((actual - actual.mean(axis=0)) ** 2).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return 1.0 - sse / sst


def _write_csv(frame: pd.DataFrame, path) -> None:
    frame.to_csv(path, index=False)


def _fit_summary(model, x: pd.DataFrame, y: pd.DataFrame) -> pd.DataFrame:
    predicted = model.predict(x)
    r2 = _r_squared(y.to_numpy(dtype=np.float64), predicted)
    if isinstance(model, SparseTwoblockPLS):
        achieved = f"g={model.n_components_y_},h={model.n_components_x_}"
        truncated = model.truncated_x_ or model.truncated_y_
    else:
        n = model.n_components_
        achieved = ",".join(str(v) for v in n) if isinstance(n, list) else str(n)
        truncated = model.truncated_
    return pd.DataFrame(
        {
            "response": list(y.columns),
            "train_r2": r2,
            "components_achieved": achieved,
            "truncated": truncated,
        }
    )


def _selection_frame(model: SparseTwoblockPLS) -> pd.DataFrame:
    report = selection_report(model)
    rows = []
    for name in report.selected_predictors:
        rows.append({"block": "x", "name": name, "selected": 1})
    for name in report.deselected_predictors:
        rows.append({"block": "x", "name": name, "selected": 0})
    for name in report.selected_responses:
        rows.append({"block": "y", "name": name, "selected": 1})
    for name in report.deselected_responses:
        rows.append({"block": "y", "name": name, "selected": 0})
    return pd.DataFrame(rows)


def cmd_fit(args) -> int:
    x = _read_block(args.x, "X")
    y = _read_block(args.y, "Y")
    out = _ensure_out(args.out)
    if args.method == "pls1":
        h = _int_list(args.h)
        h = h[0] if len(h) == 1 else h
    else:
        h = int(args.h)
    model = build_estimator(
        args.method, args.scaling, g=args.g, h=h, eta=args.eta, kappa=args.kappa
    )
    model.fit(x, y)
    save_model(model, out / "model.json")
    _write_csv(_fit_summary(model, x, y), out / "fit_summary.csv")
    if isinstance(model, SparseTwoblockPLS):
        _write_csv(_selection_frame(model), out / "selection.csv")
        counts = selection_report(model).deselected_counts
        print(
            f"fitted {args.method} ({_params_text(args.method, model.get_params())}); "
            f"deselected {counts[0]} predictors, {counts[1]} responses"
        )
    else:
        print(f"fitted {args.method}")
    print(f"outputs written to {out}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    x = _read_block(args.x, "X")
    out = _ensure_out(args.out)
    predicted = model.predict(x)
    names = model.response_names_ or [f"y{j + 1}" for j in range(predicted.shape[1])]
    _write_csv(pd.DataFrame(predicted, columns=names), out / "predictions.csv")
    print(f"wrote {len(x)} predictions to {out / 'predictions.csv'}")
    return 0


def _cv_config(args) -> CvConfig:
    return CvConfig(
        folds=args.folds,
        g_grid=tuple(_int_list(args.g_grid)),
        h_grid=tuple(_int_list(args.h_grid)),
        eta_grid=tuple(_float_list(args.eta_grid)),
        kappa_grid=tuple(_float_list(args.kappa_grid)),
        seed=args.seed,
        shuffle=not args.no_shuffle,
        score=args.score,
        scaling=args.scaling,
    )


def cmd_cv(args) -> int:
    x = _read_block(args.x, "X")
    y = _read_block(args.y, "Y")
    out = _ensure_out(args.out)
    report, model = grid_search(x, y, args.method, _cv_config(args))
    _write_csv(report.to_frame(), out / "cv_report.csv")
    save_model(model, out / "model.json")
    print(
        f"{args.method}: {_params_text(args.method, report.best_params)} "
        f"(cv score {report.best_score:.6g})"
    )
    print(f"outputs written to {out}")
    return 0


def cmd_simulate(args) -> int:
    out = _ensure_out(args.out)
    scenarios = [
        SimScenario(
            n=args.n,
            p1=p1,
            p2=args.p2,
            q1=args.q1,
            q2=args.q2,
            h_true=args.h_true,
            noise_sd=args.noise_sd,
        )
        for p1 in _int_list(args.p1)
    ]
    estimators = []
    for kind in [tok.strip() for tok in args.estimators.split(",") if tok.strip()]:
        if kind not in ESTIMATOR_KINDS:
            raise ValueError(
                f"unknown estimator {kind!r}; expected one of {ESTIMATOR_KINDS}"
            )
        estimators.append(
            (
                kind,
                build_estimator(
                    kind, args.scaling, g=args.g, h=int(args.h), eta=args.eta, kappa=args.kappa
                ),
            )
        )
    batch = run_batch(scenarios, estimators, args.runs, args.seed)
    _write_csv(batch, out / "metrics.csv")
    for metric, frame in plot_frames(batch).items():
        _write_csv(frame, out / f"plotdata_{metric}.csv")
    print(f"simulated {args.runs} runs x {len(scenarios)} scenarios x {len(estimators)} estimators")
    print(f"outputs written to {out}")
    return 0


def cmd_compare(args) -> int:
    train_x = _read_block(args.train_x, "train X")
    train_y = _read_block(args.train_y, "train Y")
    test_x = _read_block(args.test_x, "test X")
    test_y = _read_block(args.test_y, "test Y")
    out = _ensure_out(args.out)
    config = _cv_config(args)
    actual = test_y.to_numpy(dtype=np.float64)
    names = list(test_y.columns)
    rows = []
    for kind in ESTIMATOR_KINDS:
        report, model = grid_search(train_x, train_y, kind, config)
        predicted = model.predict(test_x)
        mse = ((actual - predicted) ** 2).mean(axis=0)
        r2 = _r_squared(actual, predicted)
        row = {"method": kind, "params": _params_text(kind, report.best_params)}
        for j, name in enumerate(names):
            row[f"mse_{name}"] = mse[j]
        row["mse_avg"] = float(mse.mean())
        for j, name in enumerate(names):
            row[f"r2_{name}"] = r2[j]
        row["r2_avg"] = float(r2.mean())
        rows.append(row)
        long = pd.DataFrame(
            {
                "response": np.repeat(names, actual.shape[0]),
                "actual": actual.T.ravel(),
                "predicted": predicted.T.ravel(),
            }
        )
        _write_csv(long, out / f"predicted_vs_actual_{_method_slug(kind)}.csv")
        save_model(model, out / f"model_{_method_slug(kind)}.json")
    table = pd.DataFrame(rows)
    _write_csv(table, out / "compare_table.csv")
    with pd.option_context("display.width", 200, "display.max_columns", 50):
        print(table.to_string(index=False))
    print(f"outputs written to {out}")
    return 0


def _ensure_out(path):
    from pathlib import Path

    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="random seed (unsigned 64-bit)")
    parser.add_argument(
        "--scaling",
        choices=list(SCALING_MODES),
        default=CENTER,
        help="column preprocessing for both blocks",
    )
    parser.add_argument("--config", default=None, help="JSON file with flag defaults")


def _add_estimator_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--g", type=int, default=1, help="response components (twoblock)")
    parser.add_argument(
        "--h", default="1", help="predictor components; comma list allowed for pls1"
    )
    parser.add_argument("--eta", type=float, default=0.0, help="predictor sparsity in [0,1)")
    parser.add_argument("--kappa", type=float, default=0.0, help="response sparsity in [0,1)")


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--folds", type=int, default=10, help="cross-validation folds")
    parser.add_argument("--g-grid", default="1", help="comma list of g candidates")
    parser.add_argument("--h-grid", default="1", help="comma list of h candidates")
    parser.add_argument("--eta-grid", default="0", help="comma list of eta candidates")
    parser.add_argument("--kappa-grid", default="0", help="comma list of kappa candidates")
    parser.add_argument("--score", choices=list(SCORE_KINDS), default="mean-mse")
    parser.add_argument(
        "--no-shuffle", action="store_true", help="assign folds in row order without shuffling"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twoblock",
        description="Sparse twoblock partial least squares: fitting, prediction, "
        "cross-validation, simulation, and method comparison.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit one model and write its archive and reports")
    fit.add_argument("--x", required=True, help="predictor CSV")
    fit.add_argument("--y", required=True, help="response CSV")
    fit.add_argument("--method", choices=list(ESTIMATOR_KINDS), default="sparse-twoblock")
    _add_estimator_params(fit)
    _add_common(fit)
    fit.set_defaults(handler=cmd_fit)

    predict = sub.add_parser("predict", help="apply a saved model to new predictors")
    predict.add_argument("--model", required=True, help="model archive path")
    predict.add_argument("--x", required=True, help="predictor CSV")
    _add_common(predict)
    predict.set_defaults(handler=cmd_predict)

    cv = sub.add_parser("cv", help="grid-search cross-validation and refit the best point")
    cv.add_argument("--x", required=True)
    cv.add_argument("--y", required=True)
    cv.add_argument("--method", choices=list(ESTIMATOR_KINDS), default="sparse-twoblock")
    _add_grid_flags(cv)
    _add_common(cv)
    cv.set_defaults(handler=cmd_cv)

    simulate = sub.add_parser("simulate", help="Monte-Carlo comparison over a scenario grid")
    simulate.add_argument("--runs", type=int, default=100)
    simulate.add_argument("--n", type=int, default=100)
    simulate.add_argument("--p1", default="100", help="comma list: informative predictors per scenario")
    simulate.add_argument("--p2", type=int, default=200)
    simulate.add_argument("--q1", type=int, default=3)
    simulate.add_argument("--q2", type=int, default=2)
    simulate.add_argument("--h-true", type=int, default=3)
    simulate.add_argument("--noise-sd", type=float, default=0.1)
    simulate.add_argument(
        "--estimators",
        default="sparse-twoblock,pls2",
        help="comma list of estimators to compare",
    )
    _add_estimator_params(simulate)
    _add_common(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    compare = sub.add_parser(
        "compare", help="cross-validate all four methods on a train set, score on a test set"
    )
    compare.add_argument("--train-x", required=True)
    compare.add_argument("--train-y", required=True)
    compare.add_argument("--test-x", required=True)
    compare.add_argument("--test-y", required=True)
    _add_grid_flags(compare)
    _add_common(compare)
    compare.set_defaults(handler=cmd_compare)

    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Inject config-file values as trailing flags; explicit flags win."""
    if "--config" not in argv:
        return argv
    path = argv[argv.index("--config") + 1]
    try:
        with open(path, "r", encoding="utf-8") as handle:
            config = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise TwoblockError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise TwoblockError(f"config file {path} must hold a JSON object")
    extra: list[str] = []
    for key, value in config.items():
        flag = "--" + str(key).replace("_", "-").lstrip("-")
        if flag in argv:
            continue
        if isinstance(value, bool):
            if value:
                extra.append(flag)
        elif isinstance(value, list):
            extra.extend([flag, ",".join(str(v) for v in value)])
        else:
            extra.extend([flag, str(value)])
    return argv + extra


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except (TwoblockError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
