"""K-fold grid-search hyperparameter selection.

Folds come from a seeded shuffle followed by contiguous blocks, so a fixed
seed reproduces the assignment exactly. Every grid point is scored by
fold-averaged mean squared prediction error, averaged across responses;
the standardized variant first divides each response's squared errors by
that response's training-fold variance, which makes mixed-unit responses
commensurable. Centering and scaling happen inside each fold's fit, so
held-out rows never leak into preprocessing.

The selected point minimizes the score; exact ties break toward the most
parsimonious, sparsest model (smallest h, then smallest g, then largest
eta, then largest kappa). PLS1 is special-cased: each response gets its
own component count, selected independently on the same folds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .exceptions import AllPointsInfeasible, TooFewRows, TwoblockError
from .linalg import CENTER, SCALING_MODES
from .nipals import NipalsPLS, Pls1Set
from .sparse import SparseTwoblockPLS
from .validation import as_matrix, check_matching_rows

ESTIMATOR_KINDS = ("pls1", "pls2", "xypls", "sparse-twoblock")
SCORE_KINDS = ("mean-mse", "standardized-mean-mse")

# Training-fold response variances below this cannot standardize errors.
MIN_STANDARDIZING_VARIANCE = 1e-14


def build_estimator(kind: str, scaling: str = CENTER, g=1, h=1, eta=0.0, kappa=0.0):
    """Construct an unfitted estimator for one of the four method names.

    ``xypls`` is the dense twoblock model: the sparse estimator with both
    sparsity parameters pinned to zero. For ``pls1``, ``h`` may be a
    single count or one count per response.
    """
    if kind == "pls1":
        return Pls1Set(n_components=h, scaling=scaling)
    if kind == "pls2":
        return NipalsPLS(n_components=h, scaling=scaling)
    if kind == "xypls":
        return SparseTwoblockPLS(g=g, h=h, eta=0.0, kappa=0.0, scaling=scaling)
    if kind == "sparse-twoblock":
        return SparseTwoblockPLS(g=g, h=h, eta=eta, kappa=kappa, scaling=scaling)
    raise ValueError(f"unknown estimator kind {kind!r}; expected one of {ESTIMATOR_KINDS}")


@dataclass(frozen=True)
class CvConfig:
    """Grid-search configuration."""

    folds: int = 10
    g_grid: tuple = (1,)
    h_grid: tuple = (1,)
    eta_grid: tuple = (0.0,)
    kappa_grid: tuple = (0.0,)
    seed: int = 0
    shuffle: bool = True
    score: str = "mean-mse"
    scaling: str = CENTER

    def validate(self) -> None:
        if not isinstance(self.folds, (int, np.integer)) or self.folds < 2:
            raise ValueError(f"folds must be an integer >= 2, got {self.folds!r}")
        for label in ("g_grid", "h_grid", "eta_grid", "kappa_grid"):
            if len(getattr(self, label)) == 0:
                raise ValueError(f"{label} must not be empty")
        for label in ("eta_grid", "kappa_grid"):
            bad = [v for v in getattr(self, label) if not 0.0 <= v < 1.0]
            if bad:
                raise ValueError(f"{label} values must lie in [0, 1), got {bad}")
        if self.score not in SCORE_KINDS:
            raise ValueError(f"score must be one of {SCORE_KINDS}, got {self.score!r}")
        if self.scaling not in SCALING_MODES:
            raise ValueError(f"scaling must be one of {SCALING_MODES}, got {self.scaling!r}")


@dataclass
class CvPoint:
    """Outcome of one grid point."""

    params: dict
    per_response: dict | None
    score: float | None
    feasible: bool
    reason: str | None = None
    selected: bool = False


@dataclass
class CvReport:
    """Full cross-validation record."""

    per_point: list
    best_params: dict
    best_score: float
    fold_assignment: np.ndarray
    refit_train_score: float
    score_kind: str
    estimator_kind: str
    response_names: list = field(default_factory=list)
    selected_per_response: dict | None = None

    def to_frame(self) -> pd.DataFrame:
        """One row per (grid point, response) plus per-point summary rows."""
        rows = []
        for point in self.per_point:
            base = {
                "g": point.params.get("g"),
                "h": point.params.get("h"),
                "eta": point.params.get("eta"),
                "kappa": point.params.get("kappa"),
            }
            if not point.feasible:
                rows.append(
                    base
                    | {
                        "response": "(infeasible)",
                        "mse": np.nan,
                        "selected": False,
                        "reason": point.reason,
                    }
                )
                continue
            for name, value in point.per_response.items():
                selected = point.selected
                if self.selected_per_response is not None:
                    selected = self.selected_per_response.get(name) == point.params.get("h")
                rows.append(
                    base
                    | {"response": name, "mse": value, "selected": selected, "reason": ""}
                )
            rows.append(
                base
                | {
                    "response": "(mean)",
                    "mse": point.score,
                    "selected": point.selected,
                    "reason": "",
                }
            )
        return pd.DataFrame(rows)


def make_folds(n: int, folds: int, seed: int = 0, shuffle: bool = True) -> np.ndarray:
    """Assign each of n rows to one of ``folds`` folds.

    A seeded uniform shuffle (when ``shuffle`` is true) is followed by
    contiguous blocks whose sizes differ by at most one; without shuffling
    the blocks follow row order.

    Raises
    ------
    TooFewRows
        If there are fewer rows than folds.
    ValueError
        If ``folds`` is below 2.
    """
    if not isinstance(folds, (int, np.integer)) or folds < 2:
        raise ValueError(f"folds must be an integer >= 2, got {folds!r}")
    if folds > n:
        raise TooFewRows(f"cannot split {n} rows into {folds} folds")
    order = np.random.default_rng(seed).permutation(n) if shuffle else np.arange(n)
    assignment = np.empty(n, dtype=np.int64)
    base, remainder = divmod(n, folds)
    pos = 0
    for f in range(folds):
        size = base + (1 if f < remainder else 0)
        assignment[order[pos : pos + size]] = f
        pos += size
    return assignment


def _fold_mse(xv, yv, assignment, folds, make, standardized):
    """Fold-averaged per-response MSE for one estimator configuration.

    Raises TwoblockError or ValueError when a fold's fit is infeasible.
    """
    per_fold = []
    for f in range(folds):
        test = assignment == f
        train = ~test
        model = make()
        model.fit(xv[train], yv[train])
        pred = model.predict(xv[test])
        mse = ((pred - yv[test]) ** 2).mean(axis=0)
        if standardized:
            variance = yv[train].var(axis=0, ddof=1)
            if np.any(variance <= MIN_STANDARDIZING_VARIANCE):
                raise ValueError("a training fold has a zero-variance response")
            mse = mse / variance
        per_fold.append(mse)
    return np.mean(per_fold, axis=0)


def _tie_break_key(point: CvPoint):
    p = point.params
    return (
        point.score,
        p.get("h", 0),
        p.get("g", 0),
        -(p.get("eta") or 0.0),
        -(p.get("kappa") or 0.0),
    )


def grid_search(X, Y, estimator_kind: str, config: CvConfig):
    """Score every grid point by K-fold cross-validation and refit the best.

    Parameters
    ----------
    X, Y : array-like or DataFrame
    estimator_kind : {"pls1", "pls2", "xypls", "sparse-twoblock"}
        Dimensions of the grid that the estimator does not use are
        ignored (for example, eta and kappa for pls2).
    config : CvConfig

    Returns
    -------
    report : CvReport
    model : fitted estimator
        Refit of the best point on all rows.

    Raises
    ------
    AllPointsInfeasible
        If no grid point could be fitted on every training fold.
    """
    if estimator_kind not in ESTIMATOR_KINDS:
        raise ValueError(
            f"unknown estimator kind {estimator_kind!r}; expected one of {ESTIMATOR_KINDS}"
        )
    config.validate()
    xv, _ = as_matrix(X, "X")
    yv, y_names = as_matrix(Y, "Y")
    check_matching_rows(xv, yv)
    n, q = yv.shape[0], yv.shape[1]
    names = y_names or [f"y{j + 1}" for j in range(q)]
    assignment = make_folds(n, config.folds, config.seed, config.shuffle)
    standardized = config.score == "standardized-mean-mse"

    if estimator_kind == "sparse-twoblock":
        grid = [
            {"g": g, "h": h, "eta": eta, "kappa": kappa}
            for g in config.g_grid
            for h in config.h_grid
            for eta in config.eta_grid
            for kappa in config.kappa_grid
        ]
    elif estimator_kind == "xypls":
        grid = [{"g": g, "h": h, "eta": 0.0, "kappa": 0.0} for g in config.g_grid for h in config.h_grid]
    else:
        grid = [{"h": h} for h in config.h_grid]

    points = []
    for params in grid:
        try:
            mse = _fold_mse(
                xv,
                yv,
                assignment,
                config.folds,
                lambda: build_estimator(estimator_kind, config.scaling, **params),
                standardized,
            )
        except (TwoblockError, ValueError) as exc:
            points.append(
                CvPoint(params=params, per_response=None, score=None, feasible=False, reason=str(exc))
            )
            continue
        points.append(
            CvPoint(
                params=params,
                per_response=dict(zip(names, (float(v) for v in mse))),
                score=float(mse.mean()),
                feasible=True,
            )
        )

    feasible = [p for p in points if p.feasible]
    if not feasible:
        raise AllPointsInfeasible(
            "no grid point was feasible; reasons: "
            + "; ".join(f"{p.params}: {p.reason}" for p in points)
        )

    selected_per_response = None
    if estimator_kind == "pls1":
        # Each response picks its own component count on the same folds.
        chosen = {}
        for name in names:
            candidates = [(p.per_response[name], p.params["h"]) for p in feasible]
            chosen[name] = min(candidates)[1]
        best_params = {"h": [chosen[name] for name in names]}
        best_score = float(np.mean([min(p.per_response[name] for p in feasible) for name in names]))
        selected_per_response = chosen
        for p in feasible:
            p.selected = p.params["h"] in chosen.values()
    else:
        best = min(feasible, key=_tie_break_key)
        best.selected = True
        best_params = best.params
        best_score = best.score

    model = build_estimator(estimator_kind, config.scaling, **best_params).fit(X, Y)
    train_mse = ((model.predict(X) - yv) ** 2).mean(axis=0)
    if standardized:
        train_mse = train_mse / yv.var(axis=0, ddof=1)
    report = CvReport(
        per_point=points,
        best_params=best_params,
        best_score=best_score,
        fold_assignment=assignment,
        refit_train_score=float(train_mse.mean()),
        score_kind=config.score,
        estimator_kind=estimator_kind,
        response_names=names,
        selected_per_response=selected_per_response,
    )
    return report, model
