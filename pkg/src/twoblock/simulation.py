"""Monte-Carlo evaluation harness.

Data are generated from a latent-variable model: scores T are standard
normal, informative predictor loadings are uniform on a configurable
range (uninformative rows exactly zero), X = T·Pᵀ plus Gaussian noise,
informative regression coefficients are uniform on a second range with
exactly zero rows and columns for uninformative variables, and
Y = X·B plus Gaussian noise.

Per fitted model the harness reports five metrics: MSEB (mean squared
coefficient error over informative-response columns) and the selection
rates FPX, FNX, FPY, FNY in percent. ``run_batch`` repeats this over a
scenario grid with deterministically derived per-run seeds and aggregates
means and standard errors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from sklearn.base import clone

from .exceptions import DimensionMismatch, TwoblockError
from .linalg import ZERO_THRESHOLD
from .sparse import SparseTwoblockPLS

METRICS = ("mseb", "fpx", "fnx", "fpy", "fny")


@dataclass(frozen=True)
class SimScenario:
    """Configuration of one simulated data-generating process."""

    n: int
    p1: int
    p2: int = 0
    q1: int = 1
    q2: int = 0
    h_true: int = 1
    noise_sd: float = 0.1
    loading_range: tuple[float, float] = (-5.0, 5.0)
    coef_range: tuple[float, float] = (0.02, 0.07)
    seed: int = 0

    def validate(self) -> None:
        for label in ("n", "p1", "q1", "h_true"):
            if int(getattr(self, label)) < 1:
                raise ValueError(f"scenario field {label} must be positive")
        if self.p2 < 0 or self.q2 < 0:
            raise ValueError("p2 and q2 must be nonnegative")
        if not self.noise_sd > 0:
            raise ValueError("noise_sd must be positive")
        for label in ("loading_range", "coef_range"):
            lo, hi = getattr(self, label)
            if not lo <= hi:
                raise ValueError(f"scenario field {label} must be an ordered interval")


@dataclass(frozen=True)
class SimTruth:
    """Ground truth behind one generated dataset."""

    T_true: np.ndarray
    P_true: np.ndarray
    B_true: np.ndarray
    informative_x_mask: np.ndarray
    informative_y_mask: np.ndarray


@dataclass(frozen=True)
class SimResult:
    """Metrics of one fitted model against one ground truth."""

    mseb: float
    fpx: float
    fnx: float
    fpy: float
    fny: float
    estimator: str = ""
    scenario: SimScenario | None = field(default=None, repr=False)


def generate_dataset(scenario: SimScenario) -> tuple[pd.DataFrame, pd.DataFrame, SimTruth]:
    """Draw one dataset from the scenario's data-generating process.

    Draw order is fixed (scores, informative loadings, predictor noise,
    informative coefficients, response noise) so a fixed seed reproduces
    the dataset bitwise. Informative variables come first: predictor
    columns 1..p1 and response columns 1..q1.
    """
    scenario.validate()
    s = scenario
    rng = np.random.default_rng(s.seed)
    p = s.p1 + s.p2
    q = s.q1 + s.q2
    t = rng.standard_normal((s.n, s.h_true))
    p_true = np.zeros((p, s.h_true))
    p_true[: s.p1] = rng.uniform(*s.loading_range, size=(s.p1, s.h_true))
    x = t @ p_true.T + rng.normal(0.0, s.noise_sd, size=(s.n, p))
    b_true = np.zeros((p, q))
    b_true[: s.p1, : s.q1] = rng.uniform(*s.coef_range, size=(s.p1, s.q1))
    y = x @ b_true + rng.normal(0.0, s.noise_sd, size=(s.n, q))
    x_mask = np.zeros(p, dtype=np.int64)
    x_mask[: s.p1] = 1
    y_mask = np.zeros(q, dtype=np.int64)
    y_mask[: s.q1] = 1
    x_frame = pd.DataFrame(x, columns=[f"x{i + 1}" for i in range(p)])
    y_frame = pd.DataFrame(y, columns=[f"y{i + 1}" for i in range(q)])
    truth = SimTruth(
        T_true=t,
        P_true=p_true,
        B_true=b_true,
        informative_x_mask=x_mask,
        informative_y_mask=y_mask,
    )
    return x_frame, y_frame, truth


def _selection_masks(model, coef: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Sparse twoblock models select through their weight rows; dense
    # baselines have no selection mechanism, so any nonzero coefficient
    # row or column counts as selected.
    if isinstance(model, SparseTwoblockPLS):
        return model.selected_predictor_mask(), model.selected_response_mask()
    x_sel = np.abs(coef).max(axis=1, initial=0.0) > ZERO_THRESHOLD
    y_sel = np.abs(coef).max(axis=0, initial=0.0) > ZERO_THRESHOLD
    return x_sel, y_sel


def compute_metrics(model, truth: SimTruth) -> SimResult:
    """Score a fitted model against the ground truth.

    MSEB is the mean squared difference between fitted and true
    coefficients (both on the original data scale) over the columns of
    informative responses. Selection rates are percentages: FPX counts
    selected uninformative predictors against p2, FNX deselected
    informative predictors against p1, and FPY/FNY mirror this for
    responses. Rates over an empty group are 0.
    """
    coef = np.asarray(model.coef_, dtype=np.float64)
    if coef.shape != truth.B_true.shape:
        raise DimensionMismatch(
            f"fitted coefficients are {coef.shape}, truth is {truth.B_true.shape}"
        )
    inf_x = truth.informative_x_mask.astype(bool)
    inf_y = truth.informative_y_mask.astype(bool)
    mseb = float(np.mean((coef[:, inf_y] - truth.B_true[:, inf_y]) ** 2))
    x_sel, y_sel = _selection_masks(model, coef)

    def rate(count: int, total: int) -> float:
        return 100.0 * count / total if total else 0.0

    return SimResult(
        mseb=mseb,
        fpx=rate(int(np.sum(x_sel & ~inf_x)), int(np.sum(~inf_x))),
        fnx=rate(int(np.sum(~x_sel & inf_x)), int(np.sum(inf_x))),
        fpy=rate(int(np.sum(y_sel & ~inf_y)), int(np.sum(~inf_y))),
        fny=rate(int(np.sum(~y_sel & inf_y)), int(np.sum(inf_y))),
    )


def run_batch(
    scenarios,
    estimators,
    runs: int,
    seed: int,
) -> pd.DataFrame:
    """Monte-Carlo comparison of estimators over a scenario grid.

    Parameters
    ----------
    scenarios : sequence of SimScenario
    estimators : sequence of (label, estimator) pairs
        Unfitted prototypes; each run fits a fresh clone on the run's
        dataset, so all estimators see identical data within a run.
    runs : int
        Monte-Carlo repetitions per scenario.
    seed : int
        Master seed. Per-run seeds are derived from it deterministically,
        so the batch output is reproducible bitwise.

    Returns
    -------
    DataFrame
        One row per (scenario, estimator) in grid order: scenario fields,
        estimator label, completed/failed run counts, and mean plus
        standard error for each metric. Failed fits are recorded and
        excluded from the aggregates. Standard errors are 0 when fewer
        than two runs completed.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    scenarios = list(scenarios)
    estimators = list(estimators)
    run_seeds = np.random.SeedSequence(seed).generate_state(len(scenarios) * runs, np.uint64)
    rows = []
    for si, scenario in enumerate(scenarios):
        per_label: dict[str, list[SimResult]] = {label: [] for label, _ in estimators}
        failures = {label: 0 for label, _ in estimators}
        for ri in range(runs):
            run_seed = int(run_seeds[si * runs + ri])
            x, y, truth = generate_dataset(replace(scenario, seed=run_seed))
            for label, prototype in estimators:
                try:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        fitted = clone(prototype).fit(x, y)
                    per_label[label].append(compute_metrics(fitted, truth))
                except TwoblockError:
                    failures[label] += 1
        for label, _ in estimators:
            results = per_label[label]
            row = {
                "n": scenario.n,
                "p1": scenario.p1,
                "p2": scenario.p2,
                "q1": scenario.q1,
                "q2": scenario.q2,
                "h_true": scenario.h_true,
                "noise_sd": scenario.noise_sd,
                "estimator": label,
                "runs_completed": len(results),
                "runs_failed": failures[label],
            }
            for metric in METRICS:
                values = np.array([getattr(r, metric) for r in results], dtype=np.float64)
                if values.size == 0:
                    mean, se = float("nan"), float("nan")
                elif values.size == 1:
                    mean, se = float(values[0]), 0.0
                else:
                    mean = float(values.mean())
                    se = float(values.std(ddof=1) / np.sqrt(values.size))
                row[f"{metric}_mean"] = mean
                row[f"{metric}_se"] = se
            rows.append(row)
    return pd.DataFrame(rows)


def plot_frames(batch: pd.DataFrame) -> dict[str, pd.DataFrame]:
    """Reshape batch output into per-metric plot data (p1 on the x axis)."""
    frames = {}
    for metric in METRICS:
        frames[metric] = batch[
            ["p1", "estimator", f"{metric}_mean", f"{metric}_se"]
        ].rename(columns={f"{metric}_mean": "mean", f"{metric}_se": "se"})
    return frames
