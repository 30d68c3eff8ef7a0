"""Input validation helpers for data blocks.

All estimators accept either a ``numpy.ndarray`` or a ``pandas.DataFrame``.
These helpers coerce inputs to float64 matrices, enforce the data-matrix
invariants (finite entries, at least two rows, unique column names), and
align prediction-time columns to the training layout by name.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from .exceptions import ColumnMismatch, DimensionMismatch, NonFiniteInput


def as_matrix(
    data, name: str = "data", min_rows: int = 2
) -> tuple[np.ndarray, list[str] | None]:
    """Coerce ``data`` to a validated 2-d float64 array.

    Parameters
    ----------
    data : ndarray, DataFrame, or nested sequence
        Observations in rows, variables in columns. A one-dimensional input
        is treated as a single column.
    name : str
        Label used in error messages.
    min_rows : int
        Minimum accepted row count. Fitting needs 2 rows to center;
        prediction accepts a single row.

    Returns
    -------
    values : ndarray of shape (n, m)
        C-contiguous float64 copy of the input.
    col_names : list of str or None
        Column names when ``data`` is a DataFrame, otherwise None.

    Raises
    ------
    NonFiniteInput
        If any entry is NaN or infinite, or not numeric at all.
    DimensionMismatch
        If the input has fewer than ``min_rows`` rows, no columns, or more
        than 2 dimensions, or if DataFrame column names are not unique.
    """
    col_names = None
    if isinstance(data, pd.DataFrame):
        col_names = [str(c) for c in data.columns]
        if len(set(col_names)) != len(col_names):
            raise DimensionMismatch(f"{name}: column names are not unique")
        raw = data.to_numpy()
    else:
        raw = np.asarray(data)
    try:
        values = np.array(raw, dtype=np.float64, copy=True, order="C")
    except (TypeError, ValueError) as exc:
        raise NonFiniteInput(f"{name}: non-numeric entries ({exc})") from exc
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2:
        raise DimensionMismatch(f"{name}: expected 2 dimensions, got {values.ndim}")
    n, m = values.shape
    if n < min_rows:
        raise DimensionMismatch(f"{name}: need at least {min_rows} rows, got {n}")
    if m < 1:
        raise DimensionMismatch(f"{name}: need at least 1 column, got {m}")
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise NonFiniteInput(
            f"{name}: non-finite entry at row {bad[0]}, column {bad[1]}"
        )
    return values, col_names


def check_matching_rows(x: np.ndarray, y: np.ndarray) -> None:
    """Raise ``DimensionMismatch`` unless both blocks have equal row counts."""
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(
            f"predictor block has {x.shape[0]} rows but response block has {y.shape[0]}"
        )


def align_columns(
    values: np.ndarray,
    col_names: list[str] | None,
    expected: list[str] | None,
    n_expected: int,
    name: str = "X",
) -> np.ndarray:
    """Align a prediction-time block to the training column layout.

    Name-based alignment applies only when both the training block and the
    new block carry names; otherwise columns are taken positionally and only
    the count is checked.

    Raises
    ------
    ColumnMismatch
        Naming the missing and unexpected columns, or the count mismatch.
    """
    if expected is not None and col_names is not None:
        if col_names == expected:
            return values
        missing = [c for c in expected if c not in col_names]
        extra = [c for c in col_names if c not in expected]
        if missing or extra:
            raise ColumnMismatch(
                f"{name}: columns do not match training columns "
                f"(missing: {missing or 'none'}; unexpected: {extra or 'none'})"
            )
        order = [col_names.index(c) for c in expected]
        return values[:, order]
    if values.shape[1] != n_expected:
        raise ColumnMismatch(
            f"{name}: expected {n_expected} columns, got {values.shape[1]}"
        )
    return values
