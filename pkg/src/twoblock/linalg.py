"""Dense linear-algebra primitives used by the estimators.

Three operations live here: column centering with optional unit-variance
scaling, dominant singular pair extraction via power iteration on the
smaller Gram matrix, and rank-one deflation. All functions are pure and
deterministic: fixed inputs produce bitwise-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    ConstantColumn,
    DimensionMismatch,
    NoConvergence,
    NonFiniteInput,
    ZeroMatrix,
    ZeroVector,
)

# Entries at or below this magnitude count as zero throughout the package.
ZERO_THRESHOLD = 1e-14

# Power iteration stops when successive unit iterates differ by less than
# this in 2-norm, and fails after this many iterations. The stop norm must
# sit well below the accuracy the vectors are consumed at (1e-10), because
# the remaining error is the stop norm amplified by the eigenvalue gap.
POWER_TOL = 1e-13
POWER_MAX_ITER = 10_000

CENTER = "center"
AUTOSCALE = "autoscale"
SCALING_MODES = (CENTER, AUTOSCALE)


@dataclass(frozen=True)
class CenteringInfo:
    """Per-column means, and scales when unit-variance scaling was used.

    ``apply`` maps raw data onto the processed scale; ``invert`` undoes it.
    The two compose to the identity to within floating-point rounding.
    """

    means: np.ndarray
    scales: np.ndarray | None

    def apply(self, values: np.ndarray) -> np.ndarray:
        out = values - self.means
        if self.scales is not None:
            out = out / self.scales
        return out

    def invert(self, values: np.ndarray) -> np.ndarray:
        out = values
        if self.scales is not None:
            out = out * self.scales
        return out + self.means


@dataclass(frozen=True)
class SingularPair:
    """Dominant singular triple of a matrix.

    ``left`` and ``right`` are unit vectors; ``value`` is the nonnegative
    singular value. The entry of ``right`` with the largest absolute value
    is positive, which fixes the joint sign deterministically.
    """

    left: np.ndarray
    right: np.ndarray
    value: float


def center_scale(values: np.ndarray, mode: str = CENTER) -> tuple[np.ndarray, CenteringInfo]:
    """Center columns, optionally scaling them to unit sample variance.

    Parameters
    ----------
    values : ndarray of shape (n, m)
        Data block, observations in rows.
    mode : {"center", "autoscale"}
        "center" subtracts column means; "autoscale" additionally divides
        by the column sample standard deviations (ddof=1).

    Returns
    -------
    processed : ndarray of shape (n, m)
    info : CenteringInfo

    Raises
    ------
    ConstantColumn
        In autoscale mode, naming the first column with zero spread.
    NonFiniteInput
        If any entry is not finite.
    """
    if mode not in SCALING_MODES:
        raise ValueError(f"unknown scaling mode {mode!r}; expected one of {SCALING_MODES}")
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("center_scale: input contains non-finite entries")
    means = values.mean(axis=0)
    centered = values - means
    if mode == CENTER:
        return centered, CenteringInfo(means=means, scales=None)
    scales = centered.std(axis=0, ddof=1)
    dead = np.flatnonzero(scales <= ZERO_THRESHOLD)
    if dead.size:
        raise ConstantColumn(
            f"column {dead[0]} has no variance; unit-variance scaling is undefined"
        )
    return centered / scales, CenteringInfo(means=means, scales=scales)


def dominant_singular_pair(cross: np.ndarray) -> SingularPair:
    """Top singular triple of ``cross`` via power iteration.

    The iteration runs on the smaller of the two Gram matrices
    (``crossᵀcross`` when the matrix has at least as many rows as columns,
    ``cross·crossᵀ`` otherwise), starting from the Gram column with the
    largest 2-norm, normalized. The other side is recovered with a single
    multiplication. The Gram matrices here are exactly those whose dominant
    eigenvectors the sparse fitting recursion extracts.

    Raises
    ------
    ZeroMatrix
        If no entry of ``cross`` exceeds the zero threshold.
    NoConvergence
        If successive iterates still differ by 1e-10 or more after
        10000 iterations.
    """
    a = np.asarray(cross, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got {a.ndim} dimensions")
    if not np.any(np.abs(a) > ZERO_THRESHOLD):
        raise ZeroMatrix("dominant_singular_pair: matrix has no nonzero entry")
    p, q = a.shape
    iterate_right = q <= p
    gram = a.T @ a if iterate_right else a @ a.T

    norms = np.linalg.norm(gram, axis=0)
    v = gram[:, int(np.argmax(norms))]
    v = v / np.linalg.norm(v)
    converged = False
    for _ in range(POWER_MAX_ITER):
        nxt = gram @ v
        nrm = np.linalg.norm(nxt)
        if nrm == 0.0:
            # Iterate fell in the null space; the matrix is effectively zero.
            raise ZeroMatrix("dominant_singular_pair: iteration collapsed to zero")
        nxt = nxt / nrm
        if np.linalg.norm(nxt - v) < POWER_TOL:
            v = nxt
            converged = True
            break
        v = nxt
    if not converged:
        raise NoConvergence(POWER_MAX_ITER)

    if iterate_right:
        right = v
        left_raw = a @ right
        value = float(np.linalg.norm(left_raw))
        if value <= ZERO_THRESHOLD:
            raise ZeroMatrix("dominant_singular_pair: singular value is numerically zero")
        left = left_raw / value
    else:
        left = v
        right_raw = a.T @ left
        value = float(np.linalg.norm(right_raw))
        if value <= ZERO_THRESHOLD:
            raise ZeroMatrix("dominant_singular_pair: singular value is numerically zero")
        right = right_raw / value

    if right[int(np.argmax(np.abs(right)))] < 0.0:
        right = -right
        left = -left
    return SingularPair(left=left, right=right, value=value)


def deflate(block: np.ndarray, score: np.ndarray, loading: np.ndarray) -> np.ndarray:
    """Subtract the rank-one product ``score·loadingᵀ`` from ``block``.

    With the least-squares loading ``blockᵀscore / (scoreᵀscore)`` the
    result's columns are orthogonal to ``score``.

    Raises
    ------
    DimensionMismatch
        If the score or loading length does not match the block.
    ZeroVector
        If the score has no entry above the zero threshold.
    """
    block = np.asarray(block, dtype=np.float64)
    score = np.asarray(score, dtype=np.float64).ravel()
    loading = np.asarray(loading, dtype=np.float64).ravel()
    n, m = block.shape
    if score.shape[0] != n:
        raise DimensionMismatch(f"score length {score.shape[0]} != row count {n}")
    if loading.shape[0] != m:
        raise DimensionMismatch(f"loading length {loading.shape[0]} != column count {m}")
    if not np.any(np.abs(score) > ZERO_THRESHOLD):
        raise ZeroVector("deflate: score vector is numerically zero")
    return block - np.outer(score, loading)
