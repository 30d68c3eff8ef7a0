"""Sparse twoblock partial least squares.

The estimator reduces both blocks simultaneously: a response loop extracts
g sparse response components against the predictor block, and an
independent predictor loop extracts h sparse predictor components against
the response block. Weight vectors are soft-thresholded at a tuneable
fraction of their largest entry, which deselects variables outright.
With both sparsity parameters at zero the fit is exactly the dense
two-block PLS recursion (XY-PLS).

Regression coefficients combine the two reductions:

    B = W (Wᵀ Xᵀ X W)⁻¹ Wᵀ Xᵀ Y V Vᵀ

so a deselected predictor yields an exactly zero coefficient row and a
deselected response an exactly zero coefficient column.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from sklearn.base import BaseEstimator, RegressorMixin

from .exceptions import (
    ComponentCountTooLarge,
    DegenerateResidualWarning,
    DimensionMismatch,
    SingularGram,
    ZeroMatrix,
    ZeroVector,
)
from .linalg import CENTER, ZERO_THRESHOLD, center_scale, dominant_singular_pair
from .validation import align_columns, as_matrix, check_matching_rows

# A reduction loop truncates when the cross-product norm falls below this
# fraction of its initial value.
CROSS_RTOL = 1e-12

# Condition estimate above which the component Gram matrix is declared
# singular in the coefficient solve.
GRAM_CONDITION_LIMIT = 1e12


def soft_threshold_vector(v: np.ndarray, sparsity: float) -> tuple[np.ndarray, np.ndarray]:
    """Soft-threshold a weight vector at a fraction of its largest entry.

    The vector is first normalized to unit 2-norm. With threshold
    ``tau = sparsity * max_k |v_k|``, entries with ``|v_k| > tau`` shrink
    toward zero by ``tau`` and keep their sign; the rest become exactly
    zero. The surviving vector is renormalized to unit 2-norm so that
    downstream formulas see a well-scaled direction and ``sparsity = 0``
    reduces to plain normalization.

    Parameters
    ----------
    v : ndarray of shape (m,)
    sparsity : float in [0, 1)

    Returns
    -------
    thresholded : ndarray of shape (m,)
        Unit-norm sparse direction. At least one entry is nonzero for any
        ``sparsity < 1``.
    mask : ndarray of shape (m,)
        1.0 where the strict inequality ``|v_k| > tau`` held, else 0.0.

    Raises
    ------
    ZeroVector
        If ``v`` has no entry above the zero threshold.
    ValueError
        If ``sparsity`` is outside [0, 1).
    """
    if not 0.0 <= sparsity < 1.0:
        raise ValueError(f"sparsity must be in [0, 1), got {sparsity}")
    v = np.asarray(v, dtype=np.float64).ravel()
    if not np.any(np.abs(v) > ZERO_THRESHOLD):
        raise ZeroVector("soft_threshold_vector: input vector is numerically zero")
    vn = v / np.linalg.norm(v)
    mag = np.abs(vn)
    tau = sparsity * mag.max()
    mask = (mag > tau).astype(np.float64)
    out = np.sign(vn) * (mag - tau) * mask
    return out / np.linalg.norm(out), mask


def _reduction_loop(block, opposite, n_components, sparsity, label):
    """Shared body of the response and predictor reduction loops.

    Per component: extract the dominant weight direction from the
    cross-product of the deflated block with the (never deflated) opposite
    block, soft-threshold it, compute the score and the least-squares
    loading, and deflate. The weight is the right singular vector of
    ``oppositeᵀ·resid``, equivalently the dominant eigenvector of
    ``residᵀ·opposite·oppositeᵀ·resid``.

    Deflation uses the unmasked loading. Masking the deflation loading
    would leave score components behind in the masked coordinates and
    destroy the orthogonality of successive scores that deflation exists
    to guarantee; the masked loading is still what the model stores, so
    the sparsity structure of weights and stored loadings stays consistent.

    Returns (weights, loadings_masked, loadings_full, scores, masks,
    residual, truncated) where the matrices have one column per achieved
    component.
    """
    resid = block.copy()
    n, m = resid.shape
    init = None
    weights, masked, full, scores, masks = [], [], [], [], []
    truncated = False

    def _truncate(j, reason):
        warnings.warn(
            f"{label} {reason} at component {j + 1}; model truncated to {j} components",
            DegenerateResidualWarning,
            stacklevel=4,
        )

    for j in range(n_components):
        cross = opposite.T @ resid
        cross_norm = np.linalg.norm(cross)
        if init is None:
            init = cross_norm
        if cross_norm <= CROSS_RTOL * init:
            truncated = True
            _truncate(j, "residual degenerated")
            break
        try:
            weight = dominant_singular_pair(cross).right
        except ZeroMatrix:
            truncated = True
            _truncate(j, "residual degenerated")
            break
        w_sparse, mask = soft_threshold_vector(weight, sparsity)
        score = resid @ w_sparse
        ss = float(score @ score)
        if ss <= ZERO_THRESHOLD**2:
            truncated = True
            _truncate(j, "score vanished")
            break
        loading = resid.T @ score / ss
        resid = resid - np.outer(score, loading)
        weights.append(w_sparse)
        masked.append(loading * mask)
        full.append(loading)
        scores.append(score)
        masks.append(mask)

    k = len(weights)

    def pack(cols, rows):
        return np.array(cols).T.reshape(rows, k)

    return (
        pack(weights, m),
        pack(masked, m),
        pack(full, m),
        pack(scores, n),
        pack(masks, m),
        resid,
        truncated,
    )


def response_reduction(xc: np.ndarray, yc: np.ndarray, g: int, kappa: float):
    """Extract g sparse response components against the predictor block.

    Parameters
    ----------
    xc, yc : ndarray
        Centered (optionally scaled) predictor and response blocks.
    g : int
        Requested response components.
    kappa : float in [0, 1)
        Response sparsity.

    Returns
    -------
    tuple
        (V, Q_masked, Q_full, U, M, residual, truncated): weights, stored
        loadings, deflation loadings, scores, masks (each with one column
        per achieved component), the final response residual, and whether
        the loop truncated early.
    """
    return _reduction_loop(yc, xc, g, kappa, label="response")


def predictor_reduction(xc: np.ndarray, yc: np.ndarray, h: int, eta: float):
    """Extract h sparse predictor components against the response block.

    Mirror image of ``response_reduction``: the response block enters
    undeflated at every step, so the two loops are independent and g and h
    can be chosen separately.

    Returns
    -------
    tuple
        (W, P_masked, P_full, T, N, residual, truncated).
    """
    return _reduction_loop(xc, yc, h, eta, label="predictor")


def compute_coefficients(
    W: np.ndarray, xc: np.ndarray, yc: np.ndarray, V: np.ndarray
) -> np.ndarray:
    """Regression coefficients B = W (WᵀXᵀXW)⁻¹ WᵀXᵀY V Vᵀ.

    The h-by-h Gram matrix is formed as (XW)ᵀ(XW), never via the p-by-p
    product XᵀX, and solved with a Cholesky factorization.

    Raises
    ------
    SingularGram
        If the Gram condition estimate exceeds 1e12 or the factorization
        fails; reducing h resolves this.
    """
    p = xc.shape[1]
    q = yc.shape[1]
    if W.shape[1] == 0 or V.shape[1] == 0:
        return np.zeros((p, q))
    xw = xc @ W
    gram = xw.T @ xw
    eigvals = np.linalg.eigvalsh(gram)
    if eigvals[0] <= 0.0 or eigvals[-1] / eigvals[0] > GRAM_CONDITION_LIMIT:
        raise SingularGram(
            "component Gram matrix is numerically singular "
            f"(condition estimate {eigvals[-1] / max(eigvals[0], 1e-300):.2e}); "
            "reduce the number of predictor components"
        )
    try:
        factor = cho_factor(gram, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularGram(f"Gram factorization failed: {exc}") from exc
    core = cho_solve(factor, xw.T @ yc)
    return W @ core @ (V @ V.T)


@dataclass(frozen=True)
class SelectionReport:
    """Variable selection summary of a fitted sparse twoblock model."""

    selected_predictors: list[str]
    selected_responses: list[str]
    deselected_predictors: list[str]
    deselected_responses: list[str]

    @property
    def deselected_counts(self) -> tuple[int, int]:
        return len(self.deselected_predictors), len(self.deselected_responses)


class SparseTwoblockPLS(BaseEstimator, RegressorMixin):
    """Sparse twoblock PLS estimator (dense XY-PLS when eta = kappa = 0).

    Parameters
    ----------
    g : int
        Response components. Must satisfy g <= min(n_responses, n - 1).
    h : int
        Predictor components. Must satisfy h <= min(n_features, n - 1).
    eta : float in [0, 1)
        Predictor sparsity: per component, predictor entries whose
        normalized weight magnitude is at most ``eta`` times the largest
        are zeroed.
    kappa : float in [0, 1)
        Response sparsity, same rule on the response side.
    scaling : {"center", "autoscale"}
        Column preprocessing for both blocks.

    Attributes
    ----------
    x_weights_ : ndarray of shape (p, h_eff)
        Sparse predictor weights, unit-norm columns.
    y_weights_ : ndarray of shape (q, g_eff)
        Sparse response weights.
    x_loadings_, y_loadings_ : ndarray
        Stored loadings, masked to the weight support.
    x_loadings_full_, y_loadings_full_ : ndarray
        Unmasked least-squares loadings actually used for deflation.
    x_scores_, y_scores_ : ndarray
        Score columns; mutually orthogonal within each block.
    x_mask_, y_mask_ : ndarray
        0/1 selection masks per component.
    B_ : ndarray of shape (p, q)
        Coefficients on the processed blocks.
    coef_ : ndarray of shape (p, q)
        Coefficients on the original data scale.
    n_components_x_, n_components_y_ : int
        Achieved component counts (below h or g only after truncation).
    truncated_x_, truncated_y_ : bool
    """

    def __init__(
        self,
        g: int = 1,
        h: int = 1,
        eta: float = 0.0,
        kappa: float = 0.0,
        scaling: str = CENTER,
    ):
        self.g = g
        self.h = h
        self.eta = eta
        self.kappa = kappa
        self.scaling = scaling

    def fit(self, X, Y):
        xv, x_names = as_matrix(X, "X")
        yv, y_names = as_matrix(Y, "Y")
        check_matching_rows(xv, yv)
        n, p = xv.shape
        q = yv.shape[1]
        for label, value in (("g", self.g), ("h", self.h)):
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ComponentCountTooLarge(
                    f"{label} must be a positive integer, got {value!r}"
                )
        for label, value in (("eta", self.eta), ("kappa", self.kappa)):
            if not 0.0 <= value < 1.0:
                raise ValueError(f"{label} must be in [0, 1), got {value}")
        if self.g > min(q, n - 1):
            raise ComponentCountTooLarge(
                f"g={self.g} exceeds min(n_responses, n_samples - 1) = {min(q, n - 1)}"
            )
        if self.h > min(p, n - 1):
            raise ComponentCountTooLarge(
                f"h={self.h} exceeds min(n_features, n_samples - 1) = {min(p, n - 1)}"
            )

        xc, x_info = center_scale(xv, self.scaling)
        yc, y_info = center_scale(yv, self.scaling)

        v, q_masked, q_full, u, m_mask, _, trunc_y = response_reduction(
            xc, yc, self.g, self.kappa
        )
        w, p_masked, p_full, t, n_mask, _, trunc_x = predictor_reduction(
            xc, yc, self.h, self.eta
        )

        self.y_weights_ = v
        self.y_loadings_ = q_masked
        self.y_loadings_full_ = q_full
        self.y_scores_ = u
        self.y_mask_ = m_mask
        self.x_weights_ = w
        self.x_loadings_ = p_masked
        self.x_loadings_full_ = p_full
        self.x_scores_ = t
        self.x_mask_ = n_mask
        self.B_ = compute_coefficients(w, xc, yc, v)
        if w.shape[1]:
            self.x_rotation_ = w @ np.linalg.inv(p_full.T @ w)
        else:
            self.x_rotation_ = np.zeros((p, 0))
        self.n_components_x_ = w.shape[1]
        self.n_components_y_ = v.shape[1]
        self.truncated_x_ = trunc_x
        self.truncated_y_ = trunc_y
        self.x_mean_ = x_info.means
        self.x_scale_ = x_info.scales
        self.y_mean_ = y_info.means
        self.y_scale_ = y_info.scales
        self.n_features_in_ = p
        self.n_responses_ = q
        self.feature_names_in_ = x_names
        self.response_names_ = y_names
        return self

    @property
    def coef_(self) -> np.ndarray:
        """Coefficients on the original data scale, shape (p, q)."""
        b = self.B_
        if self.x_scale_ is not None:
            b = b / self.x_scale_[:, None]
        if self.y_scale_ is not None:
            b = b * self.y_scale_[None, :]
        return b

    def _processed_new(self, X) -> np.ndarray:
        if not hasattr(self, "B_"):
            raise DimensionMismatch("model is not fitted")
        xv, x_names = as_matrix(X, "X", min_rows=1)
        xv = align_columns(xv, x_names, self.feature_names_in_, self.n_features_in_)
        out = xv - self.x_mean_
        if self.x_scale_ is not None:
            out = out / self.x_scale_
        return out

    def transform(self, X) -> np.ndarray:
        """Project new predictor rows onto the predictor components."""
        return self._processed_new(X) @ self.x_rotation_

    def predict(self, X) -> np.ndarray:
        """Predict responses for new predictor rows, shape (n, q)."""
        yhat = self._processed_new(X) @ self.B_
        if self.y_scale_ is not None:
            yhat = yhat * self.y_scale_
        return yhat + self.y_mean_

    def selected_predictor_mask(self) -> np.ndarray:
        """Boolean vector: predictor has a nonzero weight in any component."""
        return np.abs(self.x_weights_).max(axis=1, initial=0.0) > ZERO_THRESHOLD

    def selected_response_mask(self) -> np.ndarray:
        """Boolean vector: response has a nonzero weight in any component."""
        return np.abs(self.y_weights_).max(axis=1, initial=0.0) > ZERO_THRESHOLD


def _default_names(prefix: str, count: int) -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(count)]


def selection_report(model: SparseTwoblockPLS) -> SelectionReport:
    """List selected and deselected variables of a fitted model.

    A predictor is selected when its row of the predictor weights has any
    nonzero entry; responses mirror this on the response weights. Column
    names fall back to x1..xp / y1..yq when the model was fitted on plain
    arrays.
    """
    if not hasattr(model, "B_"):
        raise DimensionMismatch("model is not fitted")
    x_names = model.feature_names_in_ or _default_names("x", model.n_features_in_)
    y_names = model.response_names_ or _default_names("y", model.n_responses_)
    x_sel = model.selected_predictor_mask()
    y_sel = model.selected_response_mask()
    return SelectionReport(
        selected_predictors=[name for name, s in zip(x_names, x_sel) if s],
        selected_responses=[name for name, s in zip(y_names, y_sel) if s],
        deselected_predictors=[name for name, s in zip(x_names, x_sel) if not s],
        deselected_responses=[name for name, s in zip(y_names, y_sel) if not s],
    )
