"""NIPALS partial least squares baselines.

``NipalsPLS`` is the classical NIPALS PLS regression: with a multivariate
response it is PLS2, and with a single response column the inner loop
converges in one pass and the fit coincides with PLS1. ``Pls1Set`` fits one
independent PLS1 model per response column, each with its own component
count, which is how per-response component choices are reported for the
benchmark workflows.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .exceptions import (
    ComponentCountTooLarge,
    DegenerateResidualWarning,
    DimensionMismatch,
)
from .linalg import CENTER, POWER_MAX_ITER, POWER_TOL, center_scale
from .validation import align_columns, as_matrix, check_matching_rows

# A residual block counts as vanished when its Frobenius norm falls below
# this fraction of its initial value.
RESIDUAL_RTOL = 1e-12


class NipalsPLS(BaseEstimator, RegressorMixin):
    """PLS regression fitted with the NIPALS algorithm.

    Parameters
    ----------
    n_components : int
        Number of latent components h. Must satisfy
        h <= min(n_features, n_samples - 1).
    scaling : {"center", "autoscale"}
        Column preprocessing applied to both blocks before fitting.

    Attributes
    ----------
    x_weights_ : ndarray of shape (p, k)
        NIPALS weight vectors, unit norm, one column per component.
    x_loadings_ : ndarray of shape (p, k)
    y_loadings_ : ndarray of shape (q, k)
    x_scores_ : ndarray of shape (n, k)
    y_scores_ : ndarray of shape (n, k)
    x_rotation_ : ndarray of shape (p, k)
        Projection mapping processed predictors to scores.
    B_ : ndarray of shape (p, q)
        Regression coefficients on the processed (centered, optionally
        scaled) blocks.
    coef_ : ndarray of shape (p, q)
        Coefficients mapping centered raw predictors to centered raw
        responses (scales folded back in).
    n_components_ : int
        Achieved component count; less than ``n_components`` only when the
        fit truncated on a degenerate residual.
    truncated_ : bool
        True when the fit stopped early on a vanished residual block.
    """

    def __init__(self, n_components: int = 2, scaling: str = CENTER):
        self.n_components = n_components
        self.scaling = scaling

    def fit(self, X, Y):
        xv, x_names = as_matrix(X, "X")
        yv, y_names = as_matrix(Y, "Y")
        check_matching_rows(xv, yv)
        n, p = xv.shape
        q = yv.shape[1]
        h = self.n_components
        if not isinstance(h, (int, np.integer)) or h < 1:
            raise ComponentCountTooLarge(f"n_components must be a positive integer, got {h!r}")
        bound = min(p, n - 1)
        if h > bound:
            raise ComponentCountTooLarge(
                f"n_components={h} exceeds min(n_features, n_samples - 1) = {bound}"
            )

        xc, x_info = center_scale(xv, self.scaling)
        yc, y_info = center_scale(yv, self.scaling)

        e = xc.copy()
        f = yc.copy()
        init_e = np.linalg.norm(e)
        init_f = np.linalg.norm(f)
        weights, x_loadings, y_loadings, x_scores, y_scores = [], [], [], [], []
        truncated = False
        for k in range(h):
            if (
                np.linalg.norm(e) <= RESIDUAL_RTOL * init_e
                or np.linalg.norm(f) <= RESIDUAL_RTOL * init_f
                or init_f == 0.0
            ):
                truncated = True
                warnings.warn(
                    f"residual block vanished at component {k + 1}; "
                    f"model truncated to {k} components",
                    DegenerateResidualWarning,
                    stacklevel=2,
                )
                break
            u = f[:, int(np.argmax((f * f).sum(axis=0)))]
            w = np.zeros(p)
            degenerate = False
            for _ in range(POWER_MAX_ITER):
                w_raw = e.T @ u
                nrm = np.linalg.norm(w_raw)
                if nrm == 0.0:
                    degenerate = True
                    break
                w_new = w_raw / nrm
                t = e @ w_new
                tt = float(t @ t)
                if tt == 0.0:
                    degenerate = True
                    break
                c = f.T @ t / tt
                cc = float(c @ c)
                if cc == 0.0:
                    degenerate = True
                    break
                u = f @ c / cc
                if np.linalg.norm(w_new - w) < POWER_TOL:
                    w = w_new
                    break
                w = w_new
            else:
                warnings.warn(
                    f"NIPALS inner loop hit the {POWER_MAX_ITER} iteration cap "
                    f"at component {k + 1}; using the last iterate",
                    UserWarning,
                    stacklevel=2,
                )
            if degenerate:
                truncated = True
                warnings.warn(
                    f"residual block vanished at component {k + 1}; "
                    f"model truncated to {k} components",
                    DegenerateResidualWarning,
                    stacklevel=2,
                )
                break
            t = e @ w
            tt = float(t @ t)
            p_load = e.T @ t / tt
            c = f.T @ t / tt
            e = e - np.outer(t, p_load)
            f = f - np.outer(t, c)
            weights.append(w)
            x_loadings.append(p_load)
            y_loadings.append(c)
            x_scores.append(t)
            y_scores.append(u)

        k = len(weights)
        self.x_weights_ = np.array(weights).T.reshape(p, k)
        self.x_loadings_ = np.array(x_loadings).T.reshape(p, k)
        self.y_loadings_ = np.array(y_loadings).T.reshape(q, k)
        self.x_scores_ = np.array(x_scores).T.reshape(n, k)
        self.y_scores_ = np.array(y_scores).T.reshape(n, k)
        if k:
            self.x_rotation_ = self.x_weights_ @ np.linalg.inv(
                self.x_loadings_.T @ self.x_weights_
            )
            self.B_ = self.x_rotation_ @ self.y_loadings_.T
        else:
            self.x_rotation_ = np.zeros((p, 0))
            self.B_ = np.zeros((p, q))
        self.n_components_ = k
        self.truncated_ = truncated
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
        """Project new predictor rows onto the latent components."""
        return self._processed_new(X) @ self.x_rotation_

    def predict(self, X) -> np.ndarray:
        """Predict responses for new predictor rows, shape (n, q)."""
        yhat = self._processed_new(X) @ self.B_
        if self.y_scale_ is not None:
            yhat = yhat * self.y_scale_
        return yhat + self.y_mean_


class Pls1Set(BaseEstimator, RegressorMixin):
    """Independent PLS1 fits, one per response column.

    Parameters
    ----------
    n_components : int or sequence of int
        Component count shared by every response, or one count per
        response column.
    scaling : {"center", "autoscale"}

    Attributes
    ----------
    models_ : list of NipalsPLS
        One fitted single-response model per response column.
    n_components_ : list of int
        Achieved component count per response.
    """

    def __init__(self, n_components=1, scaling: str = CENTER):
        self.n_components = n_components
        self.scaling = scaling

    def fit(self, X, Y):
        xv, x_names = as_matrix(X, "X")
        yv, y_names = as_matrix(Y, "Y")
        check_matching_rows(xv, yv)
        q = yv.shape[1]
        if isinstance(self.n_components, (int, np.integer)):
            per_response = [int(self.n_components)] * q
        else:
            per_response = [int(h) for h in self.n_components]
            if len(per_response) != q:
                raise DimensionMismatch(
                    f"got {len(per_response)} component counts for {q} responses"
                )
        self.models_ = [
            NipalsPLS(n_components=h, scaling=self.scaling).fit(xv, yv[:, [j]])
            for j, h in enumerate(per_response)
        ]
        self.n_components_ = [m.n_components_ for m in self.models_]
        self.truncated_ = any(m.truncated_ for m in self.models_)
        self.n_features_in_ = xv.shape[1]
        self.n_responses_ = q
        self.feature_names_in_ = x_names
        self.response_names_ = y_names
        self.x_mean_ = self.models_[0].x_mean_
        self.x_scale_ = self.models_[0].x_scale_
        self.y_mean_ = np.array([m.y_mean_[0] for m in self.models_])
        self.y_scale_ = (
            None
            if self.scaling == CENTER
            else np.array([m.y_scale_[0] for m in self.models_])
        )
        return self

    @property
    def coef_(self) -> np.ndarray:
        """Original-scale coefficients, one column per response."""
        return np.hstack([m.coef_ for m in self.models_])

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "models_"):
            raise DimensionMismatch("model is not fitted")
        xv, x_names = as_matrix(X, "X")
        xv = align_columns(xv, x_names, self.feature_names_in_, self.n_features_in_)
        return np.hstack([m.predict(xv) for m in self.models_])
