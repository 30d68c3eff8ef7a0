"""JSON persistence for fitted models.

Archives are single JSON documents with top-level keys ``schema_version``,
``estimator_kind`` and ``payload``. Matrices are stored row-major as
``{"rows": r, "cols": c, "data": [...]}``; numbers use the shortest
decimal representation that round-trips the underlying double exactly, so
a save/load cycle reproduces every numeric field bitwise. Writes go to a
temporary file in the target directory followed by an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .exceptions import CorruptArchive, IoFailure, SchemaMismatch
from .nipals import NipalsPLS, Pls1Set
from .sparse import SparseTwoblockPLS

SCHEMA_VERSION = 1

KIND_TWOBLOCK = "twoblock"
KIND_PLS2 = "pls2"
KIND_PLS1_SET = "pls1-set"


def _encode_matrix(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=np.float64)
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "data": a.ravel(order="C").tolist()}


def _decode_matrix(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
        a = np.asarray(data, dtype=np.float64)
        if a.size != rows * cols:
            raise ValueError(f"{rows}x{cols} matrix with {a.size} entries")
        return a.reshape(rows, cols)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptArchive(f"invalid matrix encoding: {exc}") from exc


def _encode_vector(a) -> list | None:
    return None if a is None else np.asarray(a, dtype=np.float64).tolist()


def _decode_vector(obj) -> np.ndarray | None:
    if obj is None:
        return None
    try:
        return np.asarray(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise CorruptArchive(f"invalid vector encoding: {exc}") from exc


_CENTERING_FIELDS = ("x_mean_", "x_scale_", "y_mean_", "y_scale_")
_META_FIELDS = ("n_features_in_", "n_responses_", "feature_names_in_", "response_names_")
_TWOBLOCK_MATRICES = (
    "x_weights_",
    "y_weights_",
    "x_loadings_",
    "y_loadings_",
    "x_loadings_full_",
    "y_loadings_full_",
    "x_scores_",
    "y_scores_",
    "x_mask_",
    "y_mask_",
    "x_rotation_",
    "B_",
)
_PLS_MATRICES = (
    "x_weights_",
    "x_loadings_",
    "y_loadings_",
    "x_scores_",
    "y_scores_",
    "x_rotation_",
    "B_",
)


def _common_payload(model, matrices) -> dict:
    payload = {
        "params": model.get_params(),
        "matrices": {name: _encode_matrix(getattr(model, name)) for name in matrices},
        "centering": {name: _encode_vector(getattr(model, name)) for name in _CENTERING_FIELDS},
        "meta": {name: getattr(model, name) for name in _META_FIELDS},
    }
    return payload


def _restore_common(model, payload, matrices) -> None:
    for name in matrices:
        setattr(model, name, _decode_matrix(payload["matrices"][name]))
    for name in _CENTERING_FIELDS:
        setattr(model, name, _decode_vector(payload["centering"][name]))
    meta = payload["meta"]
    model.n_features_in_ = int(meta["n_features_in_"])
    model.n_responses_ = int(meta["n_responses_"])
    model.feature_names_in_ = (
        None if meta["feature_names_in_"] is None else [str(c) for c in meta["feature_names_in_"]]
    )
    model.response_names_ = (
        None if meta["response_names_"] is None else [str(c) for c in meta["response_names_"]]
    )


def _twoblock_payload(model: SparseTwoblockPLS) -> dict:
    payload = _common_payload(model, _TWOBLOCK_MATRICES)
    payload["state"] = {
        "n_components_x_": model.n_components_x_,
        "n_components_y_": model.n_components_y_,
        "truncated_x_": model.truncated_x_,
        "truncated_y_": model.truncated_y_,
    }
    return payload


def _restore_twoblock(payload) -> SparseTwoblockPLS:
    model = SparseTwoblockPLS(**payload["params"])
    _restore_common(model, payload, _TWOBLOCK_MATRICES)
    state = payload["state"]
    model.n_components_x_ = int(state["n_components_x_"])
    model.n_components_y_ = int(state["n_components_y_"])
    model.truncated_x_ = bool(state["truncated_x_"])
    model.truncated_y_ = bool(state["truncated_y_"])
    return model


def _pls_payload(model: NipalsPLS) -> dict:
    payload = _common_payload(model, _PLS_MATRICES)
    payload["state"] = {
        "n_components_": model.n_components_,
        "truncated_": model.truncated_,
    }
    return payload


def _restore_pls(payload) -> NipalsPLS:
    model = NipalsPLS(**payload["params"])
    _restore_common(model, payload, _PLS_MATRICES)
    state = payload["state"]
    model.n_components_ = int(state["n_components_"])
    model.truncated_ = bool(state["truncated_"])
    return model


def _pls1_set_payload(model: Pls1Set) -> dict:
    return {
        "params": model.get_params(),
        "models": [_pls_payload(m) for m in model.models_],
        "centering": {name: _encode_vector(getattr(model, name)) for name in _CENTERING_FIELDS},
        "meta": {name: getattr(model, name) for name in _META_FIELDS},
    }


def _restore_pls1_set(payload) -> Pls1Set:
    model = Pls1Set(**payload["params"])
    model.models_ = [_restore_pls(p) for p in payload["models"]]
    for name in _CENTERING_FIELDS:
        setattr(model, name, _decode_vector(payload["centering"][name]))
    meta = payload["meta"]
    model.n_features_in_ = int(meta["n_features_in_"])
    model.n_responses_ = int(meta["n_responses_"])
    model.feature_names_in_ = (
        None if meta["feature_names_in_"] is None else [str(c) for c in meta["feature_names_in_"]]
    )
    model.response_names_ = (
        None if meta["response_names_"] is None else [str(c) for c in meta["response_names_"]]
    )
    model.n_components_ = [m.n_components_ for m in model.models_]
    model.truncated_ = any(m.truncated_ for m in model.models_)
    return model


def save_model(model, path) -> None:
    """Serialize a fitted model to a JSON archive at ``path``.

    The write is atomic: content goes to a temporary file in the same
    directory which is then renamed over the target.

    Raises
    ------
    IoFailure
        If the path cannot be written.
    TypeError
        If the model type is not serializable by this module.
    """
    if isinstance(model, SparseTwoblockPLS):
        kind, payload = KIND_TWOBLOCK, _twoblock_payload(model)
    elif isinstance(model, Pls1Set):
        kind, payload = KIND_PLS1_SET, _pls1_set_payload(model)
    elif isinstance(model, NipalsPLS):
        kind, payload = KIND_PLS2, _pls_payload(model)
    else:
        raise TypeError(f"cannot serialize model of type {type(model).__name__}")
    document = {
        "schema_version": SCHEMA_VERSION,
        "estimator_kind": kind,
        "payload": payload,
    }
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    try:
        fd, tmp_path = tempfile.mkstemp(prefix=".tmp-archive-", dir=directory)
    except OSError as exc:
        raise IoFailure(f"cannot write model archive to {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            json.dump(document, handle, indent=1)
            handle.write("\n")
        os.replace(tmp_path, path)
    except OSError as exc:
        raise IoFailure(f"cannot write model archive to {path}: {exc}") from exc
    finally:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)


def load_model(path):
    """Load a model archive written by ``save_model``.

    Returns
    -------
    SparseTwoblockPLS, NipalsPLS, or Pls1Set
        Fitted estimator reproducing the saved one bitwise.

    Raises
    ------
    IoFailure
        If the file cannot be read.
    CorruptArchive
        If the content is not a valid archive.
    SchemaMismatch
        If the archive declares a different schema version.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except OSError as exc:
        raise IoFailure(f"cannot read model archive {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptArchive(f"model archive {path} is not valid JSON: {exc}") from exc
    if not isinstance(document, dict) or "schema_version" not in document:
        raise CorruptArchive(f"model archive {path} lacks a schema_version")
    version = document["schema_version"]
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"archive schema version {version!r} is not supported (expected {SCHEMA_VERSION})"
        )
    kind = document.get("estimator_kind")
    restorers = {
        KIND_TWOBLOCK: _restore_twoblock,
        KIND_PLS2: _restore_pls,
        KIND_PLS1_SET: _restore_pls1_set,
    }
    if kind not in restorers:
        raise CorruptArchive(f"unknown estimator kind {kind!r}")
    try:
        return restorers[kind](document["payload"])
    except (KeyError, TypeError) as exc:
        raise CorruptArchive(f"model archive {path} is incomplete: {exc}") from exc
