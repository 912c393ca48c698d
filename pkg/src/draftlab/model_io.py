"""Versioned model persistence.

One JSON text envelope for every model kind (gae | lr | fm | winratio), with
avatar names in index order and all arrays row-major. Floats are serialized
with full round-trip precision and the writer is byte-deterministic: saving
the same model twice produces identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import FMParams, LRParams, WinRatioMatrix
from .errors import DataError
from .model import AvatarRegistry, ModelParams

FORMAT_NAME = "draftlab-model"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class SavedModel:
    kind: str
    registry: AvatarRegistry
    model: object  # ModelParams | LRParams | FMParams | WinRatioMatrix


def _flat(arr) -> list[float]:
    return [float(x) for x in np.asarray(arr).reshape(-1)]


def _payload(obj, registry: AvatarRegistry | None) -> dict:
    if isinstance(obj, ModelParams):
        return {
            "kind": "gae",
            "n_avatars": obj.n_avatars,
            "latent_dim": obj.latent_dim,
            "avatars": list(obj.registry.names),
            "embeddings": _flat(obj.embeddings),
            "synergy": _flat(obj.synergy),
            "opposition": _flat(obj.opposition),
            "bias": _flat(obj.bias),
        }
    if registry is None:
        raise DataError("baseline models need an explicit registry to be saved")
    if isinstance(obj, LRParams):
        return {
            "kind": "lr",
            "n_avatars": len(registry),
            "avatars": list(registry.names),
            "weights": _flat(obj.weights),
            "intercept": float(obj.intercept),
        }
    if isinstance(obj, FMParams):
        return {
            "kind": "fm",
            "n_avatars": len(registry),
            "k_fm": int(obj.factors.shape[1]),
            "avatars": list(registry.names),
            "first_order": _flat(obj.first_order),
            "factors": _flat(obj.factors),
            "intercept": float(obj.intercept),
        }
    if isinstance(obj, WinRatioMatrix):
        return {
            "kind": "winratio",
            "n_avatars": obj.ratios.shape[0],
            "avatars": list(registry.names),
            "ratios": _flat(obj.ratios),
            "counts": [int(c) for c in obj.counts.reshape(-1)],
        }
    raise DataError(f"cannot persist object of type {type(obj).__name__}")


def save_model(path, obj, registry: AvatarRegistry | None = None) -> None:
    payload = _payload(obj, registry)
    payload["format"] = FORMAT_NAME
    payload["format_version"] = FORMAT_VERSION
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    Path(path).write_text(text + "\n", encoding="utf-8")


def _shaped(payload, key, shape) -> np.ndarray:
    values = payload.get(key)
    expected = int(np.prod(shape))
    if not isinstance(values, list) or len(values) != expected:
        raise DataError(f"field {key!r} must hold {expected} values")
    return np.asarray(values, dtype=np.float64).reshape(shape)


def load_model(path) -> SavedModel:
    """Parse and validate a model file; all type invariants are re-checked."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid json: {exc.msg}") from None
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_NAME:
        raise DataError(f"{path} is not a {FORMAT_NAME} file")
    if payload.get("format_version") != FORMAT_VERSION:
        raise DataError(f"unsupported format_version {payload.get('format_version')!r}")
    kind = payload.get("kind")
    avatars = payload.get("avatars")
    if not isinstance(avatars, list) or not avatars:
        raise DataError("model file missing avatar names")
    registry = AvatarRegistry(avatars)
    n = len(registry)
    if payload.get("n_avatars") != n:
        raise DataError("n_avatars does not match the avatar name list")

    if kind == "gae":
        k = payload.get("latent_dim")
        if not isinstance(k, int) or k < 1:
            raise DataError("latent_dim must be a positive integer")
        params = ModelParams(embeddings=_shaped(payload, "embeddings", (n, k)),
                             synergy=_shaped(payload, "synergy", (k, k)),
                             opposition=_shaped(payload, "opposition", (k, k)),
                             bias=_shaped(payload, "bias", (n,)),
                             registry=registry)
        return SavedModel(kind="gae", registry=registry, model=params)
    if kind == "lr":
        lr = LRParams(weights=_shaped(payload, "weights", (2 * n,)),
                      intercept=float(payload.get("intercept", 0.0)))
        return SavedModel(kind="lr", registry=registry, model=lr)
    if kind == "fm":
        k_fm = payload.get("k_fm")
        if not isinstance(k_fm, int) or k_fm < 1:
            raise DataError("k_fm must be a positive integer")
        fm = FMParams(first_order=_shaped(payload, "first_order", (2 * n,)),
                      factors=_shaped(payload, "factors", (2 * n, k_fm)),
                      intercept=float(payload.get("intercept", 0.0)))
        return SavedModel(kind="fm", registry=registry, model=fm)
    if kind == "winratio":
        counts = payload.get("counts")
        if not isinstance(counts, list) or len(counts) != n * 2 * n:
            raise DataError("counts must hold N*2N values")
        matrix = WinRatioMatrix(ratios=_shaped(payload, "ratios", (n, 2 * n)),
                                counts=np.asarray(counts, dtype=np.int64).reshape(n, 2 * n))
        return SavedModel(kind="winratio", registry=registry, model=matrix)
    raise DataError(f"unknown model kind {kind!r}")


def load_gae(path) -> ModelParams:
    """Load a file that must contain an embedding model."""
    saved = load_model(path)
    if saved.kind != "gae":
        raise DataError(f"{path} holds a {saved.kind!r} model, expected 'gae'")
    return saved.model
