"""File formats: matrices as JSON or CSV, models as kind-tagged JSON.

All writers are deterministic (sorted JSON keys, fixed float format, no
timestamps) so identical runs produce byte-identical artifacts.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .charfn import CharFnModel, Empirical, Gaussian, SymStable, WordProduct

__all__ = [
    "format_float",
    "read_json",
    "write_json",
    "matrix_to_dict",
    "matrix_from_payload",
    "read_matrix",
    "write_matrix",
    "write_csv",
    "model_to_dict",
    "model_from_dict",
]

FLOAT_FORMAT = "%.17g"


def format_float(x: float) -> str:
    return FLOAT_FORMAT % float(x)


def read_json(path: Union[str, Path]) -> object:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path: Union[str, Path], payload: object) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def matrix_to_dict(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=float)
    return {"dim": int(m.shape[0]), "entries": m.tolist()}


def matrix_from_payload(payload: object, origin: str = "matrix") -> np.ndarray:
    if isinstance(payload, dict):
        if "entries" not in payload:
            raise ValueError(f"{origin}: expected an 'entries' key")
        m = np.array(payload["entries"], dtype=float)
        declared = payload.get("dim")
        if declared is not None and m.shape != (int(declared), int(declared)):
            raise ValueError(
                f"{origin}: declared dim {declared} does not match entries of shape {m.shape}"
            )
    else:
        m = np.array(payload, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"{origin}: entries must form a nonempty square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{origin}: entries must be finite")
    return m


def read_matrix(path: Union[str, Path]) -> np.ndarray:
    """Read a square matrix from .json ({dim, entries}) or .csv (header dim)."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return matrix_from_payload(read_json(path), origin=str(path))
    if path.suffix.lower() == ".csv":
        lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("dim"):
            raise ValueError(f"{path}: CSV matrix needs a 'dim,<d>' header line")
        try:
            d = int(lines[0].split(",")[1])
        except (IndexError, ValueError):
            raise ValueError(f"{path}: malformed header {lines[0]!r}")
        rows = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
        m = np.array(rows, dtype=float)
        if m.shape != (d, d):
            raise ValueError(f"{path}: header says {d}x{d} but body has shape {m.shape}")
        return matrix_from_payload(m, origin=str(path))
    raise ValueError(f"{path}: matrices are read from .json or .csv files")


def write_matrix(path: Union[str, Path], m: np.ndarray) -> None:
    path = Path(path)
    m = np.asarray(m, dtype=float)
    if path.suffix.lower() == ".json":
        write_json(path, matrix_to_dict(m))
        return
    if path.suffix.lower() == ".csv":
        lines = [f"dim,{m.shape[0]}"]
        for row in m:
            lines.append(",".join(format_float(x) for x in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return
    raise ValueError(f"{path}: matrices are written to .json or .csv files")


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows with floats in fixed 17-significant-digit format."""

    def cell(x) -> str:
        if isinstance(x, (bool, np.bool_)):
            return str(bool(x)).lower()
        if isinstance(x, (int, np.integer)):
            return str(int(x))
        return format_float(x)

    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def model_to_dict(model: CharFnModel) -> dict:
    if isinstance(model, Gaussian):
        return {"kind": "gaussian", "form": model.form.tolist()}
    if isinstance(model, SymStable):
        return {"kind": "sym_stable", "alpha": model.alpha, "scale": model.scale, "dim": model.dim}
    if isinstance(model, WordProduct):
        return {
            "kind": "word_product",
            "base": model_to_dict(model.base),
            "words": [w.tolist() for w in model.words],
        }
    if isinstance(model, Empirical):
        return {"kind": "empirical", "samples": model.samples.tolist()}
    raise TypeError(f"unknown model type {type(model).__name__}")


def model_from_dict(payload: dict) -> CharFnModel:
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ValueError("model payload must be an object with a 'kind' tag")
    kind = payload["kind"]
    if kind == "gaussian":
        return Gaussian(form=np.array(payload["form"], dtype=float))
    if kind == "sym_stable":
        return SymStable(
            alpha=float(payload["alpha"]),
            scale=float(payload.get("scale", 1.0)),
            dim=int(payload.get("dim", 1)),
        )
    if kind == "word_product":
        words = tuple(matrix_from_payload(w, origin="word") for w in payload["words"])
        return WordProduct(base=model_from_dict(payload["base"]), words=words)
    if kind == "empirical":
        return Empirical(samples=np.array(payload["samples"], dtype=float))
    raise ValueError(f"unknown model kind {kind!r}")
