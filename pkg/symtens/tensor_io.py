"""Tensor and vector-list JSON files.

Tensor file: {"field": "real" | "complex", "shape": [...], "data": [...]} with data
in row-major order and complex entries written as [re, im] pairs. Python's float
repr is shortest-round-trip, so decimal values survive a read/write cycle bit-exactly.

Vector-list file: {"field": ..., "vectors": [[...], ...], "tensor": <optional tensor>}.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from symtens.core import CPDecomposition, DenseTensor, Field, SymDecomposition, as_vector

log = logging.getLogger(__name__)


# ── Encoding ──


def encode_scalar(x) -> float | list[float]:
    if np.iscomplexobj(x):
        return [float(np.real(x)), float(np.imag(x))]
    return float(x)


def encode_vector(v: np.ndarray) -> list:
    return [encode_scalar(x) for x in np.asarray(v)]


def encode_tensor(t: DenseTensor) -> dict[str, Any]:
    if t.field is Field.COMPLEX:
        data = [[float(x.real), float(x.imag)] for x in t.data]
    else:
        data = [float(x) for x in t.data]
    return {"field": t.field.value, "shape": list(t.shape), "data": data}


def encode_witness(w) -> dict[str, Any] | None:
    if w is None:
        return None
    if isinstance(w, DenseTensor):
        return {"kind": "tensor", **encode_tensor(w)}
    if isinstance(w, SymDecomposition):
        return {
            "kind": "sym_decomposition",
            "field": w.field.value,
            "terms": [
                {"coeff": encode_scalar(t.coeff), "vectors": [encode_vector(v) for v in t.vectors]}
                for t in w.terms
            ],
        }
    if isinstance(w, CPDecomposition):
        return {
            "kind": "cp_decomposition",
            "field": w.field.value,
            "terms": [[encode_vector(v) for v in vecs] for vecs in w.terms()],
        }
    raise TypeError(f"cannot encode witness of type {type(w).__name__}")


# ── Decoding ──


def _decode_entries(raw: list, field: Field, where: str) -> np.ndarray:
    if field is Field.REAL:
        try:
            return np.array([float(x) for x in raw], dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise ValueError(f"{where}: real entries must be numbers ({e})") from e
    out = np.empty(len(raw), dtype=np.complex128)
    for i, x in enumerate(raw):
        if isinstance(x, (int, float)):
            out[i] = float(x)
        elif isinstance(x, list) and len(x) == 2:
            out[i] = complex(float(x[0]), float(x[1]))
        else:
            raise ValueError(f"{where}: complex entry {i} must be [re, im], got {x!r}")
    return out


def _parse_field(raw: Any, where: str) -> Field:
    try:
        return Field(raw)
    except ValueError:
        raise ValueError(f"{where}: field must be 'real' or 'complex', got {raw!r}") from None


def decode_tensor(obj: dict[str, Any], where: str = "tensor") -> DenseTensor:
    missing = {"field", "shape", "data"} - set(obj)
    if missing:
        raise ValueError(f"{where}: missing keys {sorted(missing)}")
    field = _parse_field(obj["field"], where)
    shape = obj["shape"]
    if not isinstance(shape, list) or not all(isinstance(s, int) and s >= 1 for s in shape):
        raise ValueError(f"{where}: shape must be a list of positive integers, got {shape!r}")
    data = _decode_entries(obj["data"], field, where)
    return DenseTensor.from_flat(field, shape, data)


def decode_vector(raw: list, field: Field, where: str = "vector") -> np.ndarray:
    return as_vector(_decode_entries(raw, field, where), field)


def _load_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e


def read_tensor(path: str | Path) -> DenseTensor:
    path = Path(path)
    return decode_tensor(_load_json(path), where=str(path))


def write_tensor(path: str | Path, t: DenseTensor) -> None:
    Path(path).write_text(json.dumps(encode_tensor(t)) + "\n")


def read_vectors(path: str | Path) -> tuple[Field, list[np.ndarray], DenseTensor | None]:
    path = Path(path)
    obj = _load_json(path)
    where = str(path)
    if "vectors" not in obj or not isinstance(obj["vectors"], list) or not obj["vectors"]:
        raise ValueError(f"{where}: expected a non-empty 'vectors' list")
    field = _parse_field(obj.get("field", "real"), where)
    vectors = [decode_vector(v, field, f"{where}: vectors[{i}]") for i, v in enumerate(obj["vectors"])]
    tensor = decode_tensor(obj["tensor"], f"{where}: tensor") if obj.get("tensor") else None
    return field, vectors, tensor


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
