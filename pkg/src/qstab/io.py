"""File formats and user-facing parsing.

Channel file (JSON):
    {"schema": "qchan/1", "dim": d,
     "kraus": [matrix, ...],            # each matrix: rows of [re, im] pairs
     "metadata": {...}}                 # optional

State file (JSON): {"matrix": rows-of-[re, im]-pairs} or the bare rows.

Subspace spec grammar: comma-separated 1-based basis indices ("1,3"),
or "@file.json" with explicit vectors (orthonormalized on load);
several parts are separated by ";".

Floating-point entries are serialized with shortest round-trip decimal
representation (at most 17 significant digits), so write-then-read is
bit-identical.
"""

import json

import numpy as np

from .channel import KrausMap
from .linalg import SubspaceBasis, column_space
from .tolerances import ORTH_TOL

__all__ = [
    "CHANNEL_SCHEMA",
    "ChannelFormatError",
    "encode_matrix",
    "decode_matrix",
    "write_channel",
    "read_channel",
    "channel_document",
    "read_state",
    "parse_subspace_spec",
    "parse_parts_spec",
    "axis_aligned_indices",
]

CHANNEL_SCHEMA = "qchan/1"


class ChannelFormatError(ValueError):
    """Malformed channel, state or subspace file."""


def encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(rows, context: str = "matrix") -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ChannelFormatError(f"{context}: entries must be [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ChannelFormatError(
            f"{context}: expected rows of [re, im] pairs, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def channel_document(kmap: KrausMap, metadata: dict | None = None) -> dict:
    doc = {
        "schema": CHANNEL_SCHEMA,
        "dim": kmap.dim,
        "kraus": [encode_matrix(m) for m in kmap.ops],
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def write_channel(kmap: KrausMap, path, metadata: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(channel_document(kmap, metadata), fp, indent=1)
        fp.write("\n")


def read_channel(path) -> tuple[KrausMap, dict]:
    try:
        with open(path, "r", encoding="utf-8") as fp:
            doc = json.load(fp)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    except OSError as exc:
        raise ChannelFormatError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ChannelFormatError(f"{path}: expected a JSON object")
    if doc.get("schema") != CHANNEL_SCHEMA:
        raise ChannelFormatError(
            f"{path}: unsupported schema {doc.get('schema')!r}, expected {CHANNEL_SCHEMA!r}"
        )
    if "dim" not in doc or "kraus" not in doc:
        raise ChannelFormatError(f"{path}: missing 'dim' or 'kraus'")
    dim = doc["dim"]
    mats = [decode_matrix(m, f"kraus[{i}]") for i, m in enumerate(doc["kraus"])]
    for i, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise ChannelFormatError(
                f"{path}: kraus[{i}] has shape {m.shape}, expected ({dim}, {dim})"
            )
    try:
        kmap = KrausMap.from_matrices(mats)
    except ValueError as exc:
        raise ChannelFormatError(f"{path}: {exc}") from exc
    return kmap, doc.get("metadata", {})


def read_state(path, dim: int) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fp:
            doc = json.load(fp)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    except OSError as exc:
        raise ChannelFormatError(f"{path}: {exc}") from exc
    rows = doc.get("matrix") if isinstance(doc, dict) else doc
    m = decode_matrix(rows, "state")
    if m.shape != (dim, dim):
        raise ChannelFormatError(
            f"{path}: state has shape {m.shape}, expected ({dim}, {dim})"
        )
    return m


def _subspace_from_file(path, dim: int) -> SubspaceBasis:
    try:
        with open(path, "r", encoding="utf-8") as fp:
            doc = json.load(fp)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    except OSError as exc:
        raise ChannelFormatError(f"{path}: {exc}") from exc
    rows = doc.get("vectors") if isinstance(doc, dict) else doc
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ChannelFormatError(f"{path}: vectors must be lists of [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ChannelFormatError(f"{path}: expected vectors of [re, im] pairs")
    vectors = arr[..., 0] + 1j * arr[..., 1]
    if vectors.shape[1] != dim:
        raise ChannelFormatError(
            f"{path}: vectors have length {vectors.shape[1]}, expected {dim}"
        )
    return column_space(vectors.T)


def parse_subspace_spec(spec: str, dim: int) -> SubspaceBasis:
    """Parse "1,3" (1-based indices) or "@vectors.json"."""
    spec = spec.strip()
    if not spec:
        raise ChannelFormatError("empty subspace spec")
    if spec.startswith("@"):
        return _subspace_from_file(spec[1:], dim)
    try:
        indices = [int(tok) for tok in spec.split(",")]
    except ValueError as exc:
        raise ChannelFormatError(
            f"subspace spec {spec!r}: expected comma-separated 1-based indices or @file"
        ) from exc
    for i in indices:
        if not 1 <= i <= dim:
            raise ChannelFormatError(
                f"subspace spec {spec!r}: index {i} out of range 1..{dim}"
            )
    if len(set(indices)) != len(indices):
        raise ChannelFormatError(f"subspace spec {spec!r}: repeated index")
    return SubspaceBasis.from_indices(dim, [i - 1 for i in indices])


def parse_parts_spec(spec: str, dim: int) -> list[SubspaceBasis]:
    parts = [tok for tok in spec.split(";") if tok.strip()]
    if not parts:
        raise ChannelFormatError("empty parts spec")
    return [parse_subspace_spec(tok, dim) for tok in parts]


def axis_aligned_indices(subspace: SubspaceBasis) -> list[int] | None:
    """1-based computational-basis indices when the subspace is an
    axis-aligned coordinate subspace within tolerance, else None."""
    p = subspace.projector()
    diag = np.real(np.diag(p))
    sel = diag > 0.5
    if int(np.sum(sel)) != subspace.dim:
        return None
    ideal = np.zeros_like(p)
    ideal[np.where(sel)[0], np.where(sel)[0]] = 1.0
    if np.linalg.norm(p - ideal) > ORTH_TOL * subspace.ambient_dim:
        return None
    return [int(i) + 1 for i in np.where(sel)[0]]
