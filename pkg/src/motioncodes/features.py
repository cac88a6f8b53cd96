"""Feature records, noun embeddings, and the dataset and embedding file formats."""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, List, Optional, Tuple, Union

import numpy as np

from .errors import DatasetParseError, DimensionMismatchError
from .taxonomy import MotionCode, format_code, parse_code

PathOrStream = Union[str, Path, IO]


@contextmanager
def _open_text(source: PathOrStream, mode: str):
    if hasattr(source, "read") or hasattr(source, "write"):
        yield source
    else:
        with open(source, mode, encoding="utf-8") as handle:
            yield handle


class EmbeddingTable:
    """Fixed-dimension word vectors keyed by lowercase token."""

    def __init__(self, dimension: int):
        if dimension <= 0:
            raise ValueError("embedding dimension must be positive")
        self.dimension = int(dimension)
        self._vectors: dict[str, np.ndarray] = {}

    def add(self, token: str, vector) -> None:
        token = token.strip().lower()
        if not token:
            raise ValueError("embedding tokens must be non-empty")
        vec = np.asarray(vector, dtype=float)
        if vec.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"vector for {token!r} has shape {vec.shape}, expected ({self.dimension},)")
        self._vectors[token] = vec

    def tokens(self) -> List[str]:
        """All tokens in sorted order."""
        return sorted(self._vectors)

    def __contains__(self, token: str) -> bool:
        return token.strip().lower() in self._vectors

    def __getitem__(self, token: str) -> np.ndarray:
        return self._vectors[token.strip().lower()]

    def __len__(self) -> int:
        return len(self._vectors)


def load_embeddings(source: PathOrStream) -> EmbeddingTable:
    """Read a text embedding table: one ``token v1 ... vd`` line per token.

    An optional first line of two integers (count and dimension) is
    detected and skipped.
    """
    with _open_text(source, "r") as handle:
        lines = [line.rstrip("\n") for line in handle]
    rows = [(i + 1, line.split()) for i, line in enumerate(lines) if line.strip()]
    if rows and len(rows[0][1]) == 2:
        try:
            int(rows[0][1][0]), int(rows[0][1][1])
            rows = rows[1:]
        except ValueError:
            pass
    if not rows:
        raise DatasetParseError("embedding table holds no vectors")
    table: Optional[EmbeddingTable] = None
    for lineno, parts in rows:
        if len(parts) < 2:
            raise DatasetParseError(f"line {lineno}: token without vector values")
        token = parts[0]
        try:
            values = [float(v) for v in parts[1:]]
        except ValueError as exc:
            raise DatasetParseError(f"line {lineno}: {exc}") from exc
        if table is None:
            table = EmbeddingTable(len(values))
        if len(values) != table.dimension:
            raise DimensionMismatchError(
                f"line {lineno}: vector length {len(values)} does not match "
                f"the table dimension {table.dimension}")
        table.add(token, values)
    return table


def save_embeddings(table: EmbeddingTable, target: PathOrStream,
                    header: bool = True) -> None:
    """Write the text format; the header line carries count and dimension."""
    with _open_text(target, "w") as handle:
        if header:
            handle.write(f"{len(table)} {table.dimension}\n")
        for token in table.tokens():
            values = " ".join(format(float(v), ".17g") for v in table[token])
            handle.write(f"{token} {values}\n")


def embed_nouns(table: EmbeddingTable, nouns: Iterable[str]) -> Tuple[np.ndarray, int]:
    """Mean vector of the known tokens, and how many tokens were unknown.

    With no known tokens the vector is all zeros, so unknown nouns never
    perturb the features.
    """
    known = []
    unknown = 0
    for noun in nouns:
        token = noun.strip().lower()
        if token in table:
            known.append(table[token])
        else:
            unknown += 1
    if not known:
        return np.zeros(table.dimension), unknown
    return np.mean(known, axis=0), unknown


@dataclass
class FeatureRecord:
    """One sample: visual features for both modalities, nouns, optional label."""

    id: str
    rgb: np.ndarray
    flow: np.ndarray
    nouns: List[str] = field(default_factory=list)
    label: Optional[MotionCode] = None

    def __post_init__(self):
        self.rgb = np.asarray(self.rgb, dtype=float)
        self.flow = np.asarray(self.flow, dtype=float)
        if self.rgb.ndim != 1 or self.flow.ndim != 1:
            raise DimensionMismatchError(
                f"record {self.id!r}: rgb and flow must be flat vectors")
        if self.rgb.shape != self.flow.shape:
            raise DimensionMismatchError(
                f"record {self.id!r}: rgb length {self.rgb.size} differs from "
                f"flow length {self.flow.size}")


def build_features(record: FeatureRecord, modality: str,
                   table: Optional[EmbeddingTable] = None,
                   use_nouns: bool = False) -> np.ndarray:
    """Input vector for one modality: visual features, then the noun mean."""
    if modality not in ("rgb", "flow"):
        raise ValueError(f"modality must be 'rgb' or 'flow', not {modality!r}")
    visual = record.rgb if modality == "rgb" else record.flow
    if not use_nouns:
        return visual
    if table is None:
        raise ValueError("an embedding table is required when use_nouns is set")
    noun_vec, _ = embed_nouns(table, record.nouns)
    return np.concatenate([visual, noun_vec])


def load_dataset(source: PathOrStream) -> List[FeatureRecord]:
    """Read JSON Lines records; the ``code`` field is optional.

    All records must share one visual feature length.
    """
    with _open_text(source, "r") as handle:
        lines = list(handle)
    records = []
    dim = None
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetParseError(f"line {i}: not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise DatasetParseError(f"line {i}: record is not an object")
        for key in ("id", "rgb", "flow"):
            if key not in obj:
                raise DatasetParseError(f"line {i}: record misses the {key!r} field")
        nouns = obj.get("nouns", [])
        if not isinstance(nouns, list) or any(not isinstance(n, str) for n in nouns):
            raise DatasetParseError(f"line {i}: \"nouns\" must be an array of strings")
        label = None
        if obj.get("code") is not None:
            try:
                label = parse_code(obj["code"])
            except Exception as exc:
                raise DatasetParseError(f"line {i}: {exc}") from exc
        try:
            record = FeatureRecord(str(obj["id"]), obj["rgb"], obj["flow"],
                                   list(nouns), label)
        except (DimensionMismatchError, ValueError, TypeError) as exc:
            raise DatasetParseError(f"line {i}: {exc}") from exc
        if dim is None:
            dim = record.rgb.size
        elif record.rgb.size != dim:
            raise DimensionMismatchError(
                f"line {i}: visual feature length {record.rgb.size} differs "
                f"from the dataset's length {dim}")
        records.append(record)
    return records


def save_dataset(records: Iterable[FeatureRecord], target: PathOrStream) -> None:
    """Write records as JSON Lines; unlabeled records omit the code field."""
    with _open_text(target, "w") as handle:
        for record in records:
            obj = {
                "id": record.id,
                "rgb": [float(v) for v in record.rgb],
                "flow": [float(v) for v in record.flow],
                "nouns": list(record.nouns),
            }
            if record.label is not None:
                obj["code"] = format_code(record.label)
            handle.write(json.dumps(obj) + "\n")
