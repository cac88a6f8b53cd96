"""Seeded synthetic datasets for desk-scale verification of the predictor."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import DimensionTooSmallError, VocabularyTooSmallError
from .features import EmbeddingTable, FeatureRecord
from .taxonomy import COMPONENT_SIZES, MotionCode, to_bits, to_classes

# One direction per component class: 5 + 2 + 3 + 3 + 2.
_N_DIRECTIONS = sum(COMPONENT_SIZES)
_OFFSETS = tuple(sum(COMPONENT_SIZES[:i]) for i in range(len(COMPONENT_SIZES)))


def synth_dataset(codes: Sequence[MotionCode], n: int, d_v: int = 64,
                  sigma: float = 0.1, seed: int = 0,
                  ) -> Tuple[List[FeatureRecord], EmbeddingTable]:
    """Generate labeled records whose features encode their code's classes.

    Every component class gets a seeded unit direction (the set is
    orthonormalized, so classes are linearly separable by construction).
    A record's rgb and flow vectors are the sum of its label's five class
    directions plus independent Gaussian noise of the given scale.  Labels
    cycle through the code list, and each distinct code maps to one
    synthetic noun token whose embedding is the clean, noise-free sum, so
    noun features fully reveal the code.
    """
    codes = list(codes)
    if not codes:
        raise ValueError("codes must list at least one code")
    if n < 0:
        raise ValueError("n must be non-negative")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if d_v < _N_DIRECTIONS:
        raise DimensionTooSmallError(
            f"d_v must be at least {_N_DIRECTIONS} to fit one direction per "
            f"component class, got {d_v}")
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((d_v, _N_DIRECTIONS)))

    def clean_signal(code: MotionCode) -> np.ndarray:
        columns = [off + c for off, c in zip(_OFFSETS, to_classes(code))]
        return basis[:, columns].sum(axis=1)

    signals = {}
    tokens = {}
    table = EmbeddingTable(d_v)
    for code in codes:
        bits = to_bits(code)
        if bits not in signals:
            signals[bits] = clean_signal(code)
            tokens[bits] = "obj" + bits
            table.add(tokens[bits], signals[bits])
    rgb_noise = rng.standard_normal((n, d_v)) * sigma
    flow_noise = rng.standard_normal((n, d_v)) * sigma
    records = []
    for i in range(n):
        code = codes[i % len(codes)]
        bits = to_bits(code)
        records.append(FeatureRecord(
            id=f"synth-{i:05d}",
            rgb=signals[bits] + rgb_noise[i],
            flow=signals[bits] + flow_noise[i],
            nouns=[tokens[bits]],
            label=code,
        ))
    return records, table


def inject_noun_noise(dataset: Iterable[FeatureRecord], rho: float,
                      vocabulary: Sequence[str], seed: int = 0,
                      ) -> List[FeatureRecord]:
    """Corrupt the nouns of exactly floor(rho * n) records, chosen without replacement.

    Each chosen record's noun list is replaced by a single token drawn
    uniformly from the vocabulary, excluding the record's original first
    noun.  All other fields, and all other records, are untouched.
    """
    records = list(dataset)
    if not 0 <= rho <= 1:
        raise ValueError("rho must lie in [0, 1]")
    if len(set(vocabulary)) < 2:
        raise VocabularyTooSmallError(
            "noun noise needs at least two distinct vocabulary tokens")
    n = len(records)
    # The epsilon guards floor against float dust in rho * n (e.g. 0.3 * 10).
    count = math.floor(rho * n + 1e-9)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(n, size=count, replace=False) if count else []
    result = list(records)
    for idx in chosen:
        record = records[int(idx)]
        original = record.nouns[0] if record.nouns else None
        options = [t for t in vocabulary if t != original]
        pick = options[int(rng.integers(len(options)))]
        result[int(idx)] = replace(record, nouns=[pick])
    return result
