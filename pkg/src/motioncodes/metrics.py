"""Distances between motion codes and accuracy reporting over prediction pairs."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyInputError
from .taxonomy import COMPONENT_NAMES, COMPONENT_SIZES, MotionCode, to_bits, to_classes

Pair = Tuple[MotionCode, MotionCode]

TABLE_ROW_LABELS = (
    "Entire code",
    "Entire code with 1 bit off",
    "Interaction",
    "Recurrence",
    "Prismatic trajectory",
    "Revolute trajectory",
    "Passive motion",
)

# Display label for each component, in code order.
COMPONENT_LABELS = dict(zip(COMPONENT_NAMES, TABLE_ROW_LABELS[2:]))


def hamming(a: MotionCode, b: MotionCode,
            weights: Optional[Sequence[float]] = None):
    """Number of differing bits, or the weighted sum over differing bits.

    Unweighted calls return an int in 0..9.  With weights (one per bit),
    the result is the float sum of the weights at differing positions.
    """
    bits_a = to_bits(a)
    bits_b = to_bits(b)
    if weights is None:
        return sum(x != y for x, y in zip(bits_a, bits_b))
    if len(weights) != 9:
        raise ValueError("weights must supply one value per bit")
    return float(sum(w for x, y, w in zip(bits_a, bits_b, weights) if x != y))


def component_distance(a: MotionCode, b: MotionCode) -> int:
    """Number of the five components whose classes differ (0..5)."""
    return sum(x != y for x, y in zip(to_classes(a), to_classes(b)))


def percent(count: int, total: int) -> str:
    """Percentage with one decimal place, halves rounded up."""
    if total <= 0:
        raise ValueError("total must be positive")
    value = Decimal(count) * 100 / Decimal(total)
    return str(value.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass
class EvalReport:
    """Accuracy summary over (predicted, truth) code pairs.

    Confusion matrices are indexed [truth][predicted] and sized by the
    component class counts (5, 2, 3, 3, 2).
    """

    n_samples: int
    exact_count: int
    within_1_count: int
    component_correct: Dict[str, int]
    confusions: Dict[str, np.ndarray]

    @property
    def exact_accuracy(self) -> float:
        return self.exact_count / self.n_samples

    @property
    def within_1_bit_accuracy(self) -> float:
        return self.within_1_count / self.n_samples

    @property
    def per_component_accuracy(self) -> Dict[str, float]:
        return {name: self.component_correct[name] / self.n_samples
                for name in COMPONENT_NAMES}

    def percentages(self) -> Dict[str, str]:
        """Row label to rendered percentage, rounding halves up."""
        values = {
            "Entire code": self.exact_count,
            "Entire code with 1 bit off": self.within_1_count,
        }
        for name in COMPONENT_NAMES:
            values[COMPONENT_LABELS[name]] = self.component_correct[name]
        return {label: percent(count, self.n_samples)
                for label, count in values.items()}

    def to_json_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "exact_count": self.exact_count,
            "exact_accuracy": self.exact_accuracy,
            "within_1_bit_count": self.within_1_count,
            "within_1_bit_accuracy": self.within_1_bit_accuracy,
            "per_component_correct": dict(self.component_correct),
            "per_component_accuracy": self.per_component_accuracy,
            "percentages": self.percentages(),
            "confusions": {name: m.tolist() for name, m in self.confusions.items()},
        }

    def to_table(self, label: str = "Accuracy") -> str:
        return format_accuracy_table({label: self})


def evaluate(pairs: Iterable[Pair]) -> EvalReport:
    """Score predicted codes against truth codes.

    Exact accuracy counts identical codes; the 1-bit-off rate counts pairs
    within bit-level Hamming distance one.
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyInputError("evaluate needs at least one (predicted, truth) pair")
    exact = 0
    within = 0
    component_correct = {name: 0 for name in COMPONENT_NAMES}
    confusions = {name: np.zeros((k, k), dtype=int)
                  for name, k in zip(COMPONENT_NAMES, COMPONENT_SIZES)}
    for predicted, truth in pairs:
        d = hamming(predicted, truth)
        exact += d == 0
        within += d <= 1
        pred_classes = to_classes(predicted)
        true_classes = to_classes(truth)
        for name, p, t in zip(COMPONENT_NAMES, pred_classes, true_classes):
            component_correct[name] += p == t
            confusions[name][t][p] += 1
    return EvalReport(len(pairs), exact, within, component_correct, confusions)


def within_k_accuracy(pairs: Iterable[Pair], k: int) -> float:
    """Fraction of pairs whose bit-level Hamming distance is at most k."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyInputError("within_k_accuracy needs at least one pair")
    if k < 0:
        raise ValueError("k must be non-negative")
    return sum(hamming(p, t) <= k for p, t in pairs) / len(pairs)


def format_accuracy_table(reports: Mapping[str, EvalReport]) -> str:
    """Fixed-width percentage table, one column per named report."""
    if not reports:
        raise EmptyInputError("format_accuracy_table needs at least one report")
    columns = {name: report.percentages() for name, report in reports.items()}
    label_width = max(len(label) for label in TABLE_ROW_LABELS)
    col_width = max(8, max(len(name) for name in columns) + 2)
    lines = ["".ljust(label_width)
             + "".join(name.rjust(col_width) for name in columns)]
    for label in TABLE_ROW_LABELS:
        row = label.ljust(label_width)
        row += "".join(columns[name][label].rjust(col_width) for name in columns)
        lines.append(row)
    return "\n".join(lines)
