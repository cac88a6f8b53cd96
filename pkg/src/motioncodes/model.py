"""Per-component softmax classifiers over precomputed features, with late fusion.

One model carries five affine softmax heads per modality (rgb and flow),
one head per code component, so the heads share an input but are otherwise
independent.  Training minimizes the lambda-weighted sum of per-head cross
entropies plus an L2 penalty on all parameters, by mini-batch descent with
a step-decayed learning rate; the update is either a plain gradient step
or Adam.  Fusion averages the two modalities' post-softmax probabilities
head by head.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, IO, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyBatchError,
    UnlabeledRecordError,
)
from .features import EmbeddingTable, FeatureRecord, build_features
from .taxonomy import (
    COMPONENT_SIZES,
    ComponentClasses,
    MotionCode,
    from_classes,
    to_classes,
)

MODALITIES = ("rgb", "flow")
OPTIMIZERS = ("sgd", "adam")

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8

Batch = Sequence[Tuple[np.ndarray, ComponentClasses]]


def softmax(logits: np.ndarray) -> np.ndarray:
    """Softmax along the last axis, stable under large logits."""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


@dataclass
class HeadParams:
    """Affine parameters of one head: weights (classes, features), bias (classes,)."""

    weights: np.ndarray
    bias: np.ndarray

    def copy(self) -> "HeadParams":
        return HeadParams(self.weights.copy(), self.bias.copy())


@dataclass(frozen=True)
class ModelConfig:
    """Architecture and loss settings; the seed fixes the initialization.

    The optimizer field only records how the model was (or will be) fit.
    """

    d_v: int
    d_n: int = 0
    use_nouns: bool = False
    lambdas: Tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0)
    weight_decay: float = 0.0
    seed: int = 0
    optimizer: str = "adam"

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if self.d_v <= 0:
            raise ValueError("d_v must be positive")
        if self.d_n < 0:
            raise ValueError("d_n must be non-negative")
        if self.use_nouns and self.d_n == 0:
            raise ValueError("use_nouns requires a positive d_n")
        if len(self.lambdas) != 5:
            raise ValueError("lambdas must hold five weights")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")

    @property
    def input_dim(self) -> int:
        return self.d_v + (self.d_n if self.use_nouns else 0)


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings; the seed fixes the shuffling order.

    weight_decay of None defers to the model's own setting; a value here
    overrides it and is recorded on the trained model.  The optimizer is
    either "adam" (the default) or "sgd" for a plain gradient step; both
    follow the same step-decayed learning rate schedule.
    """

    epochs: int = 50
    base_lr: float = 3e-4
    decay_factor: float = 0.6
    decay_every: int = 5
    batch_size: int = 4
    weight_decay: Optional[float] = None
    seed: int = 0
    optimizer: str = "adam"

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.base_lr <= 0:
            raise ValueError("base_lr must be positive")
        if not 0 < self.decay_factor <= 1:
            raise ValueError("decay_factor must be in (0, 1]")
        if self.decay_every <= 0:
            raise ValueError("decay_every must be positive")
        if self.batch_size <= 0:
            raise ValueError("batch_size must be positive")
        if self.weight_decay is not None and self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")


def learning_rate_at(config: TrainConfig, epoch: int) -> float:
    """Step-decayed rate: the base rate cut by the decay factor every few epochs."""
    if epoch < 0:
        raise ValueError("epoch must be non-negative")
    return config.base_lr * config.decay_factor ** (epoch // config.decay_every)


class PredictorModel:
    """Five affine softmax heads per modality sharing one configuration."""

    def __init__(self, config: ModelConfig, heads: Dict[str, List[HeadParams]]):
        if set(heads) != set(MODALITIES):
            raise ValueError(f"heads must cover exactly the modalities {MODALITIES}")
        d = config.input_dim
        for modality in MODALITIES:
            if len(heads[modality]) != len(COMPONENT_SIZES):
                raise DimensionMismatchError(
                    f"{modality} needs one head per component")
            for k, head in zip(COMPONENT_SIZES, heads[modality]):
                if head.weights.shape != (k, d) or head.bias.shape != (k,):
                    raise DimensionMismatchError(
                        f"{modality} head has shape {head.weights.shape}, "
                        f"expected ({k}, {d})")
        self.config = config
        self.heads = heads

    @classmethod
    def initialized(cls, config: ModelConfig) -> "PredictorModel":
        """Seeded init: weights uniform in [-1/sqrt(d), 1/sqrt(d)], zero biases."""
        d = config.input_dim
        bound = 1.0 / math.sqrt(d)
        children = np.random.SeedSequence(config.seed).spawn(len(MODALITIES))
        heads = {}
        for modality, seq in zip(MODALITIES, children):
            rng = np.random.default_rng(seq)
            heads[modality] = [
                HeadParams(rng.uniform(-bound, bound, size=(k, d)), np.zeros(k))
                for k in COMPONENT_SIZES
            ]
        return cls(config, heads)

    @classmethod
    def zeros(cls, config: ModelConfig) -> "PredictorModel":
        """All-zero parameters; every head outputs the uniform distribution."""
        d = config.input_dim
        heads = {
            modality: [HeadParams(np.zeros((k, d)), np.zeros(k)) for k in COMPONENT_SIZES]
            for modality in MODALITIES
        }
        return cls(config, heads)

    def copy(self) -> "PredictorModel":
        return PredictorModel(
            self.config,
            {m: [h.copy() for h in self.heads[m]] for m in MODALITIES},
        )


def _check_modality(model: PredictorModel, modality: str) -> List[HeadParams]:
    if modality not in MODALITIES:
        raise ValueError(f"modality must be 'rgb' or 'flow', not {modality!r}")
    return model.heads[modality]


def _stack_batch(batch: Batch, input_dim: int) -> Tuple[np.ndarray, np.ndarray]:
    batch = list(batch)
    if not batch:
        raise EmptyBatchError("the batch holds no samples")
    X = np.asarray([np.asarray(xi, dtype=float) for xi, _ in batch])
    if X.ndim != 2 or X.shape[1] != input_dim:
        raise DimensionMismatchError(
            f"batch features have shape {X.shape}, expected (n, {input_dim})")
    Y = np.asarray([tuple(classes) for _, classes in batch], dtype=int)
    return X, Y


def forward(model: PredictorModel, xi: np.ndarray, modality: str) -> List[np.ndarray]:
    """Per-head class probabilities for one input vector."""
    heads = _check_modality(model, modality)
    x = np.asarray(xi, dtype=float)
    if x.shape != (model.config.input_dim,):
        raise DimensionMismatchError(
            f"input has shape {x.shape}, expected ({model.config.input_dim},)")
    return [softmax(head.weights @ x + head.bias) for head in heads]


def _head_objective(head: HeadParams, X: np.ndarray, y: np.ndarray):
    """Cross entropy terms and probabilities for one head over a batch."""
    logits = X @ head.weights.T + head.bias
    peak = np.max(logits, axis=1, keepdims=True)
    shifted = logits - peak
    sum_exp = np.sum(np.exp(shifted), axis=1)
    log_probs = shifted - np.log(sum_exp)[:, None]
    ce = -log_probs[np.arange(len(X)), y]
    return ce, np.exp(log_probs)


def loss(model: PredictorModel, batch: Batch, modality: str) -> float:
    """Mean lambda-weighted cross entropy plus the L2 penalty on this modality."""
    heads = _check_modality(model, modality)
    X, Y = _stack_batch(batch, model.config.input_dim)
    total = 0.0
    for i, head in enumerate(heads):
        ce, _ = _head_objective(head, X, Y[:, i])
        total += model.config.lambdas[i] * float(np.mean(ce))
    gamma = model.config.weight_decay
    if gamma:
        total += gamma * sum(
            float(np.sum(h.weights ** 2) + np.sum(h.bias ** 2)) for h in heads)
    return total


def gradient(model: PredictorModel, batch: Batch, modality: str) -> List[HeadParams]:
    """Analytic loss gradient, shaped like the modality's parameters.

    Per head the data term is the mean of lambda * (p - onehot(y)) xi, and
    the penalty contributes 2 * gamma * parameter.
    """
    heads = _check_modality(model, modality)
    X, Y = _stack_batch(batch, model.config.input_dim)
    n = len(X)
    gamma = model.config.weight_decay
    grads = []
    for i, head in enumerate(heads):
        _, probs = _head_objective(head, X, Y[:, i])
        delta = probs
        delta[np.arange(n), Y[:, i]] -= 1.0
        delta *= model.config.lambdas[i] / n
        grad_w = delta.T @ X + 2.0 * gamma * head.weights
        grad_b = delta.sum(axis=0) + 2.0 * gamma * head.bias
        grads.append(HeadParams(grad_w, grad_b))
    return grads


def _batch_objective(heads: List[HeadParams], X: np.ndarray, Y: np.ndarray,
                     lambdas: Sequence[float], gamma: float,
                     ) -> Tuple[float, List[Tuple[np.ndarray, np.ndarray]]]:
    """Batch loss and per-head (weight, bias) gradients in one pass."""
    n = len(X)
    total = 0.0
    grads = []
    for i, head in enumerate(heads):
        ce, probs = _head_objective(head, X, Y[:, i])
        total += lambdas[i] * float(np.mean(ce))
        delta = probs
        delta[np.arange(n), Y[:, i]] -= 1.0
        delta *= lambdas[i] / n
        grad_w = delta.T @ X + 2.0 * gamma * head.weights
        grad_b = delta.sum(axis=0) + 2.0 * gamma * head.bias
        grads.append((grad_w, grad_b))
    if gamma:
        total += gamma * sum(
            float(np.sum(h.weights ** 2) + np.sum(h.bias ** 2)) for h in heads)
    return total, grads


class _SgdUpdate:
    """Plain gradient step."""

    def apply(self, heads: List[HeadParams],
              grads: List[Tuple[np.ndarray, np.ndarray]], lr: float) -> None:
        for head, (grad_w, grad_b) in zip(heads, grads):
            head.weights -= lr * grad_w
            head.bias -= lr * grad_b


class _AdamUpdate:
    """Adam step with bias correction; one moment pair per parameter array."""

    def __init__(self, heads: List[HeadParams]):
        self.step = 0
        self.moments = [
            (np.zeros_like(h.weights), np.zeros_like(h.weights),
             np.zeros_like(h.bias), np.zeros_like(h.bias))
            for h in heads
        ]

    def apply(self, heads: List[HeadParams],
              grads: List[Tuple[np.ndarray, np.ndarray]], lr: float) -> None:
        self.step += 1
        c1 = 1.0 - _ADAM_BETA1 ** self.step
        c2 = 1.0 - _ADAM_BETA2 ** self.step
        for head, (grad_w, grad_b), (m_w, v_w, m_b, v_b) in zip(
                heads, grads, self.moments):
            m_w *= _ADAM_BETA1
            m_w += (1.0 - _ADAM_BETA1) * grad_w
            v_w *= _ADAM_BETA2
            v_w += (1.0 - _ADAM_BETA2) * grad_w ** 2
            m_b *= _ADAM_BETA1
            m_b += (1.0 - _ADAM_BETA1) * grad_b
            v_b *= _ADAM_BETA2
            v_b += (1.0 - _ADAM_BETA2) * grad_b ** 2
            head.weights -= lr * (m_w / c1) / (np.sqrt(v_w / c2) + _ADAM_EPS)
            head.bias -= lr * (m_b / c1) / (np.sqrt(v_b / c2) + _ADAM_EPS)


def _make_update(optimizer: str, heads: List[HeadParams]):
    if optimizer == "adam":
        return _AdamUpdate(heads)
    return _SgdUpdate()


def train(model: PredictorModel, dataset: Iterable[FeatureRecord],
          table: Optional[EmbeddingTable] = None,
          config: Optional[TrainConfig] = None,
          ) -> Tuple[PredictorModel, Dict[str, List[float]]]:
    """Fit both modalities independently on shuffled mini-batches.

    The input model supplies the starting parameters and is left untouched.
    Returns the trained model and a per-epoch mean-loss trace per modality;
    the trained model's config records the weight decay and optimizer that
    were actually applied.  Shuffling is fully determined by the training
    seed, so identical inputs and seeds give identical models.
    """
    if config is None:
        config = TrainConfig()
    records = list(dataset)
    if not records:
        raise EmptyBatchError("training needs at least one record")
    for record in records:
        if record.label is None:
            raise UnlabeledRecordError(f"record {record.id!r} has no code label")
    model_config = model.config
    gamma = model_config.weight_decay if config.weight_decay is None else config.weight_decay
    Y = np.asarray([tuple(to_classes(r.label)) for r in records], dtype=int)
    n = len(records)
    traces: Dict[str, List[float]] = {}
    new_heads: Dict[str, List[HeadParams]] = {}
    children = np.random.SeedSequence(config.seed).spawn(len(MODALITIES))
    for modality, seq in zip(MODALITIES, children):
        X = np.stack([
            build_features(r, modality, table, model_config.use_nouns)
            for r in records
        ])
        if X.shape[1] != model_config.input_dim:
            raise DimensionMismatchError(
                f"{modality} features have length {X.shape[1]}, the model "
                f"expects {model_config.input_dim}")
        heads = [h.copy() for h in model.heads[modality]]
        update = _make_update(config.optimizer, heads)
        rng = np.random.default_rng(seq)
        trace = []
        for epoch in range(config.epochs):
            lr = learning_rate_at(config, epoch)
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, config.batch_size):
                idx = order[start:start + config.batch_size]
                batch_loss, grads = _batch_objective(
                    heads, X[idx], Y[idx], model_config.lambdas, gamma)
                update.apply(heads, grads, lr)
                epoch_loss += batch_loss * len(idx)
            trace.append(epoch_loss / n)
        traces[modality] = trace
        new_heads[modality] = heads
    trained = PredictorModel(
        replace(model_config, weight_decay=gamma, optimizer=config.optimizer),
        new_heads)
    return trained, traces


def fuse(probs_a: Sequence[np.ndarray], probs_b: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Late fusion: the elementwise mean of two per-head probability sets."""
    if len(probs_a) != len(probs_b):
        raise DimensionMismatchError("probability sets list different head counts")
    fused = []
    for a, b in zip(probs_a, probs_b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.shape != b.shape:
            raise DimensionMismatchError(
                f"head shapes {a.shape} and {b.shape} cannot be fused")
        fused.append((a + b) / 2.0)
    return fused


@dataclass
class Prediction:
    """Codes and per-head probabilities for one record, per modality and fused."""

    rgb_code: MotionCode
    flow_code: MotionCode
    fused_code: MotionCode
    rgb_probs: List[np.ndarray]
    flow_probs: List[np.ndarray]
    fused_probs: List[np.ndarray]


def _argmax_code(probs: Sequence[np.ndarray]) -> MotionCode:
    # np.argmax returns the first maximum, so exact ties go to the lowest class.
    return from_classes(ComponentClasses(*(int(np.argmax(p)) for p in probs)))


def predict(model: PredictorModel, record: FeatureRecord,
            table: Optional[EmbeddingTable] = None) -> Prediction:
    """Classify one record; argmax per head always yields a structurally valid code."""
    per_modality = {}
    for modality in MODALITIES:
        xi = build_features(record, modality, table, model.config.use_nouns)
        per_modality[modality] = forward(model, xi, modality)
    fused = fuse(per_modality["rgb"], per_modality["flow"])
    return Prediction(
        rgb_code=_argmax_code(per_modality["rgb"]),
        flow_code=_argmax_code(per_modality["flow"]),
        fused_code=_argmax_code(fused),
        rgb_probs=per_modality["rgb"],
        flow_probs=per_modality["flow"],
        fused_probs=fused,
    )


def save_model(model: PredictorModel, target: Union[str, Path, IO]) -> None:
    """Write the model as JSON: config plus row-major weights per head."""
    doc = {
        "config": {
            "d_v": model.config.d_v,
            "d_n": model.config.d_n,
            "use_nouns": model.config.use_nouns,
            "lambdas": list(model.config.lambdas),
            "weight_decay": model.config.weight_decay,
            "seed": model.config.seed,
            "optimizer": model.config.optimizer,
        },
        "heads": {
            modality: [
                {"weights": head.weights.tolist(), "bias": head.bias.tolist()}
                for head in model.heads[modality]
            ]
            for modality in MODALITIES
        },
    }
    text = json.dumps(doc)
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def load_model(source: Union[str, Path, IO]) -> PredictorModel:
    """Read a model written by save_model."""
    if hasattr(source, "read"):
        raw = source.read()
    else:
        raw = Path(source).read_text(encoding="utf-8")
    doc = json.loads(raw)
    config = ModelConfig(**doc["config"])
    heads = {
        modality: [
            HeadParams(np.asarray(h["weights"], dtype=float),
                       np.asarray(h["bias"], dtype=float))
            for h in doc["heads"][modality]
        ]
        for modality in MODALITIES
    }
    return PredictorModel(config, heads)
