"""Variational classification layer: RY layers with circular CNOT rings.

The class-1 probability is P(|1>) on the readout qubit. Gradients are exact
via the parameter-shift rule (every trainable gate is a single-qubit Ry),
and training uses Adam on the mean binary cross-entropy. Embedded states
are computed once per dataset and cached; only the variational part is
re-simulated during training.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .datasets import Dataset
from .errors import CircuitError
from .qsim.circuits import Circuit, Gate, Param, concat
from .qsim.simulate import prob_one_batch, run_batch

PROB_CLIP = 1e-12


@dataclass
class VqcModel:
    """Layer count plus the trained rotation angles of the variational circuit."""

    n_qubits: int
    n_layers: int
    theta: np.ndarray
    readout_qubit: Optional[int] = None

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64).reshape(-1)
        if self.readout_qubit is None:
            self.readout_qubit = self.n_qubits - 1
        if not 0 <= self.readout_qubit < self.n_qubits:
            raise ValueError(f"readout qubit {self.readout_qubit} out of range")
        if self.theta.shape[0] != self.n_layers * self.n_qubits:
            raise ValueError(
                f"theta needs {self.n_layers * self.n_qubits} entries, "
                f"got {self.theta.shape[0]}"
            )

    def circuit(self) -> Circuit:
        return vqc_circuit(self.n_qubits, self.n_layers)


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    batch_size: int = 32
    epochs: int = 30
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    repetitions: int = 5

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")


@lru_cache(maxsize=64)
def vqc_circuit(n_qubits: int, n_layers: int) -> Circuit:
    """Per layer: Ry(theta) on every qubit, then the circular CNOT layer."""
    if n_qubits < 2:
        raise CircuitError("the CNOT ring needs at least two qubits")
    if n_layers < 1:
        raise CircuitError("need at least one layer")
    gates: list[Gate] = []
    for layer in range(n_layers):
        for q in range(n_qubits):
            gates.append(Gate("ry", (q,), (Param(layer * n_qubits + q),)))
        for q in range(n_qubits - 1):
            gates.append(Gate("cnot", (q, q + 1)))
        gates.append(Gate("cnot", (n_qubits - 1, 0)))
    return Circuit(n_qubits, tuple(gates))


def embed_dataset(embedding: Circuit, dataset: Dataset) -> np.ndarray:
    """Encoded states for every sample, shape (samples, 2**n)."""
    return run_batch(embedding, dataset.features)


def _vqc_probs(embedded: np.ndarray, model: VqcModel, theta: np.ndarray) -> np.ndarray:
    amps = run_batch(model.circuit(), params=theta, initial=embedded)
    return prob_one_batch(amps, model.readout_qubit, model.n_qubits)


def forward(embedding: Circuit, model: VqcModel, features) -> float:
    """Class-1 probability for one sample: P(readout = 1) after U_emb then U_var."""
    if embedding.n_qubits != model.n_qubits:
        raise CircuitError(
            f"embedding has {embedding.n_qubits} qubits, model has {model.n_qubits}"
        )
    full = concat(embedding, model.circuit())
    amps = run_batch(full, np.asarray(features, dtype=np.float64)[None, :], model.theta)
    return float(prob_one_batch(amps, model.readout_qubit, model.n_qubits)[0])


def predict_proba(embedding: Circuit, model: VqcModel, dataset: Dataset) -> np.ndarray:
    if embedding.n_qubits != model.n_qubits:
        raise CircuitError(
            f"embedding has {embedding.n_qubits} qubits, model has {model.n_qubits}"
        )
    return _vqc_probs(embed_dataset(embedding, dataset), model, model.theta)


def bce_loss(p: float, y: int) -> float:
    """Binary cross-entropy with probability clamping at 1e-12."""
    clamped = min(max(p, PROB_CLIP), 1.0 - PROB_CLIP)
    return -(y * math.log(clamped) + (1 - y) * math.log(1.0 - clamped))


def _bce_vec(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    clamped = np.clip(p, PROB_CLIP, 1.0 - PROB_CLIP)
    return -(y * np.log(clamped) + (1 - y) * np.log(1.0 - clamped))


def _bce_grad_vec(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """d bce / d p; zero where the clamp is active."""
    clamped = np.clip(p, PROB_CLIP, 1.0 - PROB_CLIP)
    inside = (p > PROB_CLIP) & (p < 1.0 - PROB_CLIP)
    return np.where(inside, (clamped - y) / (clamped * (1.0 - clamped)), 0.0)


def _gradient_from_embedded(
    embedded: np.ndarray, labels: np.ndarray, model: VqcModel, theta: np.ndarray
) -> np.ndarray:
    """Parameter-shift gradient of the mean bce loss w.r.t. theta."""
    p = _vqc_probs(embedded, model, theta)
    chain = _bce_grad_vec(p, labels)
    grad = np.empty_like(theta)
    for k in range(theta.shape[0]):
        shifted = theta.copy()
        shifted[k] += math.pi / 2
        p_plus = _vqc_probs(embedded, model, shifted)
        shifted[k] -= math.pi
        p_minus = _vqc_probs(embedded, model, shifted)
        grad[k] = float(np.mean(chain * (p_plus - p_minus) * 0.5))
    return grad


def gradient(embedding: Circuit, model: VqcModel, batch: Dataset) -> np.ndarray:
    """Exact gradient of the mean bce loss over a batch w.r.t. model.theta."""
    if len(batch) == 0:
        raise ValueError("gradient needs a non-empty batch")
    embedded = embed_dataset(embedding, batch)
    return _gradient_from_embedded(embedded, batch.labels, model, model.theta)


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n))


def adam_step(
    state: AdamState, theta: np.ndarray, grad: np.ndarray, config: TrainConfig
) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; returns the new state and parameters."""
    if theta.shape != grad.shape:
        raise ValueError("theta and gradient shapes differ")
    t = state.step + 1
    m = config.adam_beta1 * state.m + (1.0 - config.adam_beta1) * grad
    v = config.adam_beta2 * state.v + (1.0 - config.adam_beta2) * grad**2
    m_hat = m / (1.0 - config.adam_beta1**t)
    v_hat = v / (1.0 - config.adam_beta2**t)
    updated = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return AdamState(m, v, t), updated


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    train_acc: float
    val_acc: Optional[float]


def train(
    embedding: Circuit,
    train_set: Dataset,
    val_set: Optional[Dataset],
    config: TrainConfig,
    n_layers: int = 1,
) -> tuple[VqcModel, list[EpochStats]]:
    """Adam training over seeded shuffled batches; keeps the best-validation model."""
    if len(train_set) == 0:
        raise ValueError("training set is empty")
    embedded = embed_dataset(embedding, train_set)
    embedded_val = (
        embed_dataset(embedding, val_set) if val_set is not None and len(val_set) else None
    )
    val_labels = val_set.labels if embedded_val is not None else None
    return train_on_states(
        embedded,
        train_set.labels,
        embedded_val,
        val_labels,
        config,
        n_layers,
        embedding.n_qubits,
    )


def train_on_states(
    train_states: np.ndarray,
    train_labels: np.ndarray,
    val_states: Optional[np.ndarray],
    val_labels: Optional[np.ndarray],
    config: TrainConfig,
    n_layers: int,
    n_qubits: int,
) -> tuple[VqcModel, list[EpochStats]]:
    """Training core over precomputed encoded states."""
    if train_states.shape[0] == 0:
        raise ValueError("training set is empty")
    rng = np.random.default_rng(config.seed)
    theta = rng.uniform(-math.pi, math.pi, n_layers * n_qubits)
    model = VqcModel(n_qubits, n_layers, theta)
    optimizer = AdamState.zeros(theta.shape[0])
    history: list[EpochStats] = []
    best_val = -1.0
    best_theta = theta.copy()
    n = train_states.shape[0]
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            rows = order[start : start + config.batch_size]
            grad = _gradient_from_embedded(
                train_states[rows], train_labels[rows], model, theta
            )
            optimizer, theta = adam_step(optimizer, theta, grad, config)
        p_train = _vqc_probs(train_states, model, theta)
        train_loss = float(np.mean(_bce_vec(p_train, train_labels)))
        train_acc = float(np.mean((p_train >= 0.5).astype(int) == train_labels))
        val_acc = None
        if val_states is not None:
            p_val = _vqc_probs(val_states, model, theta)
            val_acc = float(np.mean((p_val >= 0.5).astype(int) == val_labels))
            if val_acc > best_val:
                best_val = val_acc
                best_theta = theta.copy()
        history.append(EpochStats(epoch, train_loss, train_acc, val_acc))
    final_theta = best_theta if val_states is not None else theta
    return VqcModel(n_qubits, n_layers, final_theta), history


@dataclass(frozen=True)
class Metrics:
    """Accuracy plus per-class precision/recall/f1 and the raw confusion matrix.

    ``confusion[i][j]`` counts samples with true class i predicted as j.
    """

    accuracy: float
    precision: tuple[float, float]
    recall: tuple[float, float]
    f1: tuple[float, float]
    confusion: tuple[tuple[int, int], tuple[int, int]]

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "classes": {
                str(c): {
                    "precision": self.precision[c],
                    "recall": self.recall[c],
                    "f1": self.f1[c],
                }
                for c in (0, 1)
            },
            "confusion": [list(row) for row in self.confusion],
        }


def metrics_from_confusion(confusion) -> Metrics:
    matrix = np.asarray(confusion, dtype=np.int64)
    if matrix.shape != (2, 2):
        raise ValueError("confusion matrix must be 2x2")
    total = int(matrix.sum())
    if total == 0:
        raise ValueError("confusion matrix is empty")
    accuracy = float((matrix[0, 0] + matrix[1, 1]) / total)
    precision = []
    recall = []
    f1 = []
    for c in (0, 1):
        tp = int(matrix[c, c])
        fp = int(matrix[1 - c, c])
        fn = int(matrix[c, 1 - c])
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
        precision.append(prec)
        recall.append(rec)
    return Metrics(
        accuracy,
        (precision[0], precision[1]),
        (recall[0], recall[1]),
        (f1[0], f1[1]),
        ((int(matrix[0, 0]), int(matrix[0, 1])), (int(matrix[1, 0]), int(matrix[1, 1]))),
    )


def evaluate_states(states: np.ndarray, labels: np.ndarray, model: VqcModel) -> Metrics:
    if states.shape[0] == 0:
        raise ValueError("evaluation set is empty")
    predictions = (_vqc_probs(states, model, model.theta) >= 0.5).astype(int)
    confusion = np.zeros((2, 2), dtype=np.int64)
    for true, pred in zip(labels, predictions):
        confusion[int(true), int(pred)] += 1
    return metrics_from_confusion(confusion)


def evaluate(embedding: Circuit, model: VqcModel, test_set: Dataset) -> Metrics:
    """Threshold-0.5 metrics of the model on a dataset."""
    if len(test_set) == 0:
        raise ValueError("evaluation set is empty")
    return evaluate_states(embed_dataset(embedding, test_set), test_set.labels, model)


def save_checkpoint(path, model: VqcModel, seed: int) -> None:
    doc = {
        "n_qubits": model.n_qubits,
        "n_layers": model.n_layers,
        "theta": [float(v) for v in model.theta],
        "readout_qubit": model.readout_qubit,
        "seed": seed,
    }
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_checkpoint(path) -> tuple[VqcModel, int]:
    with open(path) as handle:
        doc = json.load(handle)
    model = VqcModel(
        int(doc["n_qubits"]),
        int(doc["n_layers"]),
        np.asarray(doc["theta"], dtype=np.float64),
        int(doc["readout_qubit"]),
    )
    return model, int(doc["seed"])
