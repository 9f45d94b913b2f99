"""Triplet mining and the greedy gate-selection search that builds encoding circuits.

The search grows a circuit one feature at a time: every gate/qubit proposal
from a fixed pool is scored by the total triplet loss over the mined
(anchor, positive, negative) triplets, using exact trace distances between
the encoded states, and the argmin is kept. An entangler winner is always
followed by the best rotation carrying the current feature, so each feature
ends up in exactly one rotation angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .datasets import Dataset
from .errors import ConfigError, DataError
from .qsim.circuits import ENTANGLERS, ROTATIONS, Circuit, Const, Feature, Gate
from .qsim.simulate import apply_gate_batch, run_batch

LOSS_KINDS = ("hinge", "linear")
TIE_BREAKS = ("first", "random")


@dataclass(frozen=True)
class Triplet:
    """One (anchor, positive, negative) feature-vector triplet for a class pair."""

    anchor: np.ndarray
    positive: np.ndarray
    negative: np.ndarray
    class_pair: tuple[int, int]

    def __post_init__(self):
        for name in ("anchor", "positive", "negative"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64).reshape(-1))
        if not (len(self.anchor) == len(self.positive) == len(self.negative)):
            raise ValueError("triplet vectors must have identical length")
        if self.class_pair[0] == self.class_pair[1]:
            raise ValueError("triplet class pair must contain two distinct classes")

    @property
    def n_features(self) -> int:
        return len(self.anchor)


def default_n_qubits(n_features: int) -> int:
    """Qubit-count rule for the greedy and amplitude encoders: ceil(log2 n_features)."""
    if n_features < 1:
        raise ValueError("need at least one feature")
    return max(1, math.ceil(math.log2(n_features)))


@dataclass
class GreedyConfig:
    """Hyperparameters of the greedy construction.

    ``n_qubits=None`` applies the ceil(log2 n_features) rule. The weight on
    the anchor-positive distance starts at ``w0`` and is dampened by
    ``w_damping`` after each feature, floored at zero.
    """

    n_qubits: Optional[int] = None
    w0: float = 1.0
    w_damping: float = 0.01
    margin: float = 0.0
    loss_kind: str = "linear"
    max_gates: Optional[int] = None
    feature_order: Optional[Sequence[int]] = None
    tie_break: str = "first"
    seed: Optional[int] = None

    def __post_init__(self):
        if self.w0 <= 0:
            raise ConfigError("w0 must be positive")
        if self.w_damping < 0:
            raise ConfigError("w_damping must be non-negative")
        if self.margin < 0:
            raise ConfigError("margin must be non-negative")
        if self.loss_kind not in LOSS_KINDS:
            raise ConfigError(f"loss_kind must be one of {LOSS_KINDS}")
        if self.tie_break not in TIE_BREAKS:
            raise ConfigError(f"tie_break must be one of {TIE_BREAKS}")


def coordwise_median(samples) -> np.ndarray:
    """Element-wise median; even counts average the two middle values."""
    matrix = np.asarray(samples, dtype=np.float64)
    if matrix.size == 0:
        raise ValueError("cannot take the median of an empty sample list")
    return np.median(matrix, axis=0)


def mine_triplets(dataset: Dataset, classes: Optional[Sequence[int]] = None) -> list[Triplet]:
    """One hard triplet per ordered class pair.

    Anchor: coordinate-wise median of the first class. Positive: the
    same-class sample farthest from the anchor (Euclidean). Negative: the
    other-class sample closest to the anchor.
    """
    if classes is None:
        classes = sorted(int(c) for c in np.unique(dataset.labels))
    by_class = {}
    for label in classes:
        rows = dataset.features[dataset.labels == label]
        if rows.shape[0] == 0:
            raise DataError(f"class {label} has no samples")
        by_class[label] = rows
    triplets = []
    for a in classes:
        anchor = coordwise_median(by_class[a])
        dist_a = np.linalg.norm(by_class[a] - anchor, axis=1)
        positive = by_class[a][int(np.argmax(dist_a))]
        for b in classes:
            if a == b:
                continue
            dist_b = np.linalg.norm(by_class[b] - anchor, axis=1)
            negative = by_class[b][int(np.argmin(dist_b))]
            triplets.append(Triplet(anchor, positive, negative, (a, b)))
    return triplets


def triplet_loss(d_ap, d_an, w: float, margin: float = 0.0, kind: str = "linear"):
    """Per-triplet loss term. hinge: max(0, w*dAP - dAN + m); linear: w*dAP - dAN."""
    if kind == "hinge":
        return np.maximum(0.0, w * d_ap - d_an + margin)
    if kind == "linear":
        return w * d_ap - d_an
    raise ConfigError(f"loss_kind must be one of {LOSS_KINDS}")


def candidate_pool(n_qubits: int, feature_index: int) -> list[Gate]:
    """All gate/qubit proposals for one feature: 3n rotations + 2n(n-1) entanglers.

    Controlled rotations are deliberately absent from the pool. Order is
    kind-major then qubit-major, which is what the ``first`` tie-break
    resolves against.
    """
    pool = [
        Gate(kind, (q,), (Feature(feature_index, 1.0),))
        for kind in ROTATIONS
        for q in range(n_qubits)
    ]
    pool += [
        Gate(kind, (control, target))
        for kind in ENTANGLERS
        for control in range(n_qubits)
        for target in range(n_qubits)
        if control != target
    ]
    return pool


@dataclass(frozen=True)
class Sweep:
    """One argmin sweep: the evaluated gates, their losses, and the pick."""

    gates: tuple[Gate, ...]
    losses: np.ndarray
    chosen: int

    @property
    def chosen_gate(self) -> Gate:
        return self.gates[self.chosen]

    @property
    def chosen_loss(self) -> float:
        return float(self.losses[self.chosen])


@dataclass(frozen=True)
class GreedyStep:
    """Record of one feature step: the primary sweep and the optional follow-up."""

    feature_index: int
    w: float
    primary: Sweep
    followup: Optional[Sweep]

    @property
    def gates_added(self) -> tuple[Gate, ...]:
        if self.followup is None:
            return (self.primary.chosen_gate,)
        return (self.primary.chosen_gate, self.followup.chosen_gate)

    @property
    def loss(self) -> float:
        """Loss of the circuit as extended at the end of this step."""
        sweep = self.followup if self.followup is not None else self.primary
        return sweep.chosen_loss


@dataclass(frozen=True)
class GreedyResult:
    circuit: Circuit
    steps: tuple[GreedyStep, ...]

    @property
    def loss_trace(self) -> list[float]:
        return [step.loss for step in self.steps]


class _TripletScorer:
    """Scores candidate gates by total triplet loss over cached prefix states."""

    def __init__(self, triplets: Sequence[Triplet], n_qubits: int):
        self.n_qubits = n_qubits
        self.vectors = np.stack(
            [v for t in triplets for v in (t.anchor, t.positive, t.negative)]
        )
        dim = 1 << n_qubits
        self.states = np.zeros((len(self.vectors), dim), dtype=np.complex128)
        self.states[:, 0] = 1.0

    def advance(self, gates: Sequence[Gate]) -> None:
        for gate in gates:
            apply_gate_batch(self.states, gate, self.vectors, None, self.n_qubits)

    def loss_of(self, trial_gates: Sequence[Gate], w: float, margin: float, kind: str) -> float:
        trial = self.states.copy()
        for gate in trial_gates:
            apply_gate_batch(trial, gate, self.vectors, None, self.n_qubits)
        anchors, positives, negatives = trial[0::3], trial[1::3], trial[2::3]
        ov_ap = np.sum(anchors.conj() * positives, axis=1)
        ov_an = np.sum(anchors.conj() * negatives, axis=1)
        d_ap = np.sqrt(np.clip(1.0 - np.abs(ov_ap) ** 2, 0.0, None))
        d_an = np.sqrt(np.clip(1.0 - np.abs(ov_an) ** 2, 0.0, None))
        return float(np.sum(triplet_loss(d_ap, d_an, w, margin, kind)))


def _pick(losses: np.ndarray, tie_break: str, rng) -> int:
    if tie_break == "first":
        return int(np.argmin(losses))
    ties = np.flatnonzero(losses == losses.min())
    return int(rng.choice(ties))


def greedy_build(triplets: Sequence[Triplet], config: GreedyConfig) -> GreedyResult:
    """Build an encoding circuit by per-feature greedy argmin over the gate pool."""
    if not triplets:
        raise ValueError("greedy_build needs at least one triplet")
    n_features = triplets[0].n_features
    if any(t.n_features != n_features for t in triplets):
        raise ValueError("all triplets must share the feature length")
    n_qubits = config.n_qubits if config.n_qubits is not None else default_n_qubits(n_features)
    order = list(config.feature_order) if config.feature_order is not None else list(range(n_features))
    if sorted(order) != list(range(n_features)):
        raise ConfigError("feature_order must be a permutation of range(n_features)")
    rng = np.random.default_rng(config.seed) if config.tie_break == "random" else None

    scorer = _TripletScorer(triplets, n_qubits)
    rotations_only = [g for g in candidate_pool(n_qubits, 0) if g.is_rotation]
    gates: list[Gate] = []
    steps: list[GreedyStep] = []
    w = config.w0
    for feature_index in order:
        if config.max_gates is not None and len(gates) >= config.max_gates:
            break
        pool = candidate_pool(n_qubits, feature_index)
        losses = np.array(
            [scorer.loss_of((g,), w, config.margin, config.loss_kind) for g in pool]
        )
        chosen = _pick(losses, config.tie_break, rng)
        primary = Sweep(tuple(pool), losses, chosen)
        followup = None
        if primary.chosen_gate.is_rotation:
            added = (primary.chosen_gate,)
        else:
            rot_pool = [
                Gate(g.kind, g.qubits, (Feature(feature_index, 1.0),)) for g in rotations_only
            ]
            entangler = primary.chosen_gate
            rot_losses = np.array(
                [
                    scorer.loss_of((entangler, g), w, config.margin, config.loss_kind)
                    for g in rot_pool
                ]
            )
            rot_chosen = _pick(rot_losses, config.tie_break, rng)
            followup = Sweep(tuple(rot_pool), rot_losses, rot_chosen)
            added = (entangler, followup.chosen_gate)
        scorer.advance(added)
        gates.extend(added)
        steps.append(GreedyStep(feature_index, w, primary, followup))
        w = max(0.0, w - config.w_damping)
    return GreedyResult(Circuit(n_qubits, tuple(gates)), tuple(steps))


def _merge_terms(terms: tuple) -> tuple:
    """Combine like feature terms and fold constants; parameters are kept as-is."""
    feature_scales: dict[int, float] = {}
    params = []
    const = 0.0
    has_const = False
    for term in terms:
        if isinstance(term, Feature):
            feature_scales[term.index] = feature_scales.get(term.index, 0.0) + term.scale
        elif isinstance(term, Const):
            const += term.value
            has_const = True
        else:
            params.append(term)
    merged = [Feature(i, s) for i, s in sorted(feature_scales.items())]
    merged.extend(params)
    if has_const:
        merged.append(Const(const))
    return tuple(merged)


def merge_consecutive_rotations(circuit: Circuit) -> Circuit:
    """Collapse same-axis rotation runs on a qubit into one summed rotation.

    A run is broken by any intervening gate touching that qubit. The merged
    circuit produces the same state as the original for all inputs.
    """
    out: list[Gate] = []
    last_touch: dict[int, int] = {}
    for gate in circuit.gates:
        if gate.is_rotation:
            qubit = gate.qubits[0]
            prev = last_touch.get(qubit)
            if prev is not None and out[prev].kind == gate.kind:
                out[prev] = Gate(gate.kind, (qubit,), _merge_terms(out[prev].angle + gate.angle))
                continue
        for qubit in gate.qubits:
            last_touch[qubit] = len(out)
        out.append(gate)
    return Circuit(circuit.n_qubits, tuple(out))


@dataclass(frozen=True)
class GateCounts:
    """Gate tallies after rotation merging; depth is the longest qubit-wise chain."""

    cnot: int
    cz: int
    rotations: int
    depth: int

    def as_dict(self) -> dict:
        return {"cnot": self.cnot, "cz": self.cz, "rotations": self.rotations, "depth": self.depth}


def count_gates(circuit: Circuit) -> GateCounts:
    merged = merge_consecutive_rotations(circuit)
    cnot = sum(1 for g in merged.gates if g.kind == "cnot")
    cz = sum(1 for g in merged.gates if g.kind == "cz")
    rotations = sum(1 for g in merged.gates if g.is_rotation)
    level = [0] * merged.n_qubits
    for gate in merged.gates:
        depth = 1 + max(level[q] for q in gate.qubits)
        for q in gate.qubits:
            level[q] = depth
    return GateCounts(cnot, cz, rotations, max(level, default=0))


@dataclass(frozen=True)
class SeparabilityReport:
    intra_mean: float
    inter_mean: float


def separability_report(
    circuit: Circuit,
    dataset: Dataset,
    max_pairs: int = 10000,
    seed: int = 0,
) -> SeparabilityReport:
    """Mean intra-class and inter-class trace distance of the encoded dataset.

    Exhaustive over all pairs below 200 samples, otherwise a seeded random
    sample of ``max_pairs`` pairs per set.
    """
    labels = dataset.labels
    for label in np.unique(labels):
        if int(np.sum(labels == label)) < 2:
            raise DataError(f"class {int(label)} needs at least 2 samples")
    states = run_batch(circuit, dataset.features)
    n = len(dataset)
    if n < 200:
        gram = states @ states.conj().T
        dist = np.sqrt(np.clip(1.0 - np.abs(gram) ** 2, 0.0, None))
        upper = np.triu_indices(n, k=1)
        same = labels[upper[0]] == labels[upper[1]]
        intra = float(np.mean(dist[upper][same]))
        inter = float(np.mean(dist[upper][~same]))
        return SeparabilityReport(intra, inter)

    rng = np.random.default_rng(seed)
    class_rows = {int(c): np.flatnonzero(labels == c) for c in np.unique(labels)}

    def _mean_distance(pair_rows):
        left, right = pair_rows
        ov = np.sum(states[left].conj() * states[right], axis=1)
        return float(np.mean(np.sqrt(np.clip(1.0 - np.abs(ov) ** 2, 0.0, None))))

    intra_left = rng.integers(0, n, size=max_pairs)
    intra_right = np.array(
        [rng.choice(class_rows[int(labels[i])]) for i in intra_left]
    )
    inter_left = rng.integers(0, n, size=max_pairs)
    other = {
        c: np.concatenate([rows for k, rows in class_rows.items() if k != c])
        for c in class_rows
    }
    inter_right = np.array([rng.choice(other[int(labels[i])]) for i in inter_left])
    return SeparabilityReport(
        _mean_distance((intra_left, intra_right)),
        _mean_distance((inter_left, inter_right)),
    )
