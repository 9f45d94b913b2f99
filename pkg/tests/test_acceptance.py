"""Acceptance suite: one test per release criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS line per
criterion. The two dataset-bound accuracy criteria (the 8x8 comparison
table and the OrganA margin) need the real MNIST/MedMNIST files and are
skipped when TRIQET_MNIST_DIR / TRIQET_MEDMNIST_DIR do not point at them;
every mechanism-level criterion runs on the committed 8x8 digits fixture
through the identical pipeline.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from triqet.baselines import (
    amplitude_encode_batch,
    mottonen_circuit,
    mottonen_reference_counts,
)
from triqet.classifier import (
    TrainConfig,
    VqcModel,
    evaluate_states,
    gradient,
    metrics_from_confusion,
    train_on_states,
)
from triqet.datasets import Dataset, DatasetSpec, load_dataset
from triqet.encoder import (
    GreedyConfig,
    count_gates,
    greedy_build,
    mine_triplets,
    separability_report,
)
from triqet.qsim import density_matrix, run, run_batch, trace_distance_dm, trace_distance_pure
from helpers import random_circuit, random_state

PAPER_MOTTONEN = {6: (228, 251), 7: (480, 507), 8: (980, 1019)}


def _report(name: str, detail: str) -> None:
    print(f"ACCEPTANCE PASS  {name}: {detail}")


@pytest.fixture(scope="module")
def greedy8(task8):
    """Greedy encoder built once on the 8x8 task's training split."""
    train, val, test, label = task8
    started = time.perf_counter()
    result = greedy_build(mine_triplets(train), GreedyConfig())
    elapsed = time.perf_counter() - started
    return result, elapsed, (train, val, test), label


def test_trace_distance_oracle_and_metric_axioms():
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        n_qubits = int(rng.integers(2, 5))
        a, b = random_state(rng, n_qubits), random_state(rng, n_qubits)
        fast = trace_distance_pure(a, b)
        slow = trace_distance_dm(density_matrix(a), density_matrix(b))
        worst = max(worst, abs(fast - slow))
        assert abs(fast - slow) <= 1e-10
        c = random_state(rng, n_qubits)
        assert trace_distance_pure(a, a) == 0.0
        assert trace_distance_pure(a, b) == trace_distance_pure(b, a)
        assert trace_distance_pure(a, c) <= (
            trace_distance_pure(a, b) + trace_distance_pure(b, c) + 1e-9
        )
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    _report(
        "trace-distance oracle",
        f"100 pairs, max |pure - dm| = {worst:.2e} <= 1e-10, axioms hold, {elapsed:.2f}s",
    )


def test_gradient_matches_finite_differences():
    from triqet.classifier import bce_loss, predict_proba

    started = time.perf_counter()
    rng = np.random.default_rng(777)
    h = 1e-5
    worst = 0.0
    for _ in range(20):
        n_qubits = int(rng.integers(2, 5))
        n_layers = int(rng.integers(1, 3))
        embedding = random_circuit(rng, n_qubits, 6)
        theta = rng.uniform(-np.pi, np.pi, n_layers * n_qubits)
        model = VqcModel(n_qubits, n_layers, theta)
        batch = Dataset(rng.uniform(0, 1, size=(5, 3)), rng.integers(0, 2, size=5))
        exact = gradient(embedding, model, batch)
        approx = np.zeros_like(exact)
        for k in range(theta.size):
            losses = {}
            for sign in (+1, -1):
                shifted = theta.copy()
                shifted[k] += sign * h
                probe = VqcModel(n_qubits, n_layers, shifted)
                p = predict_proba(embedding, probe, batch)
                losses[sign] = np.mean(
                    [bce_loss(float(pi), int(yi)) for pi, yi in zip(p, batch.labels)]
                )
            approx[k] = (losses[+1] - losses[-1]) / (2 * h)
        worst = max(worst, float(np.max(np.abs(exact - approx))))
        assert np.max(np.abs(exact - approx)) <= 1e-6
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    _report(
        "gradient check",
        f"20 instances, max |shift - fd| = {worst:.2e} <= 1e-6, {elapsed:.2f}s",
    )


def test_mottonen_preparation_and_reported_counts():
    started = time.perf_counter()
    rng = np.random.default_rng(99)
    worst = 0.0
    for n_qubits in range(2, 9):
        for _ in range(20):
            target = rng.uniform(-1, 1, 1 << n_qubits)
            target /= np.linalg.norm(target)
            got = run(mottonen_circuit(target)).amplitudes
            pivot = int(np.argmax(np.abs(target)))
            aligned = got * (target[pivot] / got[pivot])
            error = float(np.max(np.abs(aligned - target)))
            worst = max(worst, error)
            assert error <= 1e-9
    for n_qubits, (paper_cnot, paper_rotations) in PAPER_MOTTONEN.items():
        reference = mottonen_reference_counts(n_qubits)
        assert abs(reference.cnot - paper_cnot) <= 0.10 * paper_cnot
        assert abs(reference.rotations - paper_rotations) <= 0.10 * paper_rotations
    elapsed = time.perf_counter() - started
    assert elapsed < 120.0
    _report(
        "mottonen",
        f"140 preparations, max amplitude error {worst:.2e} <= 1e-9; "
        f"reported counts within 10% of the published 6/7/8-qubit figures, {elapsed:.1f}s",
    )


def test_greedy_local_optimality_and_weight_schedule(greedy8):
    result, _, _, label = greedy8
    assert len(result.steps) == 64
    for k, step in enumerate(result.steps):
        assert step.primary.chosen_loss <= float(step.primary.losses.min())
        if step.followup is not None:
            assert step.followup.chosen_loss <= float(step.followup.losses.min())
        assert step.w == pytest.approx(max(0.0, 1.0 - 0.01 * k), abs=1e-12)
    _report(
        "greedy optimality",
        f"{label}: argmin verified in all 64 steps "
        f"({sum(s.followup is not None for s in result.steps)} entangler follow-ups); "
        f"w schedule = max(0, 1 - 0.01k)",
    )


def test_gate_count_reproduction(greedy8):
    result, build_seconds, _, label = greedy8
    counts = count_gates(result.circuit)
    assert counts.rotations <= 64
    assert counts.cnot + counts.cz <= 30
    assert build_seconds < 1800.0
    _report(
        "gate counts",
        f"{label}: merged {counts.rotations} rotations (<= 64), "
        f"{counts.cnot + counts.cz} entanglers (<= 30), built in {build_seconds:.2f}s",
    )


def test_separability_inter_exceeds_intra(greedy8):
    result, _, (train, _, test), label = greedy8
    report = separability_report(result.circuit, test)
    assert report.inter_mean > report.intra_mean
    _report(
        "separability",
        f"{label}: mean inter-class D {report.inter_mean:.4f} > "
        f"mean intra-class D {report.intra_mean:.4f}",
    )


def test_degenerate_predictor_metrics_match_reported_rows():
    # Always-predict-1 on a 38/62 class balance (the Pneumonia row).
    metrics = metrics_from_confusion([[0, 38], [0, 62]])
    assert round(metrics.accuracy, 2) == 0.62
    assert metrics.precision[0] == 0.0
    assert metrics.recall[0] == 0.0
    assert metrics.f1[0] == 0.0
    assert metrics.recall[1] == 1.0
    assert round(metrics.f1[1], 2) == 0.77
    # Always-predict-0 on the 73/27 Breast balance reports the mirror row.
    breast = metrics_from_confusion([[73, 0], [27, 0]])
    assert round(breast.accuracy, 2) == 0.73
    assert breast.precision[1] == breast.recall[1] == breast.f1[1] == 0.0
    _report(
        "degenerate-predictor metrics",
        "one-class predictors reproduce the 0.0-precision rows "
        "(0.62/1.0/0.77 and the 0.73 mirror) exactly",
    )


def _mnist_available() -> bool:
    root = os.environ.get("TRIQET_MNIST_DIR", "")
    return bool(root) and (Path(root) / "train-images-idx3-ubyte").exists()


def _medmnist_available() -> bool:
    root = os.environ.get("TRIQET_MEDMNIST_DIR", "")
    return bool(root) and (Path(root) / "organa_train.csv").exists()


def _mean_accuracy(states, labels, val, val_labels, test, test_labels, config, n_layers):
    accuracies = []
    for repetition in range(config.repetitions):
        run_config = TrainConfig(
            learning_rate=config.learning_rate,
            batch_size=config.batch_size,
            epochs=config.epochs,
            seed=config.seed + repetition,
            repetitions=config.repetitions,
        )
        model, _ = train_on_states(
            states, labels, val, val_labels, run_config, n_layers, 6
        )
        accuracies.append(evaluate_states(test, test_labels, model).accuracy)
    return float(np.mean(accuracies)), accuracies


@pytest.mark.skipif(
    not _mnist_available(),
    reason="real MNIST01 required: the 0.90/0.87/0.94 thresholds are calibrated to it "
    "(set TRIQET_MNIST_DIR); the digits stand-in inverts the 1-layer comparison",
)
def test_table1_desk_scale_mnist01():
    started = time.perf_counter()
    spec = DatasetSpec(
        "mnist01", os.environ["TRIQET_MNIST_DIR"], resolution=8, pixel_scale=1 / 255
    )
    train, val, test = load_dataset(spec, seed=0)
    result = greedy_build(mine_triplets(train), GreedyConfig())
    embeddings = {
        "greedy": tuple(run_batch(result.circuit, d.features) for d in (train, val, test)),
        "amplitude": tuple(amplitude_encode_batch(d.features, 6) for d in (train, val, test)),
    }
    config = TrainConfig(seed=0)
    means = {}
    for kind, (e_train, e_val, e_test) in embeddings.items():
        for layers in (1, 2):
            means[(kind, layers)], _ = _mean_accuracy(
                e_train, train.labels, e_val, val.labels, e_test, test.labels, config, layers
            )
    elapsed = time.perf_counter() - started
    assert means[("greedy", 1)] >= 0.90
    assert means[("amplitude", 1)] <= 0.87
    assert means[("greedy", 2)] >= 0.94
    assert means[("amplitude", 2)] >= 0.94
    assert elapsed < 7200.0
    _report(
        "table-1 desk scale",
        f"mnist01 means {dict(((k, l), round(v, 4)) for (k, l), v in means.items())}, "
        f"{elapsed:.0f}s",
    )


def test_table1_pipeline_standin_information(greedy8):
    """Not a threshold criterion: end-to-end sanity numbers on the committed fixture."""
    result, _, (train, val, test), label = greedy8
    if label == "mnist01":
        pytest.skip("real MNIST present; covered by the table-1 criterion")
    e_greedy = tuple(run_batch(result.circuit, d.features) for d in (train, val, test))
    e_amp = tuple(amplitude_encode_batch(d.features, 6) for d in (train, val, test))
    config = TrainConfig(epochs=100, learning_rate=0.05, seed=0, repetitions=1)
    lines = []
    for kind, (e_train, e_val, e_test) in (("greedy", e_greedy), ("amplitude", e_amp)):
        for layers in (1, 2):
            mean, _ = _mean_accuracy(
                e_train, train.labels, e_val, val.labels, e_test, test.labels, config, layers
            )
            assert mean > 0.5  # pipeline sanity only; thresholds belong to mnist01
            lines.append(f"{kind} {layers}L {mean:.3f}")
    _report("table-1 stand-in (informational)", f"{label}: " + ", ".join(lines))


@pytest.mark.skipif(
    not _medmnist_available(),
    reason="MedMNIST OrganA CSVs required (set TRIQET_MEDMNIST_DIR; "
    "produce them with the dataprep converter)",
)
def test_organa_greedy_beats_amplitude():
    spec = DatasetSpec(
        "organa", os.environ["TRIQET_MEDMNIST_DIR"], resolution=8, pixel_scale=1 / 255
    )
    train, val, test = load_dataset(spec, seed=0)
    result = greedy_build(mine_triplets(train), GreedyConfig())
    config = TrainConfig(seed=0)
    greedy_mean, _ = _mean_accuracy(
        run_batch(result.circuit, train.features),
        train.labels,
        run_batch(result.circuit, val.features),
        val.labels,
        run_batch(result.circuit, test.features),
        test.labels,
        config,
        1,
    )
    amplitude_mean, _ = _mean_accuracy(
        amplitude_encode_batch(train.features, 6),
        train.labels,
        amplitude_encode_batch(val.features, 6),
        val.labels,
        amplitude_encode_batch(test.features, 6),
        test.labels,
        config,
        1,
    )
    assert greedy_mean - amplitude_mean >= 0.05
    _report(
        "organa 8x8",
        f"greedy {greedy_mean:.3f} vs amplitude {amplitude_mean:.3f} "
        f"(margin {greedy_mean - amplitude_mean:+.3f} >= 0.05)",
    )
