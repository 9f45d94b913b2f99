"""Amplitude and angle encoding baselines.

The amplitude baseline is trained and evaluated on the idealized encoded
state (pad + normalize). The Möttönen decomposition into uniformly
controlled Ry rotations (plus an Rz stage for signed inputs) realizes that
state as an explicit {Ry, Cnot} circuit and is what the gate-count
comparison measures.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .qsim.circuits import Circuit, Const, Feature, Gate
from .qsim.simulate import PureState


def amplitude_encode_state(features, n_qubits: int) -> PureState:
    """Zero-pad to 2**n_qubits and L2-normalize into state amplitudes."""
    values = np.asarray(features, dtype=np.float64).reshape(-1)
    dim = 1 << n_qubits
    if values.size > dim:
        raise ValueError(
            f"{values.size} features do not fit in {n_qubits} qubits ({dim} amplitudes)"
        )
    padded = np.zeros(dim)
    padded[: values.size] = values
    norm = float(np.linalg.norm(padded))
    if norm == 0.0:
        raise ValueError("amplitude encoding needs at least one nonzero feature")
    return PureState(n_qubits, padded / norm)


def amplitude_encode_batch(features, n_qubits: int) -> np.ndarray:
    """Idealized amplitude-encoded states for a whole feature matrix."""
    matrix = np.asarray(features, dtype=np.float64)
    dim = 1 << n_qubits
    if matrix.shape[1] > dim:
        raise ValueError(
            f"{matrix.shape[1]} features do not fit in {n_qubits} qubits"
        )
    padded = np.zeros((matrix.shape[0], dim))
    padded[:, : matrix.shape[1]] = matrix
    norms = np.linalg.norm(padded, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("amplitude encoding needs at least one nonzero feature per row")
    return (padded / norms[:, None]).astype(np.complex128)


def angle_encode_circuit(n_features: int) -> Circuit:
    """One qubit per feature: Ry(2*x_i) gives cos(x_i)|0> + sin(x_i)|1>."""
    if n_features < 1:
        raise ValueError("need at least one feature")
    gates = tuple(Gate("ry", (i,), (Feature(i, 2.0),)) for i in range(n_features))
    return Circuit(n_features, gates)


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _angle_mix(k: int) -> np.ndarray:
    """Matrix turning uniformly-controlled angles into the circuit's rotation angles."""
    size = 1 << k
    mix = np.empty((size, size))
    for i in range(size):
        g = _gray(i)
        for j in range(size):
            mix[i, j] = (-1) ** bin(j & g).count("1") / size
    return mix


def _control_sequence(k: int) -> list[int]:
    """Gray-code control pattern for the CNOTs of a k-controlled rotation."""
    if k == 0:
        return []
    side = _control_sequence(k - 1)[:-1]
    return side + [k - 1] + side + [k - 1]


def _uniformly_controlled(angles: np.ndarray, controls: list[int], target: int, kind: str) -> list[Gate]:
    k = len(controls)
    if k == 0:
        return [Gate(kind, (target,), (Const(float(angles[0])),))]
    thetas = _angle_mix(k) @ angles
    pattern = _control_sequence(k)
    gates: list[Gate] = []
    for i in range(1 << k):
        gates.append(Gate(kind, (target,), (Const(float(thetas[i])),)))
        gates.append(Gate("cnot", (controls[k - 1 - pattern[i]], target)))
    return gates


def _alpha_y(magnitudes: np.ndarray, k: int, j: int) -> float:
    m = 1 << (k - 1)
    numerator = float(np.sum(magnitudes[(2 * j + 1) * m : (2 * j + 2) * m] ** 2))
    denominator = float(np.sum(magnitudes[2 * j * m : (2 * j + 2) * m] ** 2))
    if denominator == 0.0:
        return 0.0
    return 2.0 * math.asin(min(1.0, math.sqrt(numerator / denominator)))


def _alpha_z(phases: np.ndarray, k: int, j: int) -> float:
    m = 1 << (k - 1)
    diff = phases[(2 * j + 1) * m : (2 * j + 2) * m] - phases[2 * j * m : (2 * j + 1) * m]
    return float(np.sum(diff) / m)


def mottonen_circuit(target) -> Circuit:
    """Decompose state preparation of a real target into {Ry, Cnot} (+ Rz if signed).

    The prepared state matches the target up to a global phase.
    """
    target = np.asarray(target, dtype=np.float64).reshape(-1)
    n_qubits = int(round(math.log2(target.size)))
    if 1 << n_qubits != target.size:
        raise ValueError(f"target length {target.size} is not a power of two")
    if abs(np.linalg.norm(target) - 1.0) > 1e-9:
        raise ValueError("target must be normalized to unit norm")
    magnitudes = np.abs(target)
    gates: list[Gate] = []
    for k in range(n_qubits):
        alphas = np.array([_alpha_y(magnitudes, n_qubits - k, j) for j in range(1 << k)])
        gates.extend(_uniformly_controlled(alphas, list(range(k)), k, "ry"))
    phases = np.where(target < 0.0, math.pi, 0.0)
    if np.any(phases != 0.0):
        for k in range(n_qubits):
            alphas = np.array([_alpha_z(phases, n_qubits - k, j) for j in range(1 << k)])
            gates.extend(_uniformly_controlled(alphas, list(range(k)), k, "rz"))
    return Circuit(n_qubits, tuple(gates))


class MottonenReference(NamedTuple):
    """Published gate counts for the general Möttönen state transformation."""

    cnot: int
    rotations: int


def mottonen_reference_counts(n_qubits: int) -> MottonenReference:
    """Reference CNOT/rotation counts quoted for amplitude encoding at n qubits."""
    return MottonenReference(
        cnot=(1 << (n_qubits + 2)) - 4 * n_qubits - 4,
        rotations=(1 << (n_qubits + 2)) - 5,
    )
