"""Dense statevector simulation and the distance/measurement primitives.

States are exact (no shot sampling). Everything is a pure function over
immutable values; batched variants operate on (batch, 2**n) amplitude
matrices and are the workhorses for the encoder search and training.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import CircuitError
from . import backend
from .circuits import Circuit, Feature, Gate, Param

_AXIS = {"rx": 0, "ry": 1, "rz": 2}


@dataclass(frozen=True)
class PureState:
    """Unit-norm statevector over n qubits (qubit 0 = most significant bit)."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape[0] != 1 << self.n_qubits:
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} "
                f"qubits, got {amps.shape[0]}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"state is not normalized (norm {norm})")


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-one matrix over n qubits; used as the distance oracle."""

    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        object.__setattr__(self, "entries", entries)
        dim = 1 << self.n_qubits
        if entries.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {entries.shape}")
        if np.max(np.abs(entries - entries.conj().T)) > 1e-9:
            raise ValueError("density matrix is not Hermitian within 1e-9")
        if abs(np.trace(entries).real - 1.0) > 1e-9 or abs(np.trace(entries).imag) > 1e-9:
            raise ValueError("density matrix trace is not 1 within 1e-9")

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


def zero_state(n_qubits: int) -> PureState:
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return PureState(n_qubits, amps)


def _check_gate_fits(gate: Gate, n_qubits: int) -> None:
    for q in gate.qubits:
        if not 0 <= q < n_qubits:
            raise CircuitError(
                f"gate '{gate.label()}' references qubit {q} on a {n_qubits}-qubit state"
            )


def _resolve_angles(gate: Gate, features, params, batch: int) -> np.ndarray:
    """Per-row angles for a rotation gate, shape (batch,)."""
    theta = np.zeros(batch)
    for term in gate.angle:
        if isinstance(term, Feature):
            if features is None or term.index >= features.shape[1]:
                have = 0 if features is None else features.shape[1]
                raise CircuitError(
                    f"gate references feature {term.index} but only {have} "
                    f"features were provided"
                )
            theta += term.scale * features[:, term.index]
        elif isinstance(term, Param):
            if params is None or term.index >= params.shape[0]:
                have = 0 if params is None else params.shape[0]
                raise CircuitError(
                    f"gate references parameter {term.index} but only {have} "
                    f"parameters were provided"
                )
            theta += params[term.index]
        else:
            theta += term.value
    return theta


def apply_gate_batch(amps: np.ndarray, gate: Gate, features, params, n_qubits: int) -> np.ndarray:
    """Apply one gate in place to a (batch, 2**n) amplitude matrix."""
    _check_gate_fits(gate, n_qubits)
    if gate.kind == "cnot":
        backend.apply_cnot(amps, gate.qubits[0], gate.qubits[1], n_qubits)
    elif gate.kind == "cz":
        backend.apply_cz(amps, gate.qubits[0], gate.qubits[1], n_qubits)
    else:
        angles = _resolve_angles(gate, features, params, amps.shape[0])
        backend.apply_rotation(amps, _AXIS[gate.kind], gate.qubits[0], n_qubits, angles)
    return amps


def _as_feature_matrix(features) -> np.ndarray | None:
    if features is None:
        return None
    mat = np.asarray(features, dtype=np.float64)
    if mat.ndim == 1:
        mat = mat[None, :]
    return mat


def _as_param_vector(params) -> np.ndarray | None:
    if params is None:
        return None
    return np.asarray(params, dtype=np.float64).reshape(-1)


def run_batch(circuit: Circuit, features=None, params=None, initial=None) -> np.ndarray:
    """Run a circuit over a batch of feature rows and return (batch, 2**n) amplitudes.

    ``initial`` continues from previously computed states (e.g. cached
    embeddings) instead of |0...0>; it is copied, never mutated.
    """
    features = _as_feature_matrix(features)
    params = _as_param_vector(params)
    dim = 1 << circuit.n_qubits
    if initial is not None:
        amps = np.array(initial, dtype=np.complex128, order="C")
        if amps.ndim == 1:
            amps = amps[None, :]
        if amps.shape[1] != dim:
            raise CircuitError(
                f"initial states have dimension {amps.shape[1]}, circuit needs {dim}"
            )
        if features is not None and features.shape[0] != amps.shape[0]:
            raise CircuitError("feature rows and initial states disagree on batch size")
    else:
        batch = 1 if features is None else features.shape[0]
        amps = np.zeros((batch, dim), dtype=np.complex128)
        amps[:, 0] = 1.0
    n_features = 0 if features is None else features.shape[1]
    if circuit.max_feature_index >= n_features:
        raise CircuitError(
            f"circuit uses feature index {circuit.max_feature_index} but "
            f"{n_features} features were provided"
        )
    n_params = 0 if params is None else params.shape[0]
    if circuit.max_param_index >= n_params:
        raise CircuitError(
            f"circuit uses parameter index {circuit.max_param_index} but "
            f"{n_params} parameters were provided"
        )
    for gate in circuit.gates:
        apply_gate_batch(amps, gate, features, params, circuit.n_qubits)
    return amps


def run(circuit: Circuit, features=None, params=None) -> PureState:
    """Fold the circuit's gates over |0...0> and return the final state."""
    amps = run_batch(circuit, features, params)
    return PureState(circuit.n_qubits, amps[0])


def apply_gate(state: PureState, gate: Gate, features=None, params=None) -> PureState:
    """Apply a single gate to a state, resolving the angle from features/params."""
    amps = np.array(state.amplitudes[None, :], order="C")
    apply_gate_batch(
        amps, gate, _as_feature_matrix(features), _as_param_vector(params), state.n_qubits
    )
    return PureState(state.n_qubits, amps[0])


def overlap(a: PureState, b: PureState) -> complex:
    """Inner product <a|b>."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def trace_distance_from_overlap(ov) -> float:
    """Trace distance between two pure states given their overlap <a|b>."""
    return math.sqrt(max(0.0, 1.0 - abs(ov) ** 2))


def trace_distance_pure(a: PureState, b: PureState) -> float:
    """Trace distance D(|a><a|, |b><b|) = sqrt(1 - |<a|b>|^2).

    The squared overlap is divided by the stored norms so that D(a, a) is
    exactly zero even though normalized amplitudes carry rounding error.
    """
    ov = overlap(a, b)
    na = np.vdot(a.amplitudes, a.amplitudes).real
    nb = np.vdot(b.amplitudes, b.amplitudes).real
    return math.sqrt(max(0.0, 1.0 - abs(ov) ** 2 / (na * nb)))


def density_matrix(state: PureState) -> DensityMatrix:
    """Rank-one projector |psi><psi|."""
    amps = state.amplitudes
    return DensityMatrix(state.n_qubits, np.outer(amps, amps.conj()))


def trace_distance_dm(r1: DensityMatrix, r2: DensityMatrix) -> float:
    """Half the trace norm of r1 - r2, via the eigenvalues of the difference."""
    if r1.n_qubits != r2.n_qubits:
        raise ValueError(f"qubit counts differ: {r1.n_qubits} vs {r2.n_qubits}")
    diff = r1.entries - r2.entries
    if np.max(np.abs(diff - diff.conj().T)) > 1e-9:
        raise ValueError("difference of density matrices is not Hermitian within 1e-9")
    eigenvalues = np.linalg.eigvalsh(diff)
    return min(1.0, max(0.0, 0.5 * float(np.sum(np.abs(eigenvalues)))))


def prob_one_batch(amps: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """P(qubit = 1) for each row of a (batch, 2**n) amplitude matrix."""
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubits")
    view = amps.reshape(amps.shape[0], 1 << qubit, 2, -1)
    ones = view[:, :, 1, :]
    return np.sum(ones.real**2 + ones.imag**2, axis=(1, 2))


def prob_one(state: PureState, qubit: int) -> float:
    """Probability of measuring |1> on the given qubit."""
    return float(prob_one_batch(state.amplitudes[None, :], qubit, state.n_qubits)[0])


def prob_zero(state: PureState, qubit: int) -> float:
    return 1.0 - prob_one(state, qubit)
