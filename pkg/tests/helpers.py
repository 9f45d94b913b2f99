"""Independent full-matrix simulation oracle used by the tests.

Builds explicit 2**n x 2**n unitaries with Kronecker products and applies
them by matrix multiplication — deliberately a different code path from
the kernel-based simulator it checks.
"""

from functools import reduce

import numpy as np

from triqet.qsim import Circuit, Gate, PureState

I2 = np.eye(2, dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def rotation_matrix(kind: str, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "ry":
        return np.array([[c, -s], [s, c]])
    if kind == "rz":
        return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]])
    raise ValueError(kind)


def _kron_at(ops: dict[int, np.ndarray], n_qubits: int) -> np.ndarray:
    factors = [ops.get(q, I2) for q in range(n_qubits)]
    return reduce(np.kron, factors)


def gate_unitary(gate: Gate, n_qubits: int, features=(), params=()) -> np.ndarray:
    if gate.is_rotation:
        theta = gate.resolve_angle(features, params)
        return _kron_at({gate.qubits[0]: rotation_matrix(gate.kind, theta)}, n_qubits)
    control, target = gate.qubits
    flip = X if gate.kind == "cnot" else Z
    return _kron_at({control: P0}, n_qubits) + _kron_at({control: P1, target: flip}, n_qubits)


def circuit_unitary(circuit: Circuit, features=(), params=()) -> np.ndarray:
    total = np.eye(1 << circuit.n_qubits, dtype=complex)
    for gate in circuit.gates:
        total = gate_unitary(gate, circuit.n_qubits, features, params) @ total
    return total


def simulate_matrix(circuit: Circuit, features=(), params=()) -> np.ndarray:
    start = np.zeros(1 << circuit.n_qubits, dtype=complex)
    start[0] = 1.0
    return circuit_unitary(circuit, features, params) @ start


def random_state(rng: np.random.Generator, n_qubits: int) -> PureState:
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return PureState(n_qubits, amps / np.linalg.norm(amps))


def random_circuit(rng: np.random.Generator, n_qubits: int, n_gates: int) -> Circuit:
    from triqet.qsim import cnot, cz, rx, ry, rz

    gates = []
    for _ in range(n_gates):
        kind = rng.choice(["rx", "ry", "rz", "cnot", "cz"])
        if kind in ("cnot", "cz"):
            if n_qubits < 2:
                kind = "ry"
            else:
                control, target = rng.choice(n_qubits, size=2, replace=False)
                gates.append({"cnot": cnot, "cz": cz}[kind](int(control), int(target)))
                continue
        q = int(rng.integers(n_qubits))
        theta = float(rng.uniform(-2 * np.pi, 2 * np.pi))
        gates.append({"rx": rx, "ry": ry, "rz": rz}[kind](q, theta))
    return Circuit(n_qubits, tuple(gates))
