import json

import numpy as np
import pytest

from triqet.errors import CircuitError
from triqet.qsim import (
    Circuit,
    Const,
    Feature,
    Gate,
    Param,
    circuit_from_json,
    circuit_to_json,
    cnot,
    concat,
    cz,
    dump_circuit,
    load_circuit,
    rx,
    ry,
    rz,
)


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("hadamard", (0,))
    with pytest.raises(CircuitError):
        Gate("ry", (0, 1), (Const(1.0),))
    with pytest.raises(CircuitError):
        Gate("ry", (0,))  # no angle
    with pytest.raises(CircuitError):
        Gate("cnot", (1, 1))
    with pytest.raises(CircuitError):
        Gate("cz", (0,))
    with pytest.raises(CircuitError):
        Gate("cnot", (0, 1), (Const(1.0),))


def test_circuit_rejects_out_of_range_qubits():
    with pytest.raises(CircuitError):
        Circuit(1, (cnot(0, 1),))
    with pytest.raises(CircuitError):
        Circuit(2, (ry(2, 0.5),))


def test_max_indices():
    circuit = Circuit(
        3,
        (
            ry(0, Feature(4, 1.0)),
            rx(1, Param(2)),
            rz(2, Const(0.3)),
            cnot(0, 1),
        ),
    )
    assert circuit.max_feature_index == 4
    assert circuit.max_param_index == 2
    assert Circuit(1, (ry(0, 0.1),)).max_feature_index == -1


def test_resolve_angle_sums_terms():
    gate = Gate("ry", (0,), (Feature(1, 2.0), Param(0), Const(0.5)))
    theta = gate.resolve_angle([0.0, 3.0], [1.0])
    assert theta == pytest.approx(2.0 * 3.0 + 1.0 + 0.5)


def test_concat_checks_qubit_counts():
    with pytest.raises(CircuitError):
        concat(Circuit(2), Circuit(3))
    joined = concat(Circuit(2, (ry(0, 1.0),)), Circuit(2, (cnot(0, 1),)))
    assert len(joined) == 2


def test_json_round_trip_exact():
    rng = np.random.default_rng(17)
    gates = [
        ry(0, Feature(12, float(rng.uniform(-5, 5)))),
        rx(3, Param(7)),
        rz(1, Const(float(rng.uniform(-np.pi, np.pi)))),
        cnot(2, 0),
        cz(1, 3),
        Gate("ry", (2,), (Feature(0, 1.0), Feature(5, -0.25), Const(1e-7))),
    ]
    circuit = Circuit(4, tuple(gates))
    doc = json.loads(json.dumps(circuit_to_json(circuit)))
    restored = circuit_from_json(doc)
    assert restored == circuit  # dataclass equality: indices and floats bit-exact


def test_dump_and_load_circuit(tmp_path):
    circuit = Circuit(2, (ry(0, Feature(1, 0.125)), cnot(0, 1)))
    path = tmp_path / "circuit.json"
    dump_circuit(circuit, path)
    assert load_circuit(path) == circuit


def test_from_json_rejects_unknown_angle_type():
    with pytest.raises(CircuitError):
        circuit_from_json(
            {"n_qubits": 1, "gates": [{"kind": "ry", "qubits": [0], "angle_source": {"type": "wat"}}]}
        )


def test_labels_are_compact_and_csv_safe():
    assert "," not in ry(0, Feature(3, 1.0)).label()
    assert cnot(0, 1).label() == "cnot q0>q1"
    assert "x3" in ry(0, Feature(3, 1.0)).label()
    assert "t2" in rx(1, Param(2)).label()
