"""Gate and circuit model shared by the simulator, the encoder search, and the classifier.

Convention used everywhere: qubit 0 is the most significant bit of the
computational-basis index, so for two qubits the amplitude order is
|00>, |01>, |10>, |11>.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from ..errors import CircuitError

ROTATIONS = ("rx", "ry", "rz")
ENTANGLERS = ("cnot", "cz")
GATE_KINDS = ROTATIONS + ENTANGLERS


@dataclass(frozen=True)
class Feature:
    """Angle contribution ``scale * x[index]`` from the classical feature vector."""

    index: int
    scale: float = 1.0


@dataclass(frozen=True)
class Param:
    """Angle contribution ``params[index]`` from the trainable parameter vector."""

    index: int


@dataclass(frozen=True)
class Const:
    """Fixed angle contribution, in radians."""

    value: float


AngleTerm = Union[Feature, Param, Const]


def as_terms(angle) -> tuple[AngleTerm, ...]:
    """Coerce a number, a single term, or an iterable of terms to a term tuple."""
    if isinstance(angle, (int, float)):
        return (Const(float(angle)),)
    if isinstance(angle, (Feature, Param, Const)):
        return (angle,)
    return tuple(angle)


@dataclass(frozen=True)
class Gate:
    """One gate: a rotation with an angle source, or a two-qubit entangler.

    A rotation's angle is a sum of terms; single-term is the common case,
    multi-term appears after rotation merging.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: tuple[AngleTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "angle", tuple(self.angle))
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.kind in ROTATIONS:
            if len(self.qubits) != 1:
                raise CircuitError(f"{self.kind} acts on exactly one qubit")
            if not self.angle:
                raise CircuitError(f"{self.kind} needs an angle source")
        else:
            if len(self.qubits) != 2:
                raise CircuitError(f"{self.kind} needs (control, target) qubits")
            if self.qubits[0] == self.qubits[1]:
                raise CircuitError(f"{self.kind} control and target must differ")
            if self.angle:
                raise CircuitError(f"{self.kind} takes no angle")

    @property
    def is_rotation(self) -> bool:
        return self.kind in ROTATIONS

    def resolve_angle(self, features, params) -> float:
        """Evaluate the angle in radians for one feature/parameter assignment."""
        theta = 0.0
        for term in self.angle:
            if isinstance(term, Feature):
                if term.index >= len(features):
                    raise CircuitError(
                        f"gate references feature {term.index} but only "
                        f"{len(features)} features were provided"
                    )
                theta += term.scale * float(features[term.index])
            elif isinstance(term, Param):
                if term.index >= len(params):
                    raise CircuitError(
                        f"gate references parameter {term.index} but only "
                        f"{len(params)} parameters were provided"
                    )
                theta += float(params[term.index])
            else:
                theta += term.value
        return theta

    def label(self) -> str:
        """Compact human-readable form, e.g. ``ry q2 x13`` or ``cnot q0>q1``."""
        if not self.is_rotation:
            return f"{self.kind} q{self.qubits[0]}>q{self.qubits[1]}"
        parts = []
        for term in self.angle:
            if isinstance(term, Feature):
                parts.append(f"x{term.index}" if term.scale == 1.0 else f"{term.scale:g}*x{term.index}")
            elif isinstance(term, Param):
                parts.append(f"t{term.index}")
            else:
                parts.append(f"{term.value:g}")
        return f"{self.kind} q{self.qubits[0]} " + "+".join(parts)


def rx(qubit: int, angle) -> Gate:
    return Gate("rx", (qubit,), as_terms(angle))


def ry(qubit: int, angle) -> Gate:
    return Gate("ry", (qubit,), as_terms(angle))


def rz(qubit: int, angle) -> Gate:
    return Gate("rz", (qubit,), as_terms(angle))


def cnot(control: int, target: int) -> Gate:
    return Gate("cnot", (control, target))


def cz(control: int, target: int) -> Gate:
    return Gate("cz", (control, target))


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over a fixed number of qubits."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        for gate in self.gates:
            for q in gate.qubits:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(
                        f"gate '{gate.label()}' references qubit {q} "
                        f"on a {self.n_qubits}-qubit circuit"
                    )

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def max_feature_index(self) -> int:
        """Highest feature index referenced by any gate, or -1 if none."""
        return max(
            (t.index for g in self.gates for t in g.angle if isinstance(t, Feature)),
            default=-1,
        )

    @property
    def max_param_index(self) -> int:
        """Highest trainable-parameter index referenced, or -1 if none."""
        return max(
            (t.index for g in self.gates for t in g.angle if isinstance(t, Param)),
            default=-1,
        )

    def appended(self, *gates: Gate) -> "Circuit":
        return Circuit(self.n_qubits, self.gates + tuple(gates))


def concat(first: Circuit, second: Circuit) -> Circuit:
    """Concatenate two circuits on the same register (first applied first)."""
    if first.n_qubits != second.n_qubits:
        raise CircuitError(
            f"cannot concatenate circuits on {first.n_qubits} and {second.n_qubits} qubits"
        )
    return Circuit(first.n_qubits, first.gates + second.gates)


def _term_to_json(term: AngleTerm) -> dict:
    if isinstance(term, Feature):
        return {"type": "feature", "index": term.index, "scale": term.scale}
    if isinstance(term, Param):
        return {"type": "param", "index": term.index}
    return {"type": "const", "value": term.value}


def _term_from_json(doc: dict) -> AngleTerm:
    kind = doc.get("type")
    if kind == "feature":
        return Feature(int(doc["index"]), float(doc.get("scale", 1.0)))
    if kind == "param":
        return Param(int(doc["index"]))
    if kind == "const":
        return Const(float(doc["value"]))
    raise CircuitError(f"unknown angle source type {kind!r}")


def circuit_to_json(circuit: Circuit) -> dict:
    gates = []
    for gate in circuit.gates:
        entry: dict = {"kind": gate.kind, "qubits": list(gate.qubits)}
        if gate.is_rotation:
            if len(gate.angle) == 1:
                entry["angle_source"] = _term_to_json(gate.angle[0])
            else:
                entry["angle_source"] = {
                    "type": "sum",
                    "terms": [_term_to_json(t) for t in gate.angle],
                }
        gates.append(entry)
    return {"n_qubits": circuit.n_qubits, "gates": gates}


def circuit_from_json(doc: dict) -> Circuit:
    gates = []
    for entry in doc["gates"]:
        kind = entry["kind"]
        qubits = tuple(int(q) for q in entry["qubits"])
        angle: tuple[AngleTerm, ...] = ()
        source = entry.get("angle_source")
        if source is not None:
            if source.get("type") == "sum":
                angle = tuple(_term_from_json(t) for t in source["terms"])
            else:
                angle = (_term_from_json(source),)
        gates.append(Gate(kind, qubits, angle))
    return Circuit(int(doc["n_qubits"]), tuple(gates))


def dump_circuit(circuit: Circuit, path) -> None:
    with open(path, "w") as handle:
        json.dump(circuit_to_json(circuit), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_circuit(path) -> Circuit:
    with open(path) as handle:
        return circuit_from_json(json.load(handle))
