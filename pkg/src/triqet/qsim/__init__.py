"""Statevector simulation core: circuits, gate kernels, distances."""

from .backend import BACKEND
from .circuits import (
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
from .simulate import (
    DensityMatrix,
    PureState,
    apply_gate,
    apply_gate_batch,
    density_matrix,
    overlap,
    prob_one,
    prob_one_batch,
    prob_zero,
    run,
    run_batch,
    trace_distance_dm,
    trace_distance_from_overlap,
    trace_distance_pure,
    zero_state,
)

__all__ = [
    "BACKEND",
    "Circuit",
    "Const",
    "DensityMatrix",
    "Feature",
    "Gate",
    "Param",
    "PureState",
    "apply_gate",
    "apply_gate_batch",
    "circuit_from_json",
    "circuit_to_json",
    "cnot",
    "concat",
    "cz",
    "density_matrix",
    "dump_circuit",
    "load_circuit",
    "overlap",
    "prob_one",
    "prob_one_batch",
    "prob_zero",
    "run",
    "run_batch",
    "rx",
    "ry",
    "rz",
    "trace_distance_dm",
    "trace_distance_from_overlap",
    "trace_distance_pure",
    "zero_state",
]
