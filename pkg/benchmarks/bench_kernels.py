#!/usr/bin/env python3
"""Benchmark the compiled gate kernels against the numpy fallback.

Two workloads, matching where the simulator spends its time:
  sweep  - many single-gate applications to a small batch of states
           (the greedy candidate search pattern)
  batch  - full variational-circuit passes over a large sample batch
           (the training pattern)

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from triqet.qsim.backend import py_kernels

try:
    from triqet.qsim.backend import _kernels as cy_kernels
except ImportError:
    cy_kernels = None


def _random_batch(rng, batch, n_qubits):
    dim = 1 << n_qubits
    amps = rng.normal(size=(batch, dim)) + 1j * rng.normal(size=(batch, dim))
    amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    return np.ascontiguousarray(amps, dtype=np.complex128)


def _time(fn, repeats) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def sweep_workload(kernels, n_qubits, n_gates=2000, batch=6):
    rng = np.random.default_rng(0)
    amps = _random_batch(rng, batch, n_qubits)
    angles = rng.uniform(-np.pi, np.pi, size=batch)
    qubits = rng.integers(0, n_qubits, size=n_gates)
    axes = rng.integers(0, 3, size=n_gates)

    def run():
        work = amps.copy()
        for axis, qubit in zip(axes, qubits):
            kernels.apply_rotation(work, int(axis), int(qubit), n_qubits, angles)
            kernels.apply_cnot(work, int(qubit), int((qubit + 1) % n_qubits), n_qubits)

    return run


def batch_workload(kernels, n_qubits, batch=2048, layers=2):
    rng = np.random.default_rng(1)
    amps = _random_batch(rng, batch, n_qubits)
    angles = rng.uniform(-np.pi, np.pi, size=batch)

    def run():
        work = amps.copy()
        for _ in range(layers):
            for qubit in range(n_qubits):
                kernels.apply_rotation(work, 1, qubit, n_qubits, angles)
            for qubit in range(n_qubits):
                kernels.apply_cnot(work, qubit, (qubit + 1) % n_qubits, n_qubits)

    return run


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if cy_kernels is None:
        print("compiled kernels not built (pip install -e . --no-build-isolation); "
              "benchmarking the numpy fallback only")

    rows = []
    for name, factory, sizes in (
        ("sweep", sweep_workload, (6, 8, 10)),
        ("batch", batch_workload, (6, 10)),
    ):
        for n_qubits in sizes:
            py_time = _time(factory(py_kernels, n_qubits), args.repeats)
            if cy_kernels is not None:
                cy_time = _time(factory(cy_kernels, n_qubits), args.repeats)
                rows.append((name, n_qubits, py_time, cy_time, py_time / cy_time))
            else:
                rows.append((name, n_qubits, py_time, None, None))

    header = f"{'workload':>8} {'qubits':>6} {'numpy':>10} {'cython':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, n_qubits, py_time, cy_time, speedup in rows:
        cy_text = f"{cy_time * 1e3:8.2f}ms" if cy_time is not None else "       n/a"
        speedup_text = f"{speedup:7.2f}x" if speedup is not None else "     n/a"
        print(f"{name:>8} {n_qubits:>6} {py_time * 1e3:8.2f}ms {cy_text} {speedup_text}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
