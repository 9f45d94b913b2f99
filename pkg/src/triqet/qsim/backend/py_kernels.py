"""Pure-numpy gate kernels over batched statevectors.

All kernels mutate ``amps`` in place. ``amps`` has shape (batch, 2**n_qubits),
dtype complex128, C order; ``angles`` has shape (batch,). Qubit 0 is the most
significant bit of the basis index.
"""

import numpy as np


def apply_rotation(amps, axis, qubit, n_qubits, angles):
    batch = amps.shape[0]
    view = amps.reshape(batch, 1 << qubit, 2, 1 << (n_qubits - qubit - 1))
    a0 = view[:, :, 0, :].copy()
    a1 = view[:, :, 1, :]
    half = 0.5 * angles
    if axis == 2:  # Rz
        phase = np.exp(-1j * half)[:, None, None]
        view[:, :, 0, :] = phase * a0
        view[:, :, 1, :] = np.conj(phase) * a1
        return None
    c = np.cos(half)[:, None, None]
    s = np.sin(half)[:, None, None]
    if axis == 0:  # Rx
        view[:, :, 0, :] = c * a0 - 1j * s * a1
        view[:, :, 1, :] = -1j * s * a0 + c * a1
    else:  # Ry
        view[:, :, 0, :] = c * a0 - s * a1
        view[:, :, 1, :] = s * a0 + c * a1
    return None


def _two_qubit_view(amps, control, target, n_qubits):
    lo, hi = (control, target) if control < target else (target, control)
    batch = amps.shape[0]
    return amps.reshape(
        batch,
        1 << lo,
        2,
        1 << (hi - lo - 1),
        2,
        1 << (n_qubits - hi - 1),
    )


def apply_cnot(amps, control, target, n_qubits):
    view = _two_qubit_view(amps, control, target, n_qubits)
    if control < target:
        flipped = view[:, :, 1, :, 0, :].copy()
        view[:, :, 1, :, 0, :] = view[:, :, 1, :, 1, :]
        view[:, :, 1, :, 1, :] = flipped
    else:
        flipped = view[:, :, 0, :, 1, :].copy()
        view[:, :, 0, :, 1, :] = view[:, :, 1, :, 1, :]
        view[:, :, 1, :, 1, :] = flipped
    return None


def apply_cz(amps, control, target, n_qubits):
    view = _two_qubit_view(amps, control, target, n_qubits)
    view[:, :, 1, :, 1, :] *= -1.0
    return None
