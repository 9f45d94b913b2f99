# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate kernels over batched statevectors.

Same contract as py_kernels: in-place updates, amps (batch, 2**n_qubits)
complex128 C-contiguous, angles (batch,) float64, qubit 0 = most
significant bit of the basis index.
"""

from libc.math cimport cos, sin


def apply_rotation(double complex[:, ::1] amps, int axis, int qubit,
                   int n_qubits, double[::1] angles):
    cdef Py_ssize_t batch = amps.shape[0]
    cdef Py_ssize_t half = amps.shape[1] >> 1
    cdef int m = n_qubits - 1 - qubit
    cdef Py_ssize_t tk = (<Py_ssize_t> 1) << m
    cdef Py_ssize_t mask = tk - 1
    cdef Py_ssize_t b, g, i0, i1
    cdef double c, s
    cdef double complex a0, a1, phase
    for b in range(batch):
        c = cos(0.5 * angles[b])
        s = sin(0.5 * angles[b])
        if axis == 0:  # Rx
            for g in range(half):
                i0 = ((g >> m) << (m + 1)) | (g & mask)
                i1 = i0 | tk
                a0 = amps[b, i0]
                a1 = amps[b, i1]
                amps[b, i0] = c * a0 - 1j * (s * a1)
                amps[b, i1] = c * a1 - 1j * (s * a0)
        elif axis == 1:  # Ry
            for g in range(half):
                i0 = ((g >> m) << (m + 1)) | (g & mask)
                i1 = i0 | tk
                a0 = amps[b, i0]
                a1 = amps[b, i1]
                amps[b, i0] = c * a0 - s * a1
                amps[b, i1] = s * a0 + c * a1
        else:  # Rz
            phase = c - 1j * s
            for g in range(half):
                i0 = ((g >> m) << (m + 1)) | (g & mask)
                i1 = i0 | tk
                amps[b, i0] = phase * amps[b, i0]
                amps[b, i1] = (c + 1j * s) * amps[b, i1]
    return None


def apply_cnot(double complex[:, ::1] amps, int control, int target,
               int n_qubits):
    cdef Py_ssize_t batch = amps.shape[0]
    cdef Py_ssize_t dim = amps.shape[1]
    cdef Py_ssize_t cmask = (<Py_ssize_t> 1) << (n_qubits - 1 - control)
    cdef Py_ssize_t tmask = (<Py_ssize_t> 1) << (n_qubits - 1 - target)
    cdef Py_ssize_t b, i, j
    cdef double complex tmp
    for b in range(batch):
        for i in range(dim):
            if (i & cmask) and not (i & tmask):
                j = i | tmask
                tmp = amps[b, i]
                amps[b, i] = amps[b, j]
                amps[b, j] = tmp
    return None


def apply_cz(double complex[:, ::1] amps, int control, int target,
             int n_qubits):
    cdef Py_ssize_t batch = amps.shape[0]
    cdef Py_ssize_t dim = amps.shape[1]
    cdef Py_ssize_t cmask = (<Py_ssize_t> 1) << (n_qubits - 1 - control)
    cdef Py_ssize_t tmask = (<Py_ssize_t> 1) << (n_qubits - 1 - target)
    cdef Py_ssize_t b, i
    for b in range(batch):
        for i in range(dim):
            if (i & cmask) and (i & tmask):
                amps[b, i] = -amps[b, i]
    return None
