"""Batched array kernels for state-vector simulation.

All kernels operate on arrays of shape (K, 2**n): K independent state
vectors over n qubits. Qubit 0 is the most-significant bit of the basis
index, so in a reshape to (K, 2, 2, ..., 2) qubit q sits on axis 1 + q.

Kernels never mutate their inputs and never renormalize unless stated;
callers own the bookkeeping.
"""

from __future__ import annotations

import numpy as np

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)

_GENERATORS = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim != 1 << n:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def rotation_matrix(axis: str, angle: float) -> np.ndarray:
    """exp(-i * angle/2 * sigma_axis) as a 2x2 matrix."""
    return rotation_matrices(axis, np.asarray(angle, dtype=np.float64))


def rotation_matrices(axis: str, angles: np.ndarray) -> np.ndarray:
    """Stack of rotation matrices, shape angles.shape + (2, 2)."""
    angles = np.asarray(angles, dtype=np.float64)
    c = np.cos(angles / 2.0)
    s = np.sin(angles / 2.0)
    out = np.empty(angles.shape + (2, 2), dtype=np.complex128)
    if axis == "x":
        out[..., 0, 0] = c
        out[..., 0, 1] = -1j * s
        out[..., 1, 0] = -1j * s
        out[..., 1, 1] = c
    elif axis == "y":
        out[..., 0, 0] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
        out[..., 1, 1] = c
    elif axis == "z":
        out[..., 0, 0] = c - 1j * s
        out[..., 0, 1] = 0.0
        out[..., 1, 0] = 0.0
        out[..., 1, 1] = c + 1j * s
    else:
        raise ValueError(f"unknown rotation axis {axis!r}")
    return out


def _split(amps: np.ndarray, n: int, qubit: int) -> np.ndarray:
    """View as (K, left, 2, right) with the target qubit isolated."""
    k = amps.shape[0]
    left = 1 << qubit
    right = 1 << (n - qubit - 1)
    return amps.reshape(k, left, 2, right)


def apply_single_qubit(amps: np.ndarray, n: int, qubit: int, mats: np.ndarray) -> np.ndarray:
    """Apply 2x2 matrices to one qubit. ``mats`` is (2, 2) or (K, 2, 2)."""
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    psi = _split(amps, n, qubit)
    if mats.ndim == 2:
        out = np.einsum("ij,ajb->aib", mats, psi.reshape(-1, 2, psi.shape[-1]))
        out = out.reshape(psi.shape)
    else:
        out = np.einsum("kij,kajb->kaib", mats, psi)
    return out.reshape(amps.shape)


def apply_rotation(amps: np.ndarray, n: int, qubit: int, axis: str, angles) -> np.ndarray:
    """Rotate one qubit; ``angles`` is a scalar or per-row array (K,)."""
    angles = np.asarray(angles, dtype=np.float64)
    if angles.ndim == 0:
        return apply_single_qubit(amps, n, qubit, rotation_matrices(axis, angles))
    return apply_single_qubit(amps, n, qubit, rotation_matrices(axis, angles))


def apply_x(amps: np.ndarray, n: int, qubit: int) -> np.ndarray:
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    psi = _split(amps, n, qubit)
    return psi[:, :, ::-1, :].reshape(amps.shape)


def apply_hadamard(amps: np.ndarray, n: int, qubit: int) -> np.ndarray:
    return apply_single_qubit(amps, n, qubit, HADAMARD)


def apply_cnot(amps: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    if control == target:
        raise IndexError("control and target must differ")
    for q in (control, target):
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")
    k = amps.shape[0]
    psi = amps.reshape((k,) + (2,) * n).copy()
    sel = [slice(None)] * (n + 1)
    sel[1 + control] = 1
    sel = tuple(sel)
    psi[sel] = np.flip(psi[sel], axis=(1 + target) - (1 if target > control else 0))
    return psi.reshape(amps.shape)


def apply_swap(amps: np.ndarray, n: int, a: int, b: int) -> np.ndarray:
    k = amps.shape[0]
    psi = amps.reshape((k,) + (2,) * n)
    return np.swapaxes(psi, 1 + a, 1 + b).reshape(amps.shape)


def apply_cswap(amps: np.ndarray, n: int, control: int, a: int, b: int) -> np.ndarray:
    """Controlled swap of qubits a and b."""
    k = amps.shape[0]
    psi = amps.reshape((k,) + (2,) * n).copy()
    sel = [slice(None)] * (n + 1)
    sel[1 + control] = 1
    sel = tuple(sel)
    block = psi[sel]
    # After selecting the control axis, higher axes shift down by one.
    aa = 1 + a - (1 if a > control else 0)
    bb = 1 + b - (1 if b > control else 0)
    psi[sel] = np.swapaxes(block, aa, bb)
    return psi.reshape(amps.shape)


def _front_view(amps: np.ndarray, n: int, qubits: tuple[int, ...]) -> np.ndarray:
    """View with measured qubits moved to the front: (K, 2**m, rest).

    The trailing axis keeps the remaining qubits in their original
    relative order.
    """
    k = amps.shape[0]
    psi = amps.reshape((k,) + (2,) * n)
    src = [1 + q for q in qubits]
    dst = list(range(1, 1 + len(qubits)))
    psi = np.moveaxis(psi, src, dst)
    return psi.reshape(k, 1 << len(qubits), -1)


def outcome_probabilities(amps: np.ndarray, n: int, qubits: tuple[int, ...]) -> np.ndarray:
    """Born probabilities over all 2**m outcomes, shape (K, 2**m)."""
    view = _front_view(amps, n, qubits)
    return np.einsum("kob,kob->ko", view.real, view.real) + np.einsum(
        "kob,kob->ko", view.imag, view.imag
    )


def collapse(
    amps: np.ndarray,
    n: int,
    qubits: tuple[int, ...],
    outcome: int,
    renormalize: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Project onto one outcome of the measured qubits, keeping full width.

    Returns (collapsed amplitudes, per-row outcome probabilities). Rows
    with zero probability come back as all-zero rows.
    """
    k = amps.shape[0]
    psi = amps.reshape((k,) + (2,) * n)
    src = [1 + q for q in qubits]
    dst = list(range(1, 1 + len(qubits)))
    moved = np.moveaxis(psi, src, dst).reshape(k, 1 << len(qubits), -1)
    block = moved[:, outcome, :]
    probs = np.einsum("kb,kb->k", block.real, block.real) + np.einsum(
        "kb,kb->k", block.imag, block.imag
    )
    out = np.zeros_like(moved)
    if renormalize:
        scale = np.zeros(k)
        nz = probs > 0.0
        scale[nz] = 1.0 / np.sqrt(probs[nz])
        out[:, outcome, :] = block * scale[:, None]
    else:
        out[:, outcome, :] = block
    shape = (k,) + (2,) * n
    out = np.moveaxis(out.reshape(shape[:1] + (2,) * len(qubits) + shape[1 + len(qubits):]), dst, src)
    return out.reshape(amps.shape), probs


def extract_block(amps: np.ndarray, n: int, qubits: tuple[int, ...], outcome: int) -> np.ndarray:
    """Amplitudes of the remaining qubits given the measured block outcome.

    Shape (K, 2**(n-m)); not renormalized.
    """
    view = _front_view(amps, n, qubits)
    return view[:, outcome, :].copy()


def extract_block_per_row(
    amps: np.ndarray, n: int, qubits: tuple[int, ...], outcomes: np.ndarray
) -> np.ndarray:
    """Like extract_block but with a per-row outcome index (K,)."""
    view = _front_view(amps, n, qubits)
    return view[np.arange(view.shape[0]), outcomes, :].copy()


def tensor_zero_suffix(amps: np.ndarray, m: int) -> np.ndarray:
    """Append m fresh |0> qubits at the least-significant end."""
    k, dim = amps.shape
    out = np.zeros((k, dim << m), dtype=np.complex128)
    out[:, :: 1 << m] = amps
    return out


def norms(amps: np.ndarray) -> np.ndarray:
    return np.sqrt(
        np.einsum("kb,kb->k", amps.real, amps.real)
        + np.einsum("kb,kb->k", amps.imag, amps.imag)
    )


def inner_products(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise <a|b>; b may be a single vector broadcast over rows."""
    if b.ndim == 1:
        return a.conj() @ b
    return np.einsum("kb,kb->k", a.conj(), b)
