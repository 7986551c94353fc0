"""Exact state-vector simulation of n-qubit pure states.

Conventions, fixed throughout the package:

* qubit 0 is the most-significant bit of the computational-basis index,
  so the basis index of outcome bits (b_0, ..., b_{n-1}) is
  sum_q b_q * 2**(n-1-q);
* states are immutable values, every operation returns a new state;
* randomness always comes from an explicitly passed numpy Generator;
* global phase is never normalized away (fidelity is phase-insensitive
  by construction).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    ConfigError,
    EncodingError,
    NormError,
    PostselectError,
    ShapeError,
    StateError,
    LabelError,
)

NORM_TOL = 1e-9
BRANCH_CUTOFF = 1e-12


@dataclass(frozen=True)
class QuantumState:
    """Pure state of ``n_qubits`` qubits as 2**n complex amplitudes."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.shape[0] != 1 << self.n_qubits:
            raise ShapeError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise NormError(f"state norm {norm} deviates from 1 by more than {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits


@dataclass(frozen=True)
class BranchEnsemble:
    """Mixture {(p_k, |psi_k>)} produced by a non-postselected measurement."""

    branches: tuple[tuple[float, QuantumState], ...]

    def __post_init__(self):
        total = sum(p for p, _ in self.branches)
        if abs(total - 1.0) > NORM_TOL:
            raise NormError(f"branch probabilities sum to {total}, not 1")

    def __len__(self) -> int:
        return len(self.branches)


def basis_state(n_qubits: int, index: int = 0) -> QuantumState:
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(n_qubits, amps)


def _row(s: QuantumState) -> np.ndarray:
    return s.amplitudes[None, :]


def _state(n: int, row: np.ndarray) -> QuantumState:
    return QuantumState(n, row[0])


def amplitude_encode(v, renormalize: bool = False) -> QuantumState:
    """Write a classical vector as the amplitudes of a quantum state."""
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1:
        raise ShapeError(f"expected a vector, got shape {v.shape}")
    dim = v.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n or dim < 2:
        raise ShapeError(f"length {dim} is not a power of two >= 2")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise EncodingError("cannot encode the zero vector")
    if renormalize:
        v = v / norm
    elif abs(norm - 1.0) > 1e-6:
        raise NormError(f"vector norm {norm} is not 1 (pass renormalize=True)")
    return QuantumState(n, v)


def decode_amplitudes(s: QuantumState) -> np.ndarray:
    """Elementwise absolute values of the amplitudes."""
    return np.abs(s.amplitudes)


def decode_from_shots(s: QuantumState, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Square roots of measurement frequencies in the computational basis."""
    if shots < 1:
        raise ConfigError("shots must be >= 1")
    probs = np.abs(s.amplitudes) ** 2
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    return np.sqrt(counts / shots)


def apply_rotation(s: QuantumState, qubit: int, axis: str, angle: float) -> QuantumState:
    """exp(-i*angle/2 * sigma_axis) on one qubit."""
    row = kernels.apply_rotation(_row(s), s.n_qubits, qubit, axis, float(angle))
    return _state(s.n_qubits, row)


def apply_cnot(s: QuantumState, control: int, target: int) -> QuantumState:
    row = kernels.apply_cnot(_row(s), s.n_qubits, control, target)
    return _state(s.n_qubits, row)


def apply_x_conditioned(s: QuantumState, qubit: int, classical_bit: int) -> QuantumState:
    """Pauli X iff classical_bit == 1; restores a measured label qubit."""
    if classical_bit not in (0, 1):
        raise ConfigError(f"classical bit must be 0 or 1, got {classical_bit}")
    if classical_bit == 0:
        if not 0 <= qubit < s.n_qubits:
            raise IndexError(f"qubit {qubit} out of range")
        return s
    return _state(s.n_qubits, kernels.apply_x(_row(s), s.n_qubits, qubit))


def _check_qubits(s: QuantumState, qubits) -> tuple[int, ...]:
    qubits = tuple(qubits)
    if not qubits:
        raise IndexError("qubit set must be nonempty")
    if len(set(qubits)) != len(qubits):
        raise IndexError("duplicate qubits")
    for q in qubits:
        if not 0 <= q < s.n_qubits:
            raise IndexError(f"qubit {q} out of range for {s.n_qubits} qubits")
    return qubits


def measure_branches(s: QuantumState, qubits) -> BranchEnsemble:
    """Exact measurement channel without branch selection.

    One branch per outcome with nonvanishing probability; the measured
    qubits are collapsed (not discarded) and the branch renormalized.
    """
    qubits = _check_qubits(s, qubits)
    row = _row(s)
    probs = kernels.outcome_probabilities(row, s.n_qubits, qubits)[0]
    branches = []
    for outcome, p in enumerate(probs):
        if p < BRANCH_CUTOFF:
            continue
        collapsed, _ = kernels.collapse(row, s.n_qubits, qubits, outcome)
        branches.append((float(p), _state(s.n_qubits, collapsed)))
    total = sum(p for p, _ in branches)
    branches = [(p / total, st) for p, st in branches]
    return BranchEnsemble(tuple(branches))


def measure_sample(
    s: QuantumState, qubits, rng: np.random.Generator
) -> tuple[tuple[int, ...], QuantumState]:
    """Sample one outcome with Born probabilities; returns (bits, state)."""
    qubits = _check_qubits(s, qubits)
    row = _row(s)
    probs = kernels.outcome_probabilities(row, s.n_qubits, qubits)[0]
    probs = probs / probs.sum()
    outcome = int(rng.choice(len(probs), p=probs))
    collapsed, _ = kernels.collapse(row, s.n_qubits, qubits, outcome)
    m = len(qubits)
    bits = tuple((outcome >> (m - 1 - i)) & 1 for i in range(m))
    return bits, _state(s.n_qubits, collapsed)


def postselect(s: QuantumState, qubits, outcome) -> QuantumState:
    """Collapse onto a chosen outcome; PostselectError if its mass vanishes."""
    qubits = _check_qubits(s, qubits)
    bits = tuple(outcome)
    if len(bits) != len(qubits):
        raise ShapeError("outcome length must match qubit count")
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    row = _row(s)
    collapsed, probs = kernels.collapse(row, s.n_qubits, qubits, index)
    if probs[0] < BRANCH_CUTOFF:
        raise PostselectError(f"outcome {bits} has probability {probs[0]:.3e}")
    return _state(s.n_qubits, collapsed)


def discard_qubits(s: QuantumState, qubits) -> QuantumState:
    """Remove qubits that are already collapsed to a basis state."""
    qubits = _check_qubits(s, qubits)
    row = _row(s)
    index = 0
    for q in qubits:
        p = kernels.outcome_probabilities(row, s.n_qubits, (q,))[0]
        if min(p[0], p[1]) > NORM_TOL:
            raise StateError(f"qubit {q} is not collapsed to a basis state")
        index = (index << 1) | int(p[1] > p[0])
    block = kernels.extract_block(row, s.n_qubits, qubits, index)
    block = block / np.linalg.norm(block)
    return _state(s.n_qubits - len(qubits), block)


def add_ancilla(s: QuantumState, m: int) -> QuantumState:
    """Tensor m fresh |0> qubits at the least-significant end."""
    if m < 1:
        raise ConfigError("ancilla count must be >= 1")
    return _state(s.n_qubits + m, kernels.tensor_zero_suffix(_row(s), m))


def tensor_label(s: QuantumState, k: int, n_label: int) -> QuantumState:
    """|k> (x) |s> with the label qubits prepended as most-significant."""
    if n_label < 1:
        raise ConfigError("n_label must be >= 1")
    if not 0 <= k < (1 << n_label):
        raise LabelError(f"label {k} out of range for {n_label} label qubits")
    out = np.zeros((1 << n_label) * s.dim, dtype=np.complex128)
    out[k * s.dim : (k + 1) * s.dim] = s.amplitudes
    return QuantumState(s.n_qubits + n_label, out)


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """|<a|b>|^2."""
    if a.n_qubits != b.n_qubits:
        raise ShapeError("qubit counts differ")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def mixed_fidelity(e: BranchEnsemble, b: QuantumState) -> float:
    """sum_k p_k |<psi_k|b>|^2."""
    return float(sum(p * fidelity(st, b) for p, st in e.branches))


def swap_test_estimate(
    a: QuantumState, b: QuantumState, shots: int, rng: np.random.Generator
) -> float:
    """Fidelity estimate from the Hadamard / controlled-SWAP / Hadamard circuit.

    Builds the 2n+1 qubit circuit, samples the ancilla ``shots`` times and
    returns 2*P_hat(0) - 1 clamped to [0, 1].
    """
    if a.n_qubits != b.n_qubits:
        raise ShapeError("qubit counts differ")
    if shots < 1:
        raise ConfigError("shots must be >= 1")
    n = a.n_qubits
    total = 2 * n + 1
    # Ancilla is qubit 0, then the two registers.
    joint = np.kron(a.amplitudes, b.amplitudes)
    amps = np.zeros((1, 1 << total), dtype=np.complex128)
    amps[0, : 1 << (2 * n)] = joint
    amps = kernels.apply_hadamard(amps, total, 0)
    for i in range(n):
        amps = kernels.apply_cswap(amps, total, 0, 1 + i, 1 + n + i)
    amps = kernels.apply_hadamard(amps, total, 0)
    p0 = float(kernels.outcome_probabilities(amps, total, (0,))[0][0])
    hits = rng.binomial(shots, min(max(p0, 0.0), 1.0))
    est = 2.0 * hits / shots - 1.0
    return float(min(max(est, 0.0), 1.0))


def depolarize_trajectory(
    s: QuantumState, qubit: int, p: float, rng: np.random.Generator
) -> QuantumState:
    """With probability p apply a uniformly random Pauli to the qubit."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"probability {p} outside [0, 1]")
    if not 0 <= qubit < s.n_qubits:
        raise IndexError(f"qubit {qubit} out of range")
    if rng.random() >= p:
        return s
    pauli = (kernels.PAULI_X, kernels.PAULI_Y, kernels.PAULI_Z)[rng.integers(3)]
    row = kernels.apply_single_qubit(_row(s), s.n_qubits, qubit, pauli)
    return _state(s.n_qubits, row)


def readout_flip(outcome, p_ro: float, rng: np.random.Generator) -> tuple[int, ...]:
    """Flip each measured bit independently with probability p_ro."""
    if not 0.0 <= p_ro <= 1.0:
        raise ConfigError(f"probability {p_ro} outside [0, 1]")
    bits = tuple(outcome)
    flips = rng.random(len(bits)) < p_ro
    return tuple(int(b) ^ int(f) for b, f in zip(bits, flips))
