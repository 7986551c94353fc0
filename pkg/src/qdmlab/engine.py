"""Batched circuit execution engine.

Executes a CircuitSpec on K (parameter vector, input state) rows at
once. The batch dimension is what makes parameter-shift gradients cheap:
all 2P shifted parameter settings run through the gate sequence in one
pass.

Three measurement modes:

* ensemble    -- exact channel: every measurement splits each path into
                 one path per outcome, weighted by the Born probability.
                 Deterministic; zero-weight paths are kept so that every
                 row sees an identical computation graph.
* sample      -- one stochastic trajectory per row (Born-rule draws).
* postselect  -- outcomes are dictated per measurement event; path
                 weights accumulate the outcome probabilities.

Paths carry the collapsed bit values of measured-but-not-yet-discarded
qubits so a later discard op knows which block to slice out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ansatz import CircuitSpec
from .errors import ConfigError, PostselectError, ShapeError


@dataclass
class Path:
    weights: np.ndarray           # (K,)
    amps: np.ndarray              # (K, 2**width)
    width: int
    collapsed: dict = field(default_factory=dict)  # qubit -> int or (K,) array
    history: tuple = ()           # outcome indices, ensemble/postselect modes


@dataclass
class SampleRecord:
    qubits: tuple[int, ...]
    outcomes: np.ndarray          # (K, m) bits
    probs: np.ndarray             # (K,) probability of the drawn outcome


def _as_batch(params, inputs):
    params = np.asarray(params, dtype=np.float64)
    inputs = np.asarray(inputs, dtype=np.complex128)
    single = params.ndim == 1 and inputs.ndim == 1
    if params.ndim == 1:
        params = params[None, :]
    if inputs.ndim == 1:
        inputs = inputs[None, :]
    if params.shape[0] == 1 and inputs.shape[0] > 1:
        params = np.broadcast_to(params, (inputs.shape[0], params.shape[1]))
    if inputs.shape[0] == 1 and params.shape[0] > 1:
        inputs = np.broadcast_to(inputs, (params.shape[0], inputs.shape[1]))
    if params.shape[0] != inputs.shape[0]:
        raise ShapeError("batch sizes of params and inputs differ")
    return params, np.array(inputs), single


def _shift_indices(collapsed: dict, removed: tuple[int, ...]) -> dict:
    out = {}
    for q, bit in collapsed.items():
        if q in removed:
            continue
        out[q - sum(1 for r in removed if r < q)] = bit
    return out


def run_batched(
    circuit: CircuitSpec,
    params,
    inputs,
    mode: str = "ensemble",
    rng: np.random.Generator | None = None,
    outcomes: list[int] | None = None,
    depolarize_p: float = 0.0,
):
    """Execute the circuit; see module docstring for the mode semantics.

    Returns a list of Path (ensemble mode), (amps, records) in sample
    mode, or (amps, weights) in postselect mode.

    ``depolarize_p`` (sample mode only) applies an independent
    depolarizing event to both qubits of every CNOT: with probability p
    per qubit a uniformly random Pauli follows the gate.
    """
    if mode not in ("ensemble", "sample", "postselect"):
        raise ConfigError(f"unknown execution mode {mode!r}")
    if mode == "sample" and rng is None:
        raise ConfigError("sample mode needs an rng")
    if depolarize_p and mode != "sample":
        raise ConfigError("depolarizing noise requires sample mode")
    if not 0.0 <= depolarize_p <= 1.0:
        raise ConfigError("depolarize_p must lie in [0, 1]")
    params, inputs, _ = _as_batch(params, inputs)
    if params.shape[1] != circuit.param_count:
        raise ShapeError(
            f"expected {circuit.param_count} parameters, got {params.shape[1]}"
        )
    if inputs.shape[1] != 1 << circuit.n_entry:
        raise ShapeError(
            f"expected input dimension {1 << circuit.n_entry}, got {inputs.shape[1]}"
        )
    k = params.shape[0]
    paths = [Path(weights=np.ones(k), amps=inputs, width=circuit.n_entry)]
    records: list[SampleRecord] = []
    event = 0

    for op in circuit.ops:
        if op.kind == "rotation":
            angles = params[:, op.param_index]
            for path in paths:
                path.amps = kernels.apply_rotation(
                    path.amps, path.width, op.qubit, op.axis, angles
                )
        elif op.kind == "cnot":
            for path in paths:
                path.amps = kernels.apply_cnot(path.amps, path.width, op.control, op.target)
                if depolarize_p:
                    for q in (op.control, op.target):
                        path.amps = _depolarize_rows(path.amps, path.width, q, depolarize_p, rng)
        elif op.kind == "cond_x":
            if op.bit == 1:
                for path in paths:
                    path.amps = kernels.apply_x(path.amps, path.width, op.qubit)
        elif op.kind == "add_ancilla":
            for path in paths:
                path.amps = kernels.tensor_zero_suffix(path.amps, op.m)
                path.width += op.m
        elif op.kind == "measure":
            if mode == "ensemble":
                paths = _measure_ensemble(paths, op.qubits)
            elif mode == "sample":
                records.append(_measure_sample(paths[0], op.qubits, rng))
            else:
                _measure_postselect(paths, op.qubits, _next_outcome(outcomes, event))
            event += 1
        elif op.kind == "discard":
            for path in paths:
                _discard(path, op.qubits)
        elif op.kind == "label_restore":
            if mode == "ensemble":
                paths = _measure_ensemble(paths, (op.qubit,))
                for path in paths:
                    _restore(path, op.qubit, op.bit)
            elif mode == "sample":
                rec = _measure_sample(paths[0], (op.qubit,), rng)
                records.append(rec)
                _restore_per_row(paths[0], op.qubit, rec.outcomes[:, 0], op.bit)
            else:
                _measure_postselect(paths, (op.qubit,), _next_outcome(outcomes, event))
                for path in paths:
                    _restore(path, op.qubit, op.bit)
            event += 1
        else:
            raise ConfigError(f"unknown op kind {op.kind!r}")

    if mode == "ensemble":
        return paths
    if mode == "sample":
        return paths[0].amps, records
    return paths[0].amps, paths[0].weights


_PAULIS = (kernels.PAULI_X, kernels.PAULI_Y, kernels.PAULI_Z)


def _depolarize_rows(amps, width, qubit, p, rng):
    """Apply a uniformly random Pauli to randomly chosen rows (prob p each)."""
    k = amps.shape[0]
    hit = rng.random(k) < p
    if not hit.any():
        return amps
    which = rng.integers(3, size=k)
    out = amps.copy()
    for j, pauli in enumerate(_PAULIS):
        rows = hit & (which == j)
        if rows.any():
            out[rows] = kernels.apply_single_qubit(amps[rows], width, qubit, pauli)
    return out


def _next_outcome(outcomes, event) -> int:
    if outcomes is None or event >= len(outcomes):
        raise ConfigError("postselect mode needs one outcome per measurement event")
    return int(outcomes[event])


def _measure_ensemble(paths, qubits):
    new_paths = []
    for path in paths:
        for outcome in range(1 << len(qubits)):
            amps, probs = kernels.collapse(path.amps, path.width, qubits, outcome)
            collapsed = dict(path.collapsed)
            for i, q in enumerate(qubits):
                collapsed[q] = (outcome >> (len(qubits) - 1 - i)) & 1
            new_paths.append(
                Path(
                    weights=path.weights * probs,
                    amps=amps,
                    width=path.width,
                    collapsed=collapsed,
                    history=path.history + (outcome,),
                )
            )
    return new_paths


def _measure_sample(path, qubits, rng):
    k = path.amps.shape[0]
    probs = kernels.outcome_probabilities(path.amps, path.width, qubits)
    probs = probs / probs.sum(axis=1, keepdims=True)
    u = rng.random(k)
    drawn = (np.cumsum(probs, axis=1) < u[:, None]).sum(axis=1)
    drawn = np.minimum(drawn, probs.shape[1] - 1)
    new_amps = np.zeros_like(path.amps)
    for outcome in range(probs.shape[1]):
        rows = drawn == outcome
        if not rows.any():
            continue
        collapsed, _ = kernels.collapse(path.amps[rows], path.width, qubits, outcome)
        new_amps[rows] = collapsed
    path.amps = new_amps
    m = len(qubits)
    bits = np.stack([(drawn >> (m - 1 - i)) & 1 for i in range(m)], axis=1)
    for i, q in enumerate(qubits):
        path.collapsed[q] = bits[:, i]
    return SampleRecord(
        qubits=qubits,
        outcomes=bits,
        probs=probs[np.arange(k), drawn],
    )


def _measure_postselect(paths, qubits, outcome):
    for path in paths:
        amps, probs = kernels.collapse(path.amps, path.width, qubits, outcome)
        path.amps = amps
        path.weights = path.weights * probs
        for i, q in enumerate(qubits):
            path.collapsed[q] = (outcome >> (len(qubits) - 1 - i)) & 1
        path.history = path.history + (outcome,)


def _discard(path, qubits):
    for q in qubits:
        if q not in path.collapsed:
            raise ConfigError(f"discard of unmeasured qubit {q}")
    bits = [path.collapsed[q] for q in qubits]
    if any(isinstance(b, np.ndarray) for b in bits):
        k = path.amps.shape[0]
        index = np.zeros(k, dtype=np.int64)
        for b in bits:
            index = (index << 1) | np.broadcast_to(b, (k,))
        path.amps = kernels.extract_block_per_row(path.amps, path.width, tuple(qubits), index)
    else:
        index = 0
        for b in bits:
            index = (index << 1) | int(b)
        path.amps = kernels.extract_block(path.amps, path.width, tuple(qubits), index)
    path.width -= len(qubits)
    path.collapsed = _shift_indices(path.collapsed, tuple(qubits))


def _restore(path, qubit, bit):
    """After measuring ``qubit``, flip it back to |bit> if it landed wrong."""
    measured = path.collapsed.pop(qubit)
    if measured != bit:
        path.amps = kernels.apply_x(path.amps, path.width, qubit)


def _restore_per_row(path, qubit, measured_bits, bit):
    path.collapsed.pop(qubit, None)
    mask = measured_bits != bit
    if mask.any():
        flipped = kernels.apply_x(path.amps, path.width, qubit)
        path.amps = np.where(mask[:, None], flipped, path.amps)


def project_label(paths, n_label: int, k_label: int, renormalize_rows: bool = True):
    """Project every path onto label block |k>; weights pick up the mass."""
    qubits = tuple(range(n_label))
    for path in paths:
        amps, probs = kernels.collapse(
            path.amps, path.width, qubits, k_label, renormalize=renormalize_rows
        )
        path.amps = amps
        path.weights = path.weights * probs


def ensemble_fidelity(paths, targets) -> np.ndarray:
    """Row-wise mixed fidelity sum_paths w * |<target|amps>|^2.

    ``targets`` is (dim,) or (K, dim); rows of amps are unit norm (or
    zero for vanishing branches), so weights carry all probability mass.
    """
    targets = np.asarray(targets, dtype=np.complex128)
    k = paths[0].amps.shape[0]
    out = np.zeros(k)
    for path in paths:
        inner = kernels.inner_products(path.amps, targets)
        out += path.weights * (inner.real**2 + inner.imag**2)
    return out


def decoded_mixture(paths) -> np.ndarray:
    """Row-wise sqrt of the ensemble-averaged basis probabilities."""
    k, dim = paths[0].amps.shape[0], paths[0].amps.shape[1]
    probs = np.zeros((k, dim))
    for path in paths:
        probs += path.weights[:, None] * (np.abs(path.amps) ** 2)
    return np.sqrt(probs)
