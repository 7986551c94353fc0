"""Single-state circuit execution API on top of the batched engine."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine, kernels
from .ansatz import CircuitSpec
from .errors import ConfigError, PostselectError
from .statevec import BRANCH_CUTOFF, BranchEnsemble, QuantumState


@dataclass(frozen=True)
class SampleResult:
    state: QuantumState
    outcomes: tuple[tuple[int, ...], ...]   # bits per measurement event
    probabilities: tuple[float, ...]        # Born probability of each draw
    label_acceptance: float | None = None   # mass kept by label projection


@dataclass(frozen=True)
class PostselectResult:
    state: QuantumState
    probability: float


def _normalize_state(width: int, amps_row: np.ndarray) -> QuantumState:
    amps = amps_row.copy()
    amps /= np.linalg.norm(amps)
    return QuantumState(width, amps)


def execute(
    circuit: CircuitSpec,
    params,
    state: QuantumState,
    mode: str = "ensemble",
    rng: np.random.Generator | None = None,
    outcomes=None,
    label_postselect: int | None = None,
):
    """Run a circuit on one input state.

    mode "ensemble" returns a BranchEnsemble; "sample" draws every
    measurement with Born probabilities and returns a SampleResult;
    "postselect" forces the provided per-measurement ``outcomes`` and
    returns a PostselectResult carrying the total outcome probability.

    ``label_postselect=k`` projects the label qubits onto |k> at the end
    of the run (branch selection on the label register).
    """
    params = np.asarray(params, dtype=np.float64)
    result = engine.run_batched(
        circuit, params, state.amplitudes, mode=mode, rng=rng, outcomes=outcomes
    )
    if mode == "ensemble":
        paths = result
        if label_postselect is not None:
            engine.project_label(paths, circuit.n_label, label_postselect)
        branches = []
        for path in paths:
            p = float(path.weights[0])
            if p < BRANCH_CUTOFF:
                continue
            branches.append((p, _normalize_state(path.width, path.amps[0])))
        total = sum(p for p, _ in branches)
        if total < BRANCH_CUTOFF:
            raise PostselectError("label projection left no probability mass")
        return BranchEnsemble(tuple((p / total, s) for p, s in branches))

    if mode == "sample":
        amps, records = result
        width = circuit.n_exit
        acceptance = None
        if label_postselect is not None:
            qubits = tuple(range(circuit.n_label))
            collapsed, probs = kernels.collapse(amps, width, qubits, label_postselect)
            if probs[0] < BRANCH_CUTOFF:
                raise PostselectError("label outcome has vanishing probability")
            amps = collapsed
            acceptance = float(probs[0])
        return SampleResult(
            state=_normalize_state(width, amps[0]),
            outcomes=tuple(tuple(int(b) for b in rec.outcomes[0]) for rec in records),
            probabilities=tuple(float(rec.probs[0]) for rec in records),
            label_acceptance=acceptance,
        )

    amps, weights = result
    width = circuit.n_exit
    if label_postselect is not None:
        qubits = tuple(range(circuit.n_label))
        amps, probs = kernels.collapse(amps, width, qubits, label_postselect)
        weights = weights * probs
    p = float(weights[0])
    if p < BRANCH_CUTOFF:
        raise PostselectError("requested outcome chain has vanishing probability")
    return PostselectResult(state=_normalize_state(width, amps[0]), probability=p)


def enumerate_outcome_mixture(circuit: CircuitSpec, params, state: QuantumState):
    """Brute-force mixture over all measurement outcome chains.

    Independent oracle for ensemble mode: runs the circuit in postselect
    mode once per outcome combination and weights each final state by
    its chain probability.
    """
    events = circuit.measurement_events()
    sizes = [1 << m for _, m in events]
    branches = []
    chains = [[]]
    for size in sizes:
        chains = [c + [o] for c in chains for o in range(size)]
    for chain in chains:
        try:
            res = execute(circuit, params, state, mode="postselect", outcomes=chain)
        except PostselectError:
            continue
        branches.append((res.probability, res.state))
    total = sum(p for p, _ in branches)
    return BranchEnsemble(tuple((p / total, s) for p, s in branches))


def linearity_residual(
    circuit: CircuitSpec,
    params,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Diagnostic for the nonlinearity induced by mid-circuit measurement.

    Over random unit vectors u, v the induced map M (decoded output of
    the circuit) is probed for additivity: the residual
    ||M(normalize(u+v)) - normalize(M(u)+M(v))|| averages to 0 for a
    purely unitary circuit and is strictly positive once a
    non-branch-selected measurement is in the path.

    Circuits without measurements are decoded as raw output amplitudes;
    circuits with measurements as the square root of the mixture's basis
    probabilities.
    """
    has_measurement = bool(circuit.measurement_events())
    dim = 1 << circuit.n_entry

    def apply_map(vec: np.ndarray) -> np.ndarray:
        paths = engine.run_batched(circuit, params, vec, mode="ensemble")
        if has_measurement:
            return engine.decoded_mixture(paths)[0]
        return paths[0].amps[0]

    def random_unit() -> np.ndarray:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return v / np.linalg.norm(v)

    residuals = []
    for _ in range(trials):
        u, v = random_unit(), random_unit()
        combined = u + v
        combined /= np.linalg.norm(combined)
        m_u, m_v = apply_map(u), apply_map(v)
        linear = m_u + m_v
        linear = linear / np.linalg.norm(linear)
        residuals.append(float(np.linalg.norm(apply_map(combined) - linear)))
    return float(np.mean(residuals))
