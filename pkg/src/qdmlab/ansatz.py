"""Circuit architectures: strongly entangling layers, bottleneck and
reverse-bottleneck three-block circuits, and the hardware-adapted variant.

A circuit is an ordered gate program over a register whose width changes
through ancilla addition and measure/discard transitions. Label qubits,
when present, occupy the most-significant block (indices 0..n_label-1)
and are never touched by the ansatz blocks' measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EncodingError, ShapeError

ROTATION_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class GateOp:
    """One gate or register transition.

    kind is one of: rotation, cnot, add_ancilla, measure, discard,
    cond_x, label_restore. Only the fields relevant to the kind are set.
    """

    kind: str
    qubit: int | None = None
    axis: str | None = None
    param_index: int | None = None
    control: int | None = None
    target: int | None = None
    qubits: tuple[int, ...] | None = None
    m: int | None = None
    mode_hint: str | None = None
    bit: int | None = None


@dataclass(frozen=True)
class AnsatzConfig:
    """Three-block circuit configuration.

    layers = (l1, l2, l3) are the entangling-layer counts of the three
    unitary blocks; m is the number of mid-circuit measured qubits.
    """

    n_data: int
    n_label: int = 0
    m: int = 1
    layers: tuple[int, int, int] = (1, 1, 1)
    variant: str = "reverse_bottleneck"
    connectivity: str = "ring"
    cnot_schedule: str = "sequential"

    def __post_init__(self):
        n = self.n_data + self.n_label
        if self.n_data < 1 or self.n_label < 0:
            raise ConfigError("qubit counts must be nonnegative (n_data >= 1)")
        if not 1 <= self.m < n:
            raise ConfigError(f"m={self.m} must satisfy 1 <= m < {n}")
        if len(self.layers) != 3 or any(l < 1 for l in self.layers):
            raise ConfigError("all three layer counts must be >= 1")
        if self.variant not in ("bottleneck", "reverse_bottleneck"):
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.connectivity not in ("ring", "line"):
            raise ConfigError(f"unknown connectivity {self.connectivity!r}")
        if self.cnot_schedule not in ("sequential", "even_odd"):
            raise ConfigError(f"unknown cnot schedule {self.cnot_schedule!r}")
        narrow = n - self.m if self.variant == "bottleneck" else n
        if narrow < 2:
            raise ConfigError("every unitary block needs at least 2 qubits")

    @property
    def n_total(self) -> int:
        return self.n_data + self.n_label


@dataclass(frozen=True)
class CircuitSpec:
    """Ordered gate program plus register-width bookkeeping."""

    ops: tuple[GateOp, ...]
    n_entry: int
    n_label: int
    param_count: int
    qubit_trajectory: tuple[int, ...]  # register width after each op
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        width = self.n_entry
        for op, recorded in zip(self.ops, self.qubit_trajectory):
            if op.kind == "add_ancilla":
                width += op.m
            elif op.kind == "discard":
                width -= len(op.qubits)
            if width != recorded:
                raise ConfigError("qubit trajectory inconsistent with ops")
        seen = sorted(
            op.param_index for op in self.ops if op.kind == "rotation"
        )
        if seen != list(range(self.param_count)):
            raise ConfigError("rotation param indices must be dense 0..P-1")

    @property
    def n_exit(self) -> int:
        return self.qubit_trajectory[-1] if self.ops else self.n_entry

    def cnot_count(self) -> int:
        return sum(1 for op in self.ops if op.kind == "cnot")

    def measurement_events(self) -> list[tuple[int, int]]:
        """(op index, number of measured bits) for every stochastic op."""
        events = []
        for i, op in enumerate(self.ops):
            if op.kind == "measure":
                events.append((i, len(op.qubits)))
            elif op.kind == "label_restore":
                events.append((i, 1))
        return events


def _layer_cnots(n: int, connectivity: str, cnot_schedule: str) -> list[tuple[int, int]]:
    if connectivity == "ring":
        pairs = [(i, (i + 1) % n) for i in range(n)]
    else:
        pairs = [(i, i + 1) for i in range(n - 1)]
    if cnot_schedule == "even_odd":
        pairs = [p for p in pairs if p[0] % 2 == 0] + [p for p in pairs if p[0] % 2 == 1]
    return pairs


def build_entangling_layer(
    n: int,
    connectivity: str = "ring",
    cnot_schedule: str = "sequential",
    param_offset: int = 0,
) -> list[GateOp]:
    """One strongly entangling layer: Rx, Ry, Rz per qubit, then CNOTs."""
    if n < 2:
        raise ConfigError("an entangling layer needs at least 2 qubits")
    ops = []
    p = param_offset
    for q in range(n):
        for axis in ROTATION_AXES:
            ops.append(GateOp("rotation", qubit=q, axis=axis, param_index=p))
            p += 1
    for c, t in _layer_cnots(n, connectivity, cnot_schedule):
        ops.append(GateOp("cnot", control=c, target=t))
    return ops


def _block(n, layers, connectivity, schedule, param_offset):
    ops = []
    p = param_offset
    for _ in range(layers):
        ops.extend(build_entangling_layer(n, connectivity, schedule, p))
        p += 3 * n
    return ops, p


def param_count(cfg: AnsatzConfig) -> int:
    """Trainable angle count: 3 * block width * block layers, summed."""
    n = cfg.n_total
    w2 = n - cfg.m if cfg.variant == "bottleneck" else n + cfg.m
    l1, l2, l3 = cfg.layers
    return 3 * (n * l1 + w2 * l2 + n * l3)


def build_circuit(cfg: AnsatzConfig) -> CircuitSpec:
    """Three-block bottleneck or reverse-bottleneck circuit.

    Bottleneck: U1 on n, measure+discard the first m data qubits, U2 on
    n-m, add m ancillas, U3 on n. Reverse-bottleneck: U1 on n, add m
    ancillas, U2 on n+m, measure+discard the ancillas, U3 on n. Fresh
    ancillas are appended at the least-significant end.
    """
    n = cfg.n_total
    l1, l2, l3 = cfg.layers
    ops: list[GateOp] = []
    p = 0
    block1, p = _block(n, l1, cfg.connectivity, cfg.cnot_schedule, p)
    ops.extend(block1)
    if cfg.variant == "bottleneck":
        measured = tuple(range(cfg.n_label, cfg.n_label + cfg.m))
        ops.append(GateOp("measure", qubits=measured, mode_hint="ancilla"))
        ops.append(GateOp("discard", qubits=measured))
        block2, p = _block(n - cfg.m, l2, cfg.connectivity, cfg.cnot_schedule, p)
        ops.extend(block2)
        ops.append(GateOp("add_ancilla", m=cfg.m))
    else:
        ops.append(GateOp("add_ancilla", m=cfg.m))
        block2, p = _block(n + cfg.m, l2, cfg.connectivity, cfg.cnot_schedule, p)
        ops.extend(block2)
        ancillas = tuple(range(n, n + cfg.m))
        ops.append(GateOp("measure", qubits=ancillas, mode_hint="ancilla"))
        ops.append(GateOp("discard", qubits=ancillas))
    block3, p = _block(n, l3, cfg.connectivity, cfg.cnot_schedule, p)
    ops.extend(block3)
    traj = _trajectory(cfg.n_total, ops)
    spec = CircuitSpec(
        ops=tuple(ops),
        n_entry=n,
        n_label=cfg.n_label,
        param_count=p,
        qubit_trajectory=traj,
        metadata={"variant": cfg.variant, "config": cfg},
    )
    assert spec.param_count == param_count(cfg)
    return spec


def _trajectory(n_entry: int, ops) -> tuple[int, ...]:
    traj = []
    width = n_entry
    for op in ops:
        if op.kind == "add_ancilla":
            width += op.m
        elif op.kind == "discard":
            width -= len(op.qubits)
        traj.append(width)
    return tuple(traj)


# Hardware-adapted circuit: 1 label qubit (index 0), 2 data qubits
# (1, 2), 1 ancilla (3), line connectivity, even/odd CNOT schedule. The
# (2, 2, 1) layer split gives 12 CNOTs per denoising block, so three
# repetitions plus the single encoding CNOT total 37.
HW_N_DATA = 2
HW_N_LABEL = 1
HW_REPETITIONS = 3
HW_LAYERS = (2, 2, 1)


def hardware_ansatz_config() -> AnsatzConfig:
    return AnsatzConfig(
        n_data=HW_N_DATA,
        n_label=HW_N_LABEL,
        m=1,
        layers=HW_LAYERS,
        variant="reverse_bottleneck",
        connectivity="line",
        cnot_schedule="even_odd",
    )


def build_hardware_adapted(label: int = 0) -> CircuitSpec:
    """Full sampling circuit for the 4-qubit linear-connectivity device.

    Starts from |000>: a conditional X prepares the label qubit, a
    3-rotation + 1-CNOT block amplitude-encodes the initial noise on the
    data qubits, then the denoising block runs three times with the
    label qubit measured and restored by a conditional X after each
    repetition.
    """
    if label not in (0, 1):
        raise ConfigError("hardware circuit has a single label qubit")
    n = HW_N_DATA + HW_N_LABEL
    ops: list[GateOp] = [GateOp("cond_x", qubit=0, bit=label)]
    # Real two-qubit state preparation (Schmidt form): Ry on the control,
    # CNOT, then Ry on both qubits.
    p = 0
    ops.append(GateOp("rotation", qubit=1, axis="y", param_index=p)); p += 1
    ops.append(GateOp("cnot", control=1, target=2))
    ops.append(GateOp("rotation", qubit=1, axis="y", param_index=p)); p += 1
    ops.append(GateOp("rotation", qubit=2, axis="y", param_index=p)); p += 1
    l1, l2, l3 = HW_LAYERS
    for _ in range(HW_REPETITIONS):
        block1, p = _block(n, l1, "line", "even_odd", p)
        ops.extend(block1)
        ops.append(GateOp("add_ancilla", m=1))
        block2, p = _block(n + 1, l2, "line", "even_odd", p)
        ops.extend(block2)
        ops.append(GateOp("measure", qubits=(n,), mode_hint="ancilla"))
        ops.append(GateOp("discard", qubits=(n,)))
        block3, p = _block(n, l3, "line", "even_odd", p)
        ops.extend(block3)
        ops.append(GateOp("label_restore", qubit=0, bit=label))
    return CircuitSpec(
        ops=tuple(ops),
        n_entry=n,
        n_label=HW_N_LABEL,
        param_count=p,
        qubit_trajectory=_trajectory(n, ops),
        metadata={
            "variant": "hardware",
            "repetitions": HW_REPETITIONS,
            "label": label,
            "prep_params": 3,
        },
    )


def real_two_qubit_prep_angles(vector) -> np.ndarray:
    """Angles (theta1, theta2, theta3) for the 3-Ry + 1-CNOT prep block.

    Solves the Schmidt form of a real unit 4-vector v reshaped to a 2x2
    matrix M: M = A diag(cos t1/2, sin t1/2) B^T with A, B planar
    rotations, which is exactly what Ry(t1) on the first data qubit, a
    CNOT, and Ry(t2)/Ry(t3) on the two qubits produce.
    """
    v = np.asarray(vector, dtype=np.float64)
    if v.shape != (4,):
        raise ShapeError(f"expected a real 4-vector, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise EncodingError("prep vector must be unit norm")
    m = v.reshape(2, 2)
    u, s, vt = np.linalg.svd(m)
    b = vt.T
    s0, s1 = s[0], s[1]
    # Fold reflections into the sign of the second singular value so
    # both factors are proper rotations.
    if np.linalg.det(u) < 0:
        u = u @ np.diag([1.0, -1.0])
        s1 = -s1
    if np.linalg.det(b) < 0:
        b = b @ np.diag([1.0, -1.0])
        s1 = -s1
    theta1 = 2.0 * np.arctan2(s1, s0)
    theta2 = 2.0 * np.arctan2(u[1, 0], u[0, 0])
    theta3 = 2.0 * np.arctan2(b[1, 0], b[0, 0])
    return np.array([theta1, theta2, theta3])


def cnot_moments(ops) -> list[list[tuple[int, int]]]:
    """Greedy moment packing of a CNOT sequence, preserving order."""
    moments: list[list[tuple[int, int]]] = []
    busy: list[set[int]] = []
    for op in ops:
        if op.kind != "cnot":
            continue
        qs = {op.control, op.target}
        # Earliest moment after the last one touching these qubits.
        idx = len(moments)
        while idx > 0 and not (qs & busy[idx - 1]):
            idx -= 1
        if idx == len(moments):
            moments.append([])
            busy.append(set())
        moments[idx].append((op.control, op.target))
        busy[idx] |= qs
    return moments
