"""OpenQASM 2.0 export.

Logical qubits are mapped onto a fixed physical register sized to the
widest point of the circuit. Discarded wires are freed and reused (with
a ``reset``) by later ancilla additions, matching how a mid-circuit
measured qubit is recycled on hardware. Output is deterministic: angles
are printed with 12 significant digits and register names are fixed.
"""

from __future__ import annotations

import numpy as np

from .ansatz import CircuitSpec
from .errors import ExportError


def _fmt(angle: float) -> str:
    return format(float(angle), ".12g")


def export_qasm(circuit: CircuitSpec, params) -> str:
    params = np.asarray(params, dtype=np.float64)
    if params.ndim != 1 or params.size != circuit.param_count:
        raise ExportError(
            f"expected {circuit.param_count} bound parameters, got shape {params.shape}"
        )
    if not np.all(np.isfinite(params)):
        raise ExportError("parameters must be finite")

    width = max((circuit.qubit_trajectory or (circuit.n_entry,)) + (circuit.n_entry,))
    wires = list(range(circuit.n_entry))  # logical index -> physical wire
    free: list[int] = list(range(circuit.n_entry, width))
    used = set(wires)
    next_fresh = width
    body: list[str] = []
    cregs: list[str] = []
    n_meas = 0

    def new_creg(bits: int) -> str:
        nonlocal n_meas
        name = f"m{n_meas}"
        n_meas += 1
        cregs.append(f"creg {name}[{bits}];")
        return name

    for op in circuit.ops:
        if op.kind == "rotation":
            body.append(f"r{op.axis}({_fmt(params[op.param_index])}) q[{wires[op.qubit]}];")
        elif op.kind == "cnot":
            body.append(f"cx q[{wires[op.control]}],q[{wires[op.target]}];")
        elif op.kind == "cond_x":
            if op.bit == 1:
                body.append(f"x q[{wires[op.qubit]}];")
        elif op.kind == "add_ancilla":
            for _ in range(op.m):
                if free:
                    wire = free.pop(0)
                else:
                    wire = next_fresh
                    next_fresh += 1
                if wire in used:
                    body.append(f"reset q[{wire}];")
                used.add(wire)
                wires.append(wire)
        elif op.kind == "measure":
            name = new_creg(len(op.qubits))
            for i, q in enumerate(op.qubits):
                body.append(f"measure q[{wires[q]}] -> {name}[{i}];")
        elif op.kind == "discard":
            for q in sorted(op.qubits, reverse=True):
                free.append(wires.pop(q))
            free.sort()
        elif op.kind == "label_restore":
            name = new_creg(1)
            wire = wires[op.qubit]
            body.append(f"measure q[{wire}] -> {name}[0];")
            # Flip back iff the measured bit differs from the target bit.
            body.append(f"if({name}=={1 - op.bit}) x q[{wire}];")
        else:
            raise ExportError(f"cannot export op kind {op.kind!r}")

    final = new_creg(len(wires)) if wires else None
    if final is not None:
        for i, wire in enumerate(wires):
            body.append(f"measure q[{wire}] -> {final}[{i}];")

    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{max(width, next_fresh)}];"]
    lines.extend(cregs)
    lines.extend(body)
    return "\n".join(lines) + "\n"


def gate_histogram(qasm_text: str) -> dict[str, int]:
    """Count exported statements per gate kind; used for round-trip checks."""
    hist: dict[str, int] = {}
    for line in qasm_text.splitlines():
        line = line.strip()
        if not line or line.startswith(("OPENQASM", "include", "qreg", "creg")):
            continue
        if line.startswith("if("):
            key = "if_x"
        else:
            key = line.split("(")[0].split()[0]
        hist[key] = hist.get(key, 0) + 1
    return hist
