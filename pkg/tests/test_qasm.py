import numpy as np
import pytest

from qdmlab.ansatz import AnsatzConfig, build_circuit, build_hardware_adapted
from qdmlab.errors import ExportError
from qdmlab.qasm import export_qasm, gate_histogram


def test_hardware_export_gate_accounting(rng):
    circuit = build_hardware_adapted(label=1)
    params = rng.uniform(-np.pi, np.pi, circuit.param_count)
    text = export_qasm(circuit, params)
    hist = gate_histogram(text)
    assert hist["cx"] == 37
    # 3 conditional restores, plus the label-preparation X.
    assert hist["if_x"] == 3
    assert hist["x"] == 1
    # 3 ancilla + 3 restore measurements mid-circuit, 3 final wires.
    assert hist["measure"] == 6 + 3
    assert hist["ry"] + hist["rx"] + hist["rz"] == circuit.param_count
    assert "qreg q[4];" in text
    # The ancilla wire is recycled, so it is reset before reps 2 and 3.
    assert hist["reset"] == 2


def test_export_golden_text(rng):
    cfg = AnsatzConfig(n_data=2, m=1, layers=(1, 1, 1))
    circuit = build_circuit(cfg)
    params = np.linspace(0.1, 0.2, circuit.param_count)
    text = export_qasm(circuit, params)
    lines = text.splitlines()
    assert lines[0] == "OPENQASM 2.0;"
    assert lines[1] == 'include "qelib1.inc";'
    assert lines[2] == "qreg q[3];"
    assert "rx(0.1) q[0];" in text
    assert text.endswith("\n")
    # Deterministic output.
    assert export_qasm(circuit, params) == text


def test_export_rejects_bad_params(rng):
    circuit = build_circuit(AnsatzConfig(n_data=2, m=1, layers=(1, 1, 1)))
    with pytest.raises(ExportError):
        export_qasm(circuit, np.zeros(circuit.param_count - 1))
    bad = np.zeros(circuit.param_count)
    bad[0] = np.nan
    with pytest.raises(ExportError):
        export_qasm(circuit, bad)


def test_angle_precision(rng):
    circuit = build_circuit(AnsatzConfig(n_data=2, m=1, layers=(1, 1, 1)))
    params = np.full(circuit.param_count, np.pi)
    text = export_qasm(circuit, params)
    assert "3.14159265359" in text


def test_wire_reuse_stays_within_widest_register(rng):
    # Reverse bottleneck on 3 qubits peaks at 4 wires; the exported
    # register must not grow beyond that even with a discard/add cycle.
    circuit = build_circuit(AnsatzConfig(n_data=3, m=1, layers=(1, 1, 1)))
    params = rng.uniform(-np.pi, np.pi, circuit.param_count)
    text = export_qasm(circuit, params)
    assert "qreg q[4];" in text
    assert "q[4]" not in text.replace("qreg q[4]", "")
