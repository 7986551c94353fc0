import json

import numpy as np
import pytest

from qdmlab import cli

TINY_MODEL = [
    "--set",
    "model.layers=[1,2,1]",
    "--set",
    "model.T=2",
    "--set",
    "model.epochs=1",
    "--set",
    "model.batch_size=10",
    "--set",
    "max_train_samples=20",
]


def run(args):
    return cli.main(args)


@pytest.fixture(scope="module")
def trained_run(tmp_path_factory):
    """One tiny autoencoder + diffusion checkpoint shared by CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    ae_dir = root / "ae"
    qdm_dir = root / "qdm"
    assert run(["train-ae", "--run-dir", str(ae_dir), "--set", "autoencoder.epochs=1"]) == 0
    assert (
        run(
            ["train-qdm", "--run-dir", str(qdm_dir)]
            + TINY_MODEL
            + ["--set", f"ae_checkpoint={ae_dir / 'autoencoder.json'}"]
        )
        == 0
    )
    return root


def test_train_artifacts(trained_run):
    assert (trained_run / "ae" / "autoencoder.json").exists()
    assert (trained_run / "ae" / "ae_loss.csv").exists()
    assert (trained_run / "ae" / "config.json").exists()
    assert (trained_run / "qdm" / "checkpoint.json").exists()
    assert (trained_run / "qdm" / "loss_history.csv").exists()
    cfg = json.loads((trained_run / "qdm" / "config.json").read_text())
    assert cfg["model"]["layers"] == [1, 2, 1]


def test_sample_command(trained_run, tmp_path):
    out = tmp_path / "smp"
    code = run(
        ["sample", "--run-dir", str(out)]
        + TINY_MODEL
        + [
            "--set",
            f"checkpoint={trained_run / 'qdm' / 'checkpoint.json'}",
            "--set",
            f"ae_checkpoint={trained_run / 'ae' / 'autoencoder.json'}",
            "--set",
            "sample.count=3",
        ]
    )
    assert code == 0
    pgms = sorted((out / "samples").glob("*.pgm"))
    assert len(pgms) == 3
    assert pgms[0].read_bytes().startswith(b"P5\n28 28\n255\n")
    assert (out / "samples" / "vectors.csv").exists()


def test_evaluate_command(trained_run, tmp_path):
    out = tmp_path / "ev"
    code = run(
        ["evaluate", "--run-dir", str(out)]
        + TINY_MODEL
        + [
            "--set",
            f"checkpoint={trained_run / 'qdm' / 'checkpoint.json'}",
            "--set",
            f"ae_checkpoint={trained_run / 'ae' / 'autoencoder.json'}",
            "--set",
            "evaluate.n_generated=8",
            "--set",
            "evaluate.n_real=40",
            "--set",
            "evaluate.gmm_components=1",
        ]
    )
    assert code == 0
    text = (out / "metrics" / "metrics.csv").read_text()
    assert "raw_feature_frechet" in text


def test_plot_pca_command(trained_run, tmp_path):
    out = tmp_path / "pca"
    code = run(
        ["plot-pca", "--run-dir", str(out)]
        + TINY_MODEL
        + [
            "--set",
            f"checkpoint={trained_run / 'qdm' / 'checkpoint.json'}",
            "--set",
            f"ae_checkpoint={trained_run / 'ae' / 'autoencoder.json'}",
            "--set",
            "evaluate.n_generated=5",
            "--set",
            "evaluate.n_real=30",
        ]
    )
    assert code == 0
    svg = (out / "plots" / "pca.svg").read_text()
    assert svg.startswith("<svg") and "<circle" in svg


def test_export_qasm_command(tmp_path):
    out = tmp_path / "qasm"
    assert run(["export-qasm", "--run-dir", str(out), "--set", "preset=hardware"]) == 0
    text = (out / "qasm" / "hardware_circuit.qasm").read_text()
    assert text.count("cx ") == 37


def test_noise_study_command(tmp_path):
    out = tmp_path / "ns"
    code = run(
        [
            "noise-study",
            "--run-dir",
            str(out),
            "--set",
            "preset=hardware",
            "--set",
            "noise_study.shots=2000",
            "--set",
            "noise_study.depolarize_p=[0.01]",
        ]
    )
    assert code == 0
    lines = (out / "metrics" / "noise_study.csv").read_text().splitlines()
    assert lines[0].startswith("basis_state,statevector,shots_2000,depolarizing_p")
    assert len(lines) == 9
    exact = np.array([float(l.split(",")[1]) for l in lines[1:]])
    assert abs((exact**2).sum() - 1.0) < 1e-6


def test_missing_checkpoint_exit_code(tmp_path):
    code = run(
        ["sample", "--run-dir", str(tmp_path / "x"), "--set", "checkpoint=/no/such/file.json"]
    )
    assert code == 2


def test_missing_config_file_exit_code(tmp_path):
    code = run(["train-ae", "--config", "/no/such/config.json", "--run-dir", str(tmp_path / "y")])
    assert code == 2


def test_invalid_config_exit_code(tmp_path):
    code = run(["train-ae", "--run-dir", str(tmp_path / "z"), "--set", "preset=imaginary"])
    assert code == 3
    code = run(["train-ae", "--run-dir", str(tmp_path / "w"), "--set", "schema_version=99"])
    assert code == 3


def test_unknown_flag_is_hard_error():
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["train-ae", "--bogus"])


def test_reruns_are_byte_identical(trained_run, tmp_path):
    args = TINY_MODEL + [
        "--set",
        f"checkpoint={trained_run / 'qdm' / 'checkpoint.json'}",
        "--set",
        f"ae_checkpoint={trained_run / 'ae' / 'autoencoder.json'}",
        "--set",
        "sample.count=2",
    ]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["sample", "--run-dir", str(a)] + args) == 0
    assert run(["sample", "--run-dir", str(b)] + args) == 0
    for rel in ("samples/vectors.csv", "samples/sample_000.pgm", "config.json"):
        assert (a / rel).read_bytes() == (b / rel).read_bytes()
