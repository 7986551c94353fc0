import numpy as np
import pytest

from qdmlab import diffusion as df
from qdmlab import latent, serialization
from qdmlab.ansatz import AnsatzConfig
from qdmlab.errors import FormatError


def make_checkpoint(rng):
    cfg = df.TrainingConfig(
        ansatz=AnsatzConfig(n_data=2, m=1, layers=(1, 1, 1)),
        T=2,
        epochs=1,
        batch_size=5,
        seed=3,
    )
    data = np.abs(rng.standard_normal((10, 4))) + 0.1
    data /= np.linalg.norm(data, axis=1, keepdims=True)
    return df.train(data, cfg)


def test_checkpoint_roundtrip(tmp_path, rng):
    ckpt = make_checkpoint(rng)
    path = tmp_path / "ckpt.json"
    serialization.save_checkpoint(ckpt, path)
    loaded = serialization.load_checkpoint(path)
    assert loaded.config == ckpt.config
    assert loaded.loss_history == ckpt.loss_history
    for a, b in zip(loaded.parameters, ckpt.parameters):
        np.testing.assert_array_equal(a, b)


def test_checkpoint_bytes_deterministic(tmp_path, rng):
    ckpt = make_checkpoint(rng)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    serialization.save_checkpoint(ckpt, p1)
    serialization.save_checkpoint(ckpt, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_checkpoint_rejects_wrong_kind(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"kind": "something_else", "format_version": 1}')
    with pytest.raises(FormatError):
        serialization.load_checkpoint(path)


def test_autoencoder_roundtrip(tmp_path, rng):
    params = latent.init_autoencoder(6, 5, 4, rng)
    path = tmp_path / "ae.json"
    serialization.save_autoencoder(params, path, loss_history=[0.5, 0.25])
    loaded = serialization.load_autoencoder(path)
    for a, b in zip(loaded.arrays(), params.arrays()):
        np.testing.assert_array_equal(a, b)
    with pytest.raises(FormatError):
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": "qdm_checkpoint", "format_version": 1}')
        serialization.load_autoencoder(bad)


def test_training_config_roundtrip():
    cfg = df.TrainingConfig(
        ansatz=AnsatzConfig(n_data=3, n_label=1, m=1, layers=(2, 3, 2), connectivity="line"),
        T=4,
        complex_noise=False,
        coupled_pairs=True,
        seed=42,
    )
    doc = serialization.training_config_to_dict(cfg)
    assert serialization.training_config_from_dict(doc) == cfg


def test_dumps_is_sorted_and_newline_terminated():
    text = serialization.dumps({"b": 1, "a": [1.5, 2]})
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")
