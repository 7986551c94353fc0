import struct

import numpy as np
import pytest

from qdmlab import data
from qdmlab.errors import ConfigError, EncodingError, FormatError, ShapeError


def make_idx_images(images):
    images = np.asarray(images, dtype=np.uint8)
    n, h, w = images.shape
    return struct.pack(">IIII", 2051, n, h, w) + images.tobytes()


def make_idx_labels(labels):
    labels = np.asarray(labels, dtype=np.uint8)
    return struct.pack(">II", 2049, labels.size) + labels.tobytes()


def test_idx_image_roundtrip(rng):
    images = rng.integers(0, 256, size=(3, 4, 5), dtype=np.uint8)
    parsed = data.parse_idx_images(make_idx_images(images))
    np.testing.assert_array_equal(parsed, images)


def test_idx_label_roundtrip():
    labels = np.array([0, 3, 9, 1], dtype=np.uint8)
    parsed = data.parse_idx_labels(make_idx_labels(labels))
    np.testing.assert_array_equal(parsed, labels)
    assert parsed.dtype == np.int64


def test_idx_error_handling(rng):
    images = rng.integers(0, 256, size=(2, 3, 3), dtype=np.uint8)
    blob = make_idx_images(images)
    with pytest.raises(FormatError):
        data.parse_idx_images(blob[:10])
    with pytest.raises(FormatError):
        data.parse_idx_images(blob[:-1])
    with pytest.raises(FormatError):
        data.parse_idx_images(b"\x00\x00\x08\x04" + blob[4:])
    with pytest.raises(FormatError):
        data.parse_idx_labels(make_idx_labels([1, 2])[:-1])
    with pytest.raises(FormatError):
        data.parse_idx_labels(make_idx_images(images))


def test_load_mnist_layout(tmp_path, rng):
    images = rng.integers(0, 256, size=(4, 28, 28), dtype=np.uint8)
    labels = np.array([0, 1, 2, 3], dtype=np.uint8)
    (tmp_path / "train-images-idx3-ubyte").write_bytes(make_idx_images(images))
    (tmp_path / "train-labels-idx1-ubyte").write_bytes(make_idx_labels(labels))
    ds = data.load_mnist(tmp_path, "train")
    assert len(ds) == 4 and ds.split == "train"
    assert ds.images.max() <= 1.0 and ds.images.min() >= 0.0
    np.testing.assert_allclose(ds.images[0], images[0] / 255.0)
    with pytest.raises(ConfigError):
        data.load_mnist(tmp_path, "validation")


def bilinear_reference(image, out_h, out_w):
    """Independent scalar-loop implementation of pixel-center bilinear resampling."""
    in_h, in_w = image.shape
    out = np.zeros((out_h, out_w))
    for i in range(out_h):
        for j in range(out_w):
            y = min(max((i + 0.5) * in_h / out_h - 0.5, 0.0), in_h - 1.0)
            x = min(max((j + 0.5) * in_w / out_w - 0.5, 0.0), in_w - 1.0)
            y0, x0 = int(np.floor(y)), int(np.floor(x))
            y1, x1 = min(y0 + 1, in_h - 1), min(x0 + 1, in_w - 1)
            dy, dx = y - y0, x - x0
            out[i, j] = (
                image[y0, x0] * (1 - dy) * (1 - dx)
                + image[y0, x1] * (1 - dy) * dx
                + image[y1, x0] * dy * (1 - dx)
                + image[y1, x1] * dy * dx
            )
    return out


def test_bilinear_resize_matches_reference(rng):
    image = rng.random((7, 9))
    for out_h, out_w in ((5, 5), (14, 18), (7, 9), (28, 28)):
        got = data.bilinear_resize(image, out_h, out_w)
        np.testing.assert_allclose(got, bilinear_reference(image, out_h, out_w), atol=1e-12)


def test_bilinear_resize_identity_and_constant(rng):
    image = rng.random((6, 6))
    np.testing.assert_allclose(data.bilinear_resize(image, 6, 6), image, atol=1e-12)
    flat = np.full((4, 4), 0.7)
    np.testing.assert_allclose(data.bilinear_resize(flat, 9, 3), 0.7, atol=1e-12)
    with pytest.raises(ShapeError):
        data.bilinear_resize(np.zeros(5), 2, 2)


def test_downsample_16(rng):
    image = rng.random((28, 28))
    out = data.downsample_16(image)
    assert out.shape == (16, 16)
    with pytest.raises(ShapeError):
        data.downsample_16(rng.random((14, 14)))


def test_filter_digits_and_unit_vector(rng):
    ds = data.Dataset(images=rng.random((6, 2, 2)), labels=np.array([0, 1, 2, 0, 1, 2]))
    kept = data.filter_digits(ds, [0, 2])
    assert set(kept.labels.tolist()) == {0, 2} and len(kept) == 4
    v = data.to_unit_vector(ds.images[0])
    assert v.shape == (4,)
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    with pytest.raises(EncodingError):
        data.to_unit_vector(np.zeros((2, 2)))


def test_write_pgm_golden_bytes(tmp_path):
    image = np.array([[0.0, 1.0], [0.5, 2.0]])
    path = tmp_path / "img.pgm"
    data.write_pgm(image, path)
    assert path.read_bytes() == b"P5\n2 2\n255\n" + bytes([0, 255, 128, 255])
    with pytest.raises(ShapeError):
        data.write_pgm(np.zeros(4), path)


def test_write_csv_golden_bytes(tmp_path):
    path = tmp_path / "out.csv"
    data.write_csv([(1, 0.5), (2, 0.25)], path, header=["epoch", "loss"])
    assert path.read_bytes() == b"epoch,loss\r\n1,0.5\r\n2,0.25\r\n"


def test_demo_digits(demo_digits, demo_digits_raw):
    assert demo_digits.images.shape[1:] == (28, 28)
    assert demo_digits_raw.images.shape[1:] == (8, 8)
    assert demo_digits.images.min() >= 0.0 and demo_digits.images.max() <= 1.0
    assert set(np.unique(demo_digits.labels)) == set(range(10))
    assert len(demo_digits) == len(demo_digits_raw)
